#include "airage/projection.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "airage/errors.hpp"
#include "airage/kv.hpp"

namespace airage {

void FleetSpec::validate() const {
    if (ages_years.empty()) throw data_error("fleet spec: needs at least one tail age");
    for (double a : ages_years)
        if (!(a >= 0.0) || !std::isfinite(a))
            throw data_error("fleet spec: tail ages must be >= 0");
    if (!(annual_base_fuel_t > 0.0))
        throw data_error("fleet spec: annual_base_fuel_t must be > 0");
    if (horizon_years < 1) throw data_error("fleet spec: horizon_years must be >= 1");
}

void save_fleet_spec(const FleetSpec& f, const std::string& path) {
    f.validate();
    KvMap kv;
    std::string ages;
    for (std::size_t i = 0; i < f.ages_years.size(); ++i) {
        if (i > 0) ages += ",";
        ages += format_double(f.ages_years[i]);
    }
    kv["ages"] = ages;
    kv["annual_base_fuel_t"] = format_double(f.annual_base_fuel_t);
    kv["horizon_years"] = std::to_string(f.horizon_years);
    write_kv_file(kv, path);
}

FleetSpec load_fleet_spec(const std::string& path) {
    const KvMap kv = read_kv_file(path);
    FleetSpec f;
    const auto it = kv.find("ages");
    if (it != kv.end()) f.ages_years = parse_double_list(it->second);
    f.annual_base_fuel_t = kv_double_or(kv, "annual_base_fuel_t", f.annual_base_fuel_t);
    f.horizon_years =
        static_cast<int>(kv_double_or(kv, "horizon_years", f.horizon_years));
    f.validate();
    return f;
}

double ReferenceCurve::coeff(double age_years) const {
    return 1.0 + a_ref * std::log(1.0 + age_years);
}

AgeCurveFn curve_fn(const AgeCoeffModel& m) {
    return [m](double age) { return m.coeff(age); };
}

AgeCurveFn curve_fn(const CoeffCurve& c) {
    return [c](double age) { return c.eval(age); };
}

std::vector<ProjectionRow> project(const FleetSpec& fleet, const AgeCurveFn& model_curve,
                                   const ReferenceCurve& ref) {
    fleet.validate();
    if (!(ref.a_ref >= 0.0)) throw data_error("reference curve: a_ref must be >= 0");

    std::vector<ProjectionRow> rows;
    rows.reserve(static_cast<std::size_t>(fleet.horizon_years));
    double cum_model = 0.0;
    double cum_ref = 0.0;
    for (int k = 1; k <= fleet.horizon_years; ++k) {
        double annual_model = 0.0;
        double annual_ref = 0.0;
        for (double age : fleet.ages_years) {
            annual_model += fleet.annual_base_fuel_t * model_curve(age + k);
            annual_ref += fleet.annual_base_fuel_t * ref.coeff(age + k);
        }
        cum_model += annual_model;
        cum_ref += annual_ref;
        rows.push_back({k, cum_model, cum_ref, cum_ref - cum_model});
    }
    return rows;
}

void projection_report(
    const std::vector<std::pair<std::string, std::vector<ProjectionRow>>>& results,
    const std::string& path) {
    if (results.empty()) throw data_error("projection report: no results");
    std::ofstream out(path);
    if (!out) throw data_error("cannot open " + path + " for writing");
    out << "year,model_name,cumulative_model_t,cumulative_ref_t,diff_t\n";
    for (const auto& [name, rows] : results) {
        for (const ProjectionRow& r : rows) {
            out << r.year << ',' << name << ',' << format_double(r.cumulative_model_t)
                << ',' << format_double(r.cumulative_ref_t) << ','
                << format_double(r.diff_t) << '\n';
        }
    }
    if (!out) throw data_error("write to " + path + " failed");
}

std::vector<std::pair<std::string, std::vector<ProjectionRow>>> load_projection_report(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw schema_error("projection report " + path + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "year,model_name,cumulative_model_t,cumulative_ref_t,diff_t")
        throw schema_error("projection report " + path + ": unexpected header");

    std::vector<std::pair<std::string, std::vector<ProjectionRow>>> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t pos = line.find(',', start);
            if (pos == std::string::npos) {
                cells.push_back(line.substr(start));
                break;
            }
            cells.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        if (cells.size() != 5)
            throw data_error(path + ":" + std::to_string(lineno) + ": expected 5 columns");

        const auto num = [&](const std::string& text, const char* col) {
            double v = 0.0;
            const auto [ptr, ec] =
                std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec != std::errc{} || ptr != text.data() + text.size())
                throw data_error(path + ":" + std::to_string(lineno) +
                                 ": unparseable " + std::string(col));
            return v;
        };

        ProjectionRow r;
        r.year = static_cast<int>(num(cells[0], "year"));
        r.cumulative_model_t = num(cells[2], "cumulative_model_t");
        r.cumulative_ref_t = num(cells[3], "cumulative_ref_t");
        r.diff_t = num(cells[4], "diff_t");

        if (out.empty() || out.back().first != cells[1]) out.push_back({cells[1], {}});
        out.back().second.push_back(r);
    }
    if (out.empty()) throw data_error("projection report " + path + " has no rows");
    return out;
}

} // namespace airage
