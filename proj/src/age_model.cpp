#include "airage/age_model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "airage/errors.hpp"
#include "airage/kv.hpp"
#include "airage/log.hpp"

namespace airage {

namespace {

double parse_number(const std::string& text, const std::string& path, std::size_t line_no,
                    const std::string& column) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw data_error(path + ":" + std::to_string(line_no) + ": unparseable " + column +
                         " value '" + text + "'");
    }
    return v;
}

} // namespace

double AgeCoeffModel::coeff(double age_years) const {
    if (age_years < 0.0) {
        throw numeric_error("age must be non-negative, got " + format_double(age_years));
    }
    return 1.0 + a * std::log(age_years + 1.0);
}

double seymour_coeff(double age_years) {
    if (age_years < 0.0) {
        throw numeric_error("age must be non-negative, got " + format_double(age_years));
    }
    const double denom = 100.0 - 1.28 * std::log(age_years + 1.0);
    if (denom <= 0.0) {
        throw numeric_error("seymour_coeff denominator non-positive at age " +
                            format_double(age_years));
    }
    return 100.0 / denom;
}

double apply_coeff(double ff_baseline_kgh, double age_years, const AgeCoeffModel& m) {
    return std::max(0.0, ff_baseline_kgh * m.coeff(age_years));
}

AgeCoeffModel fit_log_coeff(const std::vector<double>& observed_kgh,
                            const std::vector<double>& baseline_pred_kgh,
                            const std::vector<double>& ages_years) {
    const std::size_t n = observed_kgh.size();
    if (baseline_pred_kgh.size() != n || ages_years.size() != n) {
        throw data_error("fit_log_coeff: length mismatch (obs " + std::to_string(n) +
                         ", pred " + std::to_string(baseline_pred_kgh.size()) +
                         ", ages " + std::to_string(ages_years.size()) + ")");
    }
    if (n < 2) {
        throw data_error("fit_log_coeff: need at least 2 points, got " + std::to_string(n));
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(baseline_pred_kgh[i] > 0.0)) {
            throw data_error("fit_log_coeff: baseline prediction must be positive, got " +
                             format_double(baseline_pred_kgh[i]) + " at index " +
                             std::to_string(i));
        }
        if (ages_years[i] < 0.0) {
            throw data_error("fit_log_coeff: negative age " + format_double(ages_years[i]) +
                             " at index " + std::to_string(i));
        }
        const double lb = std::log(ages_years[i] + 1.0) * baseline_pred_kgh[i];
        num += lb * (observed_kgh[i] - baseline_pred_kgh[i]);
        den += lb * lb;
    }
    AgeCoeffModel m;
    if (den == 0.0) {
        warn("fit_log_coeff: all ages are zero, slope is unidentifiable; returning a = 0");
        m.a = 0.0;
        return m;
    }
    m.a = num / den;
    if (m.a < 0.0 || m.a > 0.1) {
        warn("fit_log_coeff: calibrated slope a = " + format_double(m.a) +
             " is outside the plausible range [0, 0.1]");
    }
    return m;
}

double CoeffCurve::eval(double age_years) const {
    if (ages.size() != coeffs.size() || ages.size() < 2) {
        throw data_error("coefficient curve needs at least 2 grid points");
    }
    if (age_years < ages.front() || age_years > ages.back()) {
        warn("coefficient curve evaluated at age " + format_double(age_years) +
             " outside grid [" + format_double(ages.front()) + ", " +
             format_double(ages.back()) + "]; extrapolating");
    }
    std::size_t hi = 1;
    while (hi + 1 < ages.size() && ages[hi] < age_years) {
        ++hi;
    }
    const std::size_t lo = hi - 1;
    const double span = ages[hi] - ages[lo];
    if (span <= 0.0) {
        throw data_error("coefficient curve grid is not strictly increasing");
    }
    const double t = (age_years - ages[lo]) / span;
    return coeffs[lo] + t * (coeffs[hi] - coeffs[lo]);
}

CoeffCurve extract_model_coeff_curve(const AgedPredictor& predictor,
                                     const std::vector<FlightSample>& probe_samples,
                                     const std::vector<double>& age_grid) {
    if (probe_samples.empty()) {
        throw data_error("coefficient curve extraction needs probe samples");
    }
    if (age_grid.size() < 2) {
        throw data_error("coefficient curve extraction needs at least 2 grid ages");
    }

    std::vector<double> base;
    std::vector<std::size_t> keep;
    base.reserve(probe_samples.size());
    std::size_t dropped = 0;
    for (std::size_t i = 0; i < probe_samples.size(); ++i) {
        const double p0 = predictor(probe_samples[i], 0.0);
        if (p0 <= 0.0 || !std::isfinite(p0)) {
            ++dropped;
            continue;
        }
        keep.push_back(i);
        base.push_back(p0);
    }
    if (dropped > 0) {
        warn("coefficient curve extraction excluded " + std::to_string(dropped) +
             " probe(s) with non-positive age-0 prediction");
    }
    if (keep.empty()) {
        throw data_error("coefficient curve extraction: every probe predicted zero at age 0");
    }

    CoeffCurve curve;
    curve.ages = age_grid;
    curve.coeffs.reserve(age_grid.size());
    for (const double g : age_grid) {
        double acc = 0.0;
        for (std::size_t j = 0; j < keep.size(); ++j) {
            acc += predictor(probe_samples[keep[j]], g) / base[j];
        }
        curve.coeffs.push_back(acc / static_cast<double>(keep.size()));
    }
    return curve;
}

void save_age_coeff(const AgeCoeffModel& m, const std::string& path) {
    KvMap kv;
    kv["model"] = "log_coeff";
    kv["a"] = format_double(m.a);
    write_kv_file(kv, path);
}

AgeCoeffModel load_age_coeff(const std::string& path) {
    const KvMap kv = read_kv_file(path);
    const std::string model = kv_string_or(kv, "model", "");
    if (model != "log_coeff") {
        throw schema_error("age model file " + path + ": expected model = log_coeff, got '" +
                           model + "'");
    }
    AgeCoeffModel m;
    m.a = kv_double(kv, "a");
    return m;
}

void save_coeff_curve(const CoeffCurve& c, const std::string& path) {
    if (c.ages.size() != c.coeffs.size()) {
        throw data_error("coefficient curve has mismatched grid and value lengths");
    }
    std::ofstream out(path);
    if (!out) {
        throw data_error("cannot open " + path + " for writing");
    }
    out << "age_yr,coeff\n";
    for (std::size_t i = 0; i < c.ages.size(); ++i) {
        out << format_double(c.ages[i]) << ',' << format_double(c.coeffs[i]) << '\n';
    }
    if (!out) {
        throw data_error("write to " + path + " failed");
    }
}

CoeffCurve load_coeff_curve(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw data_error("cannot open " + path);
    }
    std::string line;
    const auto strip_cr = [](std::string& s) {
        if (!s.empty() && s.back() == '\r') s.pop_back();
    };
    if (!std::getline(in, line)) {
        throw schema_error("coefficient curve file " + path + " is empty");
    }
    strip_cr(line);
    if (line != "age_yr,coeff") {
        throw schema_error("coefficient curve file " + path +
                           ": expected header 'age_yr,coeff'");
    }
    CoeffCurve c;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw data_error(path + ":" + std::to_string(lineno) + ": expected 'age,coeff'");
        }
        c.ages.push_back(parse_number(line.substr(0, comma), path, lineno, "age_yr"));
        c.coeffs.push_back(parse_number(line.substr(comma + 1), path, lineno, "coeff"));
    }
    if (c.ages.size() < 2) {
        throw data_error("coefficient curve file " + path + " needs at least 2 rows");
    }
    for (std::size_t i = 1; i < c.ages.size(); ++i) {
        if (!(c.ages[i] > c.ages[i - 1])) {
            throw data_error("coefficient curve file " + path +
                             ": ages must be strictly increasing");
        }
    }
    return c;
}

} // namespace airage
