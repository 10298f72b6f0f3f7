#include "airage/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "airage/errors.hpp"
#include "airage/kv.hpp"
#include "airage/log.hpp"

namespace airage {

const std::vector<std::string> kQarCsvHeader = {
    "tail_id", "flight_id", "date",  "t_s",     "pressure_alt_ft", "tas_kt",
    "ground_speed_kt", "vertical_speed_fpm", "sat_k", "mass_kg", "age_yr", "fuel_flow_kgh"};

const std::vector<std::string> kPrepCsvHeader = {
    "tail_id", "flight_id", "date",  "t_s",     "pressure_alt_ft", "tas_kt",
    "dtas_dt_ktps", "ground_speed_kt", "vertical_speed_fpm", "sat_k", "mass_kg",
    "age_yr", "fuel_flow_kgh"};

void SavGolConfig::validate() const {
    if (window_len < 1 || window_len % 2 == 0)
        throw data_error("savgol window_len must be odd and positive");
    if (poly_order < 0) throw data_error("savgol poly_order must be >= 0");
    if (window_len < poly_order + 2)
        throw data_error("savgol window_len must be >= poly_order + 2");
}

void SplitConfig::validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw data_error("train_fraction must be in (0, 1)");
}

std::int64_t parse_iso_date(const std::string& iso_day) {
    int y = 0, m = 0, d = 0;
    if (std::sscanf(iso_day.c_str(), "%d-%d-%d", &y, &m, &d) != 3)
        throw data_error("bad ISO date: " + iso_day);
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw data_error("invalid calendar date: " + iso_day);
    return sys_days{ymd}.time_since_epoch().count();
}

std::string format_iso_date(std::int64_t days_since_epoch) {
    using namespace std::chrono;
    const year_month_day ymd{sys_days{days{days_since_epoch}}};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r')
        fields.back().pop_back();
    return fields;
}

double parse_number(const std::string& text, const std::string& column, std::size_t line_no) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw data_error("unparseable number in column " + column + " at line " +
                         std::to_string(line_no) + ": '" + text + "'");
    return v;
}

bool sample_in_range(const FlightSample& s) {
    if (s.pressure_alt < -1000.0 || s.pressure_alt > 45000.0) return false;
    if (s.tas < 0.0 || s.tas > 600.0) return false;
    if (s.mass < 30000.0 || s.mass > 80000.0) return false;
    if (s.age < 0.0) return false;
    if (s.sat < 180.0 || s.sat > 330.0) return false;
    if (s.fuel_flow.has_value() && *s.fuel_flow < 0.0) return false;
    return true;
}

bool sample_finite(const FlightSample& s) {
    const bool core = std::isfinite(s.t) && std::isfinite(s.pressure_alt) &&
                      std::isfinite(s.tas) && std::isfinite(s.vertical_speed) &&
                      std::isfinite(s.ground_speed) && std::isfinite(s.mass) &&
                      std::isfinite(s.age) && std::isfinite(s.sat);
    if (!core) return false;
    if (s.dtas_dt.has_value() && !std::isfinite(*s.dtas_dt)) return false;
    if (s.fuel_flow.has_value() && !std::isfinite(*s.fuel_flow)) return false;
    return true;
}

} // namespace

Dataset parse_qar_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open CSV file: " + path);

    std::string header_line;
    if (!std::getline(in, header_line)) throw data_error("empty CSV file: " + path);
    const std::vector<std::string> header = split_line(header_line);

    bool has_accel = false;
    if (header == kQarCsvHeader) {
        has_accel = false;
    } else if (header == kPrepCsvHeader) {
        has_accel = true;
    } else {
        // Name the first expected column that is absent, per the schema
        // error contract; fall back to a generic message.
        for (const auto& col : kQarCsvHeader) {
            if (std::find(header.begin(), header.end(), col) == header.end())
                throw schema_error("CSV " + path + " is missing column '" + col + "'");
        }
        throw schema_error("CSV " + path + " header does not match the QAR schema");
    }
    const std::size_t n_cols = header.size();

    std::vector<FlightSample> rows;
    std::size_t rejected = 0;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> f = split_line(line);
        if (f.size() != n_cols)
            throw data_error("wrong field count at line " + std::to_string(line_no) +
                             " in " + path);
        FlightSample s;
        std::size_t i = 0;
        s.tail_id = f[i++];
        s.flight_id = f[i++];
        s.date_days = parse_iso_date(f[i++]);
        s.t = parse_number(f[i], "t_s", line_no); ++i;
        s.pressure_alt = parse_number(f[i], "pressure_alt_ft", line_no); ++i;
        s.tas = parse_number(f[i], "tas_kt", line_no); ++i;
        if (has_accel) {
            if (!f[i].empty()) s.dtas_dt = parse_number(f[i], "dtas_dt_ktps", line_no);
            ++i;
        }
        s.ground_speed = parse_number(f[i], "ground_speed_kt", line_no); ++i;
        s.vertical_speed = parse_number(f[i], "vertical_speed_fpm", line_no); ++i;
        s.sat = parse_number(f[i], "sat_k", line_no); ++i;
        s.mass = parse_number(f[i], "mass_kg", line_no); ++i;
        s.age = parse_number(f[i], "age_yr", line_no); ++i;
        if (!f[i].empty()) s.fuel_flow = parse_number(f[i], "fuel_flow_kgh", line_no);

        if (!sample_finite(s) || !sample_in_range(s)) {
            ++rejected;
            continue;
        }
        rows.push_back(std::move(s));
    }
    if (rows.empty()) throw data_error("no valid samples in CSV file: " + path);

    // Canonical order: (tail_id, flight_id) lexicographic, time within flight.
    std::stable_sort(rows.begin(), rows.end(), [](const FlightSample& a, const FlightSample& b) {
        if (a.tail_id != b.tail_id) return a.tail_id < b.tail_id;
        if (a.flight_id != b.flight_id) return a.flight_id < b.flight_id;
        return a.t < b.t;
    });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].tail_id == rows[i - 1].tail_id &&
            rows[i].flight_id == rows[i - 1].flight_id && !(rows[i].t > rows[i - 1].t))
            throw data_error("duplicate timestamp t=" + std::to_string(rows[i].t) +
                             " in flight " + rows[i].flight_id);
    }

    Dataset ds;
    ds.samples = std::move(rows);
    ds.provenance = "csv:" + path;
    if (rejected > 0) {
        warn("parse_qar_csv: dropped " + std::to_string(rejected) +
             " row(s) with non-finite or out-of-range values in " + path);
        ds.provenance += " (dropped " + std::to_string(rejected) + " rows)";
    }
    return ds;
}

void write_qar_csv(const Dataset& ds, const std::string& path, bool include_accel) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write CSV file: " + path);
    const auto& header = include_accel ? kPrepCsvHeader : kQarCsvHeader;
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? ',' : '\n');

    std::string line;
    for (const auto& s : ds.samples) {
        line.clear();
        line += s.tail_id;
        line += ',';
        line += s.flight_id;
        line += ',';
        line += format_iso_date(s.date_days);
        line += ',';
        line += format_double(s.t);
        line += ',';
        line += format_double(s.pressure_alt);
        line += ',';
        line += format_double(s.tas);
        line += ',';
        if (include_accel) {
            if (!s.dtas_dt.has_value())
                throw data_error("write_qar_csv: dtas_dt missing, run preprocessing first");
            line += format_double(*s.dtas_dt);
            line += ',';
        }
        line += format_double(s.ground_speed);
        line += ',';
        line += format_double(s.vertical_speed);
        line += ',';
        line += format_double(s.sat);
        line += ',';
        line += format_double(s.mass);
        line += ',';
        line += format_double(s.age);
        line += ',';
        if (s.fuel_flow.has_value()) line += format_double(*s.fuel_flow);
        line += '\n';
        out << line;
    }
}

namespace {

// Solve the small symmetric system G x = rhs in place (partial pivoting).
// G is (n x n) row-major, n <= poly_order + 1.
std::vector<double> solve_dense(std::vector<double> g, std::vector<double> rhs, int n) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(g[r * n + col]) > std::fabs(g[pivot * n + col])) pivot = r;
        if (std::fabs(g[pivot * n + col]) < 1e-300)
            throw numeric_error("savgol: singular normal equations");
        if (pivot != col) {
            for (int k = 0; k < n; ++k) std::swap(g[col * n + k], g[pivot * n + k]);
            std::swap(rhs[col], rhs[pivot]);
        }
        const double inv = 1.0 / g[col * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double factor = g[r * n + col] * inv;
            if (factor == 0.0) continue;
            for (int k = col; k < n; ++k) g[r * n + k] -= factor * g[col * n + k];
            rhs[r] -= factor * rhs[col];
        }
    }
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double acc = rhs[r];
        for (int k = r + 1; k < n; ++k) acc -= g[r * n + k] * x[k];
        x[r] = acc / g[r * n + r];
    }
    return x;
}

// Least-squares weights so that sum_j w_j y[first+j] is the degree-p fit
// over abscissae x_j = first+j - eval evaluated at the point `eval`.
std::vector<double> fit_weights(int first, int last, int eval, int poly_order) {
    const int m = last - first + 1;
    const int n = poly_order + 1;
    // Gram matrix G_{kl} = sum_j x_j^(k+l), moments b_k(j) = x_j^k.
    std::vector<double> gram(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<std::vector<double>> powers(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        const double x = static_cast<double>(first + j - eval);
        auto& p = powers[static_cast<std::size_t>(j)];
        p.resize(static_cast<std::size_t>(2 * n - 1));
        p[0] = 1.0;
        for (int k = 1; k < 2 * n - 1; ++k) p[k] = p[k - 1] * x;
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) gram[k * n + l] += p[static_cast<std::size_t>(k + l)];
    }
    // Weight for sample j: e_0^T (G^-1 A^T)_j with A_{jk} = x_j^k. Solving
    // G c = e_0 gives the fitted value at x=0 as sum_j (sum_k c_k x_j^k) y_j.
    std::vector<double> e0(static_cast<std::size_t>(n), 0.0);
    e0[0] = 1.0;
    const std::vector<double> c = solve_dense(gram, e0, n);
    std::vector<double> w(static_cast<std::size_t>(m), 0.0);
    for (int j = 0; j < m; ++j) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += c[static_cast<std::size_t>(k)] *
                                           powers[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
        w[static_cast<std::size_t>(j)] = acc;
    }
    return w;
}

} // namespace

std::vector<double> savgol_smooth(const std::vector<double>& series, const SavGolConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(series.size());
    const int half = cfg.window_len / 2;
    if (n < cfg.window_len)
        throw data_error("savgol: series length " + std::to_string(n) +
                         " shorter than window " + std::to_string(cfg.window_len));

    std::vector<double> out(series.size(), 0.0);
    const std::vector<double> center_w = fit_weights(-half, half, 0, cfg.poly_order);
    for (int i = half; i < n - half; ++i) {
        double acc = 0.0;
        for (int j = 0; j < cfg.window_len; ++j)
            acc += center_w[static_cast<std::size_t>(j)] * series[static_cast<std::size_t>(i - half + j)];
        out[static_cast<std::size_t>(i)] = acc;
    }
    // Shrunken asymmetric windows at the edges, same polynomial order. The
    // window is widened toward the interior when needed to keep at least
    // poly_order + 1 points.
    for (int i = 0; i < half; ++i) {
        const int last = std::max(i + half, cfg.poly_order);
        const std::vector<double> w = fit_weights(0, last, i, cfg.poly_order);
        double acc = 0.0;
        for (int j = 0; j <= last; ++j)
            acc += w[static_cast<std::size_t>(j)] * series[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = acc;
    }
    for (int i = n - half; i < n; ++i) {
        const int first = std::min(i - half, n - 1 - cfg.poly_order);
        const std::vector<double> w = fit_weights(first, n - 1, i, cfg.poly_order);
        double acc = 0.0;
        for (int j = first; j < n; ++j)
            acc += w[static_cast<std::size_t>(j - first)] * series[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

std::vector<double> derive_acceleration(const std::vector<double>& tas_smoothed, double dt_s) {
    const std::size_t n = tas_smoothed.size();
    if (n < 3) throw data_error("derive_acceleration: need at least 3 samples");
    std::vector<double> accel(n, 0.0);
    accel[0] = (tas_smoothed[1] - tas_smoothed[0]) / dt_s;
    for (std::size_t i = 1; i + 1 < n; ++i)
        accel[i] = (tas_smoothed[i + 1] - tas_smoothed[i - 1]) / (2.0 * dt_s);
    accel[n - 1] = (tas_smoothed[n - 1] - tas_smoothed[n - 2]) / dt_s;
    return accel;
}

Dataset preprocess_dataset(const Dataset& ds, const SavGolConfig& cfg) {
    cfg.validate();
    Dataset out;
    out.samples = ds.samples;
    out.provenance = ds.provenance + " | savgol(" + std::to_string(cfg.window_len) + "," +
                     std::to_string(cfg.poly_order) + ")";
    for (const FlightSpan& span : flight_spans(out)) {
        std::vector<double> tas(span.size()), vs(span.size());
        for (std::size_t i = 0; i < span.size(); ++i) {
            tas[i] = out.samples[span.begin + i].tas;
            vs[i] = out.samples[span.begin + i].vertical_speed;
        }
        const std::vector<double> tas_s = savgol_smooth(tas, cfg);
        const std::vector<double> vs_s = savgol_smooth(vs, cfg);
        const std::vector<double> accel = derive_acceleration(tas_s, kSampleSpacingS);
        for (std::size_t i = 0; i < span.size(); ++i) {
            auto& s = out.samples[span.begin + i];
            s.tas = tas_s[i];
            s.vertical_speed = vs_s[i];
            s.dtas_dt = accel[i];
        }
    }
    return out;
}

SplitResult temporal_split(const Dataset& ds, const SplitConfig& cfg) {
    cfg.validate();

    struct FlightKey {
        std::string tail;
        std::string flight;
        std::int64_t date;
    };
    // First/last flight date per tail.
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> tail_span;
    std::map<std::string, std::size_t> tail_flights;
    const auto spans = flight_spans(ds);
    for (const auto& span : spans) {
        const auto& s = ds.samples[span.begin];
        auto it = tail_span.find(s.tail_id);
        if (it == tail_span.end()) {
            tail_span.emplace(s.tail_id, std::make_pair(s.date_days, s.date_days));
        } else {
            it->second.first = std::min(it->second.first, s.date_days);
            it->second.second = std::max(it->second.second, s.date_days);
        }
        ++tail_flights[s.tail_id];
    }

    SplitResult result;
    result.train.provenance = ds.provenance + " | split:train";
    result.test.provenance = ds.provenance + " | split:test";
    for (const auto& span : spans) {
        const auto& first = ds.samples[span.begin];
        const auto [d0, d1] = tail_span.at(first.tail_id);
        bool to_train;
        if (tail_flights.at(first.tail_id) <= 1) {
            warn("temporal_split: tail " + first.tail_id +
                 " has a single flight, assigned to train");
            to_train = true;
        } else if (d1 == d0) {
            warn("temporal_split: tail " + first.tail_id +
                 " has a zero-day calendar span, assigned to train");
            to_train = true;
        } else {
            const double cutoff = static_cast<double>(d0) +
                                  cfg.train_fraction * static_cast<double>(d1 - d0);
            to_train = static_cast<double>(first.date_days) <= cutoff;
        }
        auto& dst = to_train ? result.train : result.test;
        dst.samples.insert(dst.samples.end(), ds.samples.begin() + static_cast<std::ptrdiff_t>(span.begin),
                           ds.samples.begin() + static_cast<std::ptrdiff_t>(span.end));
    }
    if (result.test.samples.empty())
        warn("temporal_split: test set is empty");
    return result;
}

} // namespace airage
