#include "airage/evaluation.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "airage/errors.hpp"
#include "airage/kernels.hpp"
#include "airage/kv.hpp"

namespace airage {

namespace {

constexpr double kMapeTargetFloorKgh = 1.0;

nlohmann::json metric_set_json(const MetricSet& m) {
    return {{"mae_kgh", m.mae},         {"mape", m.mape},
            {"me_kgh", m.me},           {"mse_kgh2", m.mse},
            {"bias_ratio", m.bias_ratio}, {"n_samples", m.n_samples},
            {"mape_excluded", m.mape_excluded}};
}

void metric_csv_cells(std::ofstream& out, const MetricSet& m) {
    out << m.n_samples << ',' << format_double(m.mae) << ','
        << format_double(m.mape * 100.0) << ',' << format_double(m.me) << ','
        << format_double(m.mse) << ',' << format_double(m.bias_ratio) << ','
        << m.mape_excluded;
}

} // namespace

MetricSet metrics(const std::vector<double>& preds, const std::vector<double>& targets) {
    if (preds.size() != targets.size())
        throw data_error("metrics: length mismatch (" + std::to_string(preds.size()) +
                         " preds vs " + std::to_string(targets.size()) + " targets)");
    if (preds.empty()) throw data_error("metrics: empty input");

    const std::size_t n = preds.size();
    MetricSet m;
    m.n_samples = n;
    m.mae = kernels::sum_abs_diff(preds.data(), targets.data(), n) / static_cast<double>(n);
    m.me = kernels::sum_diff(preds.data(), targets.data(), n) / static_cast<double>(n);
    m.mse = kernels::sum_sq_diff(preds.data(), targets.data(), n) / static_cast<double>(n);
    m.bias_ratio = m.mse > 0.0 ? (m.me * m.me) / m.mse : 0.0;

    double ape = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (targets[i] <= kMapeTargetFloorKgh) {
            ++m.mape_excluded;
            continue;
        }
        ape += std::abs(preds[i] - targets[i]) / targets[i];
        ++counted;
    }
    m.mape = counted > 0 ? ape / static_cast<double>(counted) : 0.0;
    return m;
}

std::vector<AgeBinMetrics> metrics_by_age(const std::vector<double>& preds,
                                          const std::vector<FlightSample>& samples,
                                          double bin_width_years) {
    if (preds.size() != samples.size())
        throw data_error("metrics_by_age: length mismatch");
    if (preds.empty()) throw data_error("metrics_by_age: empty input");
    if (!(bin_width_years > 0.0)) throw data_error("metrics_by_age: bin width must be > 0");

    std::map<int, std::pair<std::vector<double>, std::vector<double>>> buckets;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!samples[i].fuel_flow.has_value())
            throw data_error("metrics_by_age: sample without fuel_flow target");
        const int bin = static_cast<int>(std::floor(samples[i].age / bin_width_years));
        auto& b = buckets[bin];
        b.first.push_back(preds[i]);
        b.second.push_back(*samples[i].fuel_flow);
    }

    std::vector<AgeBinMetrics> out;
    out.reserve(buckets.size());
    for (const auto& [bin, series] : buckets) {
        AgeBinMetrics abm;
        abm.bin = bin;
        abm.metrics = metrics(series.first, series.second);
        abm.low_confidence = abm.metrics.n_samples < kLowConfidenceBinCount;
        out.push_back(std::move(abm));
    }
    return out;
}

double total_consumption(const std::vector<double>& ff_kgh, double dt_s) {
    if (!(dt_s > 0.0)) throw data_error("total_consumption: dt must be > 0");
    return kernels::sum(ff_kgh.data(), ff_kgh.size()) * dt_s / 3600.0 / 1000.0;
}

EvalReport evaluate(const std::vector<double>& preds,
                    const std::vector<FlightSample>& samples,
                    double bin_width_years, double dt_s) {
    if (preds.size() != samples.size()) throw data_error("evaluate: length mismatch");
    std::vector<double> targets;
    targets.reserve(samples.size());
    for (const FlightSample& s : samples) {
        if (!s.fuel_flow.has_value())
            throw data_error("evaluate: sample without fuel_flow target");
        targets.push_back(*s.fuel_flow);
    }

    EvalReport r;
    r.overall = metrics(preds, targets);
    r.per_age_bin = metrics_by_age(preds, samples, bin_width_years);
    r.total_consumption_pred_t = total_consumption(preds, dt_s);
    r.total_consumption_true_t = total_consumption(targets, dt_s);
    r.diff_t = r.total_consumption_pred_t - r.total_consumption_true_t;
    r.diff_ratio = r.total_consumption_true_t != 0.0
                       ? r.diff_t / r.total_consumption_true_t
                       : 0.0;
    r.n_samples = preds.size();
    return r;
}

std::vector<ConsumptionRow> consumption_table(
    const std::vector<std::pair<std::string, std::vector<double>>>& model_preds,
    const std::vector<FlightSample>& test_samples, double dt_s) {
    std::vector<double> targets;
    targets.reserve(test_samples.size());
    for (const FlightSample& s : test_samples) {
        if (!s.fuel_flow.has_value())
            throw data_error("consumption_table: sample without fuel_flow target");
        targets.push_back(*s.fuel_flow);
    }
    const double truth_t = total_consumption(targets, dt_s);

    std::vector<ConsumptionRow> rows;
    rows.push_back({"truth", truth_t, 0.0, 0.0});
    for (const auto& [name, preds] : model_preds) {
        if (preds.size() != targets.size())
            throw data_error("consumption_table: prediction length mismatch for " + name);
        ConsumptionRow row;
        row.model = name;
        row.consumption_t = total_consumption(preds, dt_s);
        row.diff_t = row.consumption_t - truth_t;
        row.diff_ratio = truth_t != 0.0 ? row.diff_t / truth_t : 0.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_eval_report_json(const EvalReport& r, const std::string& model_name,
                            const std::string& path) {
    nlohmann::json j;
    j["model"] = model_name;
    j["n_samples"] = r.n_samples;
    j["overall"] = metric_set_json(r.overall);
    nlohmann::json bins = nlohmann::json::array();
    for (const AgeBinMetrics& b : r.per_age_bin) {
        nlohmann::json jb = metric_set_json(b.metrics);
        jb["bin"] = b.bin;
        jb["low_confidence"] = b.low_confidence;
        bins.push_back(std::move(jb));
    }
    j["per_age_bin"] = bins;
    j["total_consumption_pred_t"] = r.total_consumption_pred_t;
    j["total_consumption_true_t"] = r.total_consumption_true_t;
    j["diff_t"] = r.diff_t;
    j["diff_ratio"] = r.diff_ratio;

    std::ofstream out(path);
    if (!out) throw data_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw data_error("write to " + path + " failed");
}

void write_eval_report_csv(const EvalReport& r, const std::string& model_name,
                           const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open " + path + " for writing");
    out << "model,bin,n_samples,mae_kgh,mape_pct,me_kgh,mse_kgh2,bias_ratio,"
           "mape_excluded,low_confidence\n";
    for (const AgeBinMetrics& b : r.per_age_bin) {
        out << model_name << ',' << b.bin << ',';
        metric_csv_cells(out, b.metrics);
        out << ',' << (b.low_confidence ? 1 : 0) << '\n';
    }
    out << model_name << ",overall,";
    metric_csv_cells(out, r.overall);
    out << ",0\n";
    if (!out) throw data_error("write to " + path + " failed");
}

void write_consumption_csv(const std::vector<ConsumptionRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open " + path + " for writing");
    out << "model,consumption_t,diff_t,diff_ratio_pct\n";
    for (const ConsumptionRow& row : rows) {
        out << row.model << ',' << format_double(row.consumption_t) << ','
            << format_double(row.diff_t) << ',' << format_double(row.diff_ratio * 100.0)
            << '\n';
    }
    if (!out) throw data_error("write to " + path + " failed");
}

} // namespace airage
