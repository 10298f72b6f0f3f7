#pragma once

#include <map>
#include <string>
#include <vector>

#include "airage/domain.hpp"

namespace airage {

/// One metric tuple per §-style definitions: MAE/ME in kg/h, MSE in (kg/h)^2,
/// MAPE as a fraction, bias_ratio = ME^2/MSE (0 for a perfect fit).
struct MetricSet {
    double mae = 0.0;
    double mape = 0.0;
    double me = 0.0;
    double mse = 0.0;
    double bias_ratio = 0.0;
    std::size_t n_samples = 0;
    std::size_t mape_excluded = 0;  ///< targets <= 1 kg/h skipped by MAPE
};

/// Throws data_error on a length mismatch or empty input.
MetricSet metrics(const std::vector<double>& preds, const std::vector<double>& targets);

struct AgeBinMetrics {
    int bin = 0;  ///< floor(age / bin_width)
    MetricSet metrics;
    bool low_confidence = false;  ///< fewer than 30 samples
};

constexpr std::size_t kLowConfidenceBinCount = 30;

/// Metrics per floor(age/bin_width) bucket, ascending bin order.
std::vector<AgeBinMetrics> metrics_by_age(const std::vector<double>& preds,
                                          const std::vector<FlightSample>& samples,
                                          double bin_width_years = 1.0);

/// Left-rectangle integration at the native sampling rate, in tonnes.
double total_consumption(const std::vector<double>& ff_kgh, double dt_s = 4.0);

struct EvalReport {
    MetricSet overall;
    std::vector<AgeBinMetrics> per_age_bin;
    double total_consumption_pred_t = 0.0;
    double total_consumption_true_t = 0.0;
    double diff_t = 0.0;        ///< pred - true
    double diff_ratio = 0.0;    ///< diff / true
    std::size_t n_samples = 0;
};

/// Full report for one model's predictions over a test set with targets.
EvalReport evaluate(const std::vector<double>& preds,
                    const std::vector<FlightSample>& samples,
                    double bin_width_years = 1.0, double dt_s = 4.0);

/// Consumption comparison row (Table-style): tonnes, diff vs truth, ratio.
struct ConsumptionRow {
    std::string model;
    double consumption_t = 0.0;
    double diff_t = 0.0;
    double diff_ratio = 0.0;
};

/// Ground-truth row first, then one row per named prediction series.
std::vector<ConsumptionRow> consumption_table(
    const std::vector<std::pair<std::string, std::vector<double>>>& model_preds,
    const std::vector<FlightSample>& test_samples, double dt_s = 4.0);

/// Serialize a report as JSON, and as a flat CSV with one row per age bin
/// plus an `overall` row.
void write_eval_report_json(const EvalReport& r, const std::string& model_name,
                            const std::string& path);
void write_eval_report_csv(const EvalReport& r, const std::string& model_name,
                           const std::string& path);

void write_consumption_csv(const std::vector<ConsumptionRow>& rows, const std::string& path);

} // namespace airage
