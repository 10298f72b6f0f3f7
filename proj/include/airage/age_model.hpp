#pragma once

#include <functional>
#include <string>
#include <vector>

#include "airage/domain.hpp"

namespace airage {

/// Multiplicative ageing law Coeff(age) = 1 + a * ln(age + 1), the natural-log
/// reading of the literature formula. a is dimensionless.
struct AgeCoeffModel {
    double a = 0.0;

    double coeff(double age_years) const;
};

/// Literature deterioration coefficient 100 / (100 - 1.28 * ln(age + 1)).
/// Throws numeric_error when the denominator is not positive.
double seymour_coeff(double age_years);

/// Scale a baseline fuel flow by the ageing law; clamped at zero.
double apply_coeff(double ff_baseline_kgh, double age_years, const AgeCoeffModel& m);

/// Least-squares calibration of the slope a against observed fuel flow and
/// an age-blind baseline prediction:
///   minimize sum_i (obs_i - (1 + a L_i) pred_i)^2,  L_i = ln(age_i + 1)
/// Closed form a = sum L_i pred_i (obs_i - pred_i) / sum (L_i pred_i)^2.
/// All ages zero yields a = 0 with a warning. Throws data_error on a length
/// mismatch, fewer than 2 points, or a non-positive baseline value.
AgeCoeffModel fit_log_coeff(const std::vector<double>& observed_kgh,
                            const std::vector<double>& baseline_pred_kgh,
                            const std::vector<double>& ages_years);

/// Deterioration curve on an age grid.
struct CoeffCurve {
    std::vector<double> ages;
    std::vector<double> coeffs;

    /// Piecewise-linear evaluation; extrapolates the end segments with a
    /// one-time warning (out-of-range behaviour is a known pathology of
    /// data-driven curves).
    double eval(double age_years) const;
};

/// A predictor that accepts an age override for one sample.
using AgedPredictor = std::function<double(const FlightSample&, double age_years)>;

/// Probe a model's implied ageing behaviour: for each grid age g, the mean
/// over probe samples of predictor(sample, g) / predictor(sample, 0).
/// Probes with a zero prediction at age 0 are excluded with a warning.
CoeffCurve extract_model_coeff_curve(const AgedPredictor& predictor,
                                     const std::vector<FlightSample>& probe_samples,
                                     const std::vector<double>& age_grid);

/// Key-value serialization: `model = log_coeff`, `a = <decimal>`.
void save_age_coeff(const AgeCoeffModel& m, const std::string& path);
AgeCoeffModel load_age_coeff(const std::string& path);

void save_coeff_curve(const CoeffCurve& c, const std::string& path);
CoeffCurve load_coeff_curve(const std::string& path);

} // namespace airage
