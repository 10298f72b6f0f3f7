#pragma once

#include <cstdint>

#include "airage/domain.hpp"
#include "airage/physics.hpp"

namespace airage {

/// Synthetic fleet with a planted multiplicative ageing law. Stands in for
/// proprietary QAR data: every generated flight carries known ground truth.
struct SynthConfig {
    int n_tails = 9;
    double age_min = 3.0;             ///< years, entry-into-service draw range
    double age_max = 14.0;
    int flights_per_tail = 6;
    std::uint64_t seed = 1;
    double a_true = 0.0;              ///< planted deterioration coefficient
    double tail_bias_sd = 0.01;       ///< log-normal per-aircraft idiosyncrasy
    double noise_sd = 0.0;            ///< relative measurement noise
    int calendar_span_days = 730;
    double profile_jitter = 1.0;      ///< 0..1 spread of per-flight profile draws;
                                      ///< 0 gives every flight the same profile
    ParametricCoeffs coeffs{};

    void validate() const;  ///< throws data_error on an invalid combination
};

/// Build the fleet. Per tail: a fixed entry age in [age_min, age_max], flights
/// spread uniformly over the calendar span with age advancing accordingly,
/// trapezoidal climb/cruise/descent profiles, and recorded fuel flow
///   physics_baseline(sample) * (1 + a_true ln(age+1)) * tail_bias * (1 + eps)
/// clamped at zero. The baseline is evaluated on the same smoothed kinematics
/// the preprocessing step later reproduces from the raw series, so a noiseless
/// configuration is recoverable exactly through the CSV round trip.
/// Deterministic for a fixed seed; tails use derived per-tail RNG streams.
Dataset generate_fleet(const SynthConfig& cfg);

} // namespace airage
