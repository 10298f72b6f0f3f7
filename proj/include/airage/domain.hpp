#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace airage {

/// Flight phase decided from vertical speed. The +/-300 ft/min band is a
/// standard level-flight convention; boundary values map to Level.
enum class FlightPhase { Climb, Level, Descent };

constexpr double kPhaseVsThresholdFpm = 300.0;

FlightPhase classify_phase(double vertical_speed_fpm);

/// One 4-second QAR-style record. Kinematics in the units of the source
/// sensors: altitude ft, speeds kt, vertical speed ft/min, mass kg, SAT K,
/// fuel flow kg/h, age in fractional years.
struct FlightSample {
    std::string tail_id;
    std::string flight_id;
    std::int64_t date_days = 0;       ///< flight date, days since 1970-01-01
    double t = 0.0;                   ///< seconds since flight start
    double pressure_alt = 0.0;        ///< ft
    double tas = 0.0;                 ///< kt
    std::optional<double> dtas_dt;    ///< kt/s, filled by preprocessing
    double vertical_speed = 0.0;      ///< ft/min
    double ground_speed = 0.0;        ///< kt
    double mass = 0.0;                ///< kg
    double age = 0.0;                 ///< years
    double sat = 0.0;                 ///< K
    std::optional<double> fuel_flow;  ///< kg/h target, absent at prediction time
};

inline FlightPhase classify_phase(const FlightSample& s) {
    return classify_phase(s.vertical_speed);
}

/// Ordered sample collection. Samples are kept grouped by
/// (tail_id, flight_id) and time-ordered within each flight.
struct Dataset {
    std::vector<FlightSample> samples;
    std::string provenance;
};

/// Index range [begin, end) of one flight inside Dataset::samples.
struct FlightSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
};

/// Contiguous flight spans in dataset order.
std::vector<FlightSpan> flight_spans(const Dataset& ds);

/// Numeric features a model can consume, addressed by CSV column name.
/// Valid names: pressure_alt_ft, tas_kt, dtas_dt_ktps, vertical_speed_fpm,
/// ground_speed_kt, mass_kg, age_yr, sat_k.
double feature_value(const FlightSample& s, const std::string& name);

bool is_known_feature(const std::string& name);

/// Table I input set without age (age handling is a model-variant choice).
const std::vector<std::string>& base_feature_names();

/// Per-feature and target mean/std used for fixed-statistics normalization.
/// Standard deviations are population (1/N) and floored at kStdFloor.
struct NormStats {
    std::vector<std::string> features;
    std::vector<double> mean;
    std::vector<double> stddev;
    double target_mean = 0.0;
    double target_stddev = 1.0;
};

constexpr double kStdFloor = 1e-6;

/// Mean/std over the training set only. Throws data_error on an empty
/// dataset, an unknown feature name, or absent targets/features.
NormStats compute_norm_stats(const Dataset& train, const std::vector<std::string>& features);

/// Fill `out` (size = stats.features.size()) with the z-normalized features
/// of one sample.
void normalize_features(const FlightSample& s, const NormStats& stats, double* out);

inline double normalize_target(double fuel_flow, const NormStats& stats) {
    return (fuel_flow - stats.target_mean) / stats.target_stddev;
}

inline double denormalize_target(double z, const NormStats& stats) {
    return z * stats.target_stddev + stats.target_mean;
}

} // namespace airage
