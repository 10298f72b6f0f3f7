#include "airage/domain.hpp"

#include <algorithm>
#include <cmath>

#include "airage/errors.hpp"

namespace airage {

FlightPhase classify_phase(double vertical_speed_fpm) {
    if (vertical_speed_fpm > kPhaseVsThresholdFpm) return FlightPhase::Climb;
    if (vertical_speed_fpm < -kPhaseVsThresholdFpm) return FlightPhase::Descent;
    return FlightPhase::Level;
}

std::vector<FlightSpan> flight_spans(const Dataset& ds) {
    std::vector<FlightSpan> spans;
    const auto& s = ds.samples;
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= s.size(); ++i) {
        if (i == s.size() || s[i].tail_id != s[begin].tail_id ||
            s[i].flight_id != s[begin].flight_id) {
            spans.push_back({begin, i});
            begin = i;
        }
    }
    return spans;
}

double feature_value(const FlightSample& s, const std::string& name) {
    if (name == "pressure_alt_ft") return s.pressure_alt;
    if (name == "tas_kt") return s.tas;
    if (name == "dtas_dt_ktps") {
        if (!s.dtas_dt.has_value())
            throw data_error("feature dtas_dt_ktps requested but sample is not preprocessed");
        return *s.dtas_dt;
    }
    if (name == "vertical_speed_fpm") return s.vertical_speed;
    if (name == "ground_speed_kt") return s.ground_speed;
    if (name == "mass_kg") return s.mass;
    if (name == "age_yr") return s.age;
    if (name == "sat_k") return s.sat;
    throw data_error("unknown feature name: " + name);
}

bool is_known_feature(const std::string& name) {
    static const std::vector<std::string> known = {
        "pressure_alt_ft", "tas_kt",  "dtas_dt_ktps", "vertical_speed_fpm",
        "ground_speed_kt", "mass_kg", "age_yr",       "sat_k"};
    return std::find(known.begin(), known.end(), name) != known.end();
}

const std::vector<std::string>& base_feature_names() {
    static const std::vector<std::string> names = {
        "pressure_alt_ft",    "tas_kt",  "dtas_dt_ktps", "vertical_speed_fpm",
        "ground_speed_kt",    "mass_kg", "sat_k"};
    return names;
}

NormStats compute_norm_stats(const Dataset& train, const std::vector<std::string>& features) {
    if (train.samples.empty()) throw data_error("compute_norm_stats: empty dataset");
    for (const auto& f : features) {
        if (!is_known_feature(f)) throw data_error("compute_norm_stats: unknown feature " + f);
    }

    const double n = static_cast<double>(train.samples.size());
    NormStats stats;
    stats.features = features;
    stats.mean.resize(features.size(), 0.0);
    stats.stddev.resize(features.size(), 0.0);

    // Two-pass mean/variance, population convention.
    for (const auto& s : train.samples) {
        for (std::size_t j = 0; j < features.size(); ++j)
            stats.mean[j] += feature_value(s, features[j]);
        if (!s.fuel_flow.has_value())
            throw data_error("compute_norm_stats: sample without fuel flow target");
        stats.target_mean += *s.fuel_flow;
    }
    for (std::size_t j = 0; j < features.size(); ++j) stats.mean[j] /= n;
    stats.target_mean /= n;

    double target_var = 0.0;
    for (const auto& s : train.samples) {
        for (std::size_t j = 0; j < features.size(); ++j) {
            const double d = feature_value(s, features[j]) - stats.mean[j];
            stats.stddev[j] += d * d;
        }
        const double dt = *s.fuel_flow - stats.target_mean;
        target_var += dt * dt;
    }
    for (std::size_t j = 0; j < features.size(); ++j)
        stats.stddev[j] = std::max(std::sqrt(stats.stddev[j] / n), kStdFloor);
    stats.target_stddev = std::max(std::sqrt(target_var / n), kStdFloor);
    return stats;
}

void normalize_features(const FlightSample& s, const NormStats& stats, double* out) {
    for (std::size_t j = 0; j < stats.features.size(); ++j)
        out[j] = (feature_value(s, stats.features[j]) - stats.mean[j]) / stats.stddev[j];
}

} // namespace airage
