#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "airage/age_model.hpp"

namespace airage {

/// Constant-size fleet for the multi-year projection. Defaults mirror the
/// nine-airframe profile: ages 3 to 14 with mean exactly 8.
struct FleetSpec {
    std::vector<double> ages_years = {3, 4, 5, 7, 8, 9, 10, 12, 14};
    double annual_base_fuel_t = 2575.0;  ///< tonnes per aircraft-year at age 0
    int horizon_years = 15;

    void validate() const;
};

void save_fleet_spec(const FleetSpec& f, const std::string& path);
FleetSpec load_fleet_spec(const std::string& path);

/// Reference deterioration curve 1 + a_ref * ln(1 + age).
struct ReferenceCurve {
    double a_ref = 0.0231;

    double coeff(double age_years) const;
};

/// Deterioration coefficient as a function of age in years.
using AgeCurveFn = std::function<double(double)>;

AgeCurveFn curve_fn(const AgeCoeffModel& m);
AgeCurveFn curve_fn(const CoeffCurve& c);  ///< linear interpolation, warns on extrapolation

struct ProjectionRow {
    int year = 0;  ///< horizon year k, 1-based
    double cumulative_model_t = 0.0;
    double cumulative_ref_t = 0.0;
    double diff_t = 0.0;  ///< reference cumulative - model cumulative
};

/// For each year k = 1..horizon every tail ages by k; annual fuel under a
/// curve C is annual_base_fuel * C(age + k) summed over tails, accumulated
/// over years 1..k.
std::vector<ProjectionRow> project(const FleetSpec& fleet, const AgeCurveFn& model_curve,
                                   const ReferenceCurve& ref);

/// CSV `year,model_name,cumulative_model_t,cumulative_ref_t,diff_t`, one row
/// per (model, year).
void projection_report(
    const std::vector<std::pair<std::string, std::vector<ProjectionRow>>>& results,
    const std::string& path);

std::vector<std::pair<std::string, std::vector<ProjectionRow>>> load_projection_report(
    const std::string& path);

} // namespace airage
