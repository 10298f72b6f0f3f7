#pragma once

#include <string>

#include "airage/domain.hpp"

namespace airage {

// Unit conversions and gas constants used by the parametric model.
constexpr double kKtToMps = 0.514444;       // kt -> m/s
constexpr double kFtToM = 0.3048;           // ft -> m
constexpr double kFpmToMps = 0.00508;       // ft/min -> m/s
constexpr double kG0 = 9.80665;             // m/s^2
constexpr double kRAir = 287.05287;         // J/(kg K)
constexpr double kIsaSeaLevelPressure = 101325.0;  // Pa
constexpr double kIsaSeaLevelTemp = 288.15;        // K
constexpr double kIsaLapseRate = 0.0065;           // K/m
constexpr double kTropopauseAltFt = 36089.24;      // 11 km

/// Coefficient set for the parametric fuel-flow model: drag polar, thrust
/// specific fuel consumption, max-climb thrust and idle fuel law. Values are
/// engineering defaults for a single-aisle twinjet, loaded from a config
/// file (see load_parametric_coeffs).
struct ParametricCoeffs {
    double wing_area = 122.6;  ///< m^2
    double cd0 = 0.024;        ///< zero-lift drag coefficient
    double k_induced = 0.0375; ///< induced drag factor
    double cf1 = 0.76;         ///< SFC scale, kg/(min kN)
    double cf2 = 1430.0;       ///< SFC speed scale, kt
    double cfcr = 1.05;        ///< cruise SFC correction
    double cf3 = 8.9;          ///< idle fuel at sea level, kg/min
    double cf4 = 81926.0;      ///< idle-fuel altitude scale, ft
    double ct1 = 140.0;        ///< max-climb thrust at sea level, kN
    double ct2 = 50000.0;      ///< thrust lapse altitude scale, ft
    double ct3 = 2.5e-11;      ///< quadratic thrust term, 1/ft^2

    /// Throws data_error when a coefficient is outside its valid range.
    void validate() const;
};

ParametricCoeffs load_parametric_coeffs(const std::string& path);
void save_parametric_coeffs(const ParametricCoeffs& c, const std::string& path);

struct Atmosphere {
    double pressure = 0.0;     ///< Pa
    double density = 0.0;      ///< kg/m^3
    double temperature = 0.0;  ///< K
};

/// ISA static pressure. Lapse-rate law below the tropopause, exponential
/// above, continuous at the junction. Valid for [-1000, 45000] ft.
double isa_pressure(double pressure_alt_ft);

/// ISA temperature at altitude (used by the synthetic generator).
double isa_temperature(double pressure_alt_ft);

/// Ideal-gas density from ISA pressure and measured SAT.
double air_density(double pressure_alt_ft, double sat_k);

/// Drag polar: D = q S (cd0 + k CL^2). Requires tas > 60 kt; the polar is
/// meaningless at taxi speeds and a numeric_error is thrown below that.
double drag(double mass_kg, double tas_kt, double rho, const ParametricCoeffs& c);

/// Total-energy thrust: drag plus longitudinal acceleration plus climb
/// power over speed.
double thrust_required(double mass_kg, double tas_kt, double dtas_dt_ktps,
                       double vertical_speed_fpm, double drag_n);

/// Max-climb thrust lapse, clamped at zero (with a warning) at extreme
/// altitude/coefficient combinations.
double max_climb_thrust(double pressure_alt_ft, const ParametricCoeffs& c);

/// Idle fuel flow in kg/h, linear altitude lapse clamped at zero.
double idle_fuel_flow(double pressure_alt_ft, const ParametricCoeffs& c);

/// Phase-dispatched parametric fuel flow in kg/h: max-climb thrust in climb,
/// total-energy thrust with cruise SFC correction in level flight, idle fuel
/// in descent. All results are floored at the idle fuel flow.
/// Requires a preprocessed sample (dtas_dt present).
double fuel_flow_baseline(const FlightSample& s, const ParametricCoeffs& c);

} // namespace airage
