#include "airage/physics.hpp"

#include <cmath>

#include "airage/errors.hpp"
#include "airage/kv.hpp"
#include "airage/log.hpp"

namespace airage {

namespace {

constexpr double kMinModelTasKt = 60.0;

// Exponent g / (L R) of the troposphere pressure law.
const double kTropoExponent = kG0 / (kIsaLapseRate * kRAir);

// Tropopause values derived from the troposphere law, so the two branches
// join continuously. 216.65 K to within rounding of the 36089.24 ft junction.
const double kTropopauseTemp =
    kIsaSeaLevelTemp - kIsaLapseRate * kTropopauseAltFt * kFtToM;
const double kTropopausePressure =
    kIsaSeaLevelPressure * std::pow(kTropopauseTemp / kIsaSeaLevelTemp, kTropoExponent);

} // namespace

void ParametricCoeffs::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw data_error(std::string("parametric coefficient ") + name + " must be > 0");
    };
    positive(wing_area, "wing_area");
    positive(cd0, "cd0");
    positive(k_induced, "k_induced");
    positive(cf1, "cf1");
    positive(cf2, "cf2");
    positive(cfcr, "cfcr");
    positive(cf3, "cf3");
    positive(cf4, "cf4");
    positive(ct1, "ct1");
    positive(ct2, "ct2");
    if (!(ct3 >= 0.0) || !std::isfinite(ct3))
        throw data_error("parametric coefficient ct3 must be >= 0");
    if (cd0 >= 0.1) throw data_error("cd0 out of range (expected < 0.1)");
    if (k_induced >= 0.2) throw data_error("k_induced out of range (expected < 0.2)");
}

ParametricCoeffs load_parametric_coeffs(const std::string& path) {
    const KvMap kv = read_kv_file(path);
    ParametricCoeffs c;
    c.wing_area = kv_double(kv, "wing_area");
    c.cd0 = kv_double(kv, "cd0");
    c.k_induced = kv_double(kv, "k_induced");
    c.cf1 = kv_double(kv, "cf1");
    c.cf2 = kv_double(kv, "cf2");
    c.cfcr = kv_double(kv, "cfcr");
    c.cf3 = kv_double(kv, "cf3");
    c.cf4 = kv_double(kv, "cf4");
    c.ct1 = kv_double(kv, "ct1");
    c.ct2 = kv_double(kv, "ct2");
    c.ct3 = kv_double(kv, "ct3");
    c.validate();
    return c;
}

void save_parametric_coeffs(const ParametricCoeffs& c, const std::string& path) {
    KvMap kv;
    kv["wing_area"] = format_double(c.wing_area);
    kv["cd0"] = format_double(c.cd0);
    kv["k_induced"] = format_double(c.k_induced);
    kv["cf1"] = format_double(c.cf1);
    kv["cf2"] = format_double(c.cf2);
    kv["cfcr"] = format_double(c.cfcr);
    kv["cf3"] = format_double(c.cf3);
    kv["cf4"] = format_double(c.cf4);
    kv["ct1"] = format_double(c.ct1);
    kv["ct2"] = format_double(c.ct2);
    kv["ct3"] = format_double(c.ct3);
    write_kv_file(kv, path);
}

double isa_pressure(double pressure_alt_ft) {
    if (!(pressure_alt_ft >= -1000.0 && pressure_alt_ft <= 45000.0))
        throw numeric_error("isa_pressure: altitude out of range [-1000, 45000] ft");
    const double h_m = pressure_alt_ft * kFtToM;
    const double h_trop = kTropopauseAltFt * kFtToM;
    if (h_m <= h_trop) {
        const double t = kIsaSeaLevelTemp - kIsaLapseRate * h_m;
        return kIsaSeaLevelPressure * std::pow(t / kIsaSeaLevelTemp, kTropoExponent);
    }
    return kTropopausePressure *
           std::exp(-kG0 * (h_m - h_trop) / (kRAir * kTropopauseTemp));
}

double isa_temperature(double pressure_alt_ft) {
    const double h_m = pressure_alt_ft * kFtToM;
    const double h_trop = kTropopauseAltFt * kFtToM;
    return h_m <= h_trop ? kIsaSeaLevelTemp - kIsaLapseRate * h_m : kTropopauseTemp;
}

double air_density(double pressure_alt_ft, double sat_k) {
    return isa_pressure(pressure_alt_ft) / (kRAir * sat_k);
}

double drag(double mass_kg, double tas_kt, double rho, const ParametricCoeffs& c) {
    if (!(tas_kt > kMinModelTasKt))
        throw numeric_error("drag: tas below 60 kt, drag polar invalid at taxi speeds");
    const double v = tas_kt * kKtToMps;
    const double q = 0.5 * rho * v * v;
    const double cl = mass_kg * kG0 / (q * c.wing_area);
    const double cd = c.cd0 + c.k_induced * cl * cl;
    return q * c.wing_area * cd;
}

double thrust_required(double mass_kg, double tas_kt, double dtas_dt_ktps,
                       double vertical_speed_fpm, double drag_n) {
    if (!(tas_kt > kMinModelTasKt))
        throw numeric_error("thrust_required: tas below 60 kt");
    const double v = tas_kt * kKtToMps;
    const double accel = dtas_dt_ktps * kKtToMps;
    const double vs = vertical_speed_fpm * kFpmToMps;
    return drag_n + mass_kg * accel + mass_kg * kG0 * vs / v;
}

double max_climb_thrust(double pressure_alt_ft, const ParametricCoeffs& c) {
    const double h = pressure_alt_ft;
    const double t_kn = c.ct1 * (1.0 - h / c.ct2 + c.ct3 * h * h);
    if (t_kn < 0.0) {
        warn("max_climb_thrust negative at " + std::to_string(pressure_alt_ft) +
             " ft, clamped to 0");
        return 0.0;
    }
    return t_kn * 1000.0;
}

double idle_fuel_flow(double pressure_alt_ft, const ParametricCoeffs& c) {
    const double ff_min = c.cf3 * (1.0 - pressure_alt_ft / c.cf4);
    return ff_min > 0.0 ? ff_min * 60.0 : 0.0;
}

double fuel_flow_baseline(const FlightSample& s, const ParametricCoeffs& c) {
    if (!s.dtas_dt.has_value())
        throw data_error("fuel_flow_baseline: sample not preprocessed (dtas_dt missing)");

    const double idle = idle_fuel_flow(s.pressure_alt, c);
    const FlightPhase phase = classify_phase(s);
    if (phase == FlightPhase::Descent) return idle;

    double thrust_n = 0.0;
    double sfc_correction = 1.0;
    if (phase == FlightPhase::Climb) {
        thrust_n = max_climb_thrust(s.pressure_alt, c);
    } else {
        const double rho = air_density(s.pressure_alt, s.sat);
        const double d = drag(s.mass, s.tas, rho, c);
        thrust_n = thrust_required(s.mass, s.tas, *s.dtas_dt, s.vertical_speed, d);
        sfc_correction = c.cfcr;
    }

    const double eta = c.cf1 * (1.0 + s.tas / c.cf2);  // kg/(min kN)
    const double ff = eta * (thrust_n / 1000.0) * 60.0 * sfc_correction;
    return std::max(ff, idle);
}

} // namespace airage
