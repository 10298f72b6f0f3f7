#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>

#include "airage/errors.hpp"
#include "airage/physics.hpp"
#include "airage/rng.hpp"

using namespace airage;

namespace {

FlightSample level_sample(double alt, double tas, double mass, double sat) {
    FlightSample s;
    s.pressure_alt = alt;
    s.tas = tas;
    s.dtas_dt = 0.0;
    s.vertical_speed = 0.0;
    s.mass = mass;
    s.sat = sat;
    return s;
}

} // namespace

TEST_CASE("ISA pressure hits sea level and the tropopause") {
    CHECK(isa_pressure(0.0) == doctest::Approx(101325.0).epsilon(1e-12));
    // Independent evaluation of the tropopause formula: 22632.04 Pa.
    CHECK(std::abs(isa_pressure(36089.24) - 22632.0) <= 5.0);
    CHECK(isa_pressure(36089.24) == doctest::Approx(22632.038838785647).epsilon(1e-9));
}

TEST_CASE("ISA pressure is continuous at the tropopause") {
    const double below = isa_pressure(36089.24 - 1e-6);
    const double above = isa_pressure(36089.24 + 1e-6);
    CHECK(std::abs(below - above) < 1e-3);
}

TEST_CASE("ISA pressure is monotone decreasing and range-guarded") {
    double prev = isa_pressure(-1000.0);
    for (double h = 0.0; h <= 45000.0; h += 1000.0) {
        const double p = isa_pressure(h);
        CHECK(p < prev);
        prev = p;
    }
    CHECK_THROWS_AS(isa_pressure(-1001.0), numeric_error);
    CHECK_THROWS_AS(isa_pressure(45001.0), numeric_error);
}

TEST_CASE("air density follows the ideal gas law") {
    CHECK(air_density(0.0, 288.15) == doctest::Approx(1.2250).epsilon(1e-3));
    // Doubling temperature at fixed pressure halves density.
    CHECK(air_density(0.0, 576.3) ==
          doctest::Approx(0.5 * air_density(0.0, 288.15)).epsilon(1e-12));
    // Independent evaluation: 23842.27 Pa / (287.05287 * 218.9).
    CHECK(std::abs(air_density(35000.0, 218.9) - 0.3796) <= 0.002);
    CHECK(air_density(35000.0, 218.9) == doctest::Approx(0.37943728145048955).epsilon(1e-9));
}

TEST_CASE("drag matches a hand-evaluated polar chain") {
    ParametricCoeffs c;
    c.cd0 = 0.024;
    c.k_induced = 0.039;
    c.wing_area = 122.6;

    // m=60000 kg, tas=450 kt, rho=0.38: V=231.4998, q=10182.5099,
    // CL=0.4713317, CD=0.0326640, D=40776.929.
    const double d = drag(60000.0, 450.0, 0.38, c);
    CHECK(d == doctest::Approx(40776.92920681288).epsilon(1e-9));

    // Zero-lift limit: the induced term vanishes with mass.
    const double v = 450.0 * kKtToMps;
    const double q = 0.5 * 0.38 * v * v;
    CHECK(drag(1e-9, 450.0, 0.38, c) == doctest::Approx(q * c.wing_area * c.cd0).epsilon(1e-6));

    // Monotone in cd0.
    ParametricCoeffs c2 = c;
    c2.cd0 = 0.025;
    CHECK(drag(60000.0, 450.0, 0.38, c2) > d);
}

TEST_CASE("drag rejects taxi speeds") {
    ParametricCoeffs c;
    CHECK_THROWS_AS(drag(60000.0, 60.0, 1.2, c), numeric_error);
    CHECK_THROWS_AS(drag(60000.0, 10.0, 1.2, c), numeric_error);
    CHECK_NOTHROW(drag(60000.0, 60.000001, 1.2, c));
}

TEST_CASE("thrust_required is a total-energy balance") {
    // Level unaccelerated flight: thrust equals drag.
    CHECK(thrust_required(60000.0, 450.0, 0.0, 0.0, 40000.0) == 40000.0);

    // Pure longitudinal acceleration term.
    CHECK(thrust_required(60000.0, 450.0, 1.0, 0.0, 40000.0) ==
          doctest::Approx(40000.0 + 60000.0 * 0.514444).epsilon(1e-12));

    // Full-state fixture evaluated term by term:
    // 41000 + 62000*0.257222 + 62000*9.80665*6.096/154.3332.
    CHECK(thrust_required(62000.0, 300.0, 0.5, 1200.0, 41000.0) ==
          doctest::Approx(80963.61399727862).epsilon(1e-9));
}

TEST_CASE("max climb thrust lapse") {
    ParametricCoeffs c;
    CHECK(max_climb_thrust(0.0, c) == doctest::Approx(c.ct1 * 1000.0).epsilon(1e-12));

    ParametricCoeffs lin = c;
    lin.ct3 = 0.0;
    CHECK(max_climb_thrust(lin.ct2, lin) == doctest::Approx(0.0));

    // Default coefficients at 35000 ft: 140*(1 - 0.7 + 2.5e-11*35000^2)*1000.
    CHECK(max_climb_thrust(35000.0, c) == doctest::Approx(46287.5).epsilon(1e-12));
}

TEST_CASE("idle fuel flow lapse") {
    ParametricCoeffs c;
    CHECK(idle_fuel_flow(0.0, c) == doctest::Approx(c.cf3 * 60.0).epsilon(1e-12));
    CHECK(idle_fuel_flow(c.cf4, c) == 0.0);

    ParametricCoeffs c2 = c;
    c2.cf3 = 5.0;
    c2.cf4 = 100000.0;
    CHECK(idle_fuel_flow(20000.0, c2) == doctest::Approx(240.0).epsilon(1e-12));

    // Beyond the root the clamp holds it at zero.
    CHECK(idle_fuel_flow(c2.cf4 * 1.5, c2) == 0.0);
}

TEST_CASE("descent fuel flow is exactly idle") {
    ParametricCoeffs c;
    FlightSample s = level_sample(25000.0, 380.0, 62000.0, isa_temperature(25000.0));
    s.vertical_speed = -1800.0;
    CHECK(fuel_flow_baseline(s, c) == idle_fuel_flow(25000.0, c));
}

TEST_CASE("level fuel flow matches the hand-evaluated SFC chain") {
    ParametricCoeffs c;
    FlightSample s = level_sample(35000.0, 450.0, 60000.0, 218.9);

    // Chain recomputed longhand with the default coefficients.
    const double rho = air_density(35000.0, 218.9);
    const double v = 450.0 * kKtToMps;
    const double q = 0.5 * rho * v * v;
    const double cl = 60000.0 * kG0 / (q * c.wing_area);
    const double cd = c.cd0 + c.k_induced * cl * cl;
    const double d = q * c.wing_area * cd;
    const double eta = c.cf1 * (1.0 + 450.0 / c.cf2);
    const double ff_hand = eta * (d / 1000.0) * 60.0 * c.cfcr;

    CHECK(fuel_flow_baseline(s, c) == doctest::Approx(ff_hand).epsilon(1e-12));
    CHECK(fuel_flow_baseline(s, c) == doctest::Approx(2538.783045224384).epsilon(1e-9));
}

TEST_CASE("default coefficients put a 60 t FL350 cruise in the A320 band") {
    ParametricCoeffs c;
    const FlightSample s = level_sample(35000.0, 450.0, 60000.0, isa_temperature(35000.0));
    const double ff = fuel_flow_baseline(s, c);
    CHECK(ff >= 2200.0);
    CHECK(ff <= 2600.0);
}

TEST_CASE("level fuel flow is monotone in mass") {
    ParametricCoeffs c;
    double prev = 0.0;
    for (double m = 50000.0; m <= 78000.0; m += 2000.0) {
        const FlightSample s = level_sample(33000.0, 440.0, m, isa_temperature(33000.0));
        const double ff = fuel_flow_baseline(s, c);
        CHECK(ff > prev);
        prev = ff;
    }
}

TEST_CASE("fuel flow never drops below the idle floor") {
    ParametricCoeffs c;
    Rng rng(0x5EED);
    for (int i = 0; i < 10000; ++i) {
        FlightSample s;
        s.pressure_alt = rng.uniform(0.0, 41000.0);
        s.tas = rng.uniform(120.0, 480.0);
        s.dtas_dt = rng.uniform(-1.0, 1.0);
        s.vertical_speed = rng.uniform(-3000.0, 3000.0);
        s.mass = rng.uniform(50000.0, 78000.0);
        s.sat = isa_temperature(s.pressure_alt) + rng.uniform(-10.0, 10.0);
        const double ff = fuel_flow_baseline(s, c);
        CHECK(ff >= idle_fuel_flow(s.pressure_alt, c));
    }
}

TEST_CASE("climb dispatch uses max-climb thrust without the cruise factor") {
    ParametricCoeffs c;
    FlightSample s = level_sample(20000.0, 320.0, 64000.0, isa_temperature(20000.0));
    s.vertical_speed = 2000.0;
    const double t_kn = max_climb_thrust(20000.0, c) / 1000.0;
    const double eta = c.cf1 * (1.0 + 320.0 / c.cf2);
    const double expected = std::max(eta * t_kn * 60.0, idle_fuel_flow(20000.0, c));
    CHECK(fuel_flow_baseline(s, c) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("baseline requires a preprocessed sample") {
    ParametricCoeffs c;
    FlightSample s = level_sample(30000.0, 400.0, 60000.0, isa_temperature(30000.0));
    s.dtas_dt.reset();
    CHECK_THROWS_AS(fuel_flow_baseline(s, c), data_error);
}

TEST_CASE("coefficient validation rejects nonsense") {
    ParametricCoeffs c;
    CHECK_NOTHROW(c.validate());

    ParametricCoeffs bad = c;
    bad.wing_area = 0.0;
    CHECK_THROWS_AS(bad.validate(), data_error);

    bad = c;
    bad.cf2 = -1.0;
    CHECK_THROWS_AS(bad.validate(), data_error);

    bad = c;
    bad.cd0 = -0.1;
    CHECK_THROWS_AS(bad.validate(), data_error);
}

TEST_CASE("coefficients round-trip through their config file") {
    ParametricCoeffs c;
    c.cd0 = 0.0251;
    c.cf1 = 0.777;
    const std::string path = "/tmp/airage_test_coeffs.cfg";
    save_parametric_coeffs(c, path);
    const ParametricCoeffs back = load_parametric_coeffs(path);
    CHECK(back.cd0 == c.cd0);
    CHECK(back.cf1 == c.cf1);
    CHECK(back.wing_area == c.wing_area);
    CHECK(back.ct3 == c.ct3);
    std::remove(path.c_str());
}
