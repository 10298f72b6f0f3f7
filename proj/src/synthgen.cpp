#include "airage/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "airage/errors.hpp"
#include "airage/ingest.hpp"
#include "airage/kv.hpp"
#include "airage/rng.hpp"

namespace airage {

namespace {

constexpr double kDaysPerYear = 365.25;
constexpr double kRampS = 60.0;       ///< vertical-speed ramp at phase edges
constexpr double kAltStartFt = 2000.0;
constexpr double kAltEndFt = 2500.0;

/// Piecewise-linear vertical-speed segment.
struct VsSegment {
    double duration_s;
    double vs_start;  ///< ft/min
    double vs_end;
};

/// Altitude gained over one segment: integral of the linear vs profile.
double segment_climb_ft(const VsSegment& seg) {
    return 0.5 * (seg.vs_start + seg.vs_end) * seg.duration_s / 60.0;
}

struct Profile {
    std::vector<VsSegment> segments;
    std::vector<double> t_starts;    ///< segment start times, s
    std::vector<double> alt_starts;  ///< altitude at segment start, ft
    double total_s = 0.0;

    void finalize(double alt0) {
        t_starts.clear();
        alt_starts.clear();
        double t = 0.0;
        double alt = alt0;
        for (const auto& seg : segments) {
            t_starts.push_back(t);
            alt_starts.push_back(alt);
            t += seg.duration_s;
            alt += segment_climb_ft(seg);
        }
        total_s = t;
    }

    void at(double t, double* alt_ft, double* vs_fpm) const {
        std::size_t i = segments.size() - 1;
        while (i > 0 && t < t_starts[i]) --i;
        const VsSegment& seg = segments[i];
        const double dt = std::min(t - t_starts[i], seg.duration_s);
        const double slope = seg.duration_s > 0.0
                                 ? (seg.vs_end - seg.vs_start) / seg.duration_s
                                 : 0.0;
        *vs_fpm = seg.vs_start + slope * dt;
        *alt_ft = alt_starts[i] + (seg.vs_start * dt + 0.5 * slope * dt * dt) / 60.0;
    }
};

/// Climb (or descent) trapezoid: ramp to `vs`, hold, ramp back, covering
/// `delta_ft` in total. `vs` and delta_ft share a sign.
void append_trapezoid(std::vector<VsSegment>& segs, double vs, double delta_ft) {
    const double ramp_gain = vs * kRampS / 60.0;  // both ramps together
    const double hold_s = (delta_ft - ramp_gain) / vs * 60.0;
    segs.push_back({kRampS, 0.0, vs});
    segs.push_back({hold_s, vs, vs});
    segs.push_back({kRampS, vs, 0.0});
}

double smoothstep01(double x) {
    const double s = std::clamp(x, 0.0, 1.0);
    return s * s * (3.0 - 2.0 * s);
}

std::string pad_number(int value, int width) {
    std::string s = std::to_string(value);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

} // namespace

void SynthConfig::validate() const {
    if (n_tails < 1) throw data_error("synth config: n_tails must be >= 1");
    if (flights_per_tail < 1) throw data_error("synth config: flights_per_tail must be >= 1");
    if (!(a_true >= 0.0)) throw data_error("synth config: a_true must be >= 0");
    if (!(noise_sd >= 0.0)) throw data_error("synth config: noise_sd must be >= 0");
    if (!(tail_bias_sd >= 0.0)) throw data_error("synth config: tail_bias_sd must be >= 0");
    if (!(age_min >= 0.0) || !(age_max >= age_min))
        throw data_error("synth config: need 0 <= age_min <= age_max");
    if (calendar_span_days < 0)
        throw data_error("synth config: calendar_span_days must be >= 0");
    if (!(profile_jitter >= 0.0) || !(profile_jitter <= 1.0))
        throw data_error("synth config: profile_jitter must be in [0, 1]");
    coeffs.validate();
}

Dataset generate_fleet(const SynthConfig& cfg) {
    cfg.validate();

    const std::int64_t anchor = parse_iso_date("2016-01-04");
    const SavGolConfig savgol{};  // must match the preprocessing defaults

    Dataset fleet;
    for (int tail = 0; tail < cfg.n_tails; ++tail) {
        Rng rng(derive_stream(cfg.seed, static_cast<std::uint64_t>(tail)));
        const double entry_age = rng.uniform(cfg.age_min, cfg.age_max);
        const double tail_bias = std::exp(rng.normal() * cfg.tail_bias_sd);
        const std::string tail_id = "T" + pad_number(tail + 1, 3);

        for (int f = 0; f < cfg.flights_per_tail; ++f) {
            const double day = (f + rng.uniform()) *
                               static_cast<double>(cfg.calendar_span_days) /
                               cfg.flights_per_tail;
            const double age = entry_age + day / kDaysPerYear;
            const std::int64_t date_days =
                anchor + static_cast<std::int64_t>(std::floor(day));
            const std::string flight_id = tail_id + "-F" + pad_number(f + 1, 4);

            // Flight shape draws, squeezed toward the range midpoint by
            // profile_jitter. The underlying uniform is drawn either way so
            // the stream stays aligned across jitter settings.
            const auto draw = [&](double lo, double hi) {
                const double u = rng.uniform();
                return 0.5 * (lo + hi) + cfg.profile_jitter * (u - 0.5) * (hi - lo);
            };
            const double mass0 = draw(55000.0, 75000.0);
            const double fl_max = 39000.0 - 550.0 * (mass0 / 1000.0 - 55.0);
            const double cruise_alt = draw(28000.0, fl_max);
            const double climb_vs = draw(1800.0, 2200.0);
            const double descent_vs = -draw(1600.0, 2000.0);
            const double tas_low = draw(190.0, 230.0);
            const double tas_cruise = draw(420.0, 460.0);
            const double cruise_s = draw(40.0, 90.0) * 60.0;
            const double sat_offset = rng.normal() * 3.0 * cfg.profile_jitter;

            Profile profile;
            append_trapezoid(profile.segments, climb_vs, cruise_alt - kAltStartFt);
            profile.segments.push_back({cruise_s, 0.0, 0.0});
            append_trapezoid(profile.segments, descent_vs, kAltEndFt - cruise_alt);
            profile.finalize(kAltStartFt);

            // Raw kinematics on the 4 s grid.
            const std::size_t n =
                static_cast<std::size_t>(profile.total_s / kSampleSpacingS) + 1;
            Dataset flight;
            flight.samples.reserve(n);
            for (std::size_t k = 0; k < n; ++k) {
                FlightSample s;
                s.tail_id = tail_id;
                s.flight_id = flight_id;
                s.date_days = date_days;
                s.t = static_cast<double>(k) * kSampleSpacingS;
                profile.at(s.t, &s.pressure_alt, &s.vertical_speed);
                const double frac =
                    (s.pressure_alt - kAltStartFt) / (cruise_alt - kAltStartFt);
                s.tas = tas_low + (tas_cruise - tas_low) * smoothstep01(frac);
                s.ground_speed = s.tas;
                s.age = age;
                s.sat = isa_temperature(s.pressure_alt) + sat_offset;
                flight.samples.push_back(s);
            }

            // Truth fuel flow from the same smoothed kinematics preprocessing
            // later recovers from the raw series, so noiseless configurations
            // survive the CSV round trip bit for bit.
            Dataset smoothed = preprocess_dataset(flight, savgol);
            const double age_factor = 1.0 + cfg.a_true * std::log(age + 1.0);
            double mass = mass0;
            for (std::size_t k = 0; k < n; ++k) {
                FlightSample probe = smoothed.samples[k];
                probe.mass = mass;
                const double base = fuel_flow_baseline(probe, cfg.coeffs);
                const double eps = rng.normal() * cfg.noise_sd;
                const double ff =
                    std::max(0.0, base * age_factor * tail_bias * (1.0 + eps));
                flight.samples[k].mass = mass;
                flight.samples[k].fuel_flow = ff;
                mass -= ff * kSampleSpacingS / 3600.0;
            }

            fleet.samples.insert(fleet.samples.end(), flight.samples.begin(),
                                 flight.samples.end());
        }
    }

    fleet.provenance = "synthgen seed=" + std::to_string(cfg.seed) +
                       " n_tails=" + std::to_string(cfg.n_tails) +
                       " flights_per_tail=" + std::to_string(cfg.flights_per_tail) +
                       " a_true=" + format_double(cfg.a_true) +
                       " tail_bias_sd=" + format_double(cfg.tail_bias_sd) +
                       " noise_sd=" + format_double(cfg.noise_sd);
    return fleet;
}

} // namespace airage
