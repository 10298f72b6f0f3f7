#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "airage/domain.hpp"

namespace airage {

/// Savitzky-Golay filter configuration. The default 9-sample window (36 s at
/// the 4 s rate) with a quadratic fit suppresses sensor jitter without
/// flattening maneuvers.
struct SavGolConfig {
    int window_len = 9;  ///< odd sample count
    int poly_order = 2;

    void validate() const;  ///< throws data_error on an invalid combination
};

/// Per-aircraft temporal split: flights in the first train_fraction of each
/// tail's own calendar span go to train.
struct SplitConfig {
    double train_fraction = 2.0 / 3.0;

    void validate() const;
};

/// Exact dataset CSV header. `date` is an ISO-8601 day; decimal point,
/// comma separator, UTF-8, LF line endings.
extern const std::vector<std::string> kQarCsvHeader;

/// Header of preprocessed files: kQarCsvHeader plus the derived
/// `dtas_dt_ktps` column after `tas_kt`.
extern const std::vector<std::string> kPrepCsvHeader;

/// Parse a QAR-style CSV in either the base or the preprocessed schema.
/// Rows containing a non-finite value or a value outside the documented
/// sample ranges are dropped; the count is reported via warn() and recorded
/// in the provenance string. Throws schema_error/data_error on a missing
/// column, an unparseable number, or an empty file.
Dataset parse_qar_csv(const std::string& path);

/// Write in the base schema, or the preprocessed schema when
/// include_accel is set (requires dtas_dt on every sample).
void write_qar_csv(const Dataset& ds, const std::string& path, bool include_accel = false);

/// Smooth a uniformly spaced series: at each point, the least-squares
/// polynomial of degree poly_order over the centered window, evaluated at
/// the center. Edge points use shrunken asymmetric windows of the same
/// polynomial order. Throws data_error when the series is shorter than the
/// window.
std::vector<double> savgol_smooth(const std::vector<double>& series, const SavGolConfig& cfg);

/// Central differences in the interior, one-sided at the two ends.
/// Throws data_error for series shorter than 3.
std::vector<double> derive_acceleration(const std::vector<double>& tas_smoothed, double dt_s);

/// Smooth TAS and vertical speed per flight, derive dtas_dt from the
/// smoothed TAS at the nominal 4 s spacing, and return a dataset with the
/// smoothed values in place.
Dataset preprocess_dataset(const Dataset& ds, const SavGolConfig& cfg);

constexpr double kSampleSpacingS = 4.0;

struct SplitResult {
    Dataset train;
    Dataset test;
};

/// Partition whole flights per tail by calendar date. A tail with a single
/// flight (or a zero-day span) goes entirely to train with a warning.
SplitResult temporal_split(const Dataset& ds, const SplitConfig& cfg);

/// Days since 1970-01-01 <-> ISO-8601 day string.
std::int64_t parse_iso_date(const std::string& iso_day);
std::string format_iso_date(std::int64_t days_since_epoch);

} // namespace airage
