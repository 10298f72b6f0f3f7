#pragma once

#include <map>
#include <string>
#include <vector>

namespace airage {

/// Flat `key = value` config files. Lines starting with '#' and blank lines
/// are ignored; keys are unique; order is preserved on write (sorted map).
using KvMap = std::map<std::string, std::string>;

KvMap read_kv_file(const std::string& path);
void write_kv_file(const KvMap& kv, const std::string& path);

/// Lookup helpers; throw data_error on a missing key or a bad number.
double kv_double(const KvMap& kv, const std::string& key);
double kv_double_or(const KvMap& kv, const std::string& key, double fallback);
std::string kv_string_or(const KvMap& kv, const std::string& key, const std::string& fallback);

/// Parse a comma-separated list of numbers ("3,4,5.5").
std::vector<double> parse_double_list(const std::string& text);

/// Shortest decimal form that round-trips exactly (std::to_chars).
std::string format_double(double v);

} // namespace airage
