#pragma once

#include <stdexcept>
#include <string>

namespace airage {

/// Input data is malformed, out of range, or missing (CLI exit code 3).
struct data_error : std::runtime_error {
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A required column or header does not match the expected schema.
struct schema_error : data_error {
    explicit schema_error(const std::string& msg) : data_error(msg) {}
};

/// Numeric failure: divergence, non-finite intermediate, domain violation
/// of a model formula (CLI exit code 4).
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace airage
