#pragma once

#include <functional>
#include <string>

namespace airage {

using WarnHandler = std::function<void(const std::string&)>;

/// Emit a non-fatal diagnostic. Goes to stderr unless a handler is installed.
void warn(const std::string& msg);

/// Install a warning sink (tests use this to assert on emitted warnings).
/// Passing nullptr restores the default stderr sink.
void set_warn_handler(WarnHandler handler);

} // namespace airage
