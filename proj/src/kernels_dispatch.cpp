#include "airage/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

namespace airage::kernels {

// Defined in kernels_avx2.cpp; nullptr when compiled without AVX2 support.
const Backend* avx2_table();

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Backend* pick(const std::string& name) {
    if (name == "scalar") return &scalar();
    if (name == "avx2") {
        const Backend* b = avx2_table();
        if (b == nullptr || !cpu_has_avx2())
            throw std::runtime_error("avx2 kernels requested but not available on this CPU/build");
        return b;
    }
    if (name == "auto" || name.empty()) {
        const Backend* b = avx2_table();
        return (b != nullptr && cpu_has_avx2()) ? b : &scalar();
    }
    throw std::runtime_error("unknown kernel backend '" + name + "' (use scalar, avx2 or auto)");
}

const Backend*& current() {
    static const Backend* selected = [] {
        const char* env = std::getenv("AIRAGE_KERNELS");
        return pick(env != nullptr ? env : "auto");
    }();
    return selected;
}

} // namespace

const Backend& active() { return *current(); }

const Backend* avx2() {
    const Backend* b = avx2_table();
    return (b != nullptr && cpu_has_avx2()) ? b : nullptr;
}

void force(const std::string& name) { current() = pick(name); }

} // namespace airage::kernels
