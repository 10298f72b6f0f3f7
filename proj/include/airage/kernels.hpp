#pragma once

#include <cstddef>
#include <string>

namespace airage::kernels {

/// Dispatch table for the arithmetic inner loops shared by the network,
/// the optimizer, and the metric reductions. Two implementations exist:
/// a portable scalar reference and an AVX2+FMA variant. The active backend
/// is chosen once at startup from CPU capabilities and can be overridden
/// with the AIRAGE_KERNELS environment variable ("scalar" or "avx2").
///
/// All reductions run in a fixed left-to-right order within a backend, so
/// repeated runs on the same machine are bit-identical.
struct Backend {
    const char* name;

    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // sum_i x[i]
    double (*sum)(const double* x, std::size_t n);
    // sum_i x[i]^2
    double (*sum_sq)(const double* x, std::size_t n);
    // sum_i (a[i] - b[i])
    double (*sum_diff)(const double* a, const double* b, std::size_t n);
    // sum_i |a[i] - b[i]|
    double (*sum_abs_diff)(const double* a, const double* b, std::size_t n);
    // sum_i (a[i] - b[i])^2
    double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
    // x[i] = max(x[i], 0)
    void (*relu)(double* x, std::size_t n);
    // One AdamW element-wise parameter update with bias-corrected moments:
    //   m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g^2
    //   p -= lr * (m/bc1) / (sqrt(v/bc2) + eps) + lr * wd * p
    // bc1/bc2 are the bias-correction factors 1-b1^t and 1-b2^t.
    void (*adamw_update)(double* p, double* m, double* v, const double* g,
                         std::size_t n, double lr, double beta1, double beta2,
                         double eps, double bc1, double bc2, double wd);
};

/// Backend selected for this process.
const Backend& active();

/// Portable reference implementation.
const Backend& scalar();

/// AVX2+FMA implementation, or nullptr when the CPU lacks support.
const Backend* avx2();

/// Force a backend by name ("scalar"/"avx2"/"auto"). Throws on an
/// unavailable choice. Intended for tests and benchmarks.
void force(const std::string& name);

// Thin wrappers over the active backend.
inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { active().axpy(alpha, x, y, n); }
inline double sum(const double* x, std::size_t n) { return active().sum(x, n); }
inline double sum_sq(const double* x, std::size_t n) { return active().sum_sq(x, n); }
inline double sum_diff(const double* a, const double* b, std::size_t n) { return active().sum_diff(a, b, n); }
inline double sum_abs_diff(const double* a, const double* b, std::size_t n) { return active().sum_abs_diff(a, b, n); }
inline double sum_sq_diff(const double* a, const double* b, std::size_t n) { return active().sum_sq_diff(a, b, n); }
inline void relu(double* x, std::size_t n) { active().relu(x, n); }

} // namespace airage::kernels
