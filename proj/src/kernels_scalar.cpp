#include "airage/kernels.hpp"

#include <cmath>

// Reference kernels. Plain loops, no explicit vectorization; the AVX2
// variants in kernels_avx2.cpp are equivalence-tested against these.

namespace airage::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double sum_sq_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double sum_diff_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] - b[i];
    return acc;
}

double sum_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a[i] - b[i]);
    return acc;
}

double sum_sq_diff_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void relu_scalar(double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] < 0.0) x[i] = 0.0;
    }
}

void adamw_update_scalar(double* p, double* m, double* v, const double* g,
                         std::size_t n, double lr, double beta1, double beta2,
                         double eps, double bc1, double bc2, double wd) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        p[i] -= lr * (m_hat / (std::sqrt(v_hat) + eps) + wd * p[i]);
    }
}

} // namespace

const Backend& scalar() {
    static const Backend backend{
        "scalar",
        dot_scalar,
        axpy_scalar,
        sum_scalar,
        sum_sq_scalar,
        sum_diff_scalar,
        sum_abs_diff_scalar,
        sum_sq_diff_scalar,
        relu_scalar,
        adamw_update_scalar,
    };
    return backend;
}

} // namespace airage::kernels
