#include "ops.hpp"

#include <algorithm>
#include <cmath>

namespace dicke::kernels {
namespace {

void axpy_scalar(std::size_t n, double a, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i)
        y[i] += a * x[i];
}

double dot_scalar(std::size_t n, const double* x, const double* y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += x[i] * y[i];
    return acc;
}

void ladder_stencil_scalar(std::size_t n, const double* w, const double* p,
                           double* out) {
    if (n == 0)
        return;
    for (std::size_t i = 0; i + 1 < n; ++i)
        out[i] = w[i + 1] * p[i + 1] - w[i] * p[i];
    out[n - 1] = -w[n - 1] * p[n - 1];
}

double error_norm_scalar(std::size_t n, const double* e, const double* y0,
                         const double* y1, double atol, double rtol) {
    if (n == 0)
        return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double q = e[i] / sc;
        acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(n));
}

} // namespace

const Ops scalar_ops = {axpy_scalar, dot_scalar, ladder_stencil_scalar,
                        error_norm_scalar};

} // namespace dicke::kernels
