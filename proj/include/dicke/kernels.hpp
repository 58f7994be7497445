#pragma once

#include <cstddef>

// Vector kernels behind the integrators and ladder dynamics. Every kernel has
// a scalar reference implementation and, on x86-64, an AVX2+FMA variant; the
// backend is chosen once at runtime from CPU capabilities. The variants are
// equivalence-tested against each other in tests/test_kernels.cpp.
namespace dicke::kernels {

enum class Backend { scalar, avx2 };

// Backend selected for this process (CPU-detected unless forced).
Backend active_backend() noexcept;
bool backend_available(Backend b) noexcept;
const char* backend_name(Backend b) noexcept;

// Overrides CPU detection; throws std::invalid_argument if the requested
// backend is not available on this machine. Intended for tests.
void force_backend(Backend b);

// y[i] += a * x[i]
void axpy(std::size_t n, double a, const double* x, double* y) noexcept;

// sum_i x[i] * y[i]
double dot(std::size_t n, const double* x, const double* y) noexcept;

// Birth-death ladder right-hand side:
//   out[i] = -w[i] * p[i] + w[i+1] * p[i+1]   (w[n] treated as 0)
// w[i] is the rate of the downward transition out of level i; w[0] must be 0
// for a closed ladder. The telescoping structure conserves sum(out) ~ 0.
void ladder_stencil(std::size_t n, const double* w, const double* p,
                    double* out) noexcept;

// Scaled RMS error norm used by the embedded Runge-Kutta controller:
//   sqrt( (1/n) * sum_i (e[i] / (atol + rtol * max(|y0[i]|, |y1[i]|)))^2 )
double error_norm(std::size_t n, const double* e, const double* y0,
                  const double* y1, double atol, double rtol) noexcept;

} // namespace dicke::kernels
