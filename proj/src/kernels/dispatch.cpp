#include "dicke/kernels.hpp"

#include "ops.hpp"

#include <atomic>
#include <stdexcept>

namespace dicke::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(DICKE_HAVE_AVX2_BACKEND)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Ops* detect() noexcept {
#if defined(DICKE_HAVE_AVX2_BACKEND)
    if (cpu_has_avx2())
        return &avx2_ops;
#endif
    return &scalar_ops;
}

std::atomic<const Ops*> g_ops{nullptr};

const Ops* ops() noexcept {
    const Ops* p = g_ops.load(std::memory_order_acquire);
    if (!p) {
        p = detect();
        g_ops.store(p, std::memory_order_release);
    }
    return p;
}

} // namespace

Backend active_backend() noexcept {
#if defined(DICKE_HAVE_AVX2_BACKEND)
    if (ops() == &avx2_ops)
        return Backend::avx2;
#endif
    return Backend::scalar;
}

bool backend_available(Backend b) noexcept {
    switch (b) {
    case Backend::scalar:
        return true;
    case Backend::avx2:
        return cpu_has_avx2();
    }
    return false;
}

const char* backend_name(Backend b) noexcept {
    switch (b) {
    case Backend::scalar:
        return "scalar";
    case Backend::avx2:
        return "avx2";
    }
    return "unknown";
}

void force_backend(Backend b) {
    if (!backend_available(b))
        throw std::invalid_argument(std::string("kernel backend not available: ") +
                                    backend_name(b));
    switch (b) {
    case Backend::scalar:
        g_ops.store(&scalar_ops, std::memory_order_release);
        break;
    case Backend::avx2:
#if defined(DICKE_HAVE_AVX2_BACKEND)
        g_ops.store(&avx2_ops, std::memory_order_release);
#endif
        break;
    }
}

void axpy(std::size_t n, double a, const double* x, double* y) noexcept {
    ops()->axpy(n, a, x, y);
}

double dot(std::size_t n, const double* x, const double* y) noexcept {
    return ops()->dot(n, x, y);
}

void ladder_stencil(std::size_t n, const double* w, const double* p,
                    double* out) noexcept {
    ops()->ladder_stencil(n, w, p, out);
}

double error_norm(std::size_t n, const double* e, const double* y0,
                  const double* y1, double atol, double rtol) noexcept {
    return ops()->error_norm(n, e, y0, y1, atol, rtol);
}

} // namespace dicke::kernels
