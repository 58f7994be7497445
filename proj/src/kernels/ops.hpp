#pragma once

#include <cstddef>

namespace dicke::kernels {

// Function-pointer table for one backend.
struct Ops {
    void (*axpy)(std::size_t, double, const double*, double*);
    double (*dot)(std::size_t, const double*, const double*);
    void (*ladder_stencil)(std::size_t, const double*, const double*, double*);
    double (*error_norm)(std::size_t, const double*, const double*,
                         const double*, double, double);
};

extern const Ops scalar_ops;

#if defined(__x86_64__) || defined(_M_X64)
#define DICKE_HAVE_AVX2_BACKEND 1
extern const Ops avx2_ops;
#endif

} // namespace dicke::kernels
