#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>

// Explicit adaptive embedded Runge-Kutta integration (Dormand-Prince 5(4))
// over contiguous double vectors. Complex matrix states are integrated by
// viewing their storage as a flat real vector.
namespace dicke::ode {

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 50'000'000;
};

// dydt = f(t, y)
using RhsFn = std::function<void(double t, std::span<const double> y,
                                 std::span<double> dydt)>;
// Invoked at every requested sample time, including the first.
using SampleFn =
    std::function<void(std::size_t index, double t, std::span<const double> y)>;
// Optional projection applied to the state after every accepted step
// (e.g. Hermitian symmetrization).
using ProjectFn = std::function<void(std::span<double> y)>;

// Integrates y in place from sample_times.front() to sample_times.back(),
// landing exactly on every sample time. sample_times must be strictly
// increasing with at least two entries. Throws IntegrationError on step-size
// underflow or when the step budget is exhausted.
void integrate(const RhsFn& rhs, std::span<const double> sample_times,
               std::span<double> y, const SampleFn& on_sample,
               const Options& opts = {}, const ProjectFn& project = {});

} // namespace dicke::ode
