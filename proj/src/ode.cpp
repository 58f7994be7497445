#include "dicke/ode.hpp"

#include "dicke/errors.hpp"
#include "dicke/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <vector>

namespace dicke::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 5th-order minus embedded 4th-order weights (error estimate).
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695,
                 e4 = b4 - 393.0 / 640, e5 = b5 + 92097.0 / 339200,
                 e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

struct Workspace {
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, err;
    explicit Workspace(std::size_t n)
        : k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n) {}
};

void combine(std::span<double> out, std::span<const double> y,
             std::initializer_list<std::pair<double, const std::vector<double>*>> terms,
             double h) {
    std::copy(y.begin(), y.end(), out.begin());
    for (const auto& [w, k] : terms)
        kernels::axpy(out.size(), h * w, k->data(), out.data());
}

} // namespace

void integrate(const RhsFn& rhs, std::span<const double> sample_times,
               std::span<double> y, const SampleFn& on_sample, const Options& opts,
               const ProjectFn& project) {
    if (sample_times.size() < 2)
        throw std::domain_error("ode::integrate: need at least two sample times");
    for (std::size_t i = 1; i < sample_times.size(); ++i)
        if (!(sample_times[i] > sample_times[i - 1]))
            throw std::domain_error("ode::integrate: sample times must be increasing");

    const std::size_t n = y.size();
    Workspace w(n);
    double t = sample_times.front();
    const double t_end = sample_times.back();
    std::size_t next_sample = 0;

    // Emit the initial state.
    on_sample(next_sample, t, y);
    ++next_sample;

    rhs(t, y, w.k1);
    bool k1_fresh = true;

    // Initial step: crude curvature-free guess, refined by the controller.
    double h_ctrl = 0.0;
    {
        const double d0 =
            kernels::error_norm(n, y.data(), y.data(), y.data(), opts.abs_tol, opts.rel_tol);
        const double d1 = kernels::error_norm(n, w.k1.data(), y.data(), y.data(),
                                              opts.abs_tol, opts.rel_tol);
        h_ctrl = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 * (t_end - t) : 0.01 * d0 / d1;
        h_ctrl = std::min({h_ctrl, t_end - t, opts.max_step});
        h_ctrl = std::max(h_ctrl, 1e-14 * (t_end - t));
    }

    std::size_t steps = 0;
    while (t < t_end) {
        if (++steps > opts.max_steps)
            throw IntegrationError("ode::integrate: step budget exhausted at tau=" +
                                       std::to_string(t),
                                   t);

        const double target = sample_times[next_sample];
        double h = h_ctrl;
        bool hit_sample = false;
        if (t + h >= target) {
            h = target - t;
            hit_sample = true;
        }
        if (!(h > 0.0) || t + h == t) {
            std::ostringstream os;
            os << "ode::integrate: step size underflow at tau=" << t;
            throw IntegrationError(os.str(), t);
        }

        if (!k1_fresh) {
            rhs(t, y, w.k1);
            k1_fresh = true;
        }

        combine(w.ytmp, y, {{a21, &w.k1}}, h);
        rhs(t + c2 * h, w.ytmp, w.k2);
        combine(w.ytmp, y, {{a31, &w.k1}, {a32, &w.k2}}, h);
        rhs(t + c3 * h, w.ytmp, w.k3);
        combine(w.ytmp, y, {{a41, &w.k1}, {a42, &w.k2}, {a43, &w.k3}}, h);
        rhs(t + c4 * h, w.ytmp, w.k4);
        combine(w.ytmp, y, {{a51, &w.k1}, {a52, &w.k2}, {a53, &w.k3}, {a54, &w.k4}}, h);
        rhs(t + c5 * h, w.ytmp, w.k5);
        combine(w.ytmp, y,
                {{a61, &w.k1}, {a62, &w.k2}, {a63, &w.k3}, {a64, &w.k4}, {a65, &w.k5}},
                h);
        rhs(t + h, w.ytmp, w.k6);
        combine(w.ynew, y, {{b1, &w.k1}, {b3, &w.k3}, {b4, &w.k4}, {b5, &w.k5}, {b6, &w.k6}},
                h);
        rhs(t + h, w.ynew, w.k7);

        std::fill(w.err.begin(), w.err.end(), 0.0);
        kernels::axpy(n, h * e1, w.k1.data(), w.err.data());
        kernels::axpy(n, h * e3, w.k3.data(), w.err.data());
        kernels::axpy(n, h * e4, w.k4.data(), w.err.data());
        kernels::axpy(n, h * e5, w.k5.data(), w.err.data());
        kernels::axpy(n, h * e6, w.k6.data(), w.err.data());
        kernels::axpy(n, h * e7, w.k7.data(), w.err.data());
        const double err = kernels::error_norm(n, w.err.data(), y.data(), w.ynew.data(),
                                               opts.abs_tol, opts.rel_tol);

        const double safety = 0.9;
        if (err <= 1.0) {
            t = hit_sample ? target : t + h;
            std::copy(w.ynew.begin(), w.ynew.end(), y.begin());
            if (project) {
                project(y);
                k1_fresh = false; // projection invalidates the FSAL derivative
            } else {
                std::swap(w.k1, w.k7); // FSAL
                k1_fresh = true;
            }
            if (hit_sample) {
                on_sample(next_sample, t, y);
                ++next_sample;
                if (next_sample >= sample_times.size())
                    break;
            }
            const double grow =
                err == 0.0 ? 5.0 : std::clamp(safety * std::pow(err, -0.2), 0.2, 5.0);
            // A step clamped to a sample time carries no error-control signal
            // for shrinking, so only let it enlarge the controller step.
            h_ctrl = hit_sample ? std::max(h_ctrl, std::min(h * grow, opts.max_step))
                                : std::min(h * grow, opts.max_step);
        } else {
            h_ctrl = h * std::clamp(safety * std::pow(err, -0.2), 0.2, 1.0);
        }
    }
}

} // namespace dicke::ode
