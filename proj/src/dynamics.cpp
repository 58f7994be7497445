#include "dicke/dynamics.hpp"

#include "dicke/errors.hpp"
#include "dicke/kernels.hpp"
#include "dicke/observables.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dicke {

namespace {

constexpr double trace_tolerance = 1e-9;
constexpr double negativity_tolerance = 1e-12;

void clamp_row(const double* raw, double* out, int dim) {
    for (int i = 0; i < dim; ++i)
        out[i] = raw[i] < 0.0 ? 0.0 : raw[i];
}

} // namespace

void LadderState::validate(const EnsembleSpec& spec) const {
    if (static_cast<int>(populations.size()) != spec.dim())
        throw std::domain_error("LadderState: expected " + std::to_string(spec.dim()) +
                                " populations, got " +
                                std::to_string(populations.size()));
    double sum = 0.0;
    for (double p : populations) {
        if (!std::isfinite(p))
            throw std::domain_error("LadderState: non-finite population");
        if (p < -negativity_tolerance)
            throw std::domain_error("LadderState: negative population " +
                                    std::to_string(p));
        sum += p;
    }
    if (std::abs(sum - 1.0) > trace_tolerance)
        throw std::domain_error("LadderState: populations sum to " +
                                std::to_string(sum) + ", expected 1");
}

void FullState::validate(const EnsembleSpec& spec) const {
    if (rho.rows() != spec.dim() || rho.cols() != spec.dim())
        throw std::domain_error("FullState: dimension mismatch");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::domain_error("FullState: density matrix is not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > trace_tolerance ||
        std::abs(rho.trace().imag()) > trace_tolerance)
        throw std::domain_error("FullState: trace is not 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho,
                                                       Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8)
        throw std::domain_error("FullState: negative eigenvalue " +
                                std::to_string(es.eigenvalues().minCoeff()));
}

void TimeGrid::validate() const {
    if (!(t_start >= 0.0) || !(t_end > t_start))
        throw std::domain_error("TimeGrid: need t_end > t_start >= 0");
    if (output_points < 2)
        throw std::domain_error("TimeGrid: output_points must be >= 2");
}

std::vector<double> TimeGrid::sample_times() const {
    validate();
    std::vector<double> t(output_points);
    const double dt = (t_end - t_start) / (output_points - 1);
    for (int i = 0; i < output_points; ++i)
        t[i] = t_start + i * dt;
    t.back() = t_end;
    return t;
}

std::vector<double> transition_rates(const EnsembleSpec& spec, const Couplings& c) {
    c.validate();
    const int d = spec.dim();
    const double g0 = 2.0 * c.chi * c.chi;
    std::vector<double> w(d, 0.0);
    for (int k = 1; k < d; ++k) {
        const double m = spec.m_at(k);
        w[k] = g0 * ladder_coefficient(spec, m) * c_factor(spec, c, m - 1.0);
    }
    return w;
}

std::vector<double> diagonal_rhs(const EnsembleSpec& spec, const Couplings& c,
                                 const LadderState& state) {
    state.validate(spec);
    const auto w = transition_rates(spec, c);
    std::vector<double> out(spec.dim());
    kernels::ladder_stencil(w.size(), w.data(), state.populations.data(), out.data());
    return out;
}

PulseTrace evolve_diagonal(const EnsembleSpec& spec, const Couplings& c,
                           const LadderState& initial, const TimeGrid& grid,
                           const IntegratorOptions& opts) {
    initial.validate(spec);
    const auto times = grid.sample_times();
    const auto w = transition_rates(spec, c);
    const int d = spec.dim();

    PulseTrace trace;
    trace.dim = d;
    trace.times.resize(times.size());
    trace.intensities.resize(times.size());
    trace.populations.resize(times.size() * d);
    trace.min_population = 0.0;

    std::vector<double> y = initial.populations;
    std::vector<double> clamped(d);

    auto rhs = [&](double, std::span<const double> p, std::span<double> dp) {
        kernels::ladder_stencil(w.size(), w.data(), p.data(), dp.data());
    };
    auto sample = [&](std::size_t i, double t, std::span<const double> p) {
        const double sum = std::accumulate(p.begin(), p.end(), 0.0);
        const double drift = std::abs(sum - 1.0);
        trace.max_trace_drift = std::max(trace.max_trace_drift, drift);
        if (drift > trace_tolerance) {
            std::ostringstream os;
            os << "evolve_diagonal: trace drift " << drift << " at tau=" << t;
            throw IntegrationError(os.str(), t);
        }
        trace.min_population =
            std::min(trace.min_population, *std::min_element(p.begin(), p.end()));
        clamp_row(p.data(), clamped.data(), d);
        trace.times[i] = t;
        std::copy(clamped.begin(), clamped.end(), trace.populations.begin() + i * d);
        trace.intensities[i] = intensity(spec, c, LadderState{clamped});
    };

    ode::integrate(rhs, times, y, sample, opts);
    return trace;
}

namespace {

// Precomputed operators of the full master equation:
//   rhs(rho) = lower rho lower^+ - drift rho - rho drift^+
// with lower = chi a_-(S) R- and drift = chi^2/2 R+ (a_0(S) - i a_s(S)) R-.
struct FullGenerator {
    Eigen::MatrixXcd lower;
    Eigen::MatrixXcd drift;

    FullGenerator(const EnsembleSpec& spec, const Couplings& c) {
        c.validate();
        const Eigen::MatrixXcd rp = rplus_operator(spec);
        const Eigen::MatrixXcd rm = rminus_operator(spec);
        const Eigen::MatrixXcd am = operator_function(spec, c, OpFunction::a_minus);
        const Eigen::MatrixXcd a0 = operator_function(spec, c, OpFunction::a0);
        const Eigen::MatrixXcd as = operator_function(spec, c, OpFunction::a_s);
        const cplx i{0.0, 1.0};
        lower = c.chi * am * rm;
        drift = 0.5 * c.chi * c.chi * rp * (a0 - i * as) * rm;
    }

    void apply(const Eigen::Ref<const Eigen::MatrixXcd>& rho,
               Eigen::MatrixXcd& out) const {
        out.noalias() = lower * rho * lower.adjoint();
        out.noalias() -= drift * rho;
        out.noalias() -= rho * drift.adjoint();
    }
};

} // namespace

Eigen::MatrixXcd full_rhs(const EnsembleSpec& spec, const Couplings& c,
                          const FullState& state) {
    state.validate(spec);
    FullGenerator gen(spec, c);
    Eigen::MatrixXcd out(spec.dim(), spec.dim());
    gen.apply(state.rho, out);
    return out;
}

FullEvolution evolve_full(const EnsembleSpec& spec, const Couplings& c,
                          const FullState& initial, const TimeGrid& grid,
                          const IntegratorOptions& opts, int n_atoms_cap) {
    if (spec.n_atoms() > n_atoms_cap)
        throw CapacityError("evolve_full: n_atoms=" + std::to_string(spec.n_atoms()) +
                            " exceeds the dense-matrix cap " +
                            std::to_string(n_atoms_cap) +
                            "; use evolve_diagonal for large ensembles");
    initial.validate(spec);
    const auto times = grid.sample_times();
    const int d = spec.dim();
    const FullGenerator gen(spec, c);

    FullEvolution evo;
    evo.states.resize(times.size());
    evo.trace.dim = d;
    evo.trace.times.resize(times.size());
    evo.trace.intensities.resize(times.size());
    evo.trace.populations.resize(times.size() * d);

    // The complex matrix is integrated through its flat real storage.
    std::vector<double> y(2 * d * d);
    Eigen::Map<Eigen::MatrixXcd>(reinterpret_cast<cplx*>(y.data()), d, d) =
        initial.rho;

    auto as_matrix = [d](std::span<const double> v) {
        return Eigen::Map<const Eigen::MatrixXcd>(
            reinterpret_cast<const cplx*>(v.data()), d, d);
    };

    Eigen::MatrixXcd scratch(d, d);
    auto rhs = [&](double, std::span<const double> v, std::span<double> dv) {
        gen.apply(as_matrix(v), scratch);
        Eigen::Map<Eigen::MatrixXcd>(reinterpret_cast<cplx*>(dv.data()), d, d) =
            scratch;
    };
    auto project = [&](std::span<double> v) {
        Eigen::Map<Eigen::MatrixXcd> rho(reinterpret_cast<cplx*>(v.data()), d, d);
        scratch = 0.5 * (rho + rho.adjoint().eval());
        rho = scratch;
    };
    std::vector<double> raw(d), clamped(d);
    auto sample = [&](std::size_t i, double t, std::span<const double> v) {
        auto rho = as_matrix(v);
        evo.states[i] = rho;
        const double drift = std::abs(rho.trace().real() - 1.0) +
                             std::abs(rho.trace().imag());
        evo.trace.max_trace_drift = std::max(evo.trace.max_trace_drift, drift);
        if (drift > trace_tolerance) {
            std::ostringstream os;
            os << "evolve_full: trace drift " << drift << " at tau=" << t;
            throw IntegrationError(os.str(), t);
        }
        for (int k = 0; k < d; ++k)
            raw[k] = rho(k, k).real();
        evo.trace.min_population =
            std::min(evo.trace.min_population,
                     *std::min_element(raw.begin(), raw.end()));
        clamp_row(raw.data(), clamped.data(), d);
        evo.trace.times[i] = t;
        std::copy(clamped.begin(), clamped.end(),
                  evo.trace.populations.begin() + i * d);
        evo.trace.intensities[i] = intensity(spec, c, LadderState{clamped});
    };

    ode::integrate(rhs, times, y, sample, opts, project);
    return evo;
}

double w_state_decay(const EnsembleSpec& spec, const Couplings& c, double tau) {
    if (!(tau >= 0.0))
        throw std::domain_error("w_state_decay: tau must be >= 0, got " +
                                std::to_string(tau));
    c.validate();
    const double r = spec.spin();
    const double rate =
        4.0 * c.chi * c.chi * r * c_modulation(r * c.eta_diff());
    return std::exp(-rate * tau);
}

LadderState fully_excited_state(const EnsembleSpec& spec) {
    LadderState s{std::vector<double>(spec.dim(), 0.0)};
    s.populations.back() = 1.0;
    return s;
}

LadderState semi_excited_state(const EnsembleSpec& spec) {
    return ladder_basis_state(spec, 0.0);
}

LadderState w_state(const EnsembleSpec& spec) {
    return ladder_basis_state(spec, -spec.spin() + 1.0);
}

LadderState ladder_basis_state(const EnsembleSpec& spec, double m) {
    LadderState s{std::vector<double>(spec.dim(), 0.0)};
    s.populations[spec.index_of(m)] = 1.0;
    return s;
}

} // namespace dicke
