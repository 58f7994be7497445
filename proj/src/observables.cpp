#include "dicke/observables.hpp"

#include "dicke/errors.hpp"
#include "dicke/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace dicke {

double intensity(const EnsembleSpec& spec, const Couplings& c,
                 const LadderState& state) {
    state.validate(spec);
    const auto w = transition_rates(spec, c);
    return c.q * kernels::dot(w.size(), w.data(), state.populations.data());
}

double sech2_reference(int n_atoms, double gamma_w, double q, double tau) {
    if (n_atoms < 2)
        throw std::domain_error("sech2_reference: n_atoms must be >= 2");
    if (!(gamma_w > 0.0))
        throw std::domain_error("sech2_reference: gamma_w must be > 0");
    const double n = n_atoms;
    const double tau0 = std::log(n) / (gamma_w * n);
    const double s = 1.0 / std::cosh(gamma_w * 0.5 * n * (tau - tau0));
    return q * 0.25 * n * n * gamma_w * s * s;
}

double delay_time_sum(const EnsembleSpec& spec, double gamma_w, int n_emitted) {
    if (!(gamma_w > 0.0))
        throw std::domain_error("delay_time_sum: gamma_w must be > 0");
    if (n_emitted < 0 || n_emitted > spec.n_atoms())
        throw std::domain_error("delay_time_sum: n_emitted=" +
                                std::to_string(n_emitted) + " outside [0, " +
                                std::to_string(spec.n_atoms()) + "]");
    const double r = spec.spin();
    double sum = 0.0;
    for (int j = 0; j < n_emitted; ++j) {
        const double m = r - j;
        sum += 1.0 / (gamma_w * ladder_coefficient(spec, m));
    }
    return sum;
}

CriticalSet critical_numbers(const Couplings& c, int k_max) {
    c.validate();
    if (k_max < 1)
        throw std::domain_error("critical_numbers: k_max must be >= 1");
    const double diff = c.eta_diff();
    if (diff == 0.0)
        throw NoSuppressionError(
            "critical_numbers: eta_plus == eta_minus, the modulation function is "
            "identically 1 and collective decay is never suppressed");

    CriticalSet set;
    set.eta_diff = diff;
    const double n1 = 4.0 * std::numbers::pi / std::abs(diff);
    for (int k = 1; k <= k_max; ++k) {
        const double v = k * n1;
        if (!std::isfinite(v))
            break;
        const double f = f_modulation(v, diff);
        if (!(f < 1e-12))
            throw std::logic_error("critical_numbers: f(N*) = " + std::to_string(f) +
                                   " did not vanish");
        set.values.push_back(v);
        const long long nint = std::llround(v);
        set.nearest.push_back(
            {nint, nint >= 1 ? f_modulation(static_cast<double>(nint), diff) : 1.0});
    }
    return set;
}

StabilizedStates stabilized_states(const EnsembleSpec& spec, const Couplings& c,
                                   double tolerance) {
    c.validate();
    if (!(tolerance >= 0.0))
        throw std::domain_error("stabilized_states: tolerance must be >= 0");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    StabilizedStates out;
    out.n_atoms = spec.n_atoms();
    for (int k = 0; k < spec.dim(); ++k) {
        const double m = spec.m_at(k);
        const double x = stark_argument(spec, c, m);
        const long long kk = std::llround(x / two_pi);
        if (kk < 1)
            continue;
        const double residual = std::abs(x - two_pi * static_cast<double>(kk));
        if (residual <= tolerance)
            out.members.push_back({m, static_cast<int>(kk), residual});
    }
    return out;
}

PeakInfo peak_and_delay(const PulseTrace& trace) {
    if (trace.size() == 0)
        throw std::domain_error("peak_and_delay: empty trace");
    std::size_t best = 0;
    for (std::size_t i = 1; i < trace.size(); ++i)
        if (trace.intensities[i] > trace.intensities[best])
            best = i;
    PeakInfo info;
    info.peak_intensity = trace.intensities[best];
    info.peak_time = trace.times[best];
    info.has_delay = trace.size() >= 2 &&
                     info.peak_time > trace.times[0] + (trace.times[1] - trace.times[0]);
    return info;
}

// ---------------------------------------------------------------------------

void LevelScheme::validate() const {
    const std::size_t n = energies.size();
    if (n < 2)
        throw std::domain_error("LevelScheme: need at least two levels");
    if (dipole.size() != n)
        throw std::domain_error("LevelScheme: dipole matrix must be " +
                                std::to_string(n) + "x" + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (dipole[i].size() != n)
            throw std::domain_error("LevelScheme: dipole matrix row " +
                                    std::to_string(i) + " has wrong length");
        if (dipole[i][i] != 0.0)
            throw std::domain_error("LevelScheme: diagonal dipole element d_" +
                                    std::to_string(i) + std::to_string(i) +
                                    " must vanish by parity");
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(dipole[i][j] - dipole[j][i]) > 1e-12)
                throw std::domain_error("LevelScheme: dipole matrix must be symmetric");
    }
    if (lower < 0 || upper < 0 || lower >= static_cast<int>(n) ||
        upper >= static_cast<int>(n) || lower == upper)
        throw std::domain_error("LevelScheme: invalid working pair");
    if (!(omega_gamma > 0.0))
        throw std::domain_error("LevelScheme: omega_gamma must be > 0");
    if (!(mu > 0.0))
        throw std::domain_error("LevelScheme: mu must be > 0");
    if (!(guard_band >= 0.0))
        throw std::domain_error("LevelScheme: guard_band must be >= 0");
}

namespace {

double guarded_inverse(const LevelScheme& scheme, double denom, int level) {
    if (std::abs(denom) < scheme.guard_band * scheme.omega_gamma) {
        std::ostringstream os;
        os << "pi parameter pole: denominator " << denom
           << " within the guard band for intermediate level " << level;
        throw ResonanceError(os.str(), level);
    }
    return 1.0 / denom;
}

} // namespace

std::complex<double> pi_nm(const LevelScheme& scheme, int n, int m, double omega) {
    scheme.validate();
    const int levels = static_cast<int>(scheme.energies.size());
    if (n < 0 || m < 0 || n >= levels || m >= levels)
        throw std::domain_error("pi_nm: level index out of range");
    double sum = 0.0;
    for (int j = 0; j < levels; ++j) {
        const double dd = scheme.dipole[n][j] * scheme.dipole[j][m];
        if (dd == 0.0)
            continue;
        sum += dd * (guarded_inverse(scheme, scheme.omega(j, n) + omega, j) +
                     guarded_inverse(scheme, scheme.omega(j, m) - omega, j));
    }
    return {sum, 0.0};
}

std::complex<double> pi_level(const LevelScheme& scheme, int k, double omega) {
    scheme.validate();
    const int levels = static_cast<int>(scheme.energies.size());
    if (k < 0 || k >= levels)
        throw std::domain_error("pi_level: level index out of range");
    double sum = 0.0;
    for (int j = 0; j < levels; ++j) {
        const double d = scheme.dipole[k][j];
        if (d == 0.0)
            continue;
        sum += d * d * (guarded_inverse(scheme, scheme.omega(k, j) + omega, j) +
                        guarded_inverse(scheme, scheme.omega(k, j) - omega, j));
    }
    return {sum, 0.0};
}

PiValues pi_parameters(const LevelScheme& scheme, double omega) {
    return {pi_nm(scheme, scheme.upper, scheme.lower, omega),
            pi_level(scheme, scheme.lower, omega),
            pi_level(scheme, scheme.upper, omega)};
}

Couplings dimensionless_couplings(const LevelScheme& scheme) {
    scheme.validate();
    const double wg = scheme.omega_gamma;
    const double d21 =
        0.5 *
        (pi_nm(scheme, scheme.upper, scheme.lower, wg).real() +
         pi_nm(scheme, scheme.upper, scheme.lower, -scheme.omega_cl).real()) *
        scheme.field_amplitude;
    // chi is an amplitude; its sign convention is absorbed into the phase.
    const double chi = std::abs(std::sqrt(2.0) * wg * d21 / scheme.mu);

    const double pi1 = pi_level(scheme, scheme.lower, wg).real();
    const double pi2 = pi_level(scheme, scheme.upper, wg).real();
    double eta_plus = 0.0, eta_minus = 0.0;
    if (d21 == 0.0) {
        if (pi2 + pi1 != 0.0 || pi2 - pi1 != 0.0)
            throw DegenerateCouplingError(
                "dimensionless_couplings: D_21 = 0 while the Stark parameters are "
                "nonzero (eta_± divides by D_21^2)");
    } else {
        const double chi2_over_d2 = chi * chi / (d21 * d21);
        eta_plus = chi2_over_d2 * (pi2 + pi1) * wg;
        eta_minus = chi2_over_d2 * (pi2 - pi1) * wg;
    }
    return Couplings(chi, eta_plus, eta_minus, 1.0);
}

} // namespace dicke
