#include "dicke/algebra.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dicke {

EnsembleSpec::EnsembleSpec(int n_atoms) : n_(n_atoms) {
    if (n_atoms < 1)
        throw std::domain_error("EnsembleSpec: n_atoms must be >= 1, got " +
                                std::to_string(n_atoms));
}

double EnsembleSpec::m_at(int k) const {
    if (k < 0 || k >= dim())
        throw std::domain_error("EnsembleSpec: basis index " + std::to_string(k) +
                                " outside [0, " + std::to_string(dim() - 1) + "]");
    return -spin() + k;
}

bool EnsembleSpec::on_ladder(double m) const noexcept {
    const double k = m + spin();
    const double rounded = std::round(k);
    return std::abs(k - rounded) <= 1e-9 && rounded >= -0.5 && rounded < dim() - 0.5;
}

int EnsembleSpec::index_of(double m) const {
    if (!on_ladder(m)) {
        std::ostringstream os;
        os << "ladder index m=" << m << " is not on the ladder -r..r with r="
           << spin();
        throw std::domain_error(os.str());
    }
    return static_cast<int>(std::llround(m + spin()));
}

Couplings::Couplings(double chi_, double eta_plus_, double eta_minus_, double q_)
    : chi(chi_), eta_plus(eta_plus_), eta_minus(eta_minus_), q(q_) {
    validate();
}

void Couplings::validate() const {
    if (!(std::isfinite(chi) && std::isfinite(eta_plus) && std::isfinite(eta_minus) &&
          std::isfinite(q)))
        throw std::domain_error("Couplings: all values must be finite");
    if (chi < 0.0)
        throw std::domain_error("Couplings: chi must be >= 0, got " +
                                std::to_string(chi));
    if (!(q > 0.0))
        throw std::domain_error("Couplings: q must be > 0, got " + std::to_string(q));
}

bool Couplings::outside_validity_range() const noexcept {
    return !(chi < 1.0 && std::abs(eta_plus) < chi && std::abs(eta_minus) < chi);
}

double stark_argument(const EnsembleSpec& spec, const Couplings& c, double m) {
    return c.eta_plus * spec.n_atoms() / 2.0 + c.eta_minus * m;
}

Eigen::VectorXd stark_phases(const EnsembleSpec& spec, const Couplings& c) {
    Eigen::VectorXd x(spec.dim());
    for (int k = 0; k < spec.dim(); ++k)
        x[k] = stark_argument(spec, c, spec.m_at(k));
    return x;
}

// ---------------------------------------------------------------------------
// Scalar branch implementations.

namespace detail {

double c_direct(double x) {
    const double s = std::sin(0.5 * x);
    return 2.0 * s * s / (x * x);
}

double c_series(double x) {
    const double x2 = x * x;
    // (1 - cos x)/x^2 = 1/2 - x^2/4! + x^4/6! - x^6/8! + x^8/10! - x^10/12!
    return 0.5 +
           x2 * (-1.0 / 24.0 +
                 x2 * (1.0 / 720.0 +
                       x2 * (-1.0 / 40320.0 +
                             x2 * (1.0 / 3628800.0 + x2 * (-1.0 / 479001600.0)))));
}

double as_direct(double x) {
    return 2.0 * (x - std::sin(x)) / (x * x);
}

double as_series(double x) {
    const double x2 = x * x;
    // 2(x - sin x)/x^2 = 2x (1/3! - x^2/5! + x^4/7! - ...)
    return 2.0 * x *
           (1.0 / 6.0 +
            x2 * (-1.0 / 120.0 +
                  x2 * (1.0 / 5040.0 +
                        x2 * (-1.0 / 362880.0 +
                              x2 * (1.0 / 39916800.0 + x2 * (-1.0 / 6227020800.0))))));
}

double sinc_direct(double x) {
    return std::sin(x) / x;
}

double sinc_series(double x) {
    const double x2 = x * x;
    return 1.0 +
           x2 * (-1.0 / 6.0 +
                 x2 * (1.0 / 120.0 +
                       x2 * (-1.0 / 5040.0 +
                             x2 * (1.0 / 362880.0 + x2 * (-1.0 / 39916800.0)))));
}

double cosm1x_direct(double x) {
    const double s = std::sin(0.5 * x);
    return -2.0 * s * s / x;
}

double cosm1x_series(double x) {
    const double x2 = x * x;
    // (cos x - 1)/x = -x/2! + x^3/4! - x^5/6! + ...
    return x * (-0.5 +
                x2 * (1.0 / 24.0 +
                      x2 * (-1.0 / 720.0 +
                            x2 * (1.0 / 40320.0 +
                                  x2 * (-1.0 / 3628800.0 + x2 * (1.0 / 479001600.0))))));
}

cplx phi1_direct(double x) {
    return {cosm1x_direct(x), -sinc_direct(x)};
}

cplx phi1_series(double x) {
    return {cosm1x_series(x), -sinc_series(x)};
}

cplx phi2_direct(double x) {
    return {-c_direct(x), 0.5 * as_direct(x)};
}

cplx phi2_series(double x) {
    return {-c_series(x), 0.5 * as_series(x)};
}

} // namespace detail

double c_modulation(double x) {
    return std::abs(x) < detail::series_threshold ? detail::c_series(x)
                                                  : detail::c_direct(x);
}

double nw_a0(double x) {
    return 2.0 * c_modulation(x);
}

double nw_as(double x) {
    return std::abs(x) < detail::series_threshold_sine ? detail::as_series(x)
                                                       : detail::as_direct(x);
}

cplx nw_aplus(double x) {
    if (std::abs(x) < detail::series_threshold)
        return {detail::cosm1x_series(x), detail::sinc_series(x)};
    return {detail::cosm1x_direct(x), detail::sinc_direct(x)};
}

cplx nw_aminus(double x) {
    return std::conj(nw_aplus(x));
}

cplx nw_phi1(double x) {
    return std::abs(x) < detail::series_threshold ? detail::phi1_series(x)
                                                  : detail::phi1_direct(x);
}

cplx nw_phi2(double x) {
    return std::abs(x) < detail::series_threshold_sine ? detail::phi2_series(x)
                                                       : detail::phi2_direct(x);
}

// ---------------------------------------------------------------------------

double ladder_coefficient(const EnsembleSpec& spec, double m) {
    const double r = spec.spin();
    if (!spec.on_ladder(m)) {
        std::ostringstream os;
        os << "ladder_coefficient: m=" << m << " is outside the ladder -r..r, r=" << r;
        throw std::domain_error(os.str());
    }
    return (r + m) * (r - m + 1.0);
}

double c_factor(const EnsembleSpec& spec, const Couplings& c, double m) {
    if (!spec.on_ladder(m)) {
        std::ostringstream os;
        os << "c_factor: m=" << m << " is outside the ladder -r..r, r=" << spec.spin();
        throw std::domain_error(os.str());
    }
    return c_modulation(stark_argument(spec, c, m));
}

double f_modulation(double n_atoms, double eta_diff) {
    if (!(n_atoms > 0.0))
        throw std::domain_error("f_modulation: n_atoms must be positive, got " +
                                std::to_string(n_atoms));
    const double x = n_atoms * eta_diff;
    if (std::abs(x) < detail::series_threshold) {
        // 8(1 - cos(x/2))/x^2 = (1 - cos u)/u^2 * 2 with u = x/2
        return 2.0 * detail::c_series(0.5 * x);
    }
    const double s = std::sin(0.25 * x); // 1 - cos(x/2) = 2 sin^2(x/4)
    return 16.0 * s * s / (x * x);
}

Eigen::MatrixXcd operator_function(const EnsembleSpec& spec, const Couplings& c,
                                   OpFunction which) {
    const int d = spec.dim();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        const double x = stark_argument(spec, c, spec.m_at(k));
        cplx v;
        switch (which) {
        case OpFunction::a0:
            v = nw_a0(x);
            break;
        case OpFunction::a_s:
            v = nw_as(x);
            break;
        case OpFunction::a_plus:
            v = nw_aplus(x);
            break;
        case OpFunction::a_minus:
            v = nw_aminus(x);
            break;
        case OpFunction::lambda_arg:
            v = x;
            break;
        default:
            throw std::invalid_argument("operator_function: unknown selector");
        }
        out(k, k) = v;
    }
    return out;
}

Eigen::MatrixXcd r3_operator(const EnsembleSpec& spec) {
    const int d = spec.dim();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k < d; ++k)
        out(k, k) = spec.m_at(k);
    return out;
}

Eigen::MatrixXcd rplus_operator(const EnsembleSpec& spec) {
    const int d = spec.dim();
    const double r = spec.spin();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    // R+ |r,m> = sqrt((r-m)(r+m+1)) |r,m+1>
    for (int k = 0; k + 1 < d; ++k) {
        const double m = spec.m_at(k);
        out(k + 1, k) = std::sqrt((r - m) * (r + m + 1.0));
    }
    return out;
}

Eigen::MatrixXcd rminus_operator(const EnsembleSpec& spec) {
    const int d = spec.dim();
    const double r = spec.spin();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    // R- |r,m> = sqrt((r+m)(r-m+1)) |r,m-1>
    for (int k = 1; k < d; ++k) {
        const double m = spec.m_at(k);
        out(k - 1, k) = std::sqrt((r + m) * (r - m + 1.0));
    }
    return out;
}

} // namespace dicke
