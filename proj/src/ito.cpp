#include "dicke/ito.hpp"

#include "dicke/errors.hpp"

#include <stdexcept>
#include <string>

namespace dicke {

namespace {

double max_abs(const Eigen::MatrixXcd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void require_same_dim(const ItoExpr& a, const ItoExpr& b, const char* who) {
    if (a.dim() != b.dim())
        throw std::domain_error(std::string(who) + ": dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()) + ")");
}

} // namespace

ItoExpr ItoExpr::zero(int dim) {
    ItoExpr e;
    e.one = Eigen::MatrixXcd::Zero(dim, dim);
    e.dtau = e.one;
    e.db = e.one;
    e.dbdag = e.one;
    e.dlambda = e.one;
    return e;
}

ItoExpr& ItoExpr::operator+=(const ItoExpr& rhs) {
    require_same_dim(*this, rhs, "ItoExpr::operator+=");
    one += rhs.one;
    dtau += rhs.dtau;
    db += rhs.db;
    dbdag += rhs.dbdag;
    dlambda += rhs.dlambda;
    return *this;
}

ItoExpr& ItoExpr::operator*=(double s) {
    one *= s;
    dtau *= s;
    db *= s;
    dbdag *= s;
    dlambda *= s;
    return *this;
}

ItoExpr operator+(ItoExpr lhs, const ItoExpr& rhs) {
    lhs += rhs;
    return lhs;
}

ItoExpr ito_mul(const ItoExpr& lhs, const ItoExpr& rhs) {
    require_same_dim(lhs, rhs, "ito_mul");
    ItoExpr out = ItoExpr::zero(lhs.dim());
    // The 1-slot acts as an ordinary operator factor on either side; among
    // genuine increments only dL dL, dL dB+, dB dL and dB dB+ survive.
    out.one = lhs.one * rhs.one;
    out.dtau = lhs.one * rhs.dtau + lhs.dtau * rhs.one + lhs.db * rhs.dbdag;
    out.db = lhs.one * rhs.db + lhs.db * rhs.one + lhs.db * rhs.dlambda;
    out.dbdag = lhs.one * rhs.dbdag + lhs.dbdag * rhs.one + lhs.dlambda * rhs.dbdag;
    out.dlambda =
        lhs.one * rhs.dlambda + lhs.dlambda * rhs.one + lhs.dlambda * rhs.dlambda;
    return out;
}

ItoExpr generator(const EnsembleSpec& spec, const Couplings& c) {
    c.validate();
    const cplx mi{0.0, -1.0};
    ItoExpr g = ItoExpr::zero(spec.dim());
    g.db = mi * c.chi * rplus_operator(spec);
    g.dbdag = mi * c.chi * rminus_operator(spec);
    g.dlambda = mi * operator_function(spec, c, OpFunction::lambda_arg);
    return g;
}

SdeCoefficients exponentiate_increment(const ItoExpr& g, double tolerance,
                                       int max_terms) {
    if (max_abs(g.one) != 0.0 || max_abs(g.dtau) != 0.0)
        throw std::domain_error(
            "exponentiate_increment: generator must be a pure increment "
            "(zero 1 and dtau coefficients)");
    if (!(tolerance > 0.0))
        throw std::domain_error("exponentiate_increment: tolerance must be > 0");

    ItoExpr sum = ItoExpr::zero(g.dim());
    ItoExpr term = g; // G^k / k!, starting at k = 1
    int k = 1;
    for (;;) {
        sum += term;
        const double largest =
            std::max({max_abs(term.one), max_abs(term.dtau), max_abs(term.db),
                      max_abs(term.dbdag), max_abs(term.dlambda)});
        if (largest < tolerance)
            break;
        if (++k > max_terms)
            throw ConvergenceError("exponentiate_increment: series did not reach "
                                   "tolerance within " +
                                       std::to_string(max_terms) + " terms",
                                   max_terms);
        term = ito_mul(term, g);
        term *= 1.0 / k;
    }

    // Pure-increment products can never regenerate the identity slot.
    if (max_abs(sum.one) != 0.0)
        throw std::domain_error("exponentiate_increment: identity slot became "
                                "nonzero; generator was not pure");

    return SdeCoefficients{sum.dtau, sum.db, sum.dbdag, sum.dlambda};
}

SdeCoefficients closed_form_coefficients(const EnsembleSpec& spec,
                                         const Couplings& c) {
    c.validate();
    const int d = spec.dim();
    const Eigen::MatrixXcd rp = rplus_operator(spec);
    const Eigen::MatrixXcd rm = rminus_operator(spec);
    const double chi = c.chi;

    Eigen::MatrixXcd phi1 = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXcd phi2 = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXcd alam = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        const double x = stark_argument(spec, c, spec.m_at(k));
        phi1(k, k) = nw_phi1(x);
        phi2(k, k) = nw_phi2(x);
        alam(k, k) = std::exp(cplx{0.0, -x}) - 1.0;
    }

    SdeCoefficients out;
    out.a0 = chi * chi * rp * phi2 * rm;
    out.a_minus = phi1 * (chi * rm);
    out.a_plus = (chi * rp) * phi1;
    out.a_lambda = alam;
    return out;
}

Eigen::MatrixXcd master_equation_rhs_from_sde(const SdeCoefficients& coeffs,
                                              const Eigen::MatrixXcd& rho) {
    if (rho.rows() != rho.cols() || rho.rows() != coeffs.a0.rows())
        throw std::domain_error("master_equation_rhs_from_sde: dimension mismatch");
    return coeffs.a0 * rho + rho * coeffs.a0.adjoint() +
           coeffs.a_minus * rho * coeffs.a_minus.adjoint();
}

} // namespace dicke
