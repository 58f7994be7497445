#pragma once

#include "dicke/algebra.hpp"

#include <Eigen/Core>

// Formal quantum Ito calculus over the vacuum increments {dtau, dB, dB+, dL}
// with operator-valued coefficients, following the Hudson-Parthasarathy
// multiplication table
//   dL dL = dL,  dL dB+ = dB+,  dB dL = dB,  dB dB+ = dtau,
// with every other product of increments equal to zero.
namespace dicke {

// Element  one*1 + dtau*dtau + db*dB + dbdag*dB+ + dlambda*dL  with square
// complex matrix coefficients (system operators commute with the increments).
struct ItoExpr {
    Eigen::MatrixXcd one, dtau, db, dbdag, dlambda;

    static ItoExpr zero(int dim);
    int dim() const { return static_cast<int>(one.rows()); }

    ItoExpr& operator+=(const ItoExpr& rhs);
    ItoExpr& operator*=(double s);
};

ItoExpr operator+(ItoExpr lhs, const ItoExpr& rhs);

// Bilinear Ito product; coefficients multiply in order (left stays left).
// Throws std::domain_error on dimension mismatch.
ItoExpr ito_mul(const ItoExpr& lhs, const ItoExpr& rhs);

// Coefficients of the quantum SDE  dU = (A0 dtau + A+ dB + A- dB+ + AL dL) U.
struct SdeCoefficients {
    Eigen::MatrixXcd a0, a_plus, a_minus, a_lambda;
};

// Increment generator G = -i (chi R+ dB + chi R- dB+ + S dL) with the Stark
// phase operator S = diag(eta_+ N/2 + eta_- m).
ItoExpr generator(const EnsembleSpec& spec, const Couplings& c);

// exp(G) - 1 summed term by term under the Ito product. Truncates once a
// term's entrywise max norm drops below `tolerance` in every slot; throws
// ConvergenceError if `max_terms` is reached first and std::domain_error if G
// carries a 1 or dtau component (not a pure-increment generator).
SdeCoefficients exponentiate_increment(const ItoExpr& g, double tolerance = 1e-14,
                                       int max_terms = 200);

// The same coefficients from their closed forms,
//   A0 = chi^2 R+ phi2(S) R-,  A- = phi1(S) chi R-,
//   A+ = chi R+ phi1(S),       AL = e^{-iS} - 1,
// with the phi functions evaluated on the diagonal of S.
SdeCoefficients closed_form_coefficients(const EnsembleSpec& spec,
                                         const Couplings& c);

// Vacuum-traced master-equation right-hand side generated by the SDE:
//   A0 rho + rho A0^+ + A- rho A-^+
// (all terms with a surviving dB, dB+ or dL expectation vanish in the
// zero-photon-density state). Throws std::domain_error on dimension mismatch.
Eigen::MatrixXcd master_equation_rhs_from_sde(const SdeCoefficients& coeffs,
                                              const Eigen::MatrixXcd& rho);

} // namespace dicke
