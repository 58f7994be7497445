#pragma once

#include <Eigen/Core>

#include <complex>

// Finite su(2) Dicke representation and the scalar/operator factors that
// modulate the collective decay rates.
//
// Basis convention used everywhere in this library: basis index k = 0..2r
// corresponds to the ladder value m = -r + k, i.e. the ground state |r,-r>
// comes first and the fully excited state |r,r> last.
namespace dicke {

using cplx = std::complex<double>;

// Ensemble of n identical two-level emitters in the symmetric (maximal
// pseudo-spin) sector, r = n/2. Half-integer ladders (odd n) are supported.
class EnsembleSpec {
public:
    explicit EnsembleSpec(int n_atoms);

    int n_atoms() const noexcept { return n_; }
    double spin() const noexcept { return 0.5 * n_; }
    int dim() const noexcept { return n_ + 1; }

    // Ladder value of basis index k (0 = ground).
    double m_at(int k) const;
    // Inverse of m_at; throws std::domain_error for off-ladder m.
    int index_of(double m) const;
    bool on_ladder(double m) const noexcept;

private:
    int n_;
};

// Dimensionless model parameters: Raman coupling chi, Stark parameters
// eta_+/eta_- of the working levels, and the geometric intensity factor q.
struct Couplings {
    double chi = 0.0;
    double eta_plus = 0.0;
    double eta_minus = 0.0;
    double q = 1.0;

    Couplings() = default;
    Couplings(double chi, double eta_plus, double eta_minus, double q = 1.0);

    double eta_diff() const noexcept { return eta_plus - eta_minus; }
    // Effective Wiener-limit single-emitter rate, gamma_W = chi^2.
    double gamma_wiener() const noexcept { return chi * chi; }

    // Advisory only: the derivation assumes |eta_±| << chi << 1. The model
    // stays well defined outside that range (renormalized parameters), so
    // violations warn rather than fail.
    bool outside_validity_range() const noexcept;

    void validate() const; // throws std::domain_error on broken invariants
};

// Stark phase of ladder level m: x_m = eta_+ * N/2 + eta_- * m.
double stark_argument(const EnsembleSpec& spec, const Couplings& c, double m);

// All x_m by basis index.
Eigen::VectorXd stark_phases(const EnsembleSpec& spec, const Couplings& c);

// ---------------------------------------------------------------------------
// Scalar modulation functions. All have removable singularities at x = 0 that
// are resolved by a short Taylor series below a per-function threshold; the
// direct branches use 1 - cos x = 2 sin^2(x/2) so both branches stay accurate
// at the switchover.

namespace detail {

// Series is used below these thresholds. The (x - sin x)/x^2 family needs a
// wider series window: its direct branch only reaches ~1e-12 absolute
// accuracy near 1e-4.
inline constexpr double series_threshold = 1e-4;
inline constexpr double series_threshold_sine = 1e-2;

double c_series(double x);
double c_direct(double x);
double as_series(double x);
double as_direct(double x);
double sinc_series(double x);  // sin(x)/x
double sinc_direct(double x);
double cosm1x_series(double x); // (cos x - 1)/x
double cosm1x_direct(double x);
cplx phi1_series(double x);
cplx phi1_direct(double x);
cplx phi2_series(double x);
cplx phi2_direct(double x);

} // namespace detail

// C(x) = (1 - cos x)/x^2, C(0) = 1/2. Satisfies 0 <= C <= 1/2.
double c_modulation(double x);

// a_0(x) = 2(1 - cos x)/x^2,            a_0(0) = 1
// a_s(x) = 2(x - sin x)/x^2,            a_s(0) = 0
// a_±(x) = (cos x - 1)/x ± i sin(x)/x,  a_±(0) = ±i,  a_+ a_- = a_0
double nw_a0(double x);
double nw_as(double x);
cplx nw_aplus(double x);
cplx nw_aminus(double x);

// phi_1(x) = (e^{-ix} - 1)/x,        phi_1(0) = -i   (equals a_-)
// phi_2(x) = (e^{-ix} - 1 + ix)/x^2, phi_2(0) = -1/2
cplx nw_phi1(double x);
cplx nw_phi2(double x);

// ---------------------------------------------------------------------------
// Ladder operations.

// g_{m,m-1} = (r+m)(r-m+1), the |<r,m-1|R_-|r,m>|^2 transition weight.
// m must lie on the ladder; the bottom level returns 0 (no lower neighbor).
// Throws std::domain_error for off-ladder m, naming the offending index.
double ladder_coefficient(const EnsembleSpec& spec, double m);

// C_m = C(x_m) with x_m = eta_+ N/2 + eta_- m. Total on valid m.
double c_factor(const EnsembleSpec& spec, const Couplings& c, double m);

// Decay-rate modulation of the singly excited symmetric state,
//   f = 8 (1 - cos(n (eta_+ - eta_-)/2)) / (n (eta_+ - eta_-))^2,
// normalized so that f -> 1 in the Wiener limit. Accepts real n > 0 so the
// continuous zeros (critical atom numbers) can be located exactly.
double f_modulation(double n_atoms, double eta_diff);

// ---------------------------------------------------------------------------
// Operator-valued forms (diagonal in the Dicke basis).

enum class OpFunction { a0, a_s, a_plus, a_minus, lambda_arg };

// Diagonal matrix whose (k,k) entry is the selected scalar function evaluated
// at x_{m(k)}; `lambda_arg` returns the phase operator S = diag(x_m) itself.
Eigen::MatrixXcd operator_function(const EnsembleSpec& spec, const Couplings& c,
                                   OpFunction which);

// Collective su(2) generators in the (2r+1)-dimensional representation:
// R3 = diag(m), R± the ladder raising/lowering operators.
Eigen::MatrixXcd r3_operator(const EnsembleSpec& spec);
Eigen::MatrixXcd rplus_operator(const EnsembleSpec& spec);
Eigen::MatrixXcd rminus_operator(const EnsembleSpec& spec);

} // namespace dicke
