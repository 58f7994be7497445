#pragma once

#include "dicke/algebra.hpp"
#include "dicke/dynamics.hpp"

#include <complex>
#include <vector>

// Physical outputs and analysis: emission intensity, the Wiener sech^2
// reference pulse, delay times, critical atom numbers, stabilized states and
// the dimensional-coupling helpers.
namespace dicke {

// Anti-Stokes emission intensity (units of hbar*omega_Gamma per unit tau,
// the energy-quantum factor absorbed into q's normalization):
//   I = q * 2 chi^2 * sum_m g_{m,m-1} C_{m-1} p_m.
// Equals -q * d<m>/dtau of the diagonal dynamics.
double intensity(const EnsembleSpec& spec, const Couplings& c,
                 const LadderState& state);

// Large-N Wiener reference pulse
//   I(tau) = q (N^2/4) gamma sech^2(gamma (N/2)(tau - tau0)),
//   tau0   = ln(N) / (gamma N),
// evaluated with the caller's effective rate gamma_w (use chi^2).
double sech2_reference(int n_atoms, double gamma_w, double q, double tau);

// Mean emission time of the first n_emitted photons from a fully excited
// start: sum of inverse per-transition rates descending from the top,
//   <tau> = sum_{m=r-n+1}^{r} 1/(gamma_w g_{m,m-1}).
// n_emitted = 0 returns 0 (emission without delay).
double delay_time_sum(const EnsembleSpec& spec, double gamma_w, int n_emitted);

// Critical ensemble sizes N*(k) = 4 pi k / |eta_+ - eta_-| at which the
// W-state decay modulation f vanishes.
struct CriticalSet {
    double eta_diff = 0.0;
    std::vector<double> values; // ascending, N*(k) = k * N*(1)
    struct NearestInteger {
        long long n;
        double f_value;
    };
    std::vector<NearestInteger> nearest; // physical-N companion per k
};

// Throws NoSuppressionError when eta_+ == eta_- (f has no zeros).
CriticalSet critical_numbers(const Couplings& c, int k_max);

// Ladder states whose Stark phase sits on 2 pi k (k >= 1), where the downward
// rate vanishes and the state is stabilized.
struct StabilizedStates {
    int n_atoms = 0;
    struct Member {
        double m;
        int k;
        double residual; // |x_m - 2 pi k|
    };
    std::vector<Member> members;
};

StabilizedStates stabilized_states(const EnsembleSpec& spec, const Couplings& c,
                                   double tolerance);

struct PeakInfo {
    double peak_intensity = 0.0;
    double peak_time = 0.0;
    bool has_delay = false; // peak later than one grid spacing after start
};

// Ties break toward the earliest time. Throws std::domain_error on an empty
// trace.
PeakInfo peak_and_delay(const PulseTrace& trace);

// ---------------------------------------------------------------------------
// Dimensional helpers (natural units hbar = c = 1; energies are angular
// frequencies). These feed the dimensionless couplings from raw level data.

struct LevelScheme {
    std::vector<double> energies;              // E_j
    std::vector<std::vector<double>> dipole;   // d_{kj}, symmetric, zero diagonal
    double field_amplitude = 0.0;              // classical amplitude
    double omega_gamma = 0.0;                  // central quantized-field frequency
    double omega_cl = 0.0;                     // classical carrier
    int lower = 0;                             // working pair: indices of E_1,
    int upper = 1;                             // E_2 in `energies`
    double mu = 1.7320508075688772;            // geometry correction, sqrt(3)
    double guard_band = 1e-6;                  // pole guard, fraction of omega_gamma

    void validate() const;
    double omega(int j, int n) const { return energies[j] - energies[n]; } // w_jn
};

// Pi_nm(w) = sum_j (d_nj d_jm) (1/(w_jn + w) + 1/(w_jm - w)).
// Throws ResonanceError if w falls within the guard band of a pole, naming
// the intermediate level.
std::complex<double> pi_nm(const LevelScheme& scheme, int n, int m, double omega);

// Pi_k(w) = sum_j |d_kj|^2 (1/(w_kj + w) + 1/(w_kj - w)).
std::complex<double> pi_level(const LevelScheme& scheme, int k, double omega);

struct PiValues {
    std::complex<double> pi_21, pi_1, pi_2;
};

// Pi_21, Pi_1 and Pi_2 of the working pair at probe frequency omega;
// satisfies Pi_nm(w) = conj(Pi_mn(-w)).
PiValues pi_parameters(const LevelScheme& scheme, double omega);

// chi^R and eta_± evaluated at the central frequency (Markov convention
// nu = nu' = 1):
//   D_21  = 1/2 (Pi_21(w_G) + Pi_21(-w_cl)) * E
//   chi^R = sqrt(2) w_G D_21 / mu
//   eta_± = chi^2 (Pi_2(w_G) ± Pi_1(w_G)) w_G / D_21^2
// Throws DegenerateCouplingError when D_21 = 0 while the eta ratio is nonzero.
Couplings dimensionless_couplings(const LevelScheme& scheme);

} // namespace dicke
