#pragma once

#include "dicke/algebra.hpp"
#include "dicke/ode.hpp"

#include <Eigen/Core>

#include <vector>

// Time evolution on the Dicke ladder: the diagonal population master equation,
// the full density-matrix equation for small ensembles, and the closed-form
// decay of the singly excited symmetric state.
namespace dicke {

// Populations over m = -r..r (index k = m + r). Diagonal density matrix.
struct LadderState {
    std::vector<double> populations;

    // Throws std::domain_error unless size matches, sum is 1 within 1e-9 and
    // every entry is >= -1e-12.
    void validate(const EnsembleSpec& spec) const;
};

// Dense Hermitian density matrix in the Dicke basis, for small-N validation.
struct FullState {
    Eigen::MatrixXcd rho;

    // Hermitian to 1e-12, trace 1 within 1e-9, eigenvalues >= -1e-8.
    void validate(const EnsembleSpec& spec) const;
};

struct TimeGrid {
    double t_start = 0.0;
    double t_end = 0.0;
    int output_points = 2;

    void validate() const; // t_end > t_start >= 0, output_points >= 2
    std::vector<double> sample_times() const;
};

// Sampled emission record. Populations are clamped to >= 0 on output; the
// diagnostics keep the raw extremes seen while sampling.
struct PulseTrace {
    std::vector<double> times;
    std::vector<double> intensities;
    std::vector<double> populations; // row-major, output_points x dim
    int dim = 0;

    std::size_t size() const { return times.size(); }
    const double* row(std::size_t i) const { return populations.data() + i * dim; }

    double max_trace_drift = 0.0; // max |sum p - 1| over samples
    double min_population = 0.0;  // min raw population over samples
};

using IntegratorOptions = ode::Options;

// Per-level downward transition rates W_k = 2 chi^2 g_{m,m-1} C_{m-1} indexed
// like the populations; W_0 = 0 (nothing decays below the ground level).
std::vector<double> transition_rates(const EnsembleSpec& spec, const Couplings& c);

// dp_m/dtau = -2chi^2 g_{m,m-1} C_{m-1} p_m + 2chi^2 g_{m+1,m} C_m p_{m+1}.
// The result sums to zero by construction (probability flux down the ladder).
std::vector<double> diagonal_rhs(const EnsembleSpec& spec, const Couplings& c,
                                 const LadderState& state);

// Adaptive integration of the diagonal master equation, sampled on the grid.
// Throws IntegrationError on step underflow or trace drift beyond 1e-9.
PulseTrace evolve_diagonal(const EnsembleSpec& spec, const Couplings& c,
                           const LadderState& initial, const TimeGrid& grid,
                           const IntegratorOptions& opts = {});

// Full non-Wiener master equation
//   d rho/dtau = chi^2 a_-(S) R- rho R+ a_+(S)
//              - chi^2/2 { R+ (a_0(S) - i a_s(S)) R- rho
//                        + rho R+ (a_0(S) + i a_s(S)) R- }.
// Trace-free and Hermiticity-preserving. Throws on invalid state.
Eigen::MatrixXcd full_rhs(const EnsembleSpec& spec, const Couplings& c,
                          const FullState& state);

struct FullEvolution {
    std::vector<Eigen::MatrixXcd> states; // one per sample
    PulseTrace trace;
};

inline constexpr int default_full_cap = 64;

// Dense-matrix integration of the full equation with Hermitian symmetrization
// after every accepted step. Throws CapacityError when n_atoms exceeds the cap
// (use evolve_diagonal instead) and IntegrationError as above.
FullEvolution evolve_full(const EnsembleSpec& spec, const Couplings& c,
                          const FullState& initial, const TimeGrid& grid,
                          const IntegratorOptions& opts = {},
                          int n_atoms_cap = default_full_cap);

// Survival probability of the singly excited symmetric state |r, -r+1>,
//   exp(-4 chi^2 r C(r (eta_+ - eta_-)) tau).
// Throws std::domain_error for negative tau.
double w_state_decay(const EnsembleSpec& spec, const Couplings& c, double tau);

// Canonical initial states.
LadderState fully_excited_state(const EnsembleSpec& spec);
LadderState semi_excited_state(const EnsembleSpec& spec); // needs m = 0 on ladder
LadderState w_state(const EnsembleSpec& spec);            // m = -r+1
LadderState ladder_basis_state(const EnsembleSpec& spec, double m);

} // namespace dicke
