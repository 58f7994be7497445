#include "dicke/dynamics.hpp"

#include "dicke/errors.hpp"
#include "dicke/ito.hpp"
#include "dicke/observables.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

using namespace dicke;
using dicke::testing::Uniform;
using std::numbers::pi;

namespace {

LadderState random_ladder_state(Uniform& rng, const EnsembleSpec& spec) {
    LadderState s{std::vector<double>(spec.dim())};
    double sum = 0.0;
    for (double& p : s.populations)
        sum += (p = rng.next());
    for (double& p : s.populations)
        p /= sum;
    return s;
}

double mean_m(const EnsembleSpec& spec, const double* row) {
    double mean = 0.0;
    for (int k = 0; k < spec.dim(); ++k)
        mean += spec.m_at(k) * row[k];
    return mean;
}

IntegratorOptions tight() {
    IntegratorOptions o;
    o.abs_tol = 1e-12;
    o.rel_tol = 1e-10;
    return o;
}

} // namespace

TEST_CASE("state validation") {
    const EnsembleSpec spec(2);
    const LadderState wrong_size{{0.5, 0.5}};
    const LadderState bad_sum{{0.7, 0.0, 0.2}};
    const LadderState negative{{1.1, 0.0, -0.1}};
    CHECK_THROWS_AS(wrong_size.validate(spec), std::domain_error);
    CHECK_THROWS_AS(bad_sum.validate(spec), std::domain_error);
    CHECK_THROWS_AS(negative.validate(spec), std::domain_error);
    LadderState ok{{0.25, 0.25, 0.5}};
    CHECK_NOTHROW(ok.validate(spec));

    FullState bad{Eigen::MatrixXcd::Zero(3, 3)};
    CHECK_THROWS_AS(bad.validate(spec), std::domain_error); // trace 0
    FullState skew{Eigen::MatrixXcd::Identity(3, 3) / 3.0};
    skew.rho(0, 1) = cplx{0.0, 0.5};
    CHECK_THROWS_AS(skew.validate(spec), std::domain_error); // not Hermitian
    FullState indefinite{Eigen::MatrixXcd::Zero(3, 3)};
    indefinite.rho(0, 0) = 1.5;
    indefinite.rho(1, 1) = -0.5;
    CHECK_THROWS_AS(indefinite.validate(spec), std::domain_error); // negative eigenvalue

    const TimeGrid backwards{1.0, 0.5, 10};
    const TimeGrid too_few{0.0, 1.0, 1};
    CHECK_THROWS_AS(backwards.validate(), std::domain_error);
    CHECK_THROWS_AS(too_few.validate(), std::domain_error);
}

TEST_CASE("diagonal_rhs examples") {
    SUBCASE("nothing decays below the ground level") {
        const EnsembleSpec spec(5);
        const Couplings c(0.1, 0.3, 0.1);
        LadderState ground{std::vector<double>(spec.dim(), 0.0)};
        ground.populations[0] = 1.0;
        for (double v : diagonal_rhs(spec, c, ground))
            CHECK(v == 0.0);
    }
    SUBCASE("fully excited ensemble, frozen rates") {
        const EnsembleSpec spec(8);
        const Couplings c(0.1, pi / 8, 0.0);
        const auto rhs = diagonal_rhs(spec, c, fully_excited_state(spec));
        CHECK(rhs[8] == doctest::Approx(-0.064845557531096174).epsilon(1e-13));
        CHECK(rhs[7] == doctest::Approx(0.064845557531096174).epsilon(1e-13));
        for (int k = 0; k < 7; ++k)
            CHECK(rhs[k] == 0.0);
    }
    SUBCASE("full suppression at x = 2 pi") {
        const EnsembleSpec spec(8);
        const Couplings c(0.1, pi / 2, 0.0);
        Uniform rng(3);
        const auto state = random_ladder_state(rng, spec);
        for (double v : diagonal_rhs(spec, c, state))
            CHECK(std::abs(v) <= 1e-12);
    }
}

TEST_CASE("Wiener reduction: eta = 0 gives per-transition rates chi^2 g") {
    const EnsembleSpec spec(12);
    const Couplings c(0.13, 0.0, 0.0);
    const auto w = transition_rates(spec, c);
    CHECK(w[0] == 0.0);
    for (int k = 1; k < spec.dim(); ++k)
        CHECK(w[k] == doctest::Approx(0.13 * 0.13 *
                                      ladder_coefficient(spec, spec.m_at(k)))
                          .epsilon(1e-14));
}

TEST_CASE("diagonal_rhs conserves total probability flux") {
    Uniform rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const EnsembleSpec spec(1 + static_cast<int>(rng.next() * 31));
        const Couplings c(rng.in(0.0, 0.12), rng.in(-1.0, 1.0), rng.in(-1.0, 1.0));
        const auto rhs = diagonal_rhs(spec, c, random_ladder_state(rng, spec));
        const double total = std::accumulate(rhs.begin(), rhs.end(), 0.0);
        CHECK(std::abs(total) <= 1e-14);
    }
}

TEST_CASE("evolve_diagonal single-atom exponential decay") {
    const EnsembleSpec spec(1);
    const Couplings c(0.1, 0.0, 0.0);
    const TimeGrid grid{0.0, 100.0, 81};
    const auto trace = evolve_diagonal(spec, c, fully_excited_state(spec), grid, tight());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double expected = std::exp(-0.01 * trace.times[i]);
        CHECK(std::abs(trace.row(i)[1] - expected) <= 1e-8);
    }
    CHECK(trace.max_trace_drift <= 1e-9);
    CHECK(trace.min_population >= -1e-8);
}

TEST_CASE("evolve_diagonal keeps suppressed populations constant") {
    const EnsembleSpec spec(8);
    const Couplings c(0.1, pi / 2, 0.0);
    const TimeGrid grid{0.0, 1000.0, 51};
    for (const LadderState& init :
         {fully_excited_state(spec), semi_excited_state(spec), w_state(spec)}) {
        const auto trace = evolve_diagonal(spec, c, init, grid);
        for (std::size_t i = 0; i < trace.size(); ++i)
            for (int k = 0; k < spec.dim(); ++k)
                CHECK(std::abs(trace.row(i)[k] - init.populations[k]) <= 1e-10);
    }
}

TEST_CASE("mean ladder value never increases") {
    Uniform rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        const EnsembleSpec spec(2 + static_cast<int>(rng.next() * 10));
        const Couplings c(0.1, rng.in(-0.5, 0.5), rng.in(-0.5, 0.5));
        const TimeGrid grid{0.0, 200.0, 101};
        const auto trace =
            evolve_diagonal(spec, c, random_ladder_state(rng, spec), grid);
        for (std::size_t i = 1; i < trace.size(); ++i)
            CHECK(mean_m(spec, trace.row(i)) <=
                  mean_m(spec, trace.row(i - 1)) + 1e-9);
    }
}

TEST_CASE("w_state_decay closed form") {
    const EnsembleSpec spec(8);
    const Couplings c(0.1, pi / 8, 0.0);
    CHECK(w_state_decay(spec, c, 0.0) == doctest::Approx(1.0));
    CHECK(w_state_decay(spec, c, 10.0) ==
          doctest::Approx(0.52285266007232279).epsilon(1e-12));
    CHECK_THROWS_AS(w_state_decay(spec, c, -1.0), std::domain_error);

    // First critical number: survival frozen at 1.
    const EnsembleSpec crit(32);
    const Couplings cc(0.1, pi / 8, 0.0);
    CHECK(w_state_decay(crit, cc, 1e6) == doctest::Approx(1.0).epsilon(1e-12));

    // Wiener limit rate chi^2 N.
    const EnsembleSpec w(6);
    const Couplings cw(0.1, 0.0, 0.0);
    CHECK(w_state_decay(w, cw, 7.0) ==
          doctest::Approx(std::exp(-0.01 * 6 * 7.0)).epsilon(1e-12));
}

TEST_CASE("evolve_diagonal reproduces the W-state exponential") {
    const EnsembleSpec spec(8);
    const Couplings c(0.1, pi / 8, 0.0);
    const TimeGrid grid{0.0, 50.0, 41};
    const auto trace = evolve_diagonal(spec, c, w_state(spec), grid, tight());
    const int k_w = spec.index_of(-spec.spin() + 1.0);
    for (std::size_t i = 0; i < trace.size(); ++i)
        CHECK(std::abs(trace.row(i)[k_w] - w_state_decay(spec, c, trace.times[i])) <=
              1e-8);
}

TEST_CASE("full_rhs structure") {
    Uniform rng(47);
    SUBCASE("ground projector is stationary") {
        const EnsembleSpec spec(4);
        const Couplings c(0.1, 0.25, 0.1);
        FullState rho{Eigen::MatrixXcd::Zero(spec.dim(), spec.dim())};
        rho.rho(0, 0) = 1.0;
        CHECK(full_rhs(spec, c, rho).cwiseAbs().maxCoeff() <= 1e-15);
    }
    SUBCASE("trace-free and Hermiticity-preserving") {
        for (int trial = 0; trial < 100; ++trial) {
            const EnsembleSpec spec(1 + static_cast<int>(rng.next() * 6));
            const Couplings c = testing::random_couplings(rng);
            FullState rho{testing::random_density(rng, spec.dim())};
            const auto rhs = full_rhs(spec, c, rho);
            CHECK(std::abs(rhs.trace()) <= 1e-12);
            CHECK((rhs - rhs.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
    SUBCASE("diagonal of full_rhs equals diagonal_rhs on diagonal states") {
        for (int trial = 0; trial < 50; ++trial) {
            const EnsembleSpec spec(1 + static_cast<int>(rng.next() * 6));
            const Couplings c = testing::random_couplings(rng);
            const LadderState p = random_ladder_state(rng, spec);
            FullState rho{Eigen::MatrixXcd::Zero(spec.dim(), spec.dim())};
            for (int k = 0; k < spec.dim(); ++k)
                rho.rho(k, k) = p.populations[k];
            const auto full = full_rhs(spec, c, rho);
            const auto diag = diagonal_rhs(spec, c, p);
            for (int k = 0; k < spec.dim(); ++k) {
                CHECK(std::abs(full(k, k).real() - diag[k]) <= 1e-12);
                CHECK(std::abs(full(k, k).imag()) <= 1e-14);
            }
            // Purely diagonal input keeps the rhs diagonal.
            for (int i = 0; i < spec.dim(); ++i)
                for (int j = 0; j < spec.dim(); ++j)
                    if (i != j)
                        CHECK(std::abs(full(i, j)) <= 1e-15);
        }
    }
    SUBCASE("matches the SDE-derived generator") {
        for (int trial = 0; trial < 50; ++trial) {
            const EnsembleSpec spec(1 + static_cast<int>(rng.next() * 4));
            const Couplings c = testing::random_couplings(rng);
            FullState rho{testing::random_density(rng, spec.dim())};
            const auto explicit_rhs = full_rhs(spec, c, rho);
            const auto sde = master_equation_rhs_from_sde(
                closed_form_coefficients(spec, c), rho.rho);
            CHECK((explicit_rhs - sde).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("evolve_full agrees with evolve_diagonal for diagonal initial states") {
    Uniform rng(53);
    const EnsembleSpec spec(2);
    const Couplings c(0.1, 0.0, 0.0);
    const TimeGrid grid{0.0, 100.0, 41};
    const auto diag = evolve_diagonal(spec, c, fully_excited_state(spec), grid, tight());

    FullState rho{Eigen::MatrixXcd::Zero(3, 3)};
    rho.rho(2, 2) = 1.0;
    const auto full = evolve_full(spec, c, rho, grid, tight());
    for (std::size_t i = 0; i < diag.size(); ++i)
        for (int k = 0; k < spec.dim(); ++k)
            CHECK(std::abs(full.trace.row(i)[k] - diag.row(i)[k]) <= 1e-8);
    CHECK(full.trace.max_trace_drift <= 1e-9);
    CHECK(full.trace.min_population >= -1e-8);

    // Dicke-diagonal initial states stay diagonal.
    const EnsembleSpec spec4(4);
    const Couplings c4(0.1, 0.3, 0.15);
    FullState mixed{Eigen::MatrixXcd::Zero(5, 5)};
    const LadderState p = random_ladder_state(rng, spec4);
    for (int k = 0; k < 5; ++k)
        mixed.rho(k, k) = p.populations[k];
    const auto evo = evolve_full(spec4, c4, mixed, TimeGrid{0.0, 50.0, 21});
    for (const auto& state : evo.states) {
        Eigen::MatrixXcd off = state;
        off.diagonal().setZero();
        CHECK(off.cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("evolve_full enforces the ensemble cap") {
    const EnsembleSpec spec(65);
    FullState rho{Eigen::MatrixXcd::Identity(spec.dim(), spec.dim()) /
                  static_cast<double>(spec.dim())};
    CHECK_THROWS_WITH_AS(
        evolve_full(spec, Couplings(0.1, 0.0, 0.0), rho, TimeGrid{0.0, 1.0, 3}),
        doctest::Contains("evolve_diagonal"), CapacityError);
}

TEST_CASE("initial state helpers") {
    const EnsembleSpec spec(8);
    CHECK(fully_excited_state(spec).populations[8] == 1.0);
    CHECK(semi_excited_state(spec).populations[4] == 1.0);
    CHECK(w_state(spec).populations[1] == 1.0);
    CHECK(ladder_basis_state(spec, -2.0).populations[2] == 1.0);
    CHECK_THROWS_AS(semi_excited_state(EnsembleSpec(3)), std::domain_error);
    CHECK_NOTHROW(w_state(EnsembleSpec(1))); // m = +1/2, the excited state
}
