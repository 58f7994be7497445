#include "dicke/observables.hpp"

#include "dicke/errors.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

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

} // namespace

TEST_CASE("intensity examples") {
    const EnsembleSpec spec(8);
    const Couplings c(0.1, pi / 8, 0.0);
    LadderState ground{std::vector<double>(spec.dim(), 0.0)};
    ground.populations[0] = 1.0;
    CHECK(intensity(spec, c, ground) == 0.0);

    CHECK(intensity(spec, c, fully_excited_state(spec)) ==
          doctest::Approx(0.064845557531096174).epsilon(1e-13));

    const Couplings doubled(0.1, pi / 8, 0.0, 2.0);
    CHECK(intensity(spec, doubled, fully_excited_state(spec)) ==
          doctest::Approx(2.0 * 0.064845557531096174).epsilon(1e-13));
}

TEST_CASE("intensity equals -q d<m>/dtau") {
    Uniform rng(59);
    for (int trial = 0; trial < 1000; ++trial) {
        const EnsembleSpec spec(1 + static_cast<int>(rng.next() * 16));
        const Couplings c(rng.in(0.0, 0.15), rng.in(-1.0, 1.0), rng.in(-1.0, 1.0),
                          rng.in(0.1, 3.0));
        const LadderState state = random_ladder_state(rng, spec);
        const auto rhs = diagonal_rhs(spec, c, state);
        double dm_dt = 0.0;
        for (int k = 0; k < spec.dim(); ++k)
            dm_dt += spec.m_at(k) * rhs[k];
        CHECK(std::abs(intensity(spec, c, state) + c.q * dm_dt) <= 1e-12);
    }
}

TEST_CASE("sech2 reference pulse") {
    const double tau0 = std::log(100.0) / 100.0;
    CHECK(sech2_reference(100, 1.0, 1.0, tau0) == doctest::Approx(2500.0));
    CHECK(sech2_reference(100, 1.0, 1.0, 1e6) == doctest::Approx(0.0));
    CHECK(sech2_reference(2, 1.0, 1.0, std::log(2.0) / 2.0) == doctest::Approx(1.0));
    CHECK(sech2_reference(100, 0.01, 2.0, 0.0) <=
          2.0 * sech2_reference(100, 0.01, 1.0, std::log(100.0) / 1.0));
    CHECK_THROWS_AS(sech2_reference(1, 1.0, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(sech2_reference(4, 0.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("delay time sums") {
    const EnsembleSpec two(2);
    CHECK(delay_time_sum(two, 1.0, 2) == doctest::Approx(1.0).epsilon(1e-15));
    for (int n : {2, 5, 16, 100})
        CHECK(delay_time_sum(EnsembleSpec(n), 1.0, 1) ==
              doctest::Approx(1.0 / n).epsilon(1e-15));
    CHECK(delay_time_sum(two, 1.0, 0) == 0.0); // semi-excited start: no delay

    const EnsembleSpec spec(12);
    const double gamma = 0.01;
    double prev = 0.0;
    for (int n = 1; n <= 12; ++n) {
        const double tau = delay_time_sum(spec, gamma, n);
        CHECK(tau > prev);
        prev = tau;
    }
    CHECK(delay_time_sum(spec, gamma, 12) >= 2.0 / (gamma * 12));
    CHECK_THROWS_AS(delay_time_sum(spec, gamma, 13), std::domain_error);
    CHECK_THROWS_AS(delay_time_sum(spec, gamma, -1), std::domain_error);
    CHECK_THROWS_AS(delay_time_sum(spec, 0.0, 1), std::domain_error);
}

TEST_CASE("critical numbers") {
    SUBCASE("frozen values for eta_diff = pi/8") {
        const CriticalSet set = critical_numbers(Couplings(0.1, pi / 8, 0.0), 3);
        REQUIRE(set.values.size() == 3);
        CHECK(set.values[0] == doctest::Approx(32.0).epsilon(1e-14));
        CHECK(set.values[1] == doctest::Approx(64.0).epsilon(1e-14));
        CHECK(set.values[2] == doctest::Approx(96.0).epsilon(1e-14));
        CHECK(set.nearest[0].n == 32);
        CHECK(set.nearest[0].f_value <= 1e-12);
        for (std::size_t i = 0; i < set.values.size(); ++i) {
            CHECK(f_modulation(set.values[i], pi / 8) <= 1e-12);
            CHECK(set.values[i] == doctest::Approx((i + 1) * set.values[0]));
        }
    }
    SUBCASE("eta_diff = pi/2 gives N* = 8") {
        const CriticalSet set = critical_numbers(Couplings(0.1, pi / 2, 0.0), 1);
        CHECK(set.values[0] == doctest::Approx(8.0).epsilon(1e-14));
        CHECK(f_modulation(8.0, pi / 2) <= 1e-12);
    }
    SUBCASE("numeric scan of the modulation zeros") {
        // Independent check: cluster the near-zeros of f over N in (0, 100].
        std::vector<double> centers;
        bool inside = false;
        double best_n = 0.0, best_f = 1.0;
        for (double n = 0.5; n <= 100.0; n += 1e-3) {
            const double f = f_modulation(n, pi / 8);
            if (f < 1e-8) {
                if (!inside) {
                    inside = true;
                    best_f = f;
                    best_n = n;
                } else if (f < best_f) {
                    best_f = f;
                    best_n = n;
                }
            } else if (inside) {
                inside = false;
                centers.push_back(best_n);
            }
        }
        REQUIRE(centers.size() == 3);
        CHECK(std::abs(centers[0] - 32.0) <= 5e-3);
        CHECK(std::abs(centers[1] - 64.0) <= 5e-3);
        CHECK(std::abs(centers[2] - 96.0) <= 5e-3);
    }
    SUBCASE("negative eta_diff yields positive sizes") {
        const CriticalSet set = critical_numbers(Couplings(0.1, 0.0, pi / 8), 2);
        CHECK(set.values[0] == doctest::Approx(32.0));
        CHECK(set.values[1] > set.values[0]);
    }
    SUBCASE("equal Stark parameters never suppress") {
        CHECK_THROWS_AS(critical_numbers(Couplings(0.1, 0.3, 0.3), 2),
                        NoSuppressionError);
        CHECK_THROWS_AS(critical_numbers(Couplings(0.1, 0.1, 0.0), 0),
                        std::domain_error);
    }
}

TEST_CASE("stabilized states") {
    SUBCASE("mixed eta example") {
        const EnsembleSpec spec(16);
        const StabilizedStates s =
            stabilized_states(spec, Couplings(0.1, pi / 4, pi / 4), 1e-12);
        REQUIRE(s.members.size() == 2);
        CHECK(s.members[0].m == doctest::Approx(0.0));
        CHECK(s.members[0].k == 1);
        CHECK(s.members[0].residual <= 1e-12);
        CHECK(s.members[1].m == doctest::Approx(8.0));
        CHECK(s.members[1].k == 2);
        // m = -8 has x = 0 (k = 0), which never counts as stabilized.
    }
    SUBCASE("no Stark phase, no stabilization") {
        const StabilizedStates s =
            stabilized_states(EnsembleSpec(12), Couplings(0.1, 0.0, 0.0), 1e-6);
        CHECK(s.members.empty());
    }
    SUBCASE("eta_minus = 0 is all-or-nothing") {
        const EnsembleSpec spec(8);
        const StabilizedStates all =
            stabilized_states(spec, Couplings(0.1, pi / 2, 0.0), 1e-12);
        CHECK(all.members.size() == static_cast<std::size_t>(spec.dim()));
        for (const auto& member : all.members)
            CHECK(member.k == 1);
        const StabilizedStates none =
            stabilized_states(spec, Couplings(0.1, pi / 2 - 0.1, 0.0), 1e-12);
        CHECK(none.members.empty());
    }
    SUBCASE("membership implies a vanishing downward rate") {
        const EnsembleSpec spec(16);
        const Couplings c(0.1, pi / 4, pi / 4);
        const auto w = transition_rates(spec, c);
        for (const auto& member :
             stabilized_states(spec, c, 1e-12).members) {
            CHECK(c_factor(spec, c, member.m) <= 1e-12);
            // Transition m+1 -> m carries the C_m factor.
            if (member.m + 1.0 <= spec.spin())
                CHECK(w[spec.index_of(member.m + 1.0)] <= 1e-12);
        }
    }
    SUBCASE("tolerance is honored") {
        const EnsembleSpec spec(8);
        const StabilizedStates near =
            stabilized_states(spec, Couplings(0.1, pi / 2 - 0.001, 0.0), 0.01);
        CHECK(near.members.size() == static_cast<std::size_t>(spec.dim()));
        CHECK_THROWS_AS(stabilized_states(spec, Couplings(0.1, 0.0, 0.0), -1.0),
                        std::domain_error);
    }
}

TEST_CASE("peak_and_delay") {
    PulseTrace trace;
    trace.dim = 1;
    trace.times = {0.0, 1.0, 2.0, 3.0};
    trace.populations.assign(4, 0.0);

    SUBCASE("monotone decreasing pulse has no delay") {
        trace.intensities = {4.0, 3.0, 2.0, 1.0};
        const PeakInfo info = peak_and_delay(trace);
        CHECK(info.peak_intensity == 4.0);
        CHECK(info.peak_time == 0.0);
        CHECK_FALSE(info.has_delay);
    }
    SUBCASE("delayed peak") {
        trace.intensities = {1.0, 2.0, 5.0, 1.0};
        const PeakInfo info = peak_and_delay(trace);
        CHECK(info.peak_time == 2.0);
        CHECK(info.has_delay);
    }
    SUBCASE("peak at the second sample is not a delay") {
        trace.intensities = {1.0, 2.0, 1.5, 1.0};
        CHECK_FALSE(peak_and_delay(trace).has_delay);
    }
    SUBCASE("ties break toward the earliest time") {
        trace.intensities = {1.0, 3.0, 3.0, 1.0};
        CHECK(peak_and_delay(trace).peak_time == 1.0);
    }
    SUBCASE("empty trace") {
        PulseTrace empty;
        CHECK_THROWS_AS(peak_and_delay(empty), std::domain_error);
    }
}

namespace {

LevelScheme three_level_scheme() {
    // Working pair (0,1) plus one intermediate level connected to both.
    LevelScheme s;
    s.energies = {0.0, 2.0, 9.0};
    s.dipole = {{0.0, 0.0, 0.4}, {0.0, 0.0, 0.9}, {0.4, 0.9, 0.0}};
    s.field_amplitude = 1.3;
    s.omega_gamma = 5.0;
    s.omega_cl = 3.0;
    return s;
}

LevelScheme random_scheme(Uniform& rng, int levels) {
    LevelScheme s;
    s.energies.resize(levels);
    for (int i = 0; i < levels; ++i)
        s.energies[i] = rng.in(0.0, 10.0) + 3.0 * i;
    s.dipole.assign(levels, std::vector<double>(levels, 0.0));
    for (int i = 0; i < levels; ++i)
        for (int j = i + 1; j < levels; ++j)
            s.dipole[i][j] = s.dipole[j][i] = rng.in(-1.0, 1.0);
    s.field_amplitude = rng.in(0.1, 2.0);
    s.omega_gamma = rng.in(1.0, 4.0);
    s.omega_cl = rng.in(0.5, 2.0);
    return s;
}

} // namespace

TEST_CASE("pi parameters") {
    SUBCASE("all dipole elements zero") {
        LevelScheme s = three_level_scheme();
        s.dipole = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
        const PiValues v = pi_parameters(s, 1.1);
        CHECK(v.pi_21 == cplx{0.0, 0.0});
        CHECK(v.pi_1 == cplx{0.0, 0.0});
        CHECK(v.pi_2 == cplx{0.0, 0.0});
    }
    SUBCASE("single intermediate level, hand-expanded") {
        const LevelScheme s = three_level_scheme();
        const double w = 1.7;
        // Pi_21(w) = d_2j d_j1 (1/(w_j2 + w) + 1/(w_j1 - w)), j = 2 (level E_j).
        const double w_j2 = 9.0 - 2.0, w_j1 = 9.0 - 0.0;
        const double expected = 0.9 * 0.4 * (1.0 / (w_j2 + w) + 1.0 / (w_j1 - w));
        CHECK(pi_nm(s, s.upper, s.lower, w).real() ==
              doctest::Approx(expected).epsilon(1e-14));
        // Pi_1(w) = |d_1j|^2 (1/(w_1j + w) + 1/(w_1j - w)) with w_1j = -9.
        const double expected1 = 0.16 * (1.0 / (-9.0 + w) + 1.0 / (-9.0 - w));
        CHECK(pi_level(s, 0, w).real() == doctest::Approx(expected1).epsilon(1e-14));
    }
    SUBCASE("symmetry Pi_nm(w) = conj(Pi_mn(-w)) on random schemes") {
        Uniform rng(61);
        int done = 0;
        while (done < 200) {
            const LevelScheme s = random_scheme(rng, 4);
            const double w = rng.in(-6.0, 6.0);
            try {
                const cplx a = pi_nm(s, 1, 0, w);
                const cplx b = std::conj(pi_nm(s, 0, 1, -w));
                CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
                ++done;
            } catch (const ResonanceError&) {
                // redraw: probe frequency landed on a pole
            }
        }
    }
    SUBCASE("guard band raises a resonance error naming the level") {
        LevelScheme s = three_level_scheme();
        s.guard_band = 1e-3;
        // w_j1 - w = 0 at w = 9.
        try {
            pi_nm(s, s.upper, s.lower, 9.0 + 1e-4 * s.omega_gamma);
            FAIL("expected ResonanceError");
        } catch (const ResonanceError& e) {
            CHECK(e.level() == 2);
        }
    }
    SUBCASE("scheme validation") {
        LevelScheme s = three_level_scheme();
        s.dipole[0][0] = 0.3;
        CHECK_THROWS_AS(s.validate(), std::domain_error);
        LevelScheme asym = three_level_scheme();
        asym.dipole[0][2] = 0.5;
        CHECK_THROWS_AS(asym.validate(), std::domain_error);
        LevelScheme pair = three_level_scheme();
        pair.upper = 0;
        CHECK_THROWS_AS(pair.validate(), std::domain_error);
    }
}

TEST_CASE("dimensionless couplings") {
    SUBCASE("zero field amplitude gives chi = 0") {
        LevelScheme s = three_level_scheme();
        s.field_amplitude = 0.0;
        s.dipole = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}; // Pi_± = 0 as well
        const Couplings c = dimensionless_couplings(s);
        CHECK(c.chi == 0.0);
        CHECK(c.eta_plus == 0.0);
        CHECK(c.eta_minus == 0.0);
    }
    SUBCASE("doubling the amplitude doubles chi and fixes eta") {
        const LevelScheme base = three_level_scheme();
        LevelScheme doubled = base;
        doubled.field_amplitude *= 2.0;
        const Couplings c1 = dimensionless_couplings(base);
        const Couplings c2 = dimensionless_couplings(doubled);
        CHECK(c2.chi == doctest::Approx(2.0 * c1.chi).epsilon(1e-14));
        CHECK(c2.eta_plus == doctest::Approx(c1.eta_plus).epsilon(1e-14));
        CHECK(c2.eta_minus == doctest::Approx(c1.eta_minus).epsilon(1e-14));
    }
    SUBCASE("explicitly setting mu = sqrt(3) reproduces the default") {
        const LevelScheme base = three_level_scheme();
        LevelScheme mu = base;
        mu.mu = std::sqrt(3.0);
        const Couplings c1 = dimensionless_couplings(base);
        const Couplings c2 = dimensionless_couplings(mu);
        CHECK(c1.chi == c2.chi);
        CHECK(c1.eta_plus == c2.eta_plus);
    }
    SUBCASE("direct formula evaluation oracle") {
        const LevelScheme s = three_level_scheme();
        const Couplings c = dimensionless_couplings(s);
        const double pi21_g = pi_nm(s, 1, 0, s.omega_gamma).real();
        const double pi21_cl = pi_nm(s, 1, 0, -s.omega_cl).real();
        const double d21 = 0.5 * (pi21_g + pi21_cl) * s.field_amplitude;
        const double chi = std::abs(std::sqrt(2.0) * s.omega_gamma * d21 / s.mu);
        CHECK(c.chi == doctest::Approx(chi).epsilon(1e-14));
        const double pi1 = pi_level(s, 0, s.omega_gamma).real();
        const double pi2 = pi_level(s, 1, s.omega_gamma).real();
        CHECK(c.eta_plus == doctest::Approx(chi * chi * (pi2 + pi1) * s.omega_gamma /
                                            (d21 * d21))
                                .epsilon(1e-14));
        CHECK(c.eta_minus == doctest::Approx(chi * chi * (pi2 - pi1) * s.omega_gamma /
                                             (d21 * d21))
                                 .epsilon(1e-14));
    }
    SUBCASE("vanishing D21 with nonzero Stark ratio is degenerate") {
        LevelScheme s = three_level_scheme();
        // Disconnect the upper level: Pi_21 = 0 so D21 = 0, but Pi_1 != 0.
        s.dipole = {{0.0, 0.0, 0.4}, {0.0, 0.0, 0.0}, {0.4, 0.0, 0.0}};
        CHECK_THROWS_AS(dimensionless_couplings(s), DegenerateCouplingError);
    }
}
