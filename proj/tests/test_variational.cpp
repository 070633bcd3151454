#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tci/projector.hpp"
#include "tci/variational.hpp"

using namespace tci;

namespace {

AnsatzSpec spec_of(int n, double j, double lambda, bool rescaled = false) {
    AnsatzSpec s;
    s.n_sites = n;
    s.j_effective = j;
    s.lambda = lambda;
    s.rescaled = rescaled;
    return s;
}

} // namespace

TEST_CASE("theta = 0 limits") {
    for (int n : {4, 8, 100}) {
        const auto f = exact_structure_factors(n, 0.0);
        CHECK(f.sxx0 == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(f.sxxq == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(f.szzq == doctest::Approx(n / 4.0).epsilon(1e-14));
        CHECK(f.norm2 == doctest::Approx(1.0));
        const auto s = spec_of(n, 1.0, 0.7);
        CHECK(variational_energy(s, 0.0) ==
              doctest::Approx(0.7 * n / 2.0 - n / 2.0).epsilon(1e-13));
        CHECK(bosonic_energy(s, 0.0) == doctest::Approx(variational_energy(s, 0.0)));
    }
}

TEST_CASE("theta -> infinity limits") {
    for (int n : {8, 24}) {
        const auto f = exact_structure_factors(n, 30.0);
        CHECK(f.szzq == doctest::Approx((n / 4.0 + 1.0) / 3.0).epsilon(1e-10));
        CHECK(f.sxx0 < 1e-12);
        const auto s = spec_of(n, 1.0, 0.7);
        CHECK(variational_energy(s, 30.0) == doctest::Approx(-(n + 4.0) / 6.0).epsilon(1e-9));
    }
}

TEST_CASE("exact sums match the brute-force Hilbert-space construction") {
    for (int n : {4, 8, 12}) {
        for (double th : {0.0, 0.3, 1.0, 3.0}) {
            const auto state = brute_force_ansatz_state(n, th);
            const auto bf = brute_force_factors(state, state);
            const auto f = exact_structure_factors(n, th);
            CHECK(bf.sxx0 == doctest::Approx(f.sxx0).epsilon(1e-10));
            CHECK(bf.syy0 == doctest::Approx(f.sxx0).epsilon(1e-10));
            CHECK(bf.sxxq == doctest::Approx(f.sxxq).epsilon(1e-10));
            CHECK(bf.syyq == doctest::Approx(f.sxxq).epsilon(1e-10));
            CHECK(bf.szzq == doctest::Approx(f.szzq).epsilon(1e-10));

            const double lam = 0.3, j = 1.0;
            const auto s = spec_of(n, j, lam);
            CHECK(brute_force_symmetrized_energy(state, lam, j) ==
                  doctest::Approx(variational_energy(s, th)).epsilon(1e-10));
        }
    }
}

TEST_CASE("symmetrized energies match the brute force") {
    for (int n : {4, 8, 12}) {
        for (double th : {0.3, 0.5, 1.0, 3.0}) {
            const double lam = 0.3, j = 1.0;
            const auto s = spec_of(n, j, lam);
            const auto se = symmetrized_energies(s, th);
            const auto plus = brute_force_ansatz_state(n, th, +1);
            const auto minus = brute_force_ansatz_state(n, th, -1);
            CHECK(se.e_plus ==
                  doctest::Approx(brute_force_symmetrized_energy(plus, lam, j)).epsilon(1e-10));
            if (!se.minus_unstable)
                CHECK(se.e_minus == doctest::Approx(brute_force_symmetrized_energy(minus, lam, j))
                                        .epsilon(1e-10));
            // overlap <theta,1|theta,2>
            const auto v1 = brute_force_ansatz_state(n, th);
            StateVector v2 = v1;
            const uint64_t mask = (uint64_t(1) << n) - 1;
            for (int64_t i = 0; i < v1.basis->dim(); ++i)
                v2.amps[v1.basis->index_of(~v1.basis->state(i) & mask)] = v1.amps[i];
            CHECK(std::abs(v1.dot(v2).real() - se.overlap) < 1e-10);
        }
    }
}

TEST_CASE("theta = 0 parity states coincide and the gap vanishes") {
    const auto s = spec_of(8, 1.0, 0.3);
    const auto se = symmetrized_energies(s, 0.0);
    CHECK(se.overlap == doctest::Approx(0.0));
    CHECK(se.e_plus == doctest::Approx(variational_energy(s, 0.0)).epsilon(1e-12));
    CHECK(se.e_minus == doctest::Approx(variational_energy(s, 0.0)).epsilon(1e-12));
}

TEST_CASE("symmetrized ansatz attains the lower energy") {
    for (double th : {0.2, 0.6, 1.3, 2.5}) {
        for (double lam : {0.05, 0.4, 1.5}) {
            const auto s = spec_of(12, 1.0, lam);
            const double e = variational_energy(s, th);
            const auto se = symmetrized_energies(s, th);
            const double best = se.minus_unstable ? se.e_plus : std::min(se.e_plus, se.e_minus);
            CHECK(best <= e + 1e-9 * std::abs(e));
        }
    }
}

TEST_CASE("classical limit: theta* -> 0 and E -> -JN/2") {
    auto s = spec_of(64, 1.0, 1e-8);
    const auto r = minimize_theta(s);
    CHECK(r.theta_star < 0.02);
    CHECK(r.energy == doctest::Approx(-32.0).epsilon(1e-4));
}

TEST_CASE("minimize agrees with a fine grid scan") {
    auto s = spec_of(100, 1.0, 0.01, true);
    const auto r = minimize_theta(s);
    double best = 1e300, best_th = 0;
    const double theta_max = std::log(100.0) + 5.0;
    for (int i = 0; i <= 10000; ++i) {
        const double th = theta_max * i / 10000;
        const double e = variational_energy(s, th);
        if (e < best) {
            best = e;
            best_th = th;
        }
    }
    CHECK(std::abs(r.theta_star - best_th) < 1e-3);
    CHECK(r.energy <= best + 1e-12);
    CHECK_FALSE(r.boundary_hit);
}

TEST_CASE("strong-cavity regime hits the boundary with a flag") {
    auto s = spec_of(8, 1.0, 50.0);
    const auto r = minimize_theta(s);
    CHECK(r.boundary_hit);
    CHECK(r.theta_star == doctest::Approx(std::log(8.0) + 5.0));
}

TEST_CASE("bosonic energy agrees with exact sums in the weak-squeezing regime") {
    auto s = spec_of(100, 1.0, 0.01, true);
    const auto r = minimize_theta(s);
    const double eb = bosonic_energy(s, r.theta_star);
    CHECK(std::abs(eb - r.energy) / std::abs(r.energy) < 1e-8);
}

TEST_CASE("bosonic breakdown threshold 27 lambda-bar / 2J = 1") {
    // Below threshold an interior minimum exists; above it none. The
    // threshold sits at 2/27 = 0.074074 in the large-N limit; at N = 100
    // the depletion corrections push it slightly up, so the paper's rounded
    // 0.074 point still carries a (very shallow) minimum there.
    for (double lb : {0.01, 0.05, 0.074}) {
        CHECK(bosonic_minimum(spec_of(100, 1.0, lb, true)).has_interior_minimum);
        CHECK(bosonic_minimum(spec_of(10000, 1.0, lb, true)).has_interior_minimum);
    }
    for (double lb : {0.08, 0.2}) {
        CHECK_FALSE(bosonic_minimum(spec_of(100, 1.0, lb, true)).has_interior_minimum);
    }
    for (double lb : {0.0745, 0.075, 0.08, 0.2}) {
        CHECK_FALSE(bosonic_minimum(spec_of(10000, 1.0, lb, true)).has_interior_minimum);
    }
}

TEST_CASE("beta limits") {
    auto near_zero = spec_of(100, 1.0, 1e-9, true);
    CHECK(asymptotic_quantities(near_zero).beta == doctest::Approx(1.0).epsilon(1e-4));
    auto near_crit = spec_of(100, 1.0, 2.0 / 27.0 * (1.0 - 1e-10), true);
    CHECK(asymptotic_quantities(near_crit).beta ==
          doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-4));
    auto invalid = spec_of(100, 1.0, 0.08, true);
    CHECK_THROWS_AS((void)asymptotic_quantities(invalid), Error);
    CHECK_THROWS_AS((void)asymptotic_gap(invalid), Error);
}

TEST_CASE("asymptotic theta* within 5% of the numerical optimum at N = 1e4") {
    auto s = spec_of(10000, 1.0, 0.01, true);
    const auto a = asymptotic_quantities(s);
    const auto r = minimize_theta(s);
    CHECK(std::abs(a.theta_star - r.theta_star) / r.theta_star < 0.05);
}

TEST_CASE("asymptotic energy deviation decreases monotonically with N") {
    for (double lb : {0.002, 0.01, 0.05}) {
        double prev = 1e300;
        for (int n : {100, 1000, 10000}) {
            auto s = spec_of(n, 1.0, lb, true);
            const auto a = asymptotic_quantities(s);
            const auto r = minimize_theta(s);
            const double rel = std::abs(a.energy - r.energy) / std::abs(r.energy);
            CHECK(rel < prev);
            prev = rel;
        }
        CHECK(prev < 0.02);
    }
}

TEST_CASE("gap is non-negative and extensive") {
    const double lb = 0.01;
    double slope = 0.0;
    std::vector<double> ns = {400, 800, 1600, 3200};
    std::vector<double> gaps;
    for (double n : ns) {
        auto s = spec_of(static_cast<int>(n), 1.0, lb, true);
        const auto g = symmetrized_gap(s);
        CHECK(g.gap >= 0.0);
        gaps.push_back(g.gap);
    }
    // linear fit through the origin: R^2 of gap vs N over a decade
    double sxy = 0, sxx = 0, sy = 0, syy = 0;
    for (size_t i = 0; i < ns.size(); ++i) {
        sxy += ns[i] * gaps[i];
        sxx += ns[i] * ns[i];
        sy += gaps[i];
        syy += gaps[i] * gaps[i];
    }
    slope = sxy / sxx;
    double ss_res = 0, ss_tot = 0;
    const double mean = sy / ns.size();
    for (size_t i = 0; i < ns.size(); ++i) {
        ss_res += std::pow(gaps[i] - slope * ns[i], 2);
        ss_tot += std::pow(gaps[i] - mean, 2);
    }
    CHECK(1.0 - ss_res / ss_tot > 0.999);
}

TEST_CASE("asymptotic gap is linear in N by construction") {
    auto a = spec_of(1000, 1.0, 0.01, true);
    auto b = spec_of(10000, 1.0, 0.01, true);
    CHECK(asymptotic_gap(b) / asymptotic_gap(a) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("gap suppressed exponentially as lambda-bar -> 0") {
    double prev = 1e300;
    for (double lb : {0.02, 0.01, 0.005, 0.002}) {
        auto s = spec_of(1000, 1.0, lb, true);
        const double g = asymptotic_gap(s);
        CHECK(g < prev * 0.2);   // much faster than linear decay
        prev = g;
    }
}

TEST_CASE("unrescaled bound E(theta*) <= -JN/2 + sqrt(2 J lambda N)(1 + eps)") {
    for (int n : {100, 10000}) {
        auto s = spec_of(n, 1.0, 1.0, false);
        const auto r = minimize_theta(s);
        CHECK(r.energy <= -0.5 * n + std::sqrt(2.0 * n) * 1.1);
    }
}

TEST_CASE("crossover boundary") {
    SUBCASE("A = 1 reports no crossing at positive coupling") {
        const auto pts = crossover_boundary({0.0}, {1.0}, {"classical"}, 1000, 1.0,
                                            AnsatzPhase::SquareNeel);
        REQUIRE(pts.size() == 1);
        CHECK_FALSE(pts[0].crossing_found);
        CHECK(pts[0].critical_lambda_bar == doctest::Approx(0.0));
    }
    SUBCASE("critical coupling grows as A decreases") {
        const auto pts = crossover_boundary({0.0, 0.0, 0.0}, {0.95, 0.85, 0.75},
                                            {"a", "b", "c"}, 2000, 1.0,
                                            AnsatzPhase::SquareNeel);
        REQUIRE(pts.size() == 3);
        for (const auto& p : pts) CHECK(p.crossing_found);
        CHECK(pts[0].critical_lambda_bar < pts[1].critical_lambda_bar);
        CHECK(pts[1].critical_lambda_bar < pts[2].critical_lambda_bar);
    }
    SUBCASE("crossing condition holds at the reported coupling") {
        const auto pts =
            crossover_boundary({0.2}, {0.8}, {"test"}, 1000, 1.0, AnsatzPhase::SquareNeel);
        REQUIRE(pts[0].crossing_found);
        AnsatzSpec s;
        s.n_sites = 1000;
        s.j_effective = effective_coupling(AnsatzPhase::SquareNeel, 1.0, 0.2);
        s.rescaled = true;
        s.lambda = pts[0].critical_lambda_bar;
        const double e_heis = -0.5 * 0.8 * s.j_effective * 1000;
        CHECK(minimize_theta(s).energy == doctest::Approx(e_heis).epsilon(1e-6));
    }
}

TEST_CASE("ansatz state basics") {
    // theta = 0 is the classical AFM product state
    const auto v0 = brute_force_ansatz_state(8, 0.0);
    int nonzero = 0;
    for (int64_t i = 0; i < v0.basis->dim(); ++i)
        if (std::abs(v0.amps[i]) > 1e-14) ++nonzero;
    CHECK(nonzero == 1);

    // zero net magnetization for all theta: S_z | theta> = 0 by sector
    const auto v = brute_force_ansatz_state(8, 1.2);
    CHECK(v.basis->label().two_m == 0);
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("squeezed state approaches the singlet-projected AFM") {
    const int n = 8;
    const auto v = brute_force_ansatz_state(n, 20.0);
    const auto p00 = singlet_projector_spectral(n);
    // AFM on the chain host: even sites up
    uint64_t afm = 0;
    for (int i = 0; i < n; i += 2) afm |= uint64_t(1) << i;
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(v.basis->dim());
    e[v.basis->index_of(afm)] = 1.0;
    Eigen::VectorXcd proj = p00 * e;
    proj.normalize();
    CHECK(std::abs(proj.dot(v.amps)) > 1.0 - 1e-6);
}

TEST_CASE("effective couplings per phase") {
    CHECK(effective_coupling(AnsatzPhase::SquareNeel, 1.0, 0.3) == doctest::Approx(0.7));
    CHECK(effective_coupling(AnsatzPhase::SquareStripe, 1.0, 0.8) == doctest::Approx(0.8));
    CHECK(effective_coupling(AnsatzPhase::TriangularStripe, 1.0, 0.5) == doctest::Approx(0.75));
    AnsatzSpec bad;
    bad.n_sites = 8;
    bad.j_effective = -0.1;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("bosonic and exact energies converge per site as N grows at fixed theta") {
    // theta large enough that the Dyson-Maleev truncation error is
    // resolvable above float noise (it is machine-exact for small theta)
    const double th = 1.5;
    double prev = 1e300;
    for (int n : {16, 64, 256, 1024}) {
        const auto s = spec_of(n, 1.0, 0.05, true);
        const double d = std::abs(bosonic_energy(s, th) - variational_energy(s, th)) / n;
        CHECK(d < prev);
        prev = d;
    }
    // and as theta shrinks at fixed N, down to the noise floor
    const auto s = spec_of(64, 1.0, 0.05, true);
    double prev_th = 1e300;
    for (double t : {2.5, 2.0, 1.5, 1.0}) {
        const double d = std::abs(bosonic_energy(s, t) - variational_energy(s, t));
        if (prev_th > 1e-10) CHECK(d < prev_th);
        prev_th = d;
    }
}
