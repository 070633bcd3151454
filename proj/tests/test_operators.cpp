#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tci/eigensolve.hpp"
#include "tci/operators.hpp"
#include "tci/reference.hpp"

using namespace tci;

namespace {

ClusterPtr chain(int n) {
    LatticeSpec s;
    s.kind = LatticeKind::Chain;
    s.t1 = {n, 0};
    s.t2 = {0, 1};
    s.include_j2 = n > 2;
    return build_cluster(s);
}

ClusterPtr square(int lx, int ly) {
    LatticeSpec s;
    s.kind = LatticeKind::Square;
    s.t1 = {lx, 0};
    s.t2 = {0, ly};
    return build_cluster(s);
}

Eigen::VectorXcd random_vec(int64_t dim, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(dim);
    for (int64_t i = 0; i < dim; ++i) v[i] = std::complex<double>(g(rng), g(rng));
    v.normalize();
    return v;
}

// Two-spin TCI with a single bond, full spectrum across both M sectors.
std::vector<double> two_spin_spectrum(double lambda, double j) {
    auto cl = chain(2);
    std::vector<double> all;
    for (int two_m : {-2, 0, 2}) {
        auto basis = SectorBasis::enumerate(cl, two_m);
        SpinHamiltonian h(basis, lambda, {{0, 1, j}}, {});
        const auto r = dense_oracle(h);
        all.insert(all.end(), r.eigenvalues.begin(), r.eigenvalues.end());
    }
    std::sort(all.begin(), all.end());
    return all;
}

} // namespace

TEST_CASE("two-spin TCI analytic spectrum") {
    const auto s = two_spin_spectrum(1.0, 1.0);
    REQUIRE(s.size() == 4);
    CHECK(s[0] == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(s[1] == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(s[2] == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(s[3] == doctest::Approx(1.75).epsilon(1e-14));
}

TEST_CASE("lambda = 0 reduces to the diagonal Ising energy") {
    auto cl = square(2, 4);
    auto basis = SectorBasis::enumerate(cl, 2);
    ModelParams p;
    p.variant = ModelVariant::TCI;
    p.j1 = 1.0;
    p.j2 = 0.3;
    p.lambda = 0.0;
    auto h = SpinHamiltonian::from_params(p, basis);
    Eigen::VectorXcd unit = Eigen::VectorXcd::Zero(basis->dim());
    unit[5] = 1.0;
    const auto out = h->apply(unit);
    for (int64_t i = 0; i < basis->dim(); ++i) {
        if (i == 5)
            CHECK(std::abs(out[i] - h->diagonal_energy(basis->state(5))) < 1e-14);
        else
            CHECK(std::abs(out[i]) < 1e-14);
    }
}

TEST_CASE("production kernel matches the serial reference") {
    auto cl = square(2, 4);
    for (int two_m : {0, 2, -4}) {
        auto basis = SectorBasis::enumerate(cl, two_m);
        ModelParams p;
        p.variant = ModelVariant::TCI;
        p.j1 = 1.0;
        p.j2 = 0.5;
        p.lambda = 0.8;
        auto h = SpinHamiltonian::from_params(p, basis);
        const auto v = random_vec(basis->dim(), 11);
        Eigen::VectorXcd a(basis->dim()), b(basis->dim());
        h->apply(v, a);
        ref::apply_hamiltonian(*h, v, b);
        CHECK((a - b).norm() < 1e-12);
    }
}

TEST_CASE("hermiticity on random vectors") {
    auto cl = square(2, 4);
    auto plain = SectorBasis::enumerate(cl, 0);
    ModelParams p;
    p.variant = ModelVariant::TCI;
    p.j1 = 1.0;
    p.j2 = 0.4;
    p.lambda = 1.3;
    for (const BasisPtr& basis :
         {plain, BasisPtr(plain->reduce(1)), BasisPtr(plain->reduce(0, -1))}) {
        if (basis->dim() == 0) continue;
        for (auto variant : {ModelVariant::TCI, ModelVariant::Heisenberg, ModelVariant::Ising,
                             ModelVariant::CavityOnly}) {
            ModelParams q = p;
            q.variant = variant;
            auto h = SpinHamiltonian::from_params(q, basis);
            const auto u = random_vec(basis->dim(), 3);
            const auto v = random_vec(basis->dim(), 5);
            const auto lhs = u.dot(h->apply(v));
            const auto rhs = std::conj(v.dot(h->apply(u)));
            CHECK(std::abs(lhs - rhs) < 1e-10);
        }
    }
}

TEST_CASE("TCI matches a dense construction on N=8") {
    auto cl = square(2, 4);
    auto basis = SectorBasis::enumerate(cl, 0);
    ModelParams p;
    p.variant = ModelVariant::TCI;
    p.j1 = 1.0;
    p.j2 = 0.6;
    p.lambda = 0.7;
    auto h = SpinHamiltonian::from_params(p, basis);
    const auto dense = to_dense(*h);
    const auto v = random_vec(basis->dim(), 23);
    const Eigen::VectorXcd direct = h->apply(v);
    const Eigen::VectorXcd via_dense = dense * v;
    CHECK((direct - via_dense).norm() < 1e-12);
    CHECK((dense - dense.adjoint()).norm() < 1e-12);
}

TEST_CASE("Heisenberg two-spin and ring energies") {
    // single bond, Eq.-4 normalization: singlet at -J/4
    auto cl2 = chain(2);
    auto b2 = SectorBasis::enumerate(cl2, 0);
    SpinHamiltonian h2(b2, 0.0, {{0, 1, 1.0 / 3.0}}, {{0, 1, 1.0 / 6.0}});
    const auto r2 = dense_oracle(h2);
    CHECK(r2.eigenvalues.front() == doctest::Approx(-0.25).epsilon(1e-14));

    // 4-site ring, conventional normalization K=1: ground energy -2
    auto cl4 = chain(4);
    auto b4 = SectorBasis::enumerate(cl4, 0);
    ModelParams p;
    p.variant = ModelVariant::Heisenberg;
    p.eq4_normalization = false;
    p.j1 = 1.0;
    p.j2 = 0.0;
    auto h4 = SpinHamiltonian::from_params(p, b4);
    const auto r4 = dense_oracle(*h4);
    CHECK(r4.eigenvalues.front() == doctest::Approx(-2.0).epsilon(1e-13));
}

TEST_CASE("fully polarized sector has no flip-flops") {
    auto cl = square(2, 4);
    auto basis = SectorBasis::enumerate(cl, 8);
    REQUIRE(basis->dim() == 1);
    ModelParams p;
    p.variant = ModelVariant::Heisenberg;
    p.eq4_normalization = false;
    auto h = SpinHamiltonian::from_params(p, basis);
    Eigen::VectorXcd v(1);
    v[0] = 1.0;
    const auto out = h->apply(v);
    CHECK(std::abs(out[0].real() - h->diagonal_energy(basis->state(0))) < 1e-14);
}

TEST_CASE("cavity-only spectrum is lambda [S(S+1) - M^2]") {
    auto cl = chain(4);
    auto basis = SectorBasis::enumerate(cl, 0);
    ModelParams p;
    p.variant = ModelVariant::CavityOnly;
    p.lambda = 1.0;
    const auto r = dense_oracle(*SpinHamiltonian::from_params(p, basis));
    const std::vector<double> expected = {0, 0, 2, 2, 2, 6};
    REQUIRE(r.eigenvalues.size() == expected.size());
    for (size_t i = 0; i < expected.size(); ++i)
        CHECK(r.eigenvalues[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("S^2 operator basics") {
    // fully polarized N=4: S^2 = 6
    auto cl = chain(4);
    auto top = SectorBasis::enumerate(cl, 4);
    StateVector pol(top);
    pol.amps[0] = 1.0;
    const auto s2 = apply_s_squared(top, pol);
    CHECK(std::abs(s2.amps[0].real() - 6.0) < 1e-13);

    // two-spin singlet annihilated
    auto cl2 = chain(2);
    auto b2 = SectorBasis::enumerate(cl2, 0);
    StateVector singlet(b2);
    singlet.amps[0] = 1.0 / std::sqrt(2.0);
    singlet.amps[1] = -1.0 / std::sqrt(2.0);
    const auto out = apply_s_squared(b2, singlet);
    CHECK(out.amps.norm() < 1e-13);
}

TEST_CASE("S^2 expectation respects the M(M+1) lower bound") {
    auto cl = chain(6);
    for (int two_m : {0, 2, 4}) {
        auto basis = SectorBasis::enumerate(cl, two_m);
        const double m = 0.5 * two_m;
        for (uint64_t seed : {1u, 2u, 3u}) {
            StateVector v(basis);
            v.amps = random_vec(basis->dim(), seed);
            const auto s2v = apply_s_squared(basis, v);
            const double exp_s2 = std::real(v.amps.dot(s2v.amps));
            CHECK(exp_s2 >= m * (m + 1) - 1e-10);
        }
    }
}

TEST_CASE("sector closure: reduced spectra concatenate to the plain spectrum") {
    auto cl = square(2, 4);
    auto plain = SectorBasis::enumerate(cl, 0);
    ModelParams p;
    p.variant = ModelVariant::TCI;
    p.j1 = 1.0;
    p.j2 = 0.5;
    p.lambda = 0.6;
    const auto full = dense_oracle(*SpinHamiltonian::from_params(p, plain));
    std::vector<double> collected;
    for (size_t k = 0; k < cl->momenta().size(); ++k)
        for (int par : {+1, -1}) {
            auto red = plain->reduce(static_cast<int>(k), par);
            if (red->dim() == 0) continue;
            const auto r = dense_oracle(*SpinHamiltonian::from_params(p, red));
            collected.insert(collected.end(), r.eigenvalues.begin(), r.eigenvalues.end());
        }
    std::sort(collected.begin(), collected.end());
    REQUIRE(collected.size() == full.eigenvalues.size());
    for (size_t i = 0; i < collected.size(); ++i)
        CHECK(collected[i] == doctest::Approx(full.eigenvalues[i]).epsilon(1e-9));
}

TEST_CASE("rescaled coupling multiplies lambda by N") {
    auto cl = chain(4);
    auto basis = SectorBasis::enumerate(cl, 0);
    ModelParams a;
    a.variant = ModelVariant::CavityOnly;
    a.lambda = 0.25;
    a.rescaled = true;
    ModelParams b;
    b.variant = ModelVariant::CavityOnly;
    b.lambda = 1.0;
    const auto ra = dense_oracle(*SpinHamiltonian::from_params(a, basis));
    const auto rb = dense_oracle(*SpinHamiltonian::from_params(b, basis));
    for (size_t i = 0; i < ra.eigenvalues.size(); ++i)
        CHECK(ra.eigenvalues[i] == doctest::Approx(rb.eigenvalues[i]).epsilon(1e-13));
}

TEST_CASE("antiferromagnetic guard") {
    auto basis = SectorBasis::enumerate(chain(4), 0);
    ModelParams p;
    p.j1 = -1.0;
    CHECK_THROWS_AS((void)SpinHamiltonian::from_params(p, basis), Error);
    p.allow_ferromagnetic = true;
    CHECK_NOTHROW((void)SpinHamiltonian::from_params(p, basis));
}

TEST_CASE("basis mismatch raises") {
    auto basis = SectorBasis::enumerate(chain(4), 0);
    ModelParams p;
    auto h = SpinHamiltonian::from_params(p, basis);
    Eigen::VectorXcd wrong(3);
    Eigen::VectorXcd out;
    CHECK_THROWS_AS(h->apply(wrong, out), Error);
}

TEST_CASE("spec-shaped apply helpers agree with the operator objects") {
    auto cl = square(2, 4);
    auto basis = SectorBasis::enumerate(cl, 0);
    StateVector v(basis);
    v.amps = random_vec(basis->dim(), 99);
    ModelParams p;
    p.j1 = 1.0;
    p.j2 = 0.3;
    p.lambda = 0.7;
    const auto tci = apply_tci(p, basis, v);
    const auto heis = apply_heisenberg(p, basis, v);
    const auto cav = apply_cavity_only(0.7, basis, v);
    auto check_against = [&](const StateVector& got, ModelVariant variant) {
        ModelParams q = p;
        q.variant = variant;
        auto h = SpinHamiltonian::from_params(q, basis);
        CHECK((got.amps - h->apply(v.amps)).norm() < 1e-13);
    };
    check_against(tci, ModelVariant::TCI);
    check_against(heis, ModelVariant::Heisenberg);
    check_against(cav, ModelVariant::CavityOnly);
}
