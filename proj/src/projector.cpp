#include "tci/projector.hpp"

#include <cmath>
#include <numbers>

#include "tci/bits.hpp"
#include "tci/eigensolve.hpp"
#include "tci/errors.hpp"

namespace tci {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (t * p1 - p0) / (t * t - 1.0);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

MatrixXcd full_space_sy(int n_sites) {
    // collective S_y = sum_i (S+_i - S-_i) / 2i:
    // S_y |up> = (i/2)|dn>, S_y |dn> = -(i/2)|up>
    const int64_t dim = int64_t(1) << n_sites;
    MatrixXcd m = MatrixXcd::Zero(dim, dim);
    for (int64_t c = 0; c < dim; ++c) {
        for (int i = 0; i < n_sites; ++i) {
            const int64_t c2 = c ^ (int64_t(1) << i);
            if ((c >> i) & 1)
                m(c2, c) += std::complex<double>(0.0, 0.5);
            else
                m(c2, c) += std::complex<double>(0.0, -0.5);
        }
    }
    return m;
}

MatrixXcd full_space_ising_diag(const std::vector<WeightedBond>& bonds, int n_sites) {
    const int64_t dim = int64_t(1) << n_sites;
    MatrixXcd m = MatrixXcd::Zero(dim, dim);
    for (int64_t c = 0; c < dim; ++c) {
        double e = 0.0;
        for (const auto& b : bonds) {
            const double szi = ((c >> b.i) & 1) ? 0.5 : -0.5;
            const double szj = ((c >> b.j) & 1) ? 0.5 : -0.5;
            e += b.w * szi * szj;
        }
        m(c, c) = e;
    }
    return m;
}

VectorXd magnetization_diag(int n_sites) {
    const int64_t dim = int64_t(1) << n_sites;
    VectorXd m(dim);
    for (int64_t c = 0; c < dim; ++c)
        m[c] = 0.5 * (2 * bits::popcount(static_cast<uint64_t>(c)) - n_sites);
    return m;
}

// Quadrature average of D(psi) K Y(phi) D(phi'); D diagonal Sz rotations.
MatrixXcd haar_average(int n_sites, const EulerQuadrature& quad,
                       const MatrixXcd* sandwich /* nullptr for projector */) {
    const int64_t dim = int64_t(1) << n_sites;
    const VectorXd mz = magnetization_diag(n_sites);

    // e^{-i phi S_y} via eigendecomposition of the collective S_y.
    Eigen::SelfAdjointEigenSolver<MatrixXcd> sy(full_space_sy(n_sites));
    const MatrixXcd& u = sy.eigenvectors();
    const VectorXd& ev = sy.eigenvalues();

    std::vector<double> gx, gw;
    gauss_legendre(quad.n_theta_polar, gx, gw);

    MatrixXcd acc = MatrixXcd::Zero(dim, dim);
    MatrixXcd rot(dim, dim), tmp(dim, dim);
    for (int it = 0; it < quad.n_theta_polar; ++it) {
        const double phi = std::acos(gx[it]);
        VectorXcd phase(dim);
        for (int64_t k = 0; k < dim; ++k) phase[k] = std::polar(1.0, -phi * ev[k]);
        rot.noalias() = u * phase.asDiagonal() * u.adjoint();

        // Average over the two azimuthal angles: uniform sums of
        // e^{-i psi Sz} (left) and e^{-i phi' Sz} (right).
        MatrixXcd mid;
        if (sandwich) {
            // R^dagger H R = D(phi')^+ Y(phi)^+ D(psi)^+ H D(psi) Y(phi) D(phi')
            MatrixXcd inner = MatrixXcd::Zero(dim, dim);
            for (int ip = 0; ip < quad.n_psi; ++ip) {
                const double psi = 2.0 * kPi * ip / quad.n_psi;
                VectorXcd dpsi(dim);
                for (int64_t k = 0; k < dim; ++k) dpsi[k] = std::polar(1.0, -psi * mz[k]);
                inner.noalias() += (dpsi.conjugate().asDiagonal() * (*sandwich) *
                                    dpsi.asDiagonal()) /
                                   static_cast<double>(quad.n_psi);
            }
            tmp.noalias() = rot.adjoint() * inner * rot;
            mid = MatrixXcd::Zero(dim, dim);
            for (int iq = 0; iq < quad.n_phi; ++iq) {
                const double phi2 = 2.0 * kPi * iq / quad.n_phi;
                VectorXcd dphi(dim);
                for (int64_t k = 0; k < dim; ++k) dphi[k] = std::polar(1.0, -phi2 * mz[k]);
                mid.noalias() += (dphi.conjugate().asDiagonal() * tmp * dphi.asDiagonal()) /
                                 static_cast<double>(quad.n_phi);
            }
        } else {
            // P = avg_psi D(psi) . Y(phi) . avg_phi' D(phi')
            VectorXcd left = VectorXcd::Zero(dim), right = VectorXcd::Zero(dim);
            for (int ip = 0; ip < quad.n_psi; ++ip) {
                const double psi = 2.0 * kPi * ip / quad.n_psi;
                for (int64_t k = 0; k < dim; ++k)
                    left[k] += std::polar(1.0, -psi * mz[k]) / static_cast<double>(quad.n_psi);
            }
            for (int iq = 0; iq < quad.n_phi; ++iq) {
                const double phi2 = 2.0 * kPi * iq / quad.n_phi;
                for (int64_t k = 0; k < dim; ++k)
                    right[k] += std::polar(1.0, -phi2 * mz[k]) / static_cast<double>(quad.n_phi);
            }
            mid = left.asDiagonal() * rot * right.asDiagonal();
        }
        acc += 0.5 * gw[it] * mid;
    }
    return acc;
}

} // namespace

Eigen::MatrixXcd singlet_projector_spectral(int n_sites) {
    require(n_sites % 2 == 0 && n_sites >= 2 && n_sites <= 12,
            ErrorCode::DimensionTooLargeForOracle, "spectral projector supports even N <= 12");
    LatticeSpec spec;
    spec.kind = LatticeKind::Chain;
    spec.t1 = {n_sites, 0};
    spec.t2 = {0, 1};
    spec.include_j2 = false;   // basis host only, no couplings used
    auto basis = SectorBasis::enumerate(build_cluster(spec), 0);
    auto s2 = SpinHamiltonian::s_squared(basis);
    const MatrixXcd dense = to_dense(*s2);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (dense + dense.adjoint()));
    const int64_t dim = basis->dim();
    MatrixXcd p = MatrixXcd::Zero(dim, dim);
    for (int64_t i = 0; i < dim; ++i) {
        if (es.eigenvalues()[i] < 1e-9)
            p.noalias() += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    }
    return p;
}

Eigen::MatrixXcd embed_m0_block(const Eigen::MatrixXcd& block, int n_sites) {
    LatticeSpec spec;
    spec.kind = LatticeKind::Chain;
    spec.t1 = {n_sites, 0};
    spec.t2 = {0, 1};
    spec.include_j2 = false;   // basis host only, no couplings used
    auto basis = SectorBasis::enumerate(build_cluster(spec), 0);
    require(block.rows() == basis->dim(), ErrorCode::InvalidArgument, "block dimension mismatch");
    const int64_t full = int64_t(1) << n_sites;
    MatrixXcd out = MatrixXcd::Zero(full, full);
    for (int64_t a = 0; a < basis->dim(); ++a)
        for (int64_t b = 0; b < basis->dim(); ++b)
            out(static_cast<int64_t>(basis->state(a)), static_cast<int64_t>(basis->state(b))) =
                block(a, b);
    return out;
}

Eigen::MatrixXcd singlet_projector_haar(int n_sites, const EulerQuadrature& quad) {
    require(n_sites % 2 == 0 && n_sites >= 2 && n_sites <= 10,
            ErrorCode::DimensionTooLargeForOracle, "Haar projector supports even N <= 10");
    return haar_average(n_sites, quad, nullptr);
}

Eigen::MatrixXcd symmetrize_hamiltonian(const std::vector<WeightedBond>& zz_bonds, int n_sites,
                                        const EulerQuadrature& quad) {
    require(n_sites >= 2 && n_sites <= 10, ErrorCode::DimensionTooLargeForOracle,
            "Haar symmetrization supports N <= 10");
    const MatrixXcd ising = full_space_ising_diag(zz_bonds, n_sites);
    return haar_average(n_sites, quad, &ising);
}

Eigen::MatrixXcd dense_heisenberg_full(const std::vector<WeightedBond>& bonds, int n_sites) {
    const int64_t dim = int64_t(1) << n_sites;
    MatrixXcd h = MatrixXcd::Zero(dim, dim);
    for (int64_t c = 0; c < dim; ++c) {
        for (const auto& b : bonds) {
            const bool bi = (c >> b.i) & 1;
            const bool bj = (c >> b.j) & 1;
            h(c, c) += b.w * (bi ? 0.5 : -0.5) * (bj ? 0.5 : -0.5);
            if (bi != bj) {
                const int64_t c2 = c ^ ((int64_t(1) << b.i) | (int64_t(1) << b.j));
                h(c2, c) += 0.5 * b.w;
            }
        }
    }
    return h;
}

ProjectedSectorCheck projected_hamiltonian_check(const ModelParams& params,
                                                 const ClusterPtr& cluster, int total_spin_s,
                                                 int two_m) {
    const int n = cluster->n_sites();
    require(n <= 10, ErrorCode::DimensionTooLargeForOracle, "projected check supports N <= 10");
    require(std::abs(two_m) <= 2 * total_spin_s, ErrorCode::InvalidArgument,
            "|M| must not exceed S");
    auto basis = SectorBasis::enumerate(cluster, two_m);

    // total-spin-S eigenspace of S^2 within the sector
    auto s2 = SpinHamiltonian::s_squared(basis);
    const MatrixXcd s2d = to_dense(*s2);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (s2d + s2d.adjoint()));
    const double target = total_spin_s * (total_spin_s + 1.0);
    std::vector<int64_t> cols;
    for (int64_t i = 0; i < basis->dim(); ++i)
        if (std::abs(es.eigenvalues()[i] - target) < 1e-6) cols.push_back(i);
    require(!cols.empty(), ErrorCode::InvalidArgument, "no states with the requested total spin");
    MatrixXcd w(basis->dim(), cols.size());
    for (size_t k = 0; k < cols.size(); ++k) w.col(k) = es.eigenvectors().col(cols[k]);

    // projected Ising block
    ModelParams ising = params;
    ising.variant = ModelVariant::Ising;
    auto ising_op = SpinHamiltonian::from_params(ising, basis);
    const MatrixXcd ising_d = to_dense(*ising_op);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> pes(MatrixXcd(w.adjoint() * ising_d * w));

    const double lam = params.effective_lambda(n);
    const double m = 0.5 * two_m;
    const double e_sm = lam * (target - m * m);

    ModelParams tci = params;
    tci.variant = ModelVariant::TCI;
    const auto tci_spec = dense_oracle(*SpinHamiltonian::from_params(tci, basis));

    ProjectedSectorCheck out;
    for (int64_t i = 0; i < pes.eigenvalues().size(); ++i) {
        const double level = e_sm + pes.eigenvalues()[i];
        double best = tci_spec.eigenvalues[0];
        for (double v : tci_spec.eigenvalues)
            if (std::abs(v - level) < std::abs(best - level)) best = v;
        out.projected_levels.push_back(level);
        out.nearest_tci.push_back(best);
        out.max_abs_deviation = std::max(out.max_abs_deviation, std::abs(best - level));
    }
    return out;
}

} // namespace tci
