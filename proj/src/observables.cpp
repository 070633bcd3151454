#include "tci/observables.hpp"

#include <cmath>
#include <complex>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tci/errors.hpp"

namespace tci {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

// <S_z^i S_z^j> over all pairs; real symmetric.
MatrixXd zz_correlations(const StateVector& psi) {
    const auto& basis = *psi.basis;
    const int n = basis.n_sites();
    const int64_t dim = basis.dim();
    MatrixXd c = MatrixXd::Zero(n, n);
#pragma omp parallel
    {
        MatrixXd local = MatrixXd::Zero(n, n);
#pragma omp for schedule(static)
        for (int64_t a = 0; a < dim; ++a) {
            const double w = std::norm(psi.amps[a]);
            if (w == 0.0) continue;
            const uint64_t cfg = basis.state(a);
            for (int i = 0; i < n; ++i) {
                const double szi = (cfg >> i) & 1 ? 0.5 : -0.5;
                for (int j = i; j < n; ++j) {
                    const double szj = (cfg >> j) & 1 ? 0.5 : -0.5;
                    local(i, j) += w * szi * szj;
                }
            }
        }
#pragma omp critical
        c += local;
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) c(j, i) = c(i, j);
    return c;
}

// <S+_i S-_j> for i != j; the transverse correlators assemble from it.
MatrixXcd ladder_correlations(const StateVector& psi) {
    const auto& basis = *psi.basis;
    const int n = basis.n_sites();
    const int64_t dim = basis.dim();
    MatrixXcd c = MatrixXcd::Zero(n, n);
#pragma omp parallel
    {
        MatrixXcd local = MatrixXcd::Zero(n, n);
#pragma omp for schedule(static)
        for (int64_t a = 0; a < dim; ++a) {
            const std::complex<double> va = psi.amps[a];
            if (va == std::complex<double>(0.0, 0.0)) continue;
            const uint64_t cfg = basis.state(a);
            for (int j = 0; j < n; ++j) {
                if (!((cfg >> j) & 1)) continue;
                const uint64_t low = cfg & ~(uint64_t(1) << j);
                for (int i = 0; i < n; ++i) {
                    if (i == j || ((low >> i) & 1)) continue;
                    // S+_i S-_j |cfg> lands on cfg with j lowered, i raised
                    const int64_t b = basis.index_of(low | (uint64_t(1) << i));
                    local(i, j) += std::conj(psi.amps[b]) * va;
                }
            }
        }
#pragma omp critical
        c += local;
    }
    return c;
}

} // namespace

StructureFactorResult structure_factor(const StateVector& state, char component,
                                       const LatticeCluster& cluster) {
    require(state.basis && !state.basis->reduced(), ErrorCode::BasisMismatch,
            "structure factors expect a plain-sector state (expand first)");
    require(state.basis->cluster().get() == &cluster, ErrorCode::BasisMismatch,
            "state and cluster disagree");
    require(component == 'x' || component == 'y' || component == 'z', ErrorCode::InvalidArgument,
            "component must be x, y or z");
    const int n = cluster.n_sites();

    MatrixXd corr(n, n);
    if (component == 'z') {
        corr = zz_correlations(state);
    } else {
        // S_x^i S_x^j = (S+ + S-)(S+ + S-)/4; on a fixed-M state only the
        // S+S- + S-S+ terms survive, and S_y matches with flipped signs on
        // the Delta M = +-2 pieces (identically zero here either way).
        const MatrixXcd ladder = ladder_correlations(state);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) {
                    corr(i, j) = 0.25;
                } else {
                    corr(i, j) = 0.25 * 2.0 * std::real(ladder(i, j));
                }
            }
        }
    }

    const auto& momenta = cluster.momenta();
    const auto& pos = cluster.positions();
    StructureFactorResult out;
    out.component = component;
    out.values.resize(momenta.size());
    for (size_t k = 0; k < momenta.size(); ++k) {
        const auto& q = momenta[k].cart;
        std::complex<double> acc = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double phase = q.x * (pos[i].x - pos[j].x) + q.y * (pos[i].y - pos[j].y);
                acc += std::polar(1.0, phase) * corr(i, j);
            }
        out.values[k] = acc.real() / n;
    }

    for (auto label : {WavevectorLabel::Gamma, WavevectorLabel::M, WavevectorLabel::X,
                       WavevectorLabel::K}) {
        try {
            const auto wv = cluster.ordering_wavevector(label);
            double sum = 0.0;
            for (int idx : wv.star) sum += out.values[idx];
            out.star_sums[to_string(label)] = sum;
        } catch (const Error&) {
            // label not meaningful or incommensurate on this cluster
        }
    }
    return out;
}

TotalSpin total_spin(const StateVector& state) {
    auto s2op = SpinHamiltonian::s_squared(state.basis);
    VectorXcd s2v(state.amps.size());
    s2op->apply(state.amps, s2v);
    TotalSpin out;
    out.s_squared = std::real(state.amps.dot(s2v));
    out.variance = std::max(0.0, s2v.squaredNorm() - out.s_squared * out.s_squared);
    if (out.variance < 1e-6) out.s = 0.5 * (std::sqrt(1.0 + 4.0 * out.s_squared) - 1.0);
    return out;
}

void resolve_total_spin(EigenResult& result, const BasisPtr& basis) {
    auto s2op = SpinHamiltonian::s_squared(basis);
    size_t i = 0;
    while (i < result.eigenvalues.size()) {
        size_t j = i + 1;
        while (j < result.eigenvalues.size() &&
               result.degeneracy_group[j] == result.degeneracy_group[i])
            ++j;
        const size_t width = j - i;
        if (width > 1) {
            MatrixXcd block(width, width);
            std::vector<VectorXcd> s2vs(width);
            for (size_t b = 0; b < width; ++b) s2vs[b] = s2op->apply(result.eigenvectors[i + b]);
            for (size_t a = 0; a < width; ++a)
                for (size_t b = 0; b < width; ++b)
                    block(a, b) = result.eigenvectors[i + a].dot(s2vs[b]);
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (block + block.adjoint()));
            std::vector<VectorXcd> rotated(width);
            for (size_t b = 0; b < width; ++b) {
                VectorXcd v = VectorXcd::Zero(result.eigenvectors[i].size());
                for (size_t a = 0; a < width; ++a) v += es.eigenvectors()(a, b) * result.eigenvectors[i + a];
                v.normalize();
                rotated[b] = std::move(v);
            }
            for (size_t b = 0; b < width; ++b) result.eigenvectors[i + b] = std::move(rotated[b]);
        }
        i = j;
    }
}

SpectrumComparison heisenberg_mapping_check(const ModelParams& params, const ClusterPtr& cluster,
                                            int n_levels, const EigenRequest& req) {
    auto basis = SectorBasis::enumerate(cluster, 0);
    const double lam = params.effective_lambda(cluster->n_sites());

    ModelParams tci = params;
    tci.variant = ModelVariant::TCI;
    EigenRequest tci_req = req;
    tci_req.n_eigenpairs = n_levels;
    const auto tci_res = lowest_eigenpairs(*SpinHamiltonian::from_params(tci, basis), tci_req);

    ModelParams heis = params;
    heis.variant = ModelVariant::Heisenberg;
    heis.eq4_normalization = true;
    auto h_op = SpinHamiltonian::from_params(heis, basis);

    std::vector<double> singlets;
    int ask = std::max(2 * n_levels, n_levels + 4);
    for (int attempt = 0; attempt < 4 && static_cast<int>(singlets.size()) < n_levels; ++attempt) {
        EigenRequest h_req = req;
        h_req.n_eigenpairs = std::min<int64_t>(ask, basis->dim());
        EigenResult h_res = lowest_eigenpairs(*h_op, h_req);
        resolve_total_spin(h_res, basis);
        singlets.clear();
        for (size_t i = 0; i < h_res.eigenvalues.size(); ++i) {
            TotalSpin ts = total_spin({basis, h_res.eigenvectors[i]});
            if (ts.s_squared < 1e-6 && ts.variance < 1e-6)
                singlets.push_back(h_res.eigenvalues[i]);
        }
        if (static_cast<int64_t>(ask) >= basis->dim()) break;
        ask *= 2;
    }
    require(static_cast<int>(singlets.size()) >= n_levels, ErrorCode::InsufficientSingletLevels,
            "could not converge enough Heisenberg singlet levels");

    SpectrumComparison out;
    out.tolerance = 10.0 * params.j1 * params.j1 / lam;
    for (int i = 0; i < n_levels; ++i) {
        out.tci_levels.push_back(tci_res.eigenvalues[i]);
        out.heisenberg_singlet_levels.push_back(singlets[i]);
        const double d = std::abs(tci_res.eigenvalues[i] - singlets[i]);
        out.differences.push_back(d);
        out.matched.push_back(d <= out.tolerance);
    }
    return out;
}

namespace {

BasisPtr sector_basis(const ClusterPtr& cluster, const SectorLabel& sector) {
    auto plain = SectorBasis::enumerate(cluster, sector.two_m);
    if (sector.momentum_index) return plain->reduce(*sector.momentum_index, sector.parity);
    return plain;
}

// Ground state (or degenerate ground multiplet) at coupling lambda.
std::pair<std::vector<VectorXcd>, bool> ground_multiplet(const ModelParams& base,
                                                         const BasisPtr& basis, double lambda,
                                                         const EigenRequest& req) {
    ModelParams p = base;
    p.lambda = lambda;
    auto op = SpinHamiltonian::from_params(p, basis);
    EigenRequest r = req;
    r.n_eigenpairs = static_cast<int>(std::min<int64_t>(3, basis->dim()));
    const auto res = lowest_eigenpairs(*op, r);
    std::vector<VectorXcd> vecs{res.eigenvectors[0]};
    bool degenerate = false;
    for (size_t i = 1; i < res.eigenvalues.size(); ++i) {
        if (res.degeneracy_group[i] == res.degeneracy_group[0]) {
            vecs.push_back(res.eigenvectors[i]);
            degenerate = true;
        }
    }
    return {vecs, degenerate};
}

double subspace_overlap(const std::vector<VectorXcd>& a, const std::vector<VectorXcd>& b) {
    const size_t k = std::min(a.size(), b.size());
    MatrixXcd o(a.size(), b.size());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) o(i, j) = a[i].dot(b[j]);
    Eigen::JacobiSVD<MatrixXcd> svd(o);
    double fid = 1.0;
    for (size_t i = 0; i < k; ++i) fid *= svd.singularValues()[i];
    return fid;
}

} // namespace

FidelityCurve fidelity_susceptibility(const ModelParams& base, const ClusterPtr& cluster,
                                      const std::vector<double>& lambda_grid, double delta_lambda,
                                      const SectorLabel& sector, const EigenRequest& req) {
    require(!lambda_grid.empty(), ErrorCode::InvalidArgument, "empty coupling grid");
    auto basis = sector_basis(cluster, sector);
    FidelityCurve out;
    out.delta_lambda = delta_lambda;
    out.lambdas = lambda_grid;
    for (double lam : lambda_grid) {
        auto [g0, d0] = ground_multiplet(base, basis, lam, req);
        auto [g1, d1] = ground_multiplet(base, basis, lam + delta_lambda, req);
        const bool degen = d0 || d1;
        double overlap;
        if (!degen)
            overlap = std::abs(g0[0].dot(g1[0]));
        else
            overlap = std::abs(subspace_overlap(g0, g1));
        overlap = std::min(overlap, 1.0);
        out.chi_f.push_back(-2.0 * std::log(std::max(overlap, 1e-300)) /
                            (delta_lambda * delta_lambda));
        out.degenerate.push_back(degen);
    }
    // interior local maxima with parabolic refinement
    for (size_t i = 1; i + 1 < out.chi_f.size(); ++i) {
        if (out.chi_f[i] > out.chi_f[i - 1] && out.chi_f[i] >= out.chi_f[i + 1]) {
            const double y0 = out.chi_f[i - 1], y1 = out.chi_f[i], y2 = out.chi_f[i + 1];
            const double x0 = out.lambdas[i - 1], x1 = out.lambdas[i], x2 = out.lambdas[i + 1];
            const double denom = (y0 - 2 * y1 + y2);
            FidelityCurve::Peak peak{x1, y1, false};
            if (std::abs(denom) > 1e-300) {
                const double shift = 0.5 * (y0 - y2) / denom;
                if (std::abs(shift) <= 1.0) {
                    peak.lambda = x1 + shift * 0.5 * (x2 - x0);
                    peak.value = y1 - 0.25 * (y0 - y2) * shift;
                    peak.refined = true;
                }
            }
            out.peaks.push_back(peak);
        }
    }
    return out;
}

double fidelity_susceptibility_perturbative(const ModelParams& base, const ClusterPtr& cluster,
                                            double lambda, const SectorLabel& sector) {
    auto basis = sector_basis(cluster, sector);
    ModelParams p = base;
    p.lambda = lambda;
    const auto spec = dense_oracle(*SpinHamiltonian::from_params(p, basis));

    // dH/d(lambda) in the sweep parameterization; rescaled mode sweeps
    // lambda-bar so the derivative carries the factor N.
    const double dcoeff = base.rescaled ? static_cast<double>(cluster->n_sites()) : 1.0;
    SpinHamiltonian dh(basis, dcoeff, {}, {});
    const VectorXcd d0 = dh.apply(spec.eigenvectors[0]);
    double chi = 0.0;
    for (size_t n = 1; n < spec.eigenvalues.size(); ++n) {
        const double de = spec.eigenvalues[n] - spec.eigenvalues[0];
        if (de < 1e-12) continue;   // degenerate with the ground state: excluded
        chi += std::norm(spec.eigenvectors[n].dot(d0)) / (de * de);
    }
    return chi;
}

} // namespace tci
