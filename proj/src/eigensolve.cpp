#include "tci/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <cstdio>
#include <cstdlib>

#include "tci/errors.hpp"

namespace tci {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

VectorXcd random_vector(int64_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    VectorXcd v(dim);
    for (int64_t i = 0; i < dim; ++i) v[i] = std::complex<double>(g(rng), g(rng));
    return v;
}

// Two rounds of classical Gram-Schmidt against a set of vectors.
void orthogonalize(VectorXcd& w, const std::vector<VectorXcd>& basis) {
    for (int round = 0; round < 2; ++round)
        for (const auto& v : basis) w -= v.dot(w) * v;
}

// Combined re-orthogonalization against the locked eigenvectors and the
// current Lanczos basis. The locked set comes last: any deflation leakage
// reintroduced while projecting on V would otherwise be amplified by
// ||A|| / beta when the next basis vector is normalized.
void orthogonalize_deflated(VectorXcd& w, const std::vector<VectorXcd>& locked,
                            const std::vector<VectorXcd>& basis) {
    for (int round = 0; round < 2; ++round) {
        for (const auto& v : locked) w -= v.dot(w) * v;
        for (const auto& v : basis) w -= v.dot(w) * v;
    }
    for (const auto& v : locked) w -= v.dot(w) * v;
}

struct Sweep {
    std::vector<double> values;
    std::vector<VectorXcd> vectors;
    bool exhausted = false;   // no directions left outside the deflation space
};

// One thick-restart Lanczos sweep on the orthogonal complement of `locked`,
// targeting the lowest `want` eigenpairs of that complement.
Sweep run_sweep(const LinearOperator& op, const std::vector<VectorXcd>& locked, int want,
                const EigenRequest& req, std::mt19937_64& rng, int& matvecs, double& scale,
                std::vector<std::vector<double>>* ritz_history) {
    const int64_t dim = op.dimension();
    const int64_t free_dim = dim - static_cast<int64_t>(locked.size());
    Sweep out;
    if (free_dim < 1) {
        out.exhausted = true;
        return out;
    }
    const int m_max = static_cast<int>(std::min<int64_t>(
        free_dim, std::min<int64_t>(req.max_basis_vectors,
                                    std::max<int64_t>(60, 3 * static_cast<int64_t>(want) + 30))));

    if (ritz_history) ritz_history->emplace_back();
    std::vector<VectorXcd> V;
    V.reserve(m_max);
    MatrixXd T = MatrixXd::Zero(m_max, m_max);

    VectorXcd v0 = random_vector(dim, rng);
    orthogonalize(v0, locked);
    if (v0.norm() < 1e-8 * std::sqrt(static_cast<double>(dim))) {
        out.exhausted = true;
        return out;
    }
    v0.normalize();
    V.push_back(std::move(v0));

    double beta_residual = 0.0;
    VectorXcd residual;
    const double breakdown_tol = 1e-13;

    while (true) {
        bool breakdown = false;
        while (static_cast<int>(V.size()) <= m_max) {
            const int j = static_cast<int>(V.size()) - 1;
            VectorXcd w = op.apply(V[j]);
            ++matvecs;
            T(j, j) += std::real(V[j].dot(w));
            orthogonalize_deflated(w, locked, V);
            const double beta = w.norm();
            if (j + 1 >= m_max) {
                beta_residual = beta;
                if (beta > breakdown_tol) residual = w / beta;
                break;
            }
            if (beta <= breakdown_tol * std::max(1.0, scale)) {
                breakdown = true;
                beta_residual = 0.0;
                break;
            }
            T(j + 1, j) = T(j, j + 1) = beta;
            V.push_back(w / beta);
        }

        const int m = static_cast<int>(V.size());
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(T.topLeftCorner(m, m));
        const VectorXd theta = es.eigenvalues();
        const MatrixXd Y = es.eigenvectors();

        scale = std::max(scale, std::max(std::abs(theta[0]), std::abs(theta[m - 1])));
        if (ritz_history) ritz_history->back().push_back(theta[0]);

        const int n_low = std::min(want, m);
        auto res_est = [&](int i) {
            return breakdown ? 0.0 : std::abs(beta_residual * Y(m - 1, i));
        };
        bool all_converged = true;
        for (int i = 0; i < n_low; ++i)
            if (res_est(i) > req.tolerance * std::max(1.0, std::abs(theta[i]))) {
                all_converged = false;
                break;
            }

        const bool budget_out = matvecs >= req.max_iterations;
        if (std::getenv("TCI_TRACE_LANCZOS")) {
            fprintf(stderr,
                    "[sweep] m=%d want=%d conv=%d breakdown=%d theta0=%.8g est0=%.3e\n", m,
                    want, int(all_converged), int(breakdown), theta[0], res_est(0));
        }
        if (all_converged || breakdown || budget_out || m >= free_dim) {
            const bool exact = breakdown || m >= free_dim;
            for (int i = 0; i < n_low; ++i) {
                if (!exact && res_est(i) > req.tolerance * std::max(1.0, std::abs(theta[i])) * 10.0)
                    break;
                VectorXcd y = VectorXcd::Zero(dim);
                for (int k = 0; k < m; ++k) y += Y(k, i) * V[k];
                y.normalize();
                // guard against silent deflation drift: accept only pairs whose
                // explicit residual honors the contract (verification applies
                // are not counted as Lanczos iterations)
                VectorXcd ay = op.apply(y);
                const double true_res = (ay - theta[i] * y).norm();
                if (true_res > req.tolerance * std::max(1.0, std::abs(theta[i])) * 50.0) break;
                out.values.push_back(theta[i]);
                out.vectors.push_back(std::move(y));
            }
            return out;
        }

        // Thick restart: keep the lowest Ritz vectors plus the residual.
        const int keep = std::max(1, std::min(std::min(want + 8, m - 2), m_max - 2));
        std::vector<VectorXcd> newV;
        newV.reserve(keep + 1);
        for (int i = 0; i < keep; ++i) {
            VectorXcd y = VectorXcd::Zero(dim);
            for (int k = 0; k < m; ++k) y += Y(k, i) * V[k];
            newV.push_back(std::move(y));
        }
        T.setZero();
        for (int i = 0; i < keep; ++i) {
            T(i, i) = theta[i];
            T(i, keep) = T(keep, i) = beta_residual * Y(m - 1, i);
        }
        newV.push_back(residual);
        V = std::move(newV);
    }
}

void sort_pairs(std::vector<double>& vals, std::vector<VectorXcd>& vecs) {
    std::vector<size_t> order(vals.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return vals[a] < vals[b]; });
    std::vector<double> nv;
    std::vector<VectorXcd> nw;
    nv.reserve(vals.size());
    nw.reserve(vecs.size());
    for (size_t i : order) {
        nv.push_back(vals[i]);
        nw.push_back(std::move(vecs[i]));
    }
    vals = std::move(nv);
    vecs = std::move(nw);
}

void finalize(const LinearOperator& op, EigenResult& r, const EigenRequest& req, double scale) {
    const size_t n = r.eigenvalues.size();
    r.residual_norms.resize(n);
    for (size_t i = 0; i < n; ++i) {
        VectorXcd av = op.apply(r.eigenvectors[i]);
        r.residual_norms[i] = (av - r.eigenvalues[i] * r.eigenvectors[i]).norm();
    }
    r.degeneracy_group.resize(n);
    const double window = req.degeneracy_tol * std::max(1.0, scale);
    int group = 0;
    for (size_t i = 0; i < n; ++i) {
        if (i > 0 && r.eigenvalues[i] - r.eigenvalues[i - 1] > window) ++group;
        r.degeneracy_group[i] = group;
    }
}

} // namespace

Eigen::MatrixXcd to_dense(const LinearOperator& op) {
    const int64_t dim = op.dimension();
    require(dim <= kOracleDimCap, ErrorCode::DimensionTooLargeForOracle,
            "operator dimension exceeds the dense-oracle cap");
    MatrixXcd h(dim, dim);
    VectorXcd unit = VectorXcd::Zero(dim), col(dim);
    for (int64_t j = 0; j < dim; ++j) {
        unit[j] = 1.0;
        op.apply(unit, col);
        h.col(j) = col;
        unit[j] = 0.0;
    }
    return h;
}

EigenResult dense_oracle(const LinearOperator& op) {
    MatrixXcd h = to_dense(op);
    MatrixXcd herm = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(herm);
    EigenResult r;
    const int64_t dim = op.dimension();
    r.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + dim);
    r.eigenvectors.reserve(dim);
    for (int64_t i = 0; i < dim; ++i) r.eigenvectors.push_back(es.eigenvectors().col(i));
    const double scale =
        std::max({1.0, std::abs(r.eigenvalues.front()), std::abs(r.eigenvalues.back())});
    r.residual_norms.assign(dim, 0.0);
    const int64_t n_res = std::min<int64_t>(dim, 32);
    for (int64_t i = 0; i < n_res; ++i)
        r.residual_norms[i] = (h * r.eigenvectors[i] - r.eigenvalues[i] * r.eigenvectors[i]).norm();
    EigenRequest defaults;
    r.degeneracy_group.resize(dim);
    int group = 0;
    for (int64_t i = 0; i < dim; ++i) {
        if (i > 0 && r.eigenvalues[i] - r.eigenvalues[i - 1] > defaults.degeneracy_tol * scale)
            ++group;
        r.degeneracy_group[i] = group;
    }
    r.converged = true;
    return r;
}

EigenResult lowest_eigenpairs(const LinearOperator& op, const EigenRequest& req) {
    const int64_t dim = op.dimension();
    require(req.n_eigenpairs >= 1 && req.n_eigenpairs <= dim, ErrorCode::InvalidArgument,
            "n_eigenpairs must be in [1, dimension]");
    require(op.hermitian(), ErrorCode::InvalidArgument, "solver requires a hermitian operator");

    if (req.oracle || dim <= 16) {
        require(!req.oracle || dim <= kOracleDimCap, ErrorCode::DimensionTooLargeForOracle,
                "dense path requested above the oracle cap");
        EigenResult r = dense_oracle(op);
        r.eigenvalues.resize(req.n_eigenpairs);
        r.eigenvectors.resize(req.n_eigenpairs);
        r.residual_norms.resize(req.n_eigenpairs);
        r.degeneracy_group.resize(req.n_eigenpairs);
        r.seed = req.seed;
        return r;
    }

    std::mt19937_64 rng(req.seed);
    EigenResult r;
    r.seed = req.seed;
    double scale = 1.0;

    std::vector<double> vals;
    std::vector<VectorXcd> vecs;
    const int n_want = req.n_eigenpairs;

    // Deflated sweeps until n_want pairs are found, then keep probing the
    // complement until no interior copy can displace the n-th value
    // (degeneracy recovery: the count per level stabilizes).
    while (r.iterations < req.max_iterations) {
        const int have = static_cast<int>(vals.size());
        if (have >= n_want) {
            if (static_cast<int64_t>(have) >= dim) break;
            EigenRequest probe = req;
            probe.tolerance = req.tolerance * 10.0;
            Sweep s = run_sweep(op, vecs, 1, probe, rng, r.iterations, scale, &r.ritz_history);
            if (s.exhausted || s.values.empty()) break;
            const double window = req.degeneracy_tol * std::max(1.0, scale);
            if (s.values.front() >= vals[n_want - 1] - window) break;
            // missed interior copy: merge everything the probe locked
            for (size_t i = 0; i < s.values.size(); ++i) {
                vals.push_back(s.values[i]);
                vecs.push_back(std::move(s.vectors[i]));
            }
            sort_pairs(vals, vecs);
            continue;
        }
        Sweep s = run_sweep(op, vecs, n_want - have, req, rng, r.iterations, scale,
                            &r.ritz_history);
        if (s.exhausted) break;
        if (s.values.empty()) {
            r.converged = false;
            break;
        }
        for (size_t i = 0; i < s.values.size(); ++i) {
            vals.push_back(s.values[i]);
            vecs.push_back(std::move(s.vectors[i]));
        }
        sort_pairs(vals, vecs);
    }

    if (static_cast<int>(vals.size()) > n_want) {
        vals.resize(n_want);
        vecs.resize(n_want);
    }
    if (static_cast<int>(vals.size()) < n_want) r.converged = false;
    r.eigenvalues = std::move(vals);
    r.eigenvectors = std::move(vecs);
    finalize(op, r, req, scale);
    for (size_t i = 0; i < r.eigenvalues.size(); ++i)
        if (r.residual_norms[i] > req.tolerance * std::max(1.0, std::abs(r.eigenvalues[i])) * 10.0)
            r.converged = false;
    return r;
}

} // namespace tci
