#include "tci/operators.hpp"

#include <cmath>

#include "tci/bits.hpp"
#include "tci/errors.hpp"

namespace tci {

const char* to_string(ModelVariant v) {
    switch (v) {
        case ModelVariant::TCI: return "tci";
        case ModelVariant::Heisenberg: return "heisenberg";
        case ModelVariant::Ising: return "ising";
        case ModelVariant::CavityOnly: return "cavity";
    }
    return "?";
}

ModelVariant model_variant_from_string(const std::string& name) {
    if (name == "tci") return ModelVariant::TCI;
    if (name == "heisenberg") return ModelVariant::Heisenberg;
    if (name == "ising") return ModelVariant::Ising;
    if (name == "cavity") return ModelVariant::CavityOnly;
    throw Error(ErrorCode::InvalidArgument, "unknown model variant '" + name + "'");
}

SpinHamiltonian::SpinHamiltonian(BasisPtr basis, double cavity, std::vector<WeightedBond> zz,
                                 std::vector<WeightedBond> xy, double diag_shift)
    : basis_(std::move(basis)),
      cavity_(cavity),
      diag_shift_(diag_shift),
      zz_(std::move(zz)),
      xy_(std::move(xy)) {
    const int64_t dim = basis_->dim();
    if (cavity_ != 0.0 && !basis_->reduced() && basis_->n_up() > 0) {
        aux_ = SectorBasis::enumerate(basis_->cluster(), basis_->label().two_m - 2);
    }
    diag_.resize(dim);
#pragma omp parallel for schedule(static)
    for (int64_t a = 0; a < dim; ++a) diag_[a] = diagonal_energy(basis_->state(a));
}

double SpinHamiltonian::diagonal_energy(uint64_t config) const {
    double e = diag_shift_ + cavity_ * 0.5 * basis_->n_sites();
    for (const auto& b : zz_) {
        const double szi = (config >> b.i) & 1 ? 0.5 : -0.5;
        const double szj = (config >> b.j) & 1 ? 0.5 : -0.5;
        e += b.w * szi * szj;
    }
    return e;
}

std::shared_ptr<SpinHamiltonian> SpinHamiltonian::from_params(const ModelParams& params,
                                                              BasisPtr basis) {
    if (!params.allow_ferromagnetic) {
        require(params.j1 >= 0 && params.j2 >= 0 && params.lambda >= 0,
                ErrorCode::InvalidArgument,
                "antiferromagnetic couplings expected (set allow_ferromagnetic to override)");
    }
    const auto& cl = *basis->cluster();
    const double lam = params.effective_lambda(cl.n_sites());

    std::vector<WeightedBond> zz, xy;
    const bool ising_part =
        params.variant == ModelVariant::TCI || params.variant == ModelVariant::Ising;
    const bool heis = params.variant == ModelVariant::Heisenberg;
    if (ising_part || heis) {
        const double pref = heis && params.eq4_normalization ? 1.0 / 3.0 : 1.0;
        for (const auto* shell : {&cl.bonds1(), &cl.bonds2()}) {
            const double j = (shell == &cl.bonds1()) ? params.j1 : params.j2;
            if (j == 0.0) continue;
            for (const auto& b : *shell) {
                const double w = pref * j * b.multiplicity;
                zz.push_back({b.i, b.j, w});
                if (heis) xy.push_back({b.i, b.j, w / 2.0});
            }
        }
    }
    const double cavity =
        (params.variant == ModelVariant::TCI || params.variant == ModelVariant::CavityOnly) ? lam
                                                                                            : 0.0;
    return std::make_shared<SpinHamiltonian>(std::move(basis), cavity, std::move(zz),
                                             std::move(xy));
}

std::shared_ptr<SpinHamiltonian> SpinHamiltonian::s_squared(BasisPtr basis) {
    const double m = 0.5 * basis->label().two_m;
    return std::make_shared<SpinHamiltonian>(std::move(basis), 1.0, std::vector<WeightedBond>{},
                                             std::vector<WeightedBond>{}, m * m);
}

void SpinHamiltonian::apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
    require(in.size() == basis_->dim(), ErrorCode::BasisMismatch,
            "input vector does not match the basis dimension");
    out.resize(basis_->dim());
    if (basis_->reduced())
        apply_reduced(in, out);
    else
        apply_plain(in, out);
}

void SpinHamiltonian::apply_plain(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
    const auto& basis = *basis_;
    const int64_t dim = basis.dim();
    const int n = basis.n_sites();
    const double m = 0.5 * basis.label().two_m;

    Eigen::VectorXcd lowered;
    if (cavity_ != 0.0 && aux_) {
        // pass 1: lowered = S- in, gathered on the two_m - 2 sector
        lowered.resize(aux_->dim());
        const auto& aux = *aux_;
        const int64_t adim = aux.dim();
#pragma omp parallel for schedule(static)
        for (int64_t d = 0; d < adim; ++d) {
            const uint64_t cfg = aux.state(d);
            std::complex<double> acc = 0.0;
            for (int j = 0; j < n; ++j) {
                if ((cfg >> j) & 1) continue;
                acc += in[basis.index_of(cfg | (uint64_t(1) << j))];
            }
            lowered[d] = acc;
        }
    }

#pragma omp parallel for schedule(static)
    for (int64_t a = 0; a < dim; ++a) {
        const uint64_t cfg = basis.state(a);
        std::complex<double> acc = diag_[a] * in[a];
        if (cavity_ != 0.0) {
            // pass 2: cavity * (S+ lowered - M in); the i=j ladder diagonal
            // (N/2 + M) rides along in the two-pass, N/2 sits in diag_.
            std::complex<double> raise = 0.0;
            if (aux_) {
                const auto& aux = *aux_;
                for (int j = 0; j < n; ++j) {
                    if (!((cfg >> j) & 1)) continue;
                    raise += lowered[aux.index_of(cfg & ~(uint64_t(1) << j))];
                }
            }
            acc += cavity_ * (raise - (0.5 * n + m) * in[a]);
        }
        for (const auto& b : xy_) {
            const bool bi = (cfg >> b.i) & 1;
            const bool bj = (cfg >> b.j) & 1;
            if (bi != bj)
                acc += b.w * in[basis.index_of(cfg ^ ((uint64_t(1) << b.i) | (uint64_t(1) << b.j)))];
        }
        out[a] = acc;
    }
}

void SpinHamiltonian::apply_reduced(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
    const auto& basis = *basis_;
    const auto& g = basis.group();
    const int64_t dim = basis.dim();
    const int n = basis.n_sites();

    // Gather row a of the reduced Hamiltonian through hermiticity:
    // H|a> = sum_c h_c |c>, H_red[b,a] = h_c chi_{u0} n_b/n_a with
    // U_{u0} c = rep(c) = b; row entries are the conjugates.
#pragma omp parallel for schedule(dynamic, 16)
    for (int64_t a = 0; a < dim; ++a) {
        const uint64_t cfg = basis.state(a);
        const double inv_norm_a = 1.0 / basis.norm(a);
        std::complex<double> acc = diag_[a] * in[a];
        auto gather = [&](uint64_t cfg2, double h) {
            auto [rep, u0] = g.representative(cfg2);
            const int64_t b = basis.index_of(rep);
            if (b < 0) return;   // zero-norm representative
            acc += h * std::conj(g.element(u0).chi) * (basis.norm(b) * inv_norm_a) * in[b];
        };
        if (cavity_ != 0.0) {
            for (int i = 0; i < n; ++i) {
                if (!((cfg >> i) & 1)) continue;
                const uint64_t without = cfg & ~(uint64_t(1) << i);
                for (int j = 0; j < n; ++j) {
                    if ((without >> j) & 1 || j == i) continue;
                    gather(without | (uint64_t(1) << j), cavity_);
                }
            }
        }
        for (const auto& b : xy_) {
            const bool bi = (cfg >> b.i) & 1;
            const bool bj = (cfg >> b.j) & 1;
            if (bi != bj) gather(cfg ^ ((uint64_t(1) << b.i) | (uint64_t(1) << b.j)), b.w);
        }
        out[a] = acc;
    }
}

namespace {

StateVector apply_with(const std::shared_ptr<SpinHamiltonian>& h, const StateVector& v) {
    require(v.basis == h->basis(), ErrorCode::BasisMismatch, "state basis mismatch");
    StateVector out(v.basis);
    h->apply(v.amps, out.amps);
    return out;
}

} // namespace

StateVector apply_tci(const ModelParams& params, const BasisPtr& basis, const StateVector& v) {
    ModelParams p = params;
    p.variant = ModelVariant::TCI;
    return apply_with(SpinHamiltonian::from_params(p, basis), v);
}

StateVector apply_heisenberg(const ModelParams& params, const BasisPtr& basis,
                             const StateVector& v) {
    ModelParams p = params;
    p.variant = ModelVariant::Heisenberg;
    return apply_with(SpinHamiltonian::from_params(p, basis), v);
}

StateVector apply_cavity_only(double lambda, const BasisPtr& basis, const StateVector& v) {
    ModelParams p;
    p.variant = ModelVariant::CavityOnly;
    p.lambda = lambda;
    return apply_with(SpinHamiltonian::from_params(p, basis), v);
}

StateVector apply_s_squared(const BasisPtr& basis, const StateVector& v) {
    return apply_with(SpinHamiltonian::s_squared(basis), v);
}

} // namespace tci
