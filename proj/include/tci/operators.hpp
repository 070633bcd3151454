#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "tci/basis.hpp"

namespace tci {

enum class ModelVariant { TCI, Heisenberg, Ising, CavityOnly };

const char* to_string(ModelVariant v);
ModelVariant model_variant_from_string(const std::string& name);

struct ModelParams {
    ModelVariant variant = ModelVariant::TCI;
    double j1 = 1.0;
    double j2 = 0.0;
    double lambda = 0.0;
    bool rescaled = false;          // effective lambda = N * lambda
    bool eq4_normalization = true;  // Heisenberg exchange J_ij / 3
    bool allow_ferromagnetic = false;

    double effective_lambda(int n_sites) const {
        return rescaled ? lambda * n_sites : lambda;
    }
};

struct WeightedBond {
    int i = 0, j = 0;
    double w = 0.0;
};

class LinearOperator {
public:
    virtual ~LinearOperator() = default;
    virtual int64_t dimension() const = 0;
    virtual bool hermitian() const { return true; }
    virtual void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const = 0;

    Eigen::VectorXcd apply(const Eigen::VectorXcd& in) const {
        Eigen::VectorXcd out(dimension());
        apply(in, out);
        return out;
    }
};

// Matrix-free spin Hamiltonian over a sector basis:
//
//   H = cavity * (S_x^2 + S_y^2)
//     + sum_b zz[b] * S_z^i S_z^j
//     + sum_b xy[b] * (S+_i S-_j + S-_i S+_j)
//     + diag_shift
//
// On plain bases the collective term runs as two gather passes through the
// two_m - 2 sector (cost O(dim * N) index lookups); everything is
// parallelized over output indices so workers never contend on writes. On
// reduced bases a generic representative-walk is used. One TCI apply is
// O(dim * N^2) work in the worst case (all-to-all flip-flops).
class SpinHamiltonian : public LinearOperator {
public:
    SpinHamiltonian(BasisPtr basis, double cavity, std::vector<WeightedBond> zz,
                    std::vector<WeightedBond> xy, double diag_shift = 0.0);

    // Couplings taken from the cluster's J1/J2 bond lists.
    static std::shared_ptr<SpinHamiltonian> from_params(const ModelParams& params, BasisPtr basis);

    // S^2 = (S_x^2 + S_y^2) + M^2 on a fixed-magnetization sector.
    static std::shared_ptr<SpinHamiltonian> s_squared(BasisPtr basis);

    int64_t dimension() const override { return basis_->dim(); }
    void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const override;
    using LinearOperator::apply;

    const BasisPtr& basis() const { return basis_; }
    double cavity() const { return cavity_; }
    double diag_shift() const { return diag_shift_; }
    const std::vector<WeightedBond>& zz_bonds() const { return zz_; }
    const std::vector<WeightedBond>& xy_bonds() const { return xy_; }

    // Ising + constant diagonal of configuration `config`.
    double diagonal_energy(uint64_t config) const;

private:
    void apply_plain(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
    void apply_reduced(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;

    BasisPtr basis_;
    BasisPtr aux_;   // two_m - 2 sector for the collective flip-flop
    double cavity_ = 0.0;
    double diag_shift_ = 0.0;
    std::vector<WeightedBond> zz_, xy_;
    Eigen::VectorXd diag_;   // cached per-state diagonal
};

// Spec-shaped conveniences (construct a transient operator per call).
StateVector apply_tci(const ModelParams& params, const BasisPtr& basis, const StateVector& v);
StateVector apply_heisenberg(const ModelParams& params, const BasisPtr& basis, const StateVector& v);
StateVector apply_cavity_only(double lambda, const BasisPtr& basis, const StateVector& v);
StateVector apply_s_squared(const BasisPtr& basis, const StateVector& v);

} // namespace tci
