#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "tci/lattice.hpp"

namespace tci {

struct SectorLabel {
    int two_m = 0;
    std::optional<int> momentum_index;
    std::optional<int> parity;   // +1/-1, only with two_m = 0
};

// One symmetry-group element: a site permutation (as byte-sliced lookup
// tables over the bit configuration), an optional global spin flip, and the
// character of the element in the chosen irrep.
struct SymmetryElement {
    std::vector<std::array<uint64_t, 256>> table;
    bool flip = false;
    std::complex<double> chi{1.0, 0.0};

    uint64_t permute(uint64_t config) const {
        uint64_t out = 0;
        for (size_t b = 0; b < table.size(); ++b)
            out |= table[b][(config >> (8 * b)) & 0xFF];
        return out;
    }
};

class SymmetryGroup {
public:
    SymmetryGroup(const LatticeCluster& cluster, int momentum_index,
                  std::optional<int> parity, int n_sites);

    size_t size() const { return elements_.size(); }
    const SymmetryElement& element(size_t i) const { return elements_[i]; }
    uint64_t mask() const { return mask_; }

    uint64_t apply(size_t i, uint64_t config) const {
        uint64_t c = elements_[i].permute(config);
        return elements_[i].flip ? (~c & mask_) : c;
    }

    // Minimum orbit image of `config` and the index of an element mapping
    // config onto it.
    std::pair<uint64_t, size_t> representative(uint64_t config) const;

    // Character sum over the stabilizer of `rep`; norm of the projected
    // state is sqrt(Re(sum)/|G|) when the sum is nonzero.
    std::complex<double> stabilizer_phase_sum(uint64_t rep) const;

private:
    std::vector<SymmetryElement> elements_;
    uint64_t mask_ = 0;
};

// Spin-1/2 configuration basis of a fixed-magnetization sector, optionally
// reduced to translation-momentum (and spin-inversion-parity) representatives.
class SectorBasis : public std::enable_shared_from_this<SectorBasis> {
public:
    // Plain sector: all C(N, n_up) configurations, ascending.
    static std::shared_ptr<const SectorBasis> enumerate(ClusterPtr cluster, int two_m,
                                                        uint64_t memory_budget_bytes = kDefaultBudget);

    // Symmetry-reduced sector built from this plain sector.
    std::shared_ptr<const SectorBasis> reduce(int momentum_index,
                                              std::optional<int> parity = std::nullopt) const;

    const ClusterPtr& cluster() const { return cluster_; }
    const SectorLabel& label() const { return label_; }
    bool reduced() const { return reduced_; }
    int n_sites() const { return n_sites_; }
    int n_up() const { return (n_sites_ + label_.two_m) / 2; }

    int64_t dim() const { return static_cast<int64_t>(states_.size()); }
    uint64_t state(int64_t i) const { return states_[i]; }
    const std::vector<uint64_t>& states() const { return states_; }
    double norm(int64_t i) const { return norms_[i]; }

    // Index of a configuration in this basis, -1 if absent. Plain sectors
    // use combinadic ranking, reduced sectors binary search.
    int64_t index_of(uint64_t config) const;

    const SymmetryGroup& group() const;
    int64_t dropped_zero_norm() const { return dropped_; }

    static constexpr uint64_t kDefaultBudget = uint64_t(2) << 30;

private:
    SectorBasis() = default;

    ClusterPtr cluster_;
    SectorLabel label_;
    int n_sites_ = 0;
    bool reduced_ = false;
    std::vector<uint64_t> states_;
    std::vector<double> norms_;
    std::shared_ptr<const SymmetryGroup> group_;
    int64_t dropped_ = 0;
};

using BasisPtr = std::shared_ptr<const SectorBasis>;

struct StateVector {
    BasisPtr basis;
    Eigen::VectorXcd amps;

    StateVector() = default;
    explicit StateVector(BasisPtr b) : basis(std::move(b)) {
        amps = Eigen::VectorXcd::Zero(basis->dim());
    }
    StateVector(BasisPtr b, Eigen::VectorXcd a) : basis(std::move(b)), amps(std::move(a)) {}

    double norm() const { return amps.norm(); }
    void normalize() { amps /= amps.norm(); }
    std::complex<double> dot(const StateVector& other) const { return amps.dot(other.amps); }
};

// Expand a reduced-sector state onto the plain sector basis (Bloch phases
// applied); norm preserving.
StateVector expand(const StateVector& reduced_state, const BasisPtr& plain_basis);

// Project a plain-sector state onto a reduced basis (adjoint of expand).
StateVector project(const StateVector& plain_state, const BasisPtr& reduced_basis);

} // namespace tci
