#pragma once

#include <array>
#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tci/errors.hpp"

namespace tci {

enum class LatticeKind { Chain, Square, Triangular, Kagome };

const char* to_string(LatticeKind kind);
LatticeKind lattice_kind_from_string(const std::string& name);

struct Vec2 {
    double x = 0.0, y = 0.0;
};

// Torus vectors in integer multiples of the primitive lattice vectors.
struct LatticeSpec {
    LatticeKind kind = LatticeKind::Square;
    std::array<int, 2> t1{1, 0};
    std::array<int, 2> t2{0, 1};
    bool include_j2 = true;   // small test clusters may omit the J2 shell
};

struct Bond {
    int i = 0, j = 0;       // site indices, i < j
    int multiplicity = 1;   // distinct wrap-around paths joining the pair
};

// Bloch momentum compatible with the torus, stored both exactly (fractional
// coordinates p/den, q/den of the primitive reciprocal vectors) and in
// Cartesian form so e^{iq.r} phases are uniform across lattices.
struct Momentum {
    int p = 0, q = 0, den = 1;
    Vec2 cart;
};

enum class WavevectorLabel { Gamma, M, X, K };

const char* to_string(WavevectorLabel label);

struct OrderingWavevector {
    WavevectorLabel label;
    Momentum q;                  // canonical star member
    std::vector<int> star;       // indices into cluster momenta
};

// Finite periodic cluster: site geometry, J1/J2 bond lists with
// multiplicities, the translation group and its compatible momenta.
class LatticeCluster {
public:
    static std::shared_ptr<const LatticeCluster> build(const LatticeSpec& spec);

    const LatticeSpec& spec() const { return spec_; }
    LatticeKind kind() const { return spec_.kind; }
    int n_sites() const { return static_cast<int>(positions_.size()); }
    int n_cells() const { return n_cells_; }
    int sites_per_cell() const { return basis_count_; }

    const std::vector<Vec2>& positions() const { return positions_; }
    const std::vector<Bond>& bonds1() const { return bonds1_; }
    const std::vector<Bond>& bonds2() const { return bonds2_; }
    const std::vector<Momentum>& momenta() const { return momenta_; }
    bool spin_inversion() const { return spin_inversion_; }

    // Translation permutations, one per unit cell: perm[t][site] -> site.
    const std::vector<std::vector<int>>& translations() const { return translations_; }

    // Composition table of the translation group: compose(a,b) = a then b.
    int compose_translations(int a, int b) const { return composition_[a][b]; }

    // Bloch phase factor e^{-i q . t} of translation t at momentum index k,
    // evaluated from exact fractional coordinates.
    std::complex<double> bloch_phase(int momentum_index, int translation_index) const;

    // Index of -q modulo the reciprocal lattice.
    int negate_momentum(int momentum_index) const;

    // High-symmetry ordering wavevector and its point-group star on this
    // cluster. Throws InvalidLabel / Incommensurate.
    OrderingWavevector ordering_wavevector(WavevectorLabel label) const;

    // Momentum index of exact fractional coordinates (p/den, q/den), or -1.
    int find_momentum(int p, int q, int den) const;

    std::string describe() const;

private:
    LatticeCluster() = default;

    LatticeSpec spec_;
    int n_cells_ = 0;
    int basis_count_ = 1;
    Vec2 a1_, a2_;   // primitive vectors
    Vec2 g1_, g2_;   // reciprocal primitive vectors
    std::vector<std::array<int, 2>> cells_;          // canonical residues
    std::vector<Vec2> positions_;
    std::vector<Bond> bonds1_, bonds2_;
    std::vector<std::vector<int>> translations_;
    std::vector<std::vector<int>> composition_;
    std::vector<std::array<int, 2>> translation_cells_;  // cell offset per translation
    std::vector<Momentum> momenta_;
    bool spin_inversion_ = true;
};

using ClusterPtr = std::shared_ptr<const LatticeCluster>;

inline ClusterPtr build_cluster(const LatticeSpec& spec) { return LatticeCluster::build(spec); }

} // namespace tci
