#include "tci/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace tci {

namespace {

constexpr double kPi = std::numbers::pi;

int64_t floor_div(int64_t a, int64_t b) {
    int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

struct BondEntry {
    int b_from, b_to;   // basis indices within the unit cell
    int dc1, dc2;       // cell displacement
};

// J1/J2 displacement tables. Each entry generates one bond per unit cell.
//
// Kagome site basis: 0 at the cell origin, 1 at a1/2, 2 at a2/2. The J2
// shell is the standard next-nearest neighbor set across the hexagons
// (distance sqrt(3)/2), four per site:
//
//        2 --- 1'            0  = cell corner
//       / \   /              1  = midpoint of a1 (horizontal edge)
//      0 --- 1   0'          2  = midpoint of a2 (slanted edge)
//       \   / \ /
//        \ /   2''           J1 = triangle edges (distance 1/2)
//         1''                J2 = hexagon diagonals skipping one site
//
const std::vector<BondEntry>& j1_table(LatticeKind k) {
    static const std::vector<BondEntry> chain = {{0, 0, 1, 0}};
    static const std::vector<BondEntry> square = {{0, 0, 1, 0}, {0, 0, 0, 1}};
    static const std::vector<BondEntry> tri = {{0, 0, 1, 0}, {0, 0, 0, 1}, {0, 0, 1, -1}};
    static const std::vector<BondEntry> kag = {
        {0, 1, 0, 0}, {0, 2, 0, 0}, {1, 2, 0, 0},
        {1, 0, 1, 0}, {2, 0, 0, 1}, {1, 2, 1, -1}};
    switch (k) {
        case LatticeKind::Chain: return chain;
        case LatticeKind::Square: return square;
        case LatticeKind::Triangular: return tri;
        case LatticeKind::Kagome: return kag;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown lattice kind");
}

const std::vector<BondEntry>& j2_table(LatticeKind k) {
    static const std::vector<BondEntry> chain = {{0, 0, 2, 0}};
    static const std::vector<BondEntry> square = {{0, 0, 1, 1}, {0, 0, 1, -1}};
    static const std::vector<BondEntry> tri = {{0, 0, 1, 1}, {0, 0, 2, -1}, {0, 0, -1, 2}};
    static const std::vector<BondEntry> kag = {
        {0, 1, -1, 1}, {0, 1, 0, -1}, {0, 2, 1, -1},
        {0, 2, -1, 0}, {1, 2, 1, 0},  {1, 2, 0, -1}};
    switch (k) {
        case LatticeKind::Chain: return chain;
        case LatticeKind::Square: return square;
        case LatticeKind::Triangular: return tri;
        case LatticeKind::Kagome: return kag;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown lattice kind");
}

int basis_sites(LatticeKind k) { return k == LatticeKind::Kagome ? 3 : 1; }

} // namespace

const char* to_string(LatticeKind kind) {
    switch (kind) {
        case LatticeKind::Chain: return "chain";
        case LatticeKind::Square: return "square";
        case LatticeKind::Triangular: return "triangular";
        case LatticeKind::Kagome: return "kagome";
    }
    return "?";
}

LatticeKind lattice_kind_from_string(const std::string& name) {
    if (name == "chain") return LatticeKind::Chain;
    if (name == "square") return LatticeKind::Square;
    if (name == "triangular") return LatticeKind::Triangular;
    if (name == "kagome") return LatticeKind::Kagome;
    throw Error(ErrorCode::InvalidArgument, "unknown lattice kind '" + name + "'");
}

const char* to_string(WavevectorLabel label) {
    switch (label) {
        case WavevectorLabel::Gamma: return "Gamma";
        case WavevectorLabel::M: return "M";
        case WavevectorLabel::X: return "X";
        case WavevectorLabel::K: return "K";
    }
    return "?";
}

std::shared_ptr<const LatticeCluster> LatticeCluster::build(const LatticeSpec& spec) {
    auto cl = std::shared_ptr<LatticeCluster>(new LatticeCluster());
    cl->spec_ = spec;
    const auto [t1x, t1y] = spec.t1;
    const auto [t2x, t2y] = spec.t2;
    const int64_t det = static_cast<int64_t>(t1x) * t2y - static_cast<int64_t>(t1y) * t2x;
    require(det != 0, ErrorCode::SingularTorus, "torus vectors are collinear (det = 0)");
    if (spec.kind == LatticeKind::Chain) {
        require(t1y == 0 && t2x == 0 && t2y == 1, ErrorCode::InvalidArgument,
                "chain clusters require t1=(L,0), t2=(0,1)");
    }

    const int n_cells = static_cast<int>(std::abs(det));
    cl->n_cells_ = n_cells;
    cl->basis_count_ = basis_sites(spec.kind);

    // Primitive vectors.
    switch (spec.kind) {
        case LatticeKind::Chain:
        case LatticeKind::Square:
            cl->a1_ = {1.0, 0.0};
            cl->a2_ = {0.0, 1.0};
            break;
        case LatticeKind::Triangular:
        case LatticeKind::Kagome:
            cl->a1_ = {1.0, 0.0};
            cl->a2_ = {0.5, std::sqrt(3.0) / 2.0};
            break;
    }
    // Reciprocal vectors with a_i . g_j = 2 pi delta_ij.
    {
        const double d = cl->a1_.x * cl->a2_.y - cl->a1_.y * cl->a2_.x;
        cl->g1_ = {2.0 * kPi * cl->a2_.y / d, -2.0 * kPi * cl->a2_.x / d};
        cl->g2_ = {-2.0 * kPi * cl->a1_.y / d, 2.0 * kPi * cl->a1_.x / d};
    }

    // Canonical residue of a cell coordinate modulo the torus lattice.
    auto canon = [&](int64_t n1, int64_t n2) -> std::array<int, 2> {
        // Solve n = a*T1 + b*T2, take fractional parts of (a, b).
        const int64_t pa = n1 * t2y - n2 * t2x;
        const int64_t pb = -n1 * t1y + n2 * t1x;
        const int64_t ka = floor_div(pa, det);
        const int64_t kb = floor_div(pb, det);
        return {static_cast<int>(n1 - ka * t1x - kb * t2x),
                static_cast<int>(n2 - ka * t1y - kb * t2y)};
    };

    std::map<std::array<int, 2>, int> cell_index;
    {
        const int reach = std::abs(t1x) + std::abs(t1y) + std::abs(t2x) + std::abs(t2y) + 2;
        for (int n1 = -reach; n1 <= reach; ++n1)
            for (int n2 = -reach; n2 <= reach; ++n2) {
                auto r = canon(n1, n2);
                if (!cell_index.count(r)) {
                    int idx = static_cast<int>(cl->cells_.size());
                    cell_index[r] = idx;
                    cl->cells_.push_back(r);
                }
            }
        require(static_cast<int>(cl->cells_.size()) == n_cells, ErrorCode::InvalidArgument,
                "cell enumeration did not match |det|");
    }
    auto cell_of = [&](int64_t n1, int64_t n2) { return cell_index.at(canon(n1, n2)); };

    // Site positions: cell origin plus basis offset.
    const int nb = cl->basis_count_;
    std::vector<Vec2> basis_offsets = {{0.0, 0.0}};
    if (spec.kind == LatticeKind::Kagome) {
        basis_offsets = {{0.0, 0.0},
                         {cl->a1_.x / 2, cl->a1_.y / 2},
                         {cl->a2_.x / 2, cl->a2_.y / 2}};
    }
    cl->positions_.resize(static_cast<size_t>(n_cells) * nb);
    for (int c = 0; c < n_cells; ++c) {
        const auto [n1, n2] = cl->cells_[c];
        for (int b = 0; b < nb; ++b) {
            cl->positions_[static_cast<size_t>(c) * nb + b] = {
                n1 * cl->a1_.x + n2 * cl->a2_.x + basis_offsets[b].x,
                n1 * cl->a1_.y + n2 * cl->a2_.y + basis_offsets[b].y};
        }
    }

    // Bond lists.
    auto build_bonds = [&](const std::vector<BondEntry>& table) {
        std::map<std::pair<int, int>, int> counts;
        for (int c = 0; c < n_cells; ++c) {
            const auto [n1, n2] = cl->cells_[c];
            for (const auto& e : table) {
                const int i = c * nb + e.b_from;
                const int j = cell_of(n1 + e.dc1, n2 + e.dc2) * nb + e.b_to;
                require(i != j, ErrorCode::SelfBond,
                        "wrap-around produces a self-bond; cluster too small");
                counts[{std::min(i, j), std::max(i, j)}] += 1;
            }
        }
        std::vector<Bond> bonds;
        bonds.reserve(counts.size());
        for (const auto& [pair, mult] : counts)
            bonds.push_back({pair.first, pair.second, mult});
        return bonds;
    };
    cl->bonds1_ = build_bonds(j1_table(spec.kind));
    if (spec.include_j2) cl->bonds2_ = build_bonds(j2_table(spec.kind));

    // Translation permutations, one per cell residue.
    cl->translations_.resize(n_cells);
    cl->translation_cells_ = cl->cells_;
    for (int t = 0; t < n_cells; ++t) {
        const auto [d1, d2] = cl->cells_[t];
        auto& perm = cl->translations_[t];
        perm.resize(cl->positions_.size());
        for (int c = 0; c < n_cells; ++c) {
            const auto [n1, n2] = cl->cells_[c];
            const int tc = cell_of(n1 + d1, n2 + d2);
            for (int b = 0; b < nb; ++b) perm[c * nb + b] = tc * nb + b;
        }
    }
    cl->composition_.assign(n_cells, std::vector<int>(n_cells));
    for (int a = 0; a < n_cells; ++a)
        for (int b = 0; b < n_cells; ++b) {
            const auto [a1, a2] = cl->cells_[a];
            const auto [b1, b2] = cl->cells_[b];
            cl->composition_[a][b] = cell_of(a1 + b1, a2 + b2);
        }

    // Compatible momenta: fractional coordinates (p/|det|, q/|det|) of the
    // reciprocal primitive vectors with q.T_i in 2 pi Z.
    for (int p = 0; p < n_cells; ++p)
        for (int q = 0; q < n_cells; ++q) {
            const int64_t c1 = static_cast<int64_t>(p) * t1x + static_cast<int64_t>(q) * t1y;
            const int64_t c2 = static_cast<int64_t>(p) * t2x + static_cast<int64_t>(q) * t2y;
            if (c1 % n_cells == 0 && c2 % n_cells == 0) {
                Momentum m;
                m.p = p;
                m.q = q;
                m.den = n_cells;
                const double x = static_cast<double>(p) / n_cells;
                const double y = static_cast<double>(q) / n_cells;
                m.cart = {x * cl->g1_.x + y * cl->g2_.x, x * cl->g1_.y + y * cl->g2_.y};
                cl->momenta_.push_back(m);
            }
        }
    require(static_cast<int>(cl->momenta_.size()) == n_cells, ErrorCode::InvalidArgument,
            "momentum enumeration did not match cell count");

    return cl;
}

std::complex<double> LatticeCluster::bloch_phase(int momentum_index, int translation_index) const {
    const auto& m = momenta_[momentum_index];
    const auto [d1, d2] = translation_cells_[translation_index];
    const int64_t num = static_cast<int64_t>(m.p) * d1 + static_cast<int64_t>(m.q) * d2;
    const double angle = -2.0 * kPi * static_cast<double>(((num % m.den) + m.den) % m.den) / m.den;
    return {std::cos(angle), std::sin(angle)};
}

int LatticeCluster::find_momentum(int p, int q, int den) const {
    for (size_t i = 0; i < momenta_.size(); ++i) {
        const auto& m = momenta_[i];
        // compare p/den with m.p/m.den modulo 1
        const int64_t lhs = static_cast<int64_t>(p) * m.den;
        const int64_t rhs = static_cast<int64_t>(m.p) * den;
        const int64_t mod = static_cast<int64_t>(den) * m.den;
        const int64_t lhs2 = static_cast<int64_t>(q) * m.den;
        const int64_t rhs2 = static_cast<int64_t>(m.q) * den;
        if (((lhs - rhs) % mod + mod) % mod == 0 && ((lhs2 - rhs2) % mod + mod) % mod == 0)
            return static_cast<int>(i);
    }
    return -1;
}

int LatticeCluster::negate_momentum(int momentum_index) const {
    const auto& m = momenta_[momentum_index];
    const int idx = find_momentum(m.den - m.p, m.den - m.q, m.den);
    require(idx >= 0, ErrorCode::InvalidArgument, "momentum set not closed under negation");
    return idx;
}

OrderingWavevector LatticeCluster::ordering_wavevector(WavevectorLabel label) const {
    // Star members as exact fractions (num1/den, num2/den).
    struct Frac {
        int p, q, den;
    };
    std::vector<Frac> star;
    const bool hex = (spec_.kind == LatticeKind::Triangular || spec_.kind == LatticeKind::Kagome);
    switch (label) {
        case WavevectorLabel::Gamma:
            star = {{0, 0, 1}};
            break;
        case WavevectorLabel::M:
            if (hex)
                star = {{1, 0, 2}, {0, 1, 2}, {1, 1, 2}};
            else if (spec_.kind == LatticeKind::Square)
                star = {{1, 1, 2}};
            else
                throw Error(ErrorCode::InvalidLabel, "M point undefined for chain lattice");
            break;
        case WavevectorLabel::X:
            if (spec_.kind == LatticeKind::Square)
                star = {{1, 0, 2}, {0, 1, 2}};
            else if (spec_.kind == LatticeKind::Chain)
                star = {{1, 0, 2}};
            else
                throw Error(ErrorCode::InvalidLabel, "X point undefined for this lattice");
            break;
        case WavevectorLabel::K:
            if (hex)
                star = {{2, 1, 3}, {1, 2, 3}};
            else
                throw Error(ErrorCode::InvalidLabel, "K point undefined for this lattice");
            break;
    }
    OrderingWavevector out;
    out.label = label;
    for (const auto& f : star) {
        const int idx = find_momentum(f.p, f.q, f.den);
        require(idx >= 0, ErrorCode::Incommensurate,
                std::string(to_string(label)) + " point incommensurate with this cluster");
        out.star.push_back(idx);
    }
    out.q = momenta_[out.star.front()];
    return out;
}

std::string LatticeCluster::describe() const {
    std::ostringstream os;
    os << to_string(spec_.kind) << " cluster, T1=(" << spec_.t1[0] << "," << spec_.t1[1]
       << "), T2=(" << spec_.t2[0] << "," << spec_.t2[1] << "): N=" << n_sites()
       << ", cells=" << n_cells_ << ", |bonds1|=" << bonds1_.size()
       << ", |bonds2|=" << bonds2_.size() << ", momenta=" << momenta_.size();
    return os.str();
}

} // namespace tci
