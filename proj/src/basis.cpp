#include "tci/basis.hpp"

#include <algorithm>
#include <cmath>

#include "tci/bits.hpp"
#include "tci/errors.hpp"

namespace tci {

namespace {

std::vector<std::array<uint64_t, 256>> byte_tables(const std::vector<int>& perm, int n_sites) {
    const int n_bytes = (n_sites + 7) / 8;
    std::vector<std::array<uint64_t, 256>> tables(n_bytes);
    for (int b = 0; b < n_bytes; ++b) {
        for (int v = 0; v < 256; ++v) {
            uint64_t out = 0;
            for (int bit = 0; bit < 8; ++bit) {
                if (!(v & (1 << bit))) continue;
                const int site = 8 * b + bit;
                if (site < n_sites) out |= uint64_t(1) << perm[site];
            }
            tables[b][v] = out;
        }
    }
    return tables;
}

} // namespace

SymmetryGroup::SymmetryGroup(const LatticeCluster& cluster, int momentum_index,
                             std::optional<int> parity, int n_sites) {
    mask_ = (n_sites == 64) ? ~uint64_t(0) : ((uint64_t(1) << n_sites) - 1);
    const auto& translations = cluster.translations();
    const int n_par = parity ? 2 : 1;
    elements_.reserve(translations.size() * n_par);
    for (int sigma = 0; sigma < n_par; ++sigma) {
        for (size_t t = 0; t < translations.size(); ++t) {
            SymmetryElement el;
            el.table = byte_tables(translations[t], n_sites);
            el.flip = (sigma == 1);
            el.chi = cluster.bloch_phase(momentum_index, static_cast<int>(t));
            if (sigma == 1) el.chi *= static_cast<double>(*parity);
            elements_.push_back(std::move(el));
        }
    }
}

std::pair<uint64_t, size_t> SymmetryGroup::representative(uint64_t config) const {
    uint64_t best = ~uint64_t(0);
    size_t best_el = 0;
    for (size_t i = 0; i < elements_.size(); ++i) {
        const uint64_t img = apply(i, config);
        if (img < best) {
            best = img;
            best_el = i;
        }
    }
    return {best, best_el};
}

std::complex<double> SymmetryGroup::stabilizer_phase_sum(uint64_t rep) const {
    std::complex<double> sum = 0.0;
    for (size_t i = 0; i < elements_.size(); ++i)
        if (apply(i, rep) == rep) sum += elements_[i].chi;
    return sum;
}

std::shared_ptr<const SectorBasis> SectorBasis::enumerate(ClusterPtr cluster, int two_m,
                                                          uint64_t memory_budget_bytes) {
    const int n = cluster->n_sites();
    require(n >= 1 && n <= 63, ErrorCode::InvalidArgument, "site count must be in [1, 63]");
    require(std::abs(two_m) <= n && (n + two_m) % 2 == 0, ErrorCode::InvalidArgument,
            "invalid magnetization sector");
    const int n_up = (n + two_m) / 2;
    const uint64_t dim = bits::binomial(n, n_up);
    require(dim * sizeof(uint64_t) <= memory_budget_bytes, ErrorCode::DimensionOverflow,
            "sector dimension exceeds the basis memory budget");

    auto basis = std::shared_ptr<SectorBasis>(new SectorBasis());
    basis->cluster_ = std::move(cluster);
    basis->label_.two_m = two_m;
    basis->n_sites_ = n;
    basis->states_.reserve(dim);
    if (n_up == 0) {
        basis->states_.push_back(0);
    } else {
        uint64_t c = (uint64_t(1) << n_up) - 1;
        const uint64_t last = c << (n - n_up);
        while (true) {
            basis->states_.push_back(c);
            if (c == last) break;
            c = bits::next_same_popcount(c);
        }
    }
    return basis;
}

std::shared_ptr<const SectorBasis> SectorBasis::reduce(int momentum_index,
                                                       std::optional<int> parity) const {
    require(!reduced_, ErrorCode::InvalidArgument, "can only reduce a plain sector basis");
    require(!parity || label_.two_m == 0, ErrorCode::InvalidArgument,
            "spin-inversion parity requires the zero-magnetization sector");
    require(momentum_index >= 0 && momentum_index < static_cast<int>(cluster_->momenta().size()),
            ErrorCode::InvalidArgument, "momentum index out of range");

    auto basis = std::shared_ptr<SectorBasis>(new SectorBasis());
    basis->cluster_ = cluster_;
    basis->label_ = {label_.two_m, momentum_index, parity};
    basis->n_sites_ = n_sites_;
    basis->reduced_ = true;
    basis->group_ = std::make_shared<SymmetryGroup>(*cluster_, momentum_index, parity, n_sites_);

    const auto& g = *basis->group_;
    const double inv_order = 1.0 / static_cast<double>(g.size());
    for (uint64_t c : states_) {
        auto [rep, el] = g.representative(c);
        (void)el;
        if (rep != c) continue;
        const auto sum = g.stabilizer_phase_sum(c);
        if (std::abs(sum) < 1e-8) {
            ++basis->dropped_;
            continue;
        }
        basis->states_.push_back(c);
        basis->norms_.push_back(std::sqrt(sum.real() * inv_order));
    }
    return basis;
}

int64_t SectorBasis::index_of(uint64_t config) const {
    if (!reduced_) {
        if (bits::popcount(config) != n_up()) return -1;
        const int64_t r = bits::rank_combinadic(config);
        return (r < dim()) ? r : -1;
    }
    auto it = std::lower_bound(states_.begin(), states_.end(), config);
    if (it == states_.end() || *it != config) return -1;
    return it - states_.begin();
}

const SymmetryGroup& SectorBasis::group() const {
    require(reduced_ && group_, ErrorCode::InvalidArgument, "plain basis has no symmetry group");
    return *group_;
}

StateVector expand(const StateVector& reduced_state, const BasisPtr& plain_basis) {
    const auto& rb = *reduced_state.basis;
    require(rb.reduced(), ErrorCode::BasisMismatch, "expand expects a reduced-sector state");
    require(!plain_basis->reduced() && plain_basis->label().two_m == rb.label().two_m &&
                plain_basis->cluster() == rb.cluster(),
            ErrorCode::BasisMismatch, "plain basis does not match the reduced sector");

    const auto& g = rb.group();
    StateVector out(plain_basis);
    for (int64_t a = 0; a < rb.dim(); ++a) {
        const uint64_t rep = rb.state(a);
        const std::complex<double> scale =
            reduced_state.amps[a] / (static_cast<double>(g.size()) * rb.norm(a));
        for (size_t u = 0; u < g.size(); ++u) {
            const int64_t idx = plain_basis->index_of(g.apply(u, rep));
            out.amps[idx] += scale * g.element(u).chi;
        }
    }
    return out;
}

StateVector project(const StateVector& plain_state, const BasisPtr& reduced_basis) {
    const auto& rb = *reduced_basis;
    require(rb.reduced(), ErrorCode::BasisMismatch, "project expects a reduced target basis");
    const auto& pb = *plain_state.basis;
    require(!pb.reduced() && pb.label().two_m == rb.label().two_m && pb.cluster() == rb.cluster(),
            ErrorCode::BasisMismatch, "plain basis does not match the reduced sector");

    const auto& g = rb.group();
    StateVector out(reduced_basis);
    for (int64_t a = 0; a < rb.dim(); ++a) {
        const uint64_t rep = rb.state(a);
        std::complex<double> acc = 0.0;
        for (size_t u = 0; u < g.size(); ++u) {
            const int64_t idx = pb.index_of(g.apply(u, rep));
            acc += std::conj(g.element(u).chi) * plain_state.amps[idx];
        }
        out.amps[a] = acc / (static_cast<double>(g.size()) * rb.norm(a));
    }
    return out;
}

} // namespace tci
