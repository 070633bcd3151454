#include "tci/reference.hpp"

#include <algorithm>

#include "tci/errors.hpp"

namespace tci::ref {

namespace {

int64_t lookup(const std::vector<uint64_t>& states, uint64_t config) {
    auto it = std::lower_bound(states.begin(), states.end(), config);
    return it - states.begin();
}

} // namespace

void apply_hamiltonian(const SpinHamiltonian& h, const Eigen::VectorXcd& in,
                       Eigen::VectorXcd& out) {
    const auto& basis = *h.basis();
    require(!basis.reduced(), ErrorCode::BasisMismatch,
            "reference kernel covers plain sector bases");
    require(in.size() == basis.dim(), ErrorCode::BasisMismatch, "dimension mismatch");
    const auto& states = basis.states();
    const int n = basis.n_sites();
    const double cavity = h.cavity();
    out.resize(basis.dim());

    for (int64_t a = 0; a < basis.dim(); ++a) {
        const uint64_t cfg = states[a];
        std::complex<double> acc = h.diagonal_energy(cfg) * in[a];
        if (cavity != 0.0) {
            // Diagonal of lambda (S+S- - Sz) is lambda N/2, carried by the
            // diagonal cache; the i != j flip-flops remain.
            for (int i = 0; i < n; ++i) {
                if (!((cfg >> i) & 1)) continue;
                const uint64_t low = cfg & ~(uint64_t(1) << i);
                for (int j = 0; j < n; ++j) {
                    if (j == i || ((low >> j) & 1)) continue;
                    acc += cavity * in[lookup(states, low | (uint64_t(1) << j))];
                }
            }
        }
        for (const auto& b : h.xy_bonds()) {
            const bool bi = (cfg >> b.i) & 1;
            const bool bj = (cfg >> b.j) & 1;
            if (bi != bj)
                acc += b.w * in[lookup(states, cfg ^ ((uint64_t(1) << b.i) | (uint64_t(1) << b.j)))];
        }
        out[a] = acc;
    }
}

} // namespace tci::ref
