#pragma once

#include "tci/operators.hpp"

namespace tci::ref {

// Serial reference apply for plain-sector Hamiltonians. Walks the all-to-all
// flip-flop sum term by term (O(dim * N^2)) and resolves indices by binary
// search over the stored state list, independent of the production kernels'
// two-pass gather and combinadic ranking. Kept as the correctness baseline
// and the benchmark reference.
void apply_hamiltonian(const SpinHamiltonian& h, const Eigen::VectorXcd& in,
                       Eigen::VectorXcd& out);

} // namespace tci::ref
