#pragma once

#include <Eigen/Dense>
#include <vector>

#include "tci/basis.hpp"
#include "tci/operators.hpp"

namespace tci {

// Euler-angle quadrature for the uniform SU(2) average: uniform periodic
// grids in the two azimuthal angles, Gauss-Legendre in cos of the middle
// angle. With n_psi, n_phi >= N+1 and n_theta_polar >= ceil(N/2)+1 the
// integrals are exact (the integrand has bounded spin frequency content).
struct EulerQuadrature {
    int n_psi, n_theta_polar, n_phi;
    static EulerQuadrature for_sites(int n_sites) {
        return {n_sites + 1, n_sites / 2 + 2, n_sites + 1};
    }
};

// Projector onto the total-spin singlet sector, as a dense matrix over the
// M=0 sector basis (spectral route: null space of S^2). N <= 12, even.
Eigen::MatrixXcd singlet_projector_spectral(int n_sites);

// The same projector from the Haar average of Euler rotations, over the full
// 2^N configuration space. N <= 10, even.
Eigen::MatrixXcd singlet_projector_haar(int n_sites, const EulerQuadrature& quad);

// Embed an M=0 sector matrix into the full 2^N configuration space.
Eigen::MatrixXcd embed_m0_block(const Eigen::MatrixXcd& block, int n_sites);

// Haar average of the rotated Ising Hamiltonian sum_b w_b Sz_i Sz_j over the
// full 2^N space; equals the Heisenberg operator sum_b (w_b/3) S_i . S_j.
Eigen::MatrixXcd symmetrize_hamiltonian(const std::vector<WeightedBond>& zz_bonds, int n_sites,
                                        const EulerQuadrature& quad);

// Dense Heisenberg sum_b w_b S_i . S_j in the full 2^N space, built from
// independent single-site operator algebra (oracle-side construction).
Eigen::MatrixXcd dense_heisenberg_full(const std::vector<WeightedBond>& bonds, int n_sites);

struct ProjectedSectorCheck {
    std::vector<double> projected_levels;   // E_{S,M} + spec(P H_Ising P)
    std::vector<double> nearest_tci;        // nearest exact TCI level each
    double max_abs_deviation = 0.0;
};

// Eq.-2 picture: exact TCI spectrum in the fixed-M sector against the
// projected Ising block of total spin S, offset by the cavity energy.
ProjectedSectorCheck projected_hamiltonian_check(const ModelParams& params,
                                                 const ClusterPtr& cluster, int total_spin_s,
                                                 int two_m);

} // namespace tci
