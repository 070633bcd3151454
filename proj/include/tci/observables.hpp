#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tci/eigensolve.hpp"
#include "tci/operators.hpp"

namespace tci {

struct StructureFactorResult {
    char component = 'z';                      // 'x', 'y' or 'z'
    std::vector<double> values;                // one per cluster momentum
    std::map<std::string, double> star_sums;   // summed over the label's star
};

// Static spin structure factor S_aa(q) = N^{-1} sum_ij e^{iq.(ri-rj)} <S_a^i S_a^j>
// of a normalized plain-sector state. zz correlations are diagonal in the
// configuration basis; xx/yy run through pair flip-flop correlators.
StructureFactorResult structure_factor(const StateVector& state, char component,
                                       const LatticeCluster& cluster);

struct TotalSpin {
    double s_squared = 0.0;
    double variance = 0.0;
    std::optional<double> s;   // solved from S(S+1) when variance is sharp
};

TotalSpin total_spin(const StateVector& state);

// Rotate degenerate multiplets of an eigensolver result into sharp S^2
// eigenstates (S^2 commutes with H on each degenerate subspace).
void resolve_total_spin(EigenResult& result, const BasisPtr& basis);

struct SpectrumComparison {
    std::vector<double> tci_levels;
    std::vector<double> heisenberg_singlet_levels;
    std::vector<double> differences;
    std::vector<bool> matched;
    double tolerance = 0.0;
};

// Desk-scale Fig.2-style check: low TCI levels in the M=0 sector against the
// singlet levels of the Eq.-4 Heisenberg model (couplings J_ij / 3).
SpectrumComparison heisenberg_mapping_check(const ModelParams& params, const ClusterPtr& cluster,
                                            int n_levels, const EigenRequest& req = {});

struct FidelityCurve {
    std::vector<double> lambdas;
    std::vector<double> chi_f;
    double delta_lambda = 0.0;
    std::vector<bool> degenerate;    // principal-angle substitution used
    struct Peak {
        double lambda;
        double value;
        bool refined;
    };
    std::vector<Peak> peaks;         // interior local maxima, parabolic refinement
};

// Ground-state fidelity susceptibility chi_F = -2 ln|<psi(l)|psi(l+dl)>| / dl^2
// swept over a cavity-coupling grid at fixed remaining parameters.
FidelityCurve fidelity_susceptibility(const ModelParams& base, const ClusterPtr& cluster,
                                      const std::vector<double>& lambda_grid, double delta_lambda,
                                      const SectorLabel& sector, const EigenRequest& req = {});

// Second-order perturbation-theory value sum_n |<n|dH/dl|0>|^2 / (E_n - E_0)^2
// from the dense spectrum; oracle for the overlap-based curve.
double fidelity_susceptibility_perturbative(const ModelParams& base, const ClusterPtr& cluster,
                                            double lambda, const SectorLabel& sector);

} // namespace tci
