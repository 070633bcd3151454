#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tci/basis.hpp"

namespace tci {

enum class AnsatzPhase { SquareNeel, SquareStripe, TriangularStripe };

const char* to_string(AnsatzPhase phase);
AnsatzPhase ansatz_phase_from_string(const std::string& name);

// Effective two-sublattice coupling of the classical AFM: J1-J2 (square
// Neel), J2 (square stripe), (J1+J2)/2 (triangular stripe).
double effective_coupling(AnsatzPhase phase, double j1, double j2);

struct AnsatzSpec {
    int n_sites = 8;              // multiple of 4, so s = N/4 is a Dicke spin
    double j_effective = 1.0;     // > 0
    double lambda = 0.0;          // lambda, or lambda-bar when rescaled
    bool rescaled = false;
    AnsatzPhase phase = AnsatzPhase::SquareNeel;

    double cavity_coupling() const { return rescaled ? lambda * n_sites : lambda; }
    void validate() const;
};

// Exact Dicke-sum structure factors of the squeezed AFM at squeezing theta.
struct DickeFactors {
    double sxx0 = 0.0;    // S_xx(0) = S_yy(0)
    double sxxq = 0.0;    // S_xx(Q) = S_yy(Q)
    double szzq = 0.0;    // S_zz(Q)
    double norm2 = 0.0;   // A^2
};
DickeFactors exact_structure_factors(int n_sites, double theta);

// E(theta) = lambda N [S_xx(0) + S_yy(0)] - 2 J S_zz(Q).
double variational_energy(const AnsatzSpec& spec, double theta);

enum class VariationalMethod { ExactSum, Bosonic, Asymptotic };

struct VariationalResult {
    double theta_star = 0.0;
    double energy = 0.0;
    DickeFactors factors;
    VariationalMethod method = VariationalMethod::ExactSum;
    bool boundary_hit = false;   // monotone decrease up to theta_max
};

// Golden-section minimization over [0, ln(N)+5] after a coarse bracket scan.
VariationalResult minimize_theta(const AnsatzSpec& spec);

// Dyson-Maleev (two-mode squeezed vacuum) approximation.
struct BosonicFactors {
    double sxx0 = 0.0, sxxq = 0.0, szzq = 0.0;
    bool valid = true;   // spin-wave density sinh^2(theta) <= 2s
};
BosonicFactors bosonic_structure_factors(int n_sites, double theta);
double bosonic_energy(const AnsatzSpec& spec, double theta);

struct BosonicScan {
    bool has_interior_minimum = false;
    double theta_min = 0.0;
    double energy_min = 0.0;
    bool validity_exceeded = false;   // minimum outside the spin-wave regime
};
BosonicScan bosonic_minimum(const AnsatzSpec& spec);

// Large-N asymptotics in rescaled mode; valid for 27 lambda-bar / 2J < 1.
struct AsymptoticQuantities {
    double beta = 0.0;
    double eta = 0.0;         // lambda-bar / (J beta^2)
    double theta_star = 0.0;
    double energy = 0.0;
    double szz_q = 0.0;
    double sxx_q = 0.0;
};
AsymptoticQuantities asymptotic_quantities(const AnsatzSpec& spec);

// Symmetrized ansatz |theta,+-> ~ (1 +- Pi)|theta>.
struct SymmetrizedEnergies {
    double e_plus = 0.0;
    double e_minus = 0.0;
    double overlap = 0.0;     // <theta,1|theta,2>
    bool minus_unstable = false;   // 1 - overlap below float resolution
};
SymmetrizedEnergies symmetrized_energies(const AnsatzSpec& spec, double theta);

struct GapResult {
    double theta_plus = 0.0, theta_minus = 0.0;   // per-parity optima
    double e_plus = 0.0, e_minus = 0.0;
    double gap = 0.0;                // |E+(theta+*) - E-(theta-*)|
    double gap_shared_theta = 0.0;   // evaluated at the unsymmetrized theta*
};
GapResult symmetrized_gap(const AnsatzSpec& spec);

// Asymptotic variational gap, self-consistent with the Eq.-7 minimizer.
double asymptotic_gap(const AnsatzSpec& spec);

// Crossover E(theta*) = E_Heis with E_Heis = -A J N / 2 supplied per point.
struct CrossoverPoint {
    double j2_over_j1 = 0.0;
    double heisenberg_a = 0.0;        // A in E_Heis = -A J N / 2
    std::string provenance;
    AnsatzPhase phase = AnsatzPhase::SquareNeel;
    bool crossing_found = false;
    double critical_lambda_bar = 0.0;
};
std::vector<CrossoverPoint> crossover_boundary(
    const std::vector<double>& j2_over_j1_grid, const std::vector<double>& heisenberg_a,
    const std::vector<std::string>& provenance, int n_sites, double j1,
    std::optional<AnsatzPhase> forced_phase = std::nullopt);

// Explicit |theta> (or |theta,+->) on the M=0 sector of an N-site chain
// cluster; sublattice A = even sites, B = odd sites. N <= 16.
StateVector brute_force_ansatz_state(int n_sites, double theta,
                                     std::optional<int> parity = std::nullopt);

// Brute-force oracle expectations of the permutation-symmetrized
// two-sublattice Hamiltonian on an explicit state.
double brute_force_symmetrized_energy(const StateVector& state, double lambda_eff, double j_eff);

// Brute-force sublattice structure factors <(S_a^A +- S_a^B)^2>/N between
// two explicit states (diagonal when the states coincide).
struct BruteForceFactors {
    double sxx0, sxxq, syy0, syyq, szz0, szzq;
};
BruteForceFactors brute_force_factors(const StateVector& bra, const StateVector& ket);

} // namespace tci
