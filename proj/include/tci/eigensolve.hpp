#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "tci/operators.hpp"

namespace tci {

struct EigenRequest {
    int n_eigenpairs = 1;
    double tolerance = 1e-10;        // residual, relative to max(1, |eigenvalue|)
    int max_iterations = 200000;     // total matvec budget
    uint64_t seed = 12345;
    bool oracle = false;             // force the dense path
    int max_basis_vectors = 400;     // Lanczos memory cap per sweep
    double degeneracy_tol = 1e-8;    // relative to the spectral scale
};

struct EigenResult {
    std::vector<double> eigenvalues;             // ascending
    std::vector<Eigen::VectorXcd> eigenvectors;
    std::vector<double> residual_norms;          // ||A v - lambda v||
    std::vector<int> degeneracy_group;           // multiplet id per level
    int iterations = 0;                          // matvecs used
    bool converged = true;
    uint64_t seed = 0;
    std::vector<std::vector<double>> ritz_history;   // per sweep: smallest Ritz value per restart
};

// Lowest eigenpairs of a hermitian operator: thick-restart Lanczos with full
// reorthogonalization, restarted with deflation until the eigenvalue count
// per level stabilizes (recovers full multiplets).
EigenResult lowest_eigenpairs(const LinearOperator& op, const EigenRequest& req);

// Full spectrum via dense hermitian diagonalization; dim <= 4096.
EigenResult dense_oracle(const LinearOperator& op);

// Dense matrix of the operator (applies to unit vectors); dim <= 4096.
Eigen::MatrixXcd to_dense(const LinearOperator& op);

constexpr int64_t kOracleDimCap = 4096;

} // namespace tci
