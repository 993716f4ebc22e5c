#pragma once

#include <Eigen/Dense>

#include "pwce/kernel.hpp"
#include "pwce/quadrature.hpp"

namespace pwce {

struct PsdVerdict {
    bool is_psd = false;
    double min_eigenvalue = 0.0;
    double tolerance = 0.0;
};

// Minimum eigenvalue by a self-adjoint eigensolve; the input is symmetrized
// (M + M*)/2 first.  is_psd <=> min eigenvalue >= -tol.
PsdVerdict is_psd(const Eigen::MatrixXcd& M, double tol);

// M o conj(M) - (1/n) (diag M)(diag M)^T, entries |M_jk|^2 - M_jj M_kk / n.
// PSD whenever M is (the Schur-variant inequality).
Eigen::MatrixXcd schur_gap_matrix(const Eigen::MatrixXcd& M);

// (K(x_j,x_k) - alpha lambda_0^2)_{jk}: PSD for all node sets iff
// e_n^2 >= lambda_0 - 1/alpha.
Eigen::MatrixXcd charact_matrix(const KernelApprox& K, const std::vector<Point>& nodes,
                                double alpha);

struct CharactReport {
    PsdVerdict psd;
    double alpha = 0.0;
    double implied_bound = 0.0;       // lambda_0 - 1/alpha
    double achieved_error_sq = 0.0;   // optimal-weight squared error on the nodes
    bool implication_ok = true;       // psd => achieved >= implied - slack
};

// Tests the one fixed-node-set direction: if the characterization matrix is
// PSD then every rule on these nodes has squared error >= lambda_0 - 1/alpha.
CharactReport verify_charact_direction(const KernelApprox& K, const std::vector<Point>& nodes,
                                       double alpha, double tol);

}  // namespace pwce
