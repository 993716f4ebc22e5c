#include "pwce/psd.hpp"

#include <cmath>

namespace pwce {

PsdVerdict is_psd(const Eigen::MatrixXcd& M, double tol) {
    if (M.rows() != M.cols()) throw std::invalid_argument("is_psd: square matrix required");
    if (M.rows() == 0) return {true, 0.0, tol};
    const Eigen::MatrixXcd H = 0.5 * (M + M.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    return {min_eig >= -tol, min_eig, tol};
}

Eigen::MatrixXcd schur_gap_matrix(const Eigen::MatrixXcd& M) {
    if (M.rows() != M.cols())
        throw std::invalid_argument("schur_gap_matrix: square matrix required");
    const Eigen::Index n = M.rows();
    Eigen::MatrixXcd G(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k)
            G(j, k) = std::norm(M(j, k)) -
                      M(j, j).real() * M(k, k).real() / double(n);
    return G;
}

Eigen::MatrixXcd charact_matrix(const KernelApprox& K, const std::vector<Point>& nodes,
                                double alpha) {
    const double lam0 = K.lambda0();
    Eigen::MatrixXcd M = gram_matrix(K, nodes);
    M.array() -= alpha * lam0 * lam0;
    return M;
}

CharactReport verify_charact_direction(const KernelApprox& K, const std::vector<Point>& nodes,
                                       double alpha, double tol) {
    CharactReport rep;
    rep.alpha = alpha;
    rep.implied_bound = K.lambda0() - 1.0 / alpha;
    rep.psd = is_psd(charact_matrix(K, nodes, alpha), tol);
    const WeightSolveResult w = optimal_weights(nodes, K);
    rep.achieved_error_sq = w.error.hi;
    if (rep.psd.is_psd) {
        // the implication is a theorem; slack covers the eigensolve tolerance
        // and the weight-solve roundoff
        const double slack =
            tol + 1e-9 * std::max(1.0, K.lambda0()) * double(nodes.size()) + w.error.hi - w.error.lo;
        rep.implication_ok = rep.achieved_error_sq >= rep.implied_bound - slack;
    }
    return rep;
}

}  // namespace pwce
