#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pwce/kernel.hpp"

namespace pwce {

struct QuadratureRule {
    std::vector<Point> nodes;                    // reduced mod 1
    std::vector<std::complex<double>> weights;   // same length
    int dimension = 1;

    std::size_t size() const { return nodes.size(); }

    static QuadratureRule equispaced(std::int64_t n, int d = 1);  // nodes j/n, weights 1/n

    void write_csv(std::ostream& os) const;  // x_1,...,x_d,re(a),im(a)
    static QuadratureRule read_csv(std::istream& is, int d);
};

// Squared worst-case error terms: ||h||^2 - 2 Re(a* h) + a* K a, with the
// kernel truncation slack attributed to the quadratic term.
struct ErrorBreakdown {
    double norm_h_sq = 0.0;
    double cross_term = 0.0;  // -2 Re(a* h)
    double quad_lo = 0.0;
    double quad_hi = 0.0;
};

struct ErrorInterval {
    double lo = 0.0;
    double hi = 0.0;
    ErrorBreakdown breakdown;
};

// Exact error identity on the truncated kernel, widened by the tail slack
// tail_upper * (sum_j |a_j|)^2.
ErrorInterval worst_case_error_sq(const QuadratureRule& rule, const KernelApprox& K);

struct WeightSolveResult {
    std::vector<std::complex<double>> weights;
    ErrorInterval error;
    bool degenerate = false;  // singular Gram, minimum-norm fallback used
};

// Minimizes the squared error over weights: solves (G + ridge I) a = h with
// h_j = lambda_0.  Singular Gram with ridge = 0 falls back to the
// minimum-norm least-squares solution and flags the degeneracy.
WeightSolveResult optimal_weights(const std::vector<Point>& nodes, const KernelApprox& K,
                                  double ridge = 0.0);

// Closed form for equal-weight equispaced rules in d = 1:
// sum over the nonzero multiples of n of lambda_k, certified enclosure.
ErrorInterval equispaced_error_sq(std::int64_t n, const TruncatedSpectrum& trunc);

struct OptimizeResult {
    QuadratureRule rule;
    ErrorInterval error;
    int best_restart = -1;
    std::int64_t evaluations = 0;
};

// Multi-restart coordinate descent over node coordinates with optimal
// weights re-solved at every step.  Deterministic for fixed seed: restarts
// own RNG streams keyed by (seed, restart) and the merge is an argmin with
// index tie-break.  `budget` caps objective evaluations per restart.
OptimizeResult optimize_nodes(std::int64_t n, const KernelApprox& K, int restarts,
                              std::uint64_t seed, std::int64_t budget,
                              const std::vector<std::vector<Point>>& extra_starts = {});

}  // namespace pwce
