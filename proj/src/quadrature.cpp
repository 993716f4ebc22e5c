#include "pwce/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace pwce {

namespace {

double reduce_mod1(double x) {
    double r = x - std::floor(x);
    if (r >= 1.0) r = 0.0;
    return r;
}

ErrorInterval error_from_terms(double lam0, double cross, double quad, double abs_weight_sum,
                               double tail_upper) {
    const double slack = tail_upper * abs_weight_sum * abs_weight_sum;
    const double value = lam0 + cross + quad;
    ErrorInterval e;
    e.breakdown.norm_h_sq = lam0;
    e.breakdown.cross_term = cross;
    e.breakdown.quad_lo = quad;
    e.breakdown.quad_hi = quad + slack;
    const Interval iv = widened(std::max(value, 0.0), value + slack);
    e.lo = iv.lo;
    e.hi = iv.hi;
    return e;
}

}  // namespace

QuadratureRule QuadratureRule::equispaced(std::int64_t n, int d) {
    if (n < 1) throw std::invalid_argument("equispaced rule: n >= 1 required");
    if (d != 1) throw std::invalid_argument("equispaced rule: univariate only");
    QuadratureRule r;
    r.dimension = 1;
    r.nodes.reserve(std::size_t(n));
    r.weights.assign(std::size_t(n), std::complex<double>(1.0 / double(n), 0.0));
    for (std::int64_t j = 0; j < n; ++j) r.nodes.push_back({double(j) / double(n)});
    return r;
}

void QuadratureRule::write_csv(std::ostream& os) const {
    os.precision(17);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (double x : nodes[i]) os << x << ",";
        os << weights[i].real() << "," << weights[i].imag() << "\n";
    }
}

QuadratureRule QuadratureRule::read_csv(std::istream& is, int d) {
    QuadratureRule r;
    r.dimension = d;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        Point p(d);
        double re, im;
        char comma;
        for (int t = 0; t < d; ++t) {
            if (!(ls >> p[t] >> comma)) throw std::invalid_argument("rule csv: bad node line");
        }
        if (!(ls >> re >> comma >> im)) throw std::invalid_argument("rule csv: bad weight");
        for (double& x : p) x = reduce_mod1(x);
        r.nodes.push_back(std::move(p));
        r.weights.emplace_back(re, im);
    }
    return r;
}

ErrorInterval worst_case_error_sq(const QuadratureRule& rule, const KernelApprox& K) {
    if (rule.dimension != K.dimension())
        throw std::invalid_argument("worst_case_error_sq: dimension mismatch");
    const double lam0 = K.lambda0();
    const std::size_t n = rule.size();
    if (n == 0) return error_from_terms(lam0, 0.0, 0.0, 0.0, K.tail_upper());

    std::complex<double> wsum = 0.0;
    double abs_sum = 0.0;
    for (const auto& a : rule.weights) {
        wsum += std::conj(a);
        abs_sum += std::abs(a);
    }
    const double cross = -2.0 * lam0 * wsum.real();

    const Eigen::MatrixXcd G = gram_matrix(K, rule.nodes);
    Eigen::VectorXcd a(n);
    for (std::size_t i = 0; i < n; ++i) a[Eigen::Index(i)] = rule.weights[i];
    const double quad = (a.adjoint() * G * a).value().real();
    return error_from_terms(lam0, cross, quad, abs_sum, K.tail_upper());
}

WeightSolveResult optimal_weights(const std::vector<Point>& nodes, const KernelApprox& K,
                                  double ridge) {
    const std::size_t n = nodes.size();
    if (n < 1) throw std::invalid_argument("optimal_weights: at least one node required");
    if (ridge < 0.0) throw std::invalid_argument("optimal_weights: ridge >= 0 required");

    const Eigen::MatrixXcd G = gram_matrix(K, nodes);
    const double lam0 = K.lambda0();
    Eigen::VectorXcd h = Eigen::VectorXcd::Constant(Eigen::Index(n), lam0);

    Eigen::MatrixXcd A = G;
    if (ridge > 0.0)
        A += ridge * Eigen::MatrixXcd::Identity(Eigen::Index(n), Eigen::Index(n));

    WeightSolveResult res;
    Eigen::VectorXcd a = A.ldlt().solve(h);
    const double rel_residual = (A * a - h).norm() / h.norm();
    if (!a.allFinite() || rel_residual > 1e-8) {
        // coincident nodes or otherwise singular Gram: minimum-norm solution
        a = A.completeOrthogonalDecomposition().solve(h);
        res.degenerate = true;
    }

    QuadratureRule rule;
    rule.dimension = K.dimension();
    rule.nodes = nodes;
    rule.weights.assign(a.data(), a.data() + n);
    res.weights = rule.weights;
    res.error = worst_case_error_sq(rule, K);
    return res;
}

ErrorInterval equispaced_error_sq(std::int64_t n, const TruncatedSpectrum& trunc) {
    if (n < 1) throw std::invalid_argument("equispaced_error_sq: n >= 1 required");
    if (trunc.dimension() != 1)
        throw std::invalid_argument("equispaced_error_sq: univariate spectra only");

    // substituting nodes j/n, weights 1/n into the identity leaves
    // sum_{k in nZ \ {0}} lambda_k
    double partial = 0.0;
    Interval beyond{0.0, 0.0};
    if (trunc.spec.family() == SpectrumFamily::explicit_table) {
        const auto& t = trunc.spec.table();
        for (std::size_t i = 0; i < t.size(); ++i) {
            const std::int64_t k = t.point(i)[0];
            if (k != 0 && k % n == 0) partial += t.value(i);
        }
    } else {
        const std::int64_t R = trunc.support.box_radius();
        const std::int64_t m_max = R / n;
        for (std::int64_t m = m_max; m >= 1; --m)
            partial += trunc.spec.value1(m * n) + trunc.spec.value1(-m * n);
        const Interval tail = trunc.spec.progression_tail(n, m_max);
        beyond = {2.0 * tail.lo, 2.0 * tail.hi};
    }

    const double lam0 = trunc.lambda0();
    ErrorInterval e;
    e.breakdown.norm_h_sq = lam0;
    e.breakdown.cross_term = -2.0 * lam0;
    e.breakdown.quad_lo = lam0 + partial + beyond.lo;
    e.breakdown.quad_hi = lam0 + partial + beyond.hi;
    const Interval iv = widened(partial + beyond.lo, partial + beyond.hi);
    e.lo = iv.lo;
    e.hi = iv.hi;
    return e;
}

// ---------------------------------------------------------------------------
// node optimization
// ---------------------------------------------------------------------------

namespace {

struct Objective {
    const KernelApprox* K;
    double lam0;

    // plain identity value for the current Gram; used as the descent
    // objective (certification happens once on the final rule)
    double operator()(Eigen::MatrixXcd& G) const {
        const Eigen::Index n = G.rows();
        Eigen::VectorXcd h = Eigen::VectorXcd::Constant(n, lam0);
        Eigen::VectorXcd a = G.ldlt().solve(h);
        if (!a.allFinite()) a = G.completeOrthogonalDecomposition().solve(h);
        const double v = lam0 - (h.adjoint() * a).value().real();
        return std::max(v, 0.0);
    }
};

void update_gram_row(Eigen::MatrixXcd& G, const KernelApprox& K,
                     const std::vector<Point>& nodes, std::size_t j) {
    const std::size_t n = nodes.size();
    for (std::size_t k = 0; k < n; ++k) {
        if (k == j) {
            G(Eigen::Index(j), Eigen::Index(j)) = K.diagonal;
            continue;
        }
        const std::complex<double> v = kernel_eval(K, nodes[j], nodes[k]);
        G(Eigen::Index(j), Eigen::Index(k)) = v;
        G(Eigen::Index(k), Eigen::Index(j)) = std::conj(v);
    }
}

struct RestartOutcome {
    double value = std::numeric_limits<double>::infinity();
    std::vector<Point> nodes;
    std::int64_t evals = 0;
};

RestartOutcome run_restart(const KernelApprox& K, std::vector<Point> nodes,
                           std::uint64_t seed, std::uint64_t stream, std::int64_t budget) {
    const std::size_t n = nodes.size();
    const int d = K.dimension();
    Rng rng(seed, stream * 7919 + 1);
    Objective obj{&K, K.lambda0()};

    Eigen::MatrixXcd G = gram_matrix(K, nodes);
    double best = obj(G);
    std::int64_t evals = 1;

    auto eval_at = [&](std::size_t j, int t, double x) {
        const double old = nodes[j][t];
        nodes[j][t] = reduce_mod1(x);
        update_gram_row(G, K, nodes, j);
        const double v = obj(G);
        ++evals;
        nodes[j][t] = old;
        return v;
    };

    const double gr = 0.6180339887498948482;  // golden ratio conjugate
    bool improved = true;
    while (improved && evals < budget) {
        improved = false;
        for (std::size_t j = 0; j < n && evals < budget; ++j) {
            for (int t = 0; t < d && evals < budget; ++t) {
                // coarse scan, then golden-section refinement around the best cell
                const int cells = 8;
                double bx = nodes[j][t], bv = best;
                for (int c = 0; c < cells; ++c) {
                    const double x = reduce_mod1(nodes[j][t] + (c + 1) / double(cells + 1));
                    const double v = eval_at(j, t, x);
                    if (v < bv) { bv = v; bx = x; }
                }
                double lo = bx - 1.0 / (cells + 1), hi = bx + 1.0 / (cells + 1);
                double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
                double f1 = eval_at(j, t, x1), f2 = eval_at(j, t, x2);
                for (int it = 0; it < 16 && evals < budget; ++it) {
                    if (f1 <= f2) {
                        hi = x2; x2 = x1; f2 = f1;
                        x1 = hi - gr * (hi - lo);
                        f1 = eval_at(j, t, x1);
                    } else {
                        lo = x1; x1 = x2; f1 = f2;
                        x2 = lo + gr * (hi - lo);
                        f2 = eval_at(j, t, x2);
                    }
                }
                const double cand_x = (f1 <= f2) ? x1 : x2;
                const double cand_v = std::min(f1, f2);
                if (std::min(cand_v, bv) < best - 1e-13 * K.lambda0()) {
                    const double nx = (cand_v < bv) ? cand_x : bx;
                    nodes[j][t] = reduce_mod1(nx);
                    update_gram_row(G, K, nodes, j);
                    best = obj(G);
                    ++evals;
                    improved = true;
                } else {
                    update_gram_row(G, K, nodes, j);  // restore row for old coordinate
                }
            }
        }
    }
    return {best, std::move(nodes), evals};
}

std::vector<Point> lattice_start(std::int64_t n, int d, Rng& rng) {
    // rank-1 lattice with a random generator, Cranley-Patterson shifted
    std::vector<Point> nodes(static_cast<std::size_t>(n), Point(std::size_t(d)));
    std::vector<double> gen(d), shift(d);
    for (int t = 0; t < d; ++t) {
        gen[t] = (t == 0) ? 1.0 : double(1 + 2 * rng.uniform_int(0, std::max<std::int64_t>(n / 2 - 1, 0)));
        shift[t] = rng.uniform();
    }
    for (std::int64_t j = 0; j < n; ++j)
        for (int t = 0; t < d; ++t)
            nodes[std::size_t(j)][t] = reduce_mod1(double(j) * gen[t] / double(n) + shift[t]);
    return nodes;
}

}  // namespace

OptimizeResult optimize_nodes(std::int64_t n, const KernelApprox& K, int restarts,
                              std::uint64_t seed, std::int64_t budget,
                              const std::vector<std::vector<Point>>& extra_starts) {
    if (n < 1) throw std::invalid_argument("optimize_nodes: n >= 1 required");
    if (restarts < 1) throw std::invalid_argument("optimize_nodes: restarts >= 1 required");
    const int d = K.dimension();

    const int total = restarts + int(extra_starts.size());
    std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(total));

#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < total; ++r) {
        std::vector<Point> start;
        if (r < restarts) {
            Rng rng(seed, std::uint64_t(r));
            if (r == 0 && d == 1) {
                start.assign(std::size_t(n), Point(std::size_t(1)));
                for (std::int64_t j = 0; j < n; ++j) start[std::size_t(j)][0] = double(j) / double(n);
            } else if (r == 0) {
                start = lattice_start(n, d, rng);
            } else if (r == 1) {
                start = lattice_start(n, d, rng);
            } else {
                start.assign(std::size_t(n), Point(std::size_t(d)));
                for (auto& p : start)
                    for (double& x : p) x = rng.uniform();
            }
        } else {
            start = extra_starts[std::size_t(r - restarts)];
            if (std::int64_t(start.size()) != n)
                throw std::invalid_argument("optimize_nodes: extra start of wrong size");
        }
        outcomes[std::size_t(r)] = run_restart(K, std::move(start), seed, std::uint64_t(r), budget);
    }

    int best = 0;
    for (int r = 1; r < total; ++r)
        if (outcomes[std::size_t(r)].value < outcomes[std::size_t(best)].value) best = r;

    OptimizeResult res;
    res.best_restart = best;
    for (const auto& o : outcomes) res.evaluations += o.evals;
    WeightSolveResult w = optimal_weights(outcomes[std::size_t(best)].nodes, K);
    res.rule.dimension = d;
    res.rule.nodes = std::move(outcomes[std::size_t(best)].nodes);
    res.rule.weights = std::move(w.weights);
    res.error = w.error;
    return res;
}

}  // namespace pwce
