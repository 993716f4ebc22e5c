#include "pwce/verify.hpp"

#include <cmath>

#include "pwce/bounds.hpp"
#include "pwce/psd.hpp"
#include "pwce/quadrature.hpp"

namespace pwce {

namespace {

Eigen::MatrixXcd random_psd(Rng& rng, int n) {
    Eigen::MatrixXcd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = rng.gaussian_complex();
    return A * A.adjoint();
}

double spectral_norm(const Eigen::MatrixXcd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (M + M.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

SpectrumSpec random_explicit(Rng& rng, int d, std::int64_t radius) {
    std::vector<std::int32_t> flat;
    std::vector<double> vals;
    const IndexSet box = IndexSet::box(d, radius);
    for (std::size_t i = 0; i < box.size(); ++i) {
        if (rng.uniform() < 0.6) continue;  // sparse support
        const auto p = box.point(i);
        flat.insert(flat.end(), p.begin(), p.end());
        vals.push_back(rng.uniform(0.1, 1.0));
    }
    if (vals.empty()) {
        flat.assign(std::size_t(d), 0);
        vals.push_back(1.0);
    }
    return SpectrumSpec::explicit_table(d, std::move(flat), std::move(vals));
}

}  // namespace

SuiteResult verify_schur_psd(std::int64_t trials, std::uint64_t seed) {
    SuiteResult res;
    res.suite = "schur-psd";
    res.trials = trials;
    std::int64_t failures = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : failures)
    for (std::int64_t t = 0; t < trials; ++t) {
        Rng rng(seed, std::uint64_t(t));
        const int n = int(rng.uniform_int(1, 20));
        const Eigen::MatrixXcd M = random_psd(rng, n);
        const double tol = 1e-10 * spectral_norm(M) * double(n);
        if (!is_psd(schur_gap_matrix(M), tol).is_psd) ++failures;
    }
    res.failures = failures;
    return res;
}

SuiteResult verify_convolution(std::int64_t trials, std::uint64_t seed) {
    SuiteResult res;
    res.suite = "convolution";
    res.trials = trials;
    std::int64_t failures = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : failures)
    for (std::int64_t t = 0; t < trials; ++t) {
        Rng rng(seed, std::uint64_t(t));
        const int d = (rng.uniform() < 0.5) ? 1 : 2;
        const SpectrumSpec a = random_explicit(rng, d, d == 1 ? 6 : 2);
        const SpectrumSpec b = random_explicit(rng, d, d == 1 ? 6 : 2);
        const SpectrumSpec c = convolve(a, b);
        auto l1 = [](const SpectrumSpec& s) {
            double m = 0.0;
            for (std::size_t i = 0; i < s.table().size(); ++i) m += s.table().value(i);
            return m;
        };
        const double lhs = l1(c), rhs = l1(a) * l1(b);
        if (std::abs(lhs - rhs) > 1e-12 * std::max(1.0, rhs)) ++failures;
    }
    res.failures = failures;
    return res;
}

SuiteResult verify_charact(std::int64_t trials, std::uint64_t seed) {
    SuiteResult res;
    res.suite = "charact";
    res.trials = trials;
    std::int64_t failures = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : failures)
    for (std::int64_t t = 0; t < trials; ++t) {
        Rng rng(seed, std::uint64_t(t));
        // convolution-square spectrum with exactly known kappa
        SpectrumSpec mu = random_explicit(rng, 1, rng.uniform_int(1, 4));
        SpectrumSpec lambda = convolve(mu, mu);
        const TruncatedSpectrum trunc = truncate_at_radius(lambda, 0);
        const KernelApprox K(trunc);
        const std::size_t n = std::size_t(rng.uniform_int(1, 5));
        std::vector<Point> nodes(n, Point(1));
        for (auto& p : nodes) p[0] = rng.uniform();
        const double alpha = double(n) / K.diagonal;
        const double tol = 1e-10 * K.diagonal * double(n);
        const CharactReport rep = verify_charact_direction(K, nodes, alpha, tol);
        if (!rep.psd.is_psd || !rep.implication_ok) ++failures;
    }
    res.failures = failures;
    return res;
}

SuiteResult verify_kernel(std::int64_t trials, std::uint64_t seed) {
    SuiteResult res;
    res.suite = "kernel";
    res.trials = trials;
    std::int64_t failures = 0;
    const TruncatedSpectrum t1 = truncate_at_radius(SpectrumSpec::geometric(1.0, 2.0), 48);
    const TruncatedSpectrum t2 = truncate_at_radius(SpectrumSpec::isotropic_log(2, 1.0), 24);
#pragma omp parallel for schedule(dynamic) reduction(+ : failures)
    for (std::int64_t t = 0; t < trials; ++t) {
        Rng rng(seed, std::uint64_t(t));
        const bool multi = rng.uniform() < 0.5;
        const KernelApprox K(multi ? t2 : t1);
        const int d = K.dimension();
        const std::size_t n = std::size_t(rng.uniform_int(1, 8));
        std::vector<Point> nodes(n, Point(d));
        for (auto& p : nodes)
            for (double& x : p) x = rng.uniform();
        const Eigen::MatrixXcd G = gram_matrix(K, nodes);
        bool bad = false;
        // hermitian with constant diagonal
        if ((G - G.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * K.diagonal) bad = true;
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(G(Eigen::Index(i), Eigen::Index(i)).real() - K.diagonal) > 0.0)
                bad = true;
        // translation invariance
        Point shift(d);
        for (double& x : shift) x = rng.uniform();
        std::vector<Point> shifted = nodes;
        for (auto& p : shifted)
            for (int j = 0; j < d; ++j) p[j] = p[j] + shift[j];
        const Eigen::MatrixXcd Gs = gram_matrix(K, shifted);
        if ((G - Gs).cwiseAbs().maxCoeff() > 1e-12 * K.diagonal) bad = true;
        // PSD up to the certified slack
        const double floor = -(K.tail_upper() * double(n) + 1e-10 * double(n) * K.diagonal);
        if (!is_psd(G, -floor).is_psd) bad = true;
        if (bad) ++failures;
    }
    res.failures = failures;
    return res;
}

SuiteResult verify_weights(std::int64_t trials, std::uint64_t seed) {
    SuiteResult res;
    res.suite = "weights";
    res.trials = trials;
    std::int64_t failures = 0;
    const TruncatedSpectrum tg = truncate_at_radius(SpectrumSpec::geometric(1.0, 2.0), 48);
#pragma omp parallel for schedule(dynamic) reduction(+ : failures)
    for (std::int64_t t = 0; t < trials; ++t) {
        Rng rng(seed, std::uint64_t(t));
        const KernelApprox K(tg);
        const std::size_t n = std::size_t(rng.uniform_int(1, 6));
        std::vector<Point> nodes(n, Point(1));
        for (auto& p : nodes) p[0] = rng.uniform();
        const WeightSolveResult opt = optimal_weights(nodes, K);
        const double opt_value =
            opt.error.breakdown.norm_h_sq + opt.error.breakdown.cross_term +
            opt.error.breakdown.quad_lo;
        QuadratureRule rule;
        rule.dimension = 1;
        rule.nodes = nodes;
        for (int p = 0; p < 100; ++p) {
            rule.weights = opt.weights;
            for (auto& w : rule.weights)
                w += 1e-3 * rng.gaussian_complex();
            const ErrorInterval e = worst_case_error_sq(rule, K);
            const double value =
                e.breakdown.norm_h_sq + e.breakdown.cross_term + e.breakdown.quad_lo;
            if (value < opt_value - 1e-10 * std::max(1.0, opt_value)) {
                ++failures;
                break;
            }
        }
    }
    res.failures = failures;
    return res;
}

SuiteResult verify_bounds(std::uint64_t seed) {
    SuiteResult res;
    res.suite = "bounds";
    const std::vector<SpectrumSpec> specs = {SpectrumSpec::geometric(1.0, 2.0),
                                             SpectrumSpec::border_univariate(1.0)};
    for (const auto& spec : specs) {
        const TruncatedSpectrum trunc = truncate_at_radius(spec, 4096);
        const TruncatedSpectrum bigger = truncate_at_radius(spec, 8192);
        const KernelApprox K(trunc);
        for (std::int64_t n : {1, 2, 4}) {
            const OptimizeResult witness = optimize_nodes(n, K, 2, seed, 400);
            for (const auto& name : applicable_bounds(spec)) {
                ++res.trials;
                const BoundReport b = compute_bound(name, trunc, n);
                const double slack = 1e-9 * std::max(1.0, spec.lambda0());
                if (b.value > witness.error.hi + slack) {
                    ++res.failures;
                    res.notes.push_back("bound " + name + " exceeds the upper witness at n=" +
                                        std::to_string(n));
                }
                // enlarging the support never decreases a bound
                const BoundReport b2 = compute_bound(name, bigger, n);
                if (b2.value < b.value - 1e-12 * std::max(1.0, b.value)) {
                    ++res.failures;
                    res.notes.push_back("bound " + name + " decreased under refinement at n=" +
                                        std::to_string(n));
                }
            }
        }
    }
    return res;
}

std::vector<SuiteResult> verify_suites(const std::string& name, std::int64_t trials,
                                       std::uint64_t seed) {
    std::vector<SuiteResult> out;
    const bool all = (name == "all");
    if (all || name == "schur-psd") out.push_back(verify_schur_psd(trials, seed));
    if (all || name == "convolution") out.push_back(verify_convolution(trials, seed));
    if (all || name == "charact") out.push_back(verify_charact(trials, seed));
    if (all || name == "kernel") out.push_back(verify_kernel(trials, seed));
    if (all || name == "weights") out.push_back(verify_weights(trials, seed));
    if (all || name == "bounds") out.push_back(verify_bounds(seed));
    if (out.empty()) throw std::invalid_argument("unknown verification suite: " + name);
    return out;
}

}  // namespace pwce
