#include "doctest.h"

#include <cmath>
#include <sstream>

#include "pwce/quadrature.hpp"

using namespace pwce;

namespace {

KernelApprox geometric_kernel(std::int64_t R = 48) {
    return KernelApprox(truncate_at_radius(SpectrumSpec::geometric(1.0, 2.0), R));
}

double plain_value(const ErrorInterval& e) {
    return e.breakdown.norm_h_sq + e.breakdown.cross_term + e.breakdown.quad_lo;
}

}  // namespace

TEST_CASE("empty rule reproduces the initial error lambda_0") {
    const KernelApprox K = geometric_kernel();
    QuadratureRule empty;
    empty.dimension = 1;
    const ErrorInterval e = worst_case_error_sq(empty, K);
    CHECK(e.lo == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.hi == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero weights reduce to the initial error") {
    const KernelApprox K = geometric_kernel();
    QuadratureRule r;
    r.dimension = 1;
    r.nodes = {{0.2}, {0.7}};
    r.weights = {{0.0, 0.0}, {0.0, 0.0}};
    const ErrorInterval e = worst_case_error_sq(r, K);
    CHECK(e.lo == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single node at 0 with weight 1/3 gives squared error 2/3") {
    const KernelApprox K = geometric_kernel();
    QuadratureRule r;
    r.dimension = 1;
    r.nodes = {{0.0}};
    r.weights = {{1.0 / 3.0, 0.0}};
    const ErrorInterval e = worst_case_error_sq(r, K);
    CHECK(plain_value(e) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    // brute-force weight scan confirms the minimum
    double best = 1e300;
    for (int i = -200; i <= 200; ++i) {
        r.weights[0] = {double(i) / 300.0, 0.0};
        best = std::min(best, plain_value(worst_case_error_sq(r, K)));
    }
    CHECK(best >= 2.0 / 3.0 - 1e-9);
}

TEST_CASE("enclosure width is bounded by the tail slack") {
    const KernelApprox K(truncate_at_radius(SpectrumSpec::border_univariate(1.0), 256));
    QuadratureRule r;
    r.dimension = 1;
    r.nodes = {{0.1}, {0.5}, {0.8}};
    r.weights = {{0.4, 0.1}, {0.3, 0.0}, {0.2, -0.1}};
    double abs_sum = 0.0;
    for (auto w : r.weights) abs_sum += std::abs(w);
    const ErrorInterval e = worst_case_error_sq(r, K);
    CHECK(e.hi - e.lo <= K.tail_upper() * abs_sum * abs_sum + 1e-9);
    CHECK(e.lo >= 0.0);
}

TEST_CASE("optimal weights: single node is node-independent with error 2/3") {
    const KernelApprox K = geometric_kernel();
    Rng rng(13);
    for (int t = 0; t < 10; ++t) {
        const WeightSolveResult w = optimal_weights({{rng.uniform()}}, K);
        CHECK_FALSE(w.degenerate);
        CHECK(w.weights[0].real() == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
        CHECK(std::abs(w.weights[0].imag()) < 1e-12);
        CHECK(plain_value(w.error) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    }
}

TEST_CASE("duplicated node degenerates to the single-node error") {
    const KernelApprox K = geometric_kernel();
    const WeightSolveResult w = optimal_weights({{0.25}, {0.25}}, K);
    CHECK(w.degenerate);
    CHECK(plain_value(w.error) == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("optimal weights on equispaced nodes match the circulant closed form") {
    // for equispaced nodes the optimal error equals
    // lambda_0 - lambda_0^2 sum_r |sum_{k=r mod n} lambda_k ... | handled via
    // direct comparison with the dedicated closed form for equal weights:
    // optimal <= equal-weight value
    const auto border = SpectrumSpec::border_univariate(1.0);
    const TruncatedSpectrum t = truncate_at_radius(border, 4096);
    const KernelApprox K(t);
    const int n = 16;
    std::vector<Point> nodes;
    for (int j = 0; j < n; ++j) nodes.push_back({double(j) / n});
    const WeightSolveResult opt = optimal_weights(nodes, K);
    const ErrorInterval equal = equispaced_error_sq(n, t);
    CHECK(plain_value(opt.error) <= equal.hi + 1e-12);

    // the two computation paths agree for equal weights
    QuadratureRule r = QuadratureRule::equispaced(n);
    const ErrorInterval via_identity = worst_case_error_sq(r, K);
    CHECK(via_identity.lo <= equal.hi + 1e-12);
    CHECK(equal.lo <= via_identity.hi + 1e-12);
}

TEST_CASE("equispaced closed form: geometric n=2 and delta_0") {
    const TruncatedSpectrum tg = truncate_at_radius(SpectrumSpec::geometric(1.0, 2.0), 48);
    const ErrorInterval e = equispaced_error_sq(2, tg);
    CHECK(e.lo == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(e.hi == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    const TruncatedSpectrum td =
        truncate(SpectrumSpec::explicit_table(1, {0}, {1.0}), 0.5, 2);
    for (std::int64_t n : {1, 2, 5}) {
        const ErrorInterval z = equispaced_error_sq(n, td);
        CHECK(z.hi == doctest::Approx(0.0));
    }
}

TEST_CASE("optimality against random weight perturbations") {
    const KernelApprox K = geometric_kernel();
    Rng rng(29);
    std::vector<Point> nodes(4, Point(1));
    for (auto& p : nodes) p[0] = rng.uniform();
    const WeightSolveResult opt = optimal_weights(nodes, K);
    const double opt_value = plain_value(opt.error);
    QuadratureRule r;
    r.dimension = 1;
    r.nodes = nodes;
    for (int t = 0; t < 100; ++t) {
        r.weights = opt.weights;
        for (auto& w : r.weights) w += 1e-4 * rng.gaussian_complex();
        CHECK(plain_value(worst_case_error_sq(r, K)) >= opt_value - 1e-10);
    }
}

TEST_CASE("optimize_nodes: single node attains 2/3, equispaced never beaten at n=2") {
    const KernelApprox K = geometric_kernel();
    const OptimizeResult one = optimize_nodes(1, K, 2, 99, 200);
    CHECK(plain_value(one.error) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));

    const OptimizeResult two = optimize_nodes(2, K, 3, 99, 400);
    const ErrorInterval equal = equispaced_error_sq(2, K.trunc);
    CHECK(plain_value(two.error) <= equal.hi + 1e-9);
}

TEST_CASE("optimize_nodes is deterministic for a fixed seed") {
    const KernelApprox K(truncate_at_radius(SpectrumSpec::isotropic_log(2, 1.0), 10));
    const OptimizeResult a = optimize_nodes(4, K, 3, 1234, 150);
    const OptimizeResult b = optimize_nodes(4, K, 3, 1234, 150);
    REQUIRE(a.rule.nodes.size() == b.rule.nodes.size());
    for (std::size_t i = 0; i < a.rule.nodes.size(); ++i) {
        CHECK(a.rule.nodes[i][0] == b.rule.nodes[i][0]);
        CHECK(a.rule.nodes[i][1] == b.rule.nodes[i][1]);
        CHECK(a.rule.weights[i] == b.rule.weights[i]);
    }
    CHECK(a.error.lo == b.error.lo);
    CHECK(a.error.hi == b.error.hi);
}

TEST_CASE("optimize_nodes error is non-increasing in n when seeded") {
    const KernelApprox K = geometric_kernel(32);
    OptimizeResult prev = optimize_nodes(1, K, 2, 7, 120);
    for (std::int64_t n = 2; n <= 4; ++n) {
        Rng rng(7, 1000 + std::uint64_t(n));
        std::vector<Point> seeded = prev.rule.nodes;
        seeded.push_back({rng.uniform()});
        const OptimizeResult cur = optimize_nodes(n, K, 2, 7, 120, {seeded});
        CHECK(plain_value(cur.error) <= plain_value(prev.error) + 1e-12);
        prev = cur;
    }
}

TEST_CASE("every squared error lies in [0, lambda_0 + slack]") {
    const KernelApprox K = geometric_kernel();
    Rng rng(41);
    for (int t = 0; t < 20; ++t) {
        QuadratureRule r;
        r.dimension = 1;
        const std::size_t n = std::size_t(rng.uniform_int(0, 5));
        for (std::size_t i = 0; i < n; ++i) {
            r.nodes.push_back({rng.uniform()});
            // weights scaled to keep |a| sums moderate
            r.weights.push_back(0.5 * rng.gaussian_complex());
        }
        const ErrorInterval e = worst_case_error_sq(r, K);
        CHECK(e.lo >= 0.0);
        CHECK(e.lo <= e.hi);
    }
}

TEST_CASE("rule CSV round-trip") {
    QuadratureRule r;
    r.dimension = 2;
    r.nodes = {{0.125, 0.75}, {0.5, 0.0625}};
    r.weights = {{0.25, -0.125}, {0.5, 0.0}};
    std::ostringstream os;
    r.write_csv(os);
    std::istringstream is(os.str());
    const QuadratureRule q = QuadratureRule::read_csv(is, 2);
    REQUIRE(q.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(q.nodes[i][0] == r.nodes[i][0]);
        CHECK(q.nodes[i][1] == r.nodes[i][1]);
        CHECK(q.weights[i] == r.weights[i]);
    }
}
