#include "doctest.h"

#include <cmath>

#include "pwce/bounds.hpp"
#include "pwce/quadrature.hpp"

using namespace pwce;

TEST_CASE("sum-of-squares bound") {
    CHECK(bound_sum_of_squares(1.0, 3.0, 0) == doctest::Approx(1.0));
    CHECK(bound_sum_of_squares(1.0, 3.0, 1) == doctest::Approx(2.0 / 3.0));
    CHECK(bound_sum_of_squares(1.0, 3.0, 3) == 0.0);
    CHECK(bound_sum_of_squares(1.0, 3.0, 100) == 0.0);
    CHECK_THROWS_AS(bound_sum_of_squares(1.0, 0.0, 1), std::invalid_argument);
}

TEST_CASE("convolution-square bound on mu*mu with mu the indicator of {-1,0,1}") {
    const auto mu = SpectrumSpec::explicit_table(1, {-1, 0, 1}, {1.0, 1.0, 1.0});
    const auto lam = convolve(mu, mu);  // (1,2,3,2,1), lambda_0 = 3, ||lambda||_1 = 9
    const TruncatedSpectrum t = truncate_at_radius(lam, 0);
    ConvSquareCertificate cert;
    cert.factors.push_back(mu);
    CHECK(bound_convolution_square(t, cert, 0).value == doctest::Approx(3.0));
    CHECK(bound_convolution_square(t, cert, 1).value == doctest::Approx(2.0));
    CHECK(bound_convolution_square(t, cert, 3).value == doctest::Approx(0.0));

    ConvSquareCertificate wrong;
    wrong.factors.push_back(SpectrumSpec::explicit_table(1, {0}, {1.0}));
    CHECK_THROWS_AS(bound_convolution_square(t, wrong, 1), std::invalid_argument);
}

TEST_CASE("norm-decreasing bound: geometric n=1 gives 1/4") {
    const TruncatedSpectrum t = truncate_at_radius(SpectrumSpec::geometric(1.0, 2.0), 48);
    CHECK(bound_norm_decreasing(t, 0).value == doctest::Approx(1.0));
    CHECK(bound_norm_decreasing(t, 1).value == doctest::Approx(0.25).epsilon(1e-10));
    const BoundReport r = bound_norm_decreasing(t, 1);
    CHECK(double(r.ingredients["even_mass"]) == doctest::Approx(5.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("radius_rn") {
    CHECK(radius_rn(1, NormDescriptor::euclidean(), 1) == doctest::Approx(2.0));
    for (std::int64_t n : {1, 2, 3, 5, 9})
        CHECK(radius_rn(n, NormDescriptor::euclidean(), 1) == doctest::Approx(double(4 * n - 2)));
    CHECK(radius_rn(2, NormDescriptor::sup(), 2) == doctest::Approx(2.0));
    // exhaustive-count oracle in d=2 euclidean: r_n is the (4n-1)-th smallest |2k|
    for (std::int64_t n : {1, 2, 4, 8}) {
        std::vector<double> norms;
        for (int a = -16; a <= 16; ++a)
            for (int b = -16; b <= 16; ++b) norms.push_back(2.0 * std::hypot(a, b));
        std::sort(norms.begin(), norms.end());
        CHECK(radius_rn(n, NormDescriptor::euclidean(), 2) ==
              doctest::Approx(norms[std::size_t(4 * n - 2)]));
    }
}

TEST_CASE("rn bound: delta_0 gives 0, isotropic positive below lambda_0/2") {
    const TruncatedSpectrum td =
        truncate(SpectrumSpec::explicit_table(1, {0}, {1.0}), 0.5, 2);
    CHECK(bound_rn_multivariate(td, 1).value == 0.0);

    const TruncatedSpectrum ti = truncate_at_radius(SpectrumSpec::isotropic_log(2, 1.0), 64);
    const BoundReport r = bound_rn_multivariate(ti, 4);
    CHECK(r.value > 0.0);
    CHECK(r.value <= ti.lambda0() / 2.0);
}

TEST_CASE("rn bound reduces to the univariate bound up to symmetric pairing (d=1)") {
    const TruncatedSpectrum t = truncate_at_radius(SpectrumSpec::border_univariate(1.0), 65536);
    const std::int64_t n = 4;
    const BoundReport uni = bound_univariate(t, n);
    const BoundReport rn = bound_rn_multivariate(t, n);
    // sum_{|2k| > 4n-2} lambda_{2k} >= sum_{k >= 4n} lambda_k, and the two only
    // differ by the pairing lambda_{2k} vs lambda_{2k+1}
    CHECK(rn.value >= uni.value * (1.0 - 1e-12));
    CHECK(rn.value <= uni.value * 1.10);
}

TEST_CASE("univariate bound: geometric n=1 gives 1/64, delta_0 gives 0") {
    const TruncatedSpectrum tg = truncate_at_radius(SpectrumSpec::geometric(1.0, 2.0), 64);
    CHECK(bound_univariate(tg, 1).value == doctest::Approx(1.0 / 64.0).epsilon(1e-12));

    const TruncatedSpectrum tb = truncate_at_radius(SpectrumSpec::border_univariate(1.0), 4096);
    CHECK(bound_univariate(tb, 1).value > 0.0);

    const TruncatedSpectrum td =
        truncate(SpectrumSpec::explicit_table(1, {0}, {1.0}), 0.5, 2);
    CHECK(bound_univariate(td, 1).value == 0.0);

    const auto bad = SpectrumSpec::explicit_table(1, {-1, 0, 1}, {1.0, 0.1, 1.0});
    CHECK_THROWS_AS(bound_univariate(truncate(bad, 0.5, 4), 1), std::invalid_argument);
}

TEST_CASE("analytic bound closed form and consistency with the univariate bound") {
    CHECK(bound_analytic(1.0, 2.0, 1) == doctest::Approx(1.0 / 64.0).epsilon(1e-14));
    CHECK(bound_analytic(2.0, 2.0, 1) == doctest::Approx(1.0 / 32.0).epsilon(1e-14));
    double prev = 1e300;
    for (std::int64_t n = 1; n <= 12; ++n) {
        const double v = bound_analytic(1.0, 2.0, n);
        CHECK(v < prev);
        prev = v;
    }
    for (double c : {1.0, 2.0})
        for (double w : {2.0, 3.0}) {
            const TruncatedSpectrum t = truncate_at_radius(SpectrumSpec::geometric(c, w), 96);
            for (std::int64_t n = 1; n <= 8; ++n)
                CHECK(bound_univariate(t, n).value ==
                      doctest::Approx(bound_analytic(c, w, n)).epsilon(1e-12));
        }
}

TEST_CASE("curse bound for F_d^2") {
    CHECK(bound_curse_fd2(1.0, 2, 2).value() == doctest::Approx(0.5));
    CHECK_FALSE(bound_curse_fd2(1.0, 3, 2).has_value());  // 11 > 9
    CHECK(bound_curse_fd2(2.0, 10000, 10).value() == doctest::Approx(0.25));
    CHECK_THROWS_AS(bound_curse_fd2(0.0, 1, 2), std::invalid_argument);
    CHECK_THROWS_AS(bound_curse_fd2(1.0, 1, 1), std::invalid_argument);
}

TEST_CASE("minorant route matches the norm-decreasing bound direction") {
    const TruncatedSpectrum t = truncate_at_radius(SpectrumSpec::geometric(1.0, 2.0), 48);
    // tightness at n = 1 on convolution squares: the minorant certificate
    // bound uses nu with nu_0 = lambda_0 and exact ||nu||_1
    const BoundReport via = bound_via_minorant(t, 1);
    CHECK(via.value > 0.0);
    CHECK(via.value <= t.lambda0());
    // never better than the single-node optimal error
    const KernelApprox K(t);
    const WeightSolveResult w = optimal_weights({{0.0}}, K);
    CHECK(via.value <= w.error.hi + 1e-9);
}

TEST_CASE("safe direction: enlarging the support never decreases a bound") {
    for (const auto& spec :
         {SpectrumSpec::geometric(1.0, 2.0), SpectrumSpec::border_univariate(1.0)}) {
        const TruncatedSpectrum small = truncate_at_radius(spec, 512);
        const TruncatedSpectrum large = truncate_at_radius(spec, 2048);
        for (const auto& name : applicable_bounds(spec))
            for (std::int64_t n : {1, 2, 4}) {
                const double a = compute_bound(name, small, n).value;
                const double b = compute_bound(name, large, n).value;
                CHECK(b >= a - 1e-12 * std::max(1.0, a));
            }
    }
}

TEST_CASE("bound applicability per family") {
    auto has = [](const std::vector<std::string>& v, const std::string& s) {
        return std::find(v.begin(), v.end(), s) != v.end();
    };
    const auto geo = applicable_bounds(SpectrumSpec::geometric(1.0, 2.0));
    CHECK(has(geo, "univariate"));
    CHECK(has(geo, "normdec"));
    CHECK(has(geo, "rn"));
    CHECK(has(geo, "convsq"));
    CHECK(has(geo, "analytic"));
    const auto mixed = applicable_bounds(SpectrumSpec::mixed_log(2, 1.0));
    CHECK(has(mixed, "univariate"));
    CHECK_FALSE(has(mixed, "normdec"));
    const auto iso = applicable_bounds(SpectrumSpec::isotropic_log(2, 1.0));
    CHECK(has(iso, "normdec"));
    CHECK_FALSE(has(iso, "univariate"));
    CHECK_FALSE(has(iso, "analytic"));
    CHECK_THROWS_AS(
        compute_bound("no-such-bound", truncate_at_radius(SpectrumSpec::geometric(1.0, 2.0), 8), 1),
        std::invalid_argument);
}

TEST_CASE("bound report serializes its ingredients") {
    const TruncatedSpectrum t = truncate_at_radius(SpectrumSpec::geometric(1.0, 2.0), 48);
    const BoundJson j = bound_norm_decreasing(t, 2).to_json();
    CHECK(j["bound"] == "normdec");
    CHECK(j["n"] == 2);
    CHECK(j["ingredients"].contains("even_mass"));
}
