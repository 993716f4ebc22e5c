#include "doctest.h"

#include <cmath>
#include <sstream>

#include "pwce/spectrum.hpp"

using namespace pwce;

namespace {

SpectrumSpec delta0() {
    return SpectrumSpec::explicit_table(1, {0}, {1.0});
}

double table_l1(const SpectrumSpec& s) {
    double m = 0.0;
    for (std::size_t i = 0; i < s.table().size(); ++i) m += s.table().value(i);
    return m;
}

}  // namespace

TEST_CASE("lambda_value on the built-in families") {
    const auto border = SpectrumSpec::border_univariate(1.0);
    CHECK(border.value1(0) == doctest::Approx(1.0));  // log(e + 0) = 1
    CHECK(border.value1(1) == doctest::Approx(0.2899128432862677).epsilon(1e-12));
    CHECK(border.value1(-1) == border.value1(1));

    const auto geo = SpectrumSpec::geometric(1.0, 2.0);
    CHECK(geo.value1(3) == doctest::Approx(0.125));
    CHECK(geo.value1(0) == 1.0);

    const auto mixed = SpectrumSpec::mixed_log(2, 1.0);
    const std::int32_t origin[2] = {0, 0};
    CHECK(mixed.value({origin, 2}) == doctest::Approx(1.0));
    const std::int32_t k12[2] = {1, 2};
    const std::int32_t k21[2] = {2, 1};
    CHECK(mixed.value({k12, 2}) == doctest::Approx(mixed.value({k21, 2})));

    CHECK_THROWS_AS(SpectrumSpec::border_univariate(0.5), std::invalid_argument);
    CHECK_THROWS_AS(SpectrumSpec::geometric(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(SpectrumSpec::sobolev_isotropic(2, 0.9), std::invalid_argument);
}

TEST_CASE("symmetry under k -> -k for every family") {
    const std::vector<SpectrumSpec> specs = {
        SpectrumSpec::border_univariate(0.8),   SpectrumSpec::isotropic_log(2, 1.0),
        SpectrumSpec::mixed_log(3, 1.0),        SpectrumSpec::sobolev_isotropic(2, 1.5),
        SpectrumSpec::sobolev_mixed(2, 1.0),    SpectrumSpec::geometric(2.0, 3.0),
        SpectrumSpec::norm_decreasing(2, NormDescriptor::sup(),
                                      {RadialProfile::Kind::exponential, 1.0, 2.0})};
    Rng rng(42);
    for (const auto& spec : specs) {
        for (int t = 0; t < 50; ++t) {
            std::vector<std::int32_t> k(std::size_t(spec.dimension()));
            std::vector<std::int32_t> neg(k.size());
            for (std::size_t i = 0; i < k.size(); ++i) {
                k[i] = std::int32_t(rng.uniform_int(-30, 30));
                neg[i] = -k[i];
            }
            CHECK(spec.value(k) == spec.value(neg));
        }
    }
}

TEST_CASE("norm-decreasing monotonicity on sampled pairs") {
    const std::vector<SpectrumSpec> specs = {
        SpectrumSpec::isotropic_log(2, 1.0), SpectrumSpec::geometric(1.0, 2.0),
        SpectrumSpec::norm_decreasing(2, NormDescriptor::taxicab(),
                                      {RadialProfile::Kind::power_log, 0, 0, 3.0, 1.0})};
    Rng rng(7);
    for (const auto& spec : specs) {
        const auto nd = spec.decreasing_norm();
        REQUIRE(nd.has_value());
        for (int t = 0; t < 200; ++t) {
            std::vector<std::int32_t> k(std::size_t(spec.dimension())),
                l(std::size_t(spec.dimension()));
            for (std::size_t i = 0; i < k.size(); ++i) {
                k[i] = std::int32_t(rng.uniform_int(-20, 20));
                l[i] = std::int32_t(rng.uniform_int(-20, 20));
            }
            if ((*nd)(k) >= (*nd)(l)) CHECK(spec.value(k) <= spec.value(l) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("index set enumeration order: shells, lex inside") {
    const IndexSet b1 = IndexSet::box(1, 2);
    REQUIRE(b1.size() == 5);
    CHECK(b1.point(0)[0] == 0);
    CHECK(b1.point(1)[0] == -1);
    CHECK(b1.point(2)[0] == 1);
    CHECK(b1.point(3)[0] == -2);
    CHECK(b1.point(4)[0] == 2);

    const IndexSet b2 = IndexSet::box(2, 1);
    REQUIRE(b2.size() == 9);
    CHECK((b2.point(0)[0] == 0 && b2.point(0)[1] == 0));
    CHECK((b2.point(1)[0] == -1 && b2.point(1)[1] == 0));
    CHECK((b2.point(2)[0] == 0 && b2.point(2)[1] == -1));
    CHECK((b2.point(3)[0] == 0 && b2.point(3)[1] == 1));
    CHECK((b2.point(4)[0] == 1 && b2.point(4)[1] == 0));
    CHECK((b2.point(5)[0] == -1 && b2.point(5)[1] == -1));

    CHECK_THROWS_AS(IndexSet::explicit_set(1, {1, 1}), std::invalid_argument);
}

TEST_CASE("truncate: geometric reaches 1e-12 within radius 42") {
    const auto geo = SpectrumSpec::geometric(1.0, 2.0);
    const TruncatedSpectrum t = truncate(geo, 1e-12, 100);
    CHECK(t.support.box_radius() <= 42);
    CHECK(t.tail_upper <= 1e-12 * t.mass);
    // exact tail is 2^{1-R}
    const double exact = std::pow(2.0, 1.0 - double(t.support.box_radius()));
    CHECK(t.tail_upper == doctest::Approx(exact).epsilon(1e-9));

    const Interval l1 = ell1_norm(t);
    CHECK(l1.lo <= 3.0);
    CHECK(l1.hi >= 3.0 * (1.0 - 1e-12));
    CHECK(3.0 - l1.lo < 1e-9);
}

TEST_CASE("truncate: explicit support unchanged, tail 0") {
    const auto e = SpectrumSpec::explicit_table(1, {-1, 0, 1}, {0.5, 1.0, 0.5});
    const TruncatedSpectrum t = truncate(e, 0.5, 100);
    CHECK(t.support.size() == 3);
    CHECK(t.tail_upper == 0.0);
}

TEST_CASE("ell1 of the explicit delta_0 is [1,1]") {
    const TruncatedSpectrum t = truncate(delta0(), 0.5, 10);
    const Interval l1 = ell1_norm(t);
    CHECK(l1.lo == doctest::Approx(1.0));
    CHECK(l1.hi == doctest::Approx(1.0));
}

TEST_CASE("truncate: border tolerance failure reports the achieved tail") {
    const auto border = SpectrumSpec::border_univariate(1.0);
    try {
        truncate(border, 1e-3, 100000);
        FAIL("expected TruncationError");
    } catch (const TruncationError& err) {
        CHECK(err.achieved_tail > 0.0);
        CHECK(err.radius == 100000);
        CHECK(std::string(err.what()).find("achieved") != std::string::npos);
    }
    // a coarse tolerance is attainable
    const TruncatedSpectrum ok = truncate(border, 0.4, 100000);
    CHECK(ok.tail_upper <= 0.4 * ok.mass);
}

TEST_CASE("truncate refinement is monotone") {
    for (const auto& spec :
         {SpectrumSpec::border_univariate(1.0), SpectrumSpec::isotropic_log(2, 1.0)}) {
        const TruncatedSpectrum a = truncate_at_radius(spec, 64);
        const TruncatedSpectrum b = truncate_at_radius(spec, 128);
        CHECK(b.tail_upper <= a.tail_upper);
        CHECK(b.mass >= a.mass);
        // enlarging the support keeps mass + tail a valid upper bound
        CHECK(b.mass + b.tail_upper <= a.mass + a.tail_upper + 1e-12 * a.mass);
    }
}

TEST_CASE("tail enclosures against partial-sum oracles") {
    const auto border = SpectrumSpec::border_univariate(1.0);
    for (std::int64_t K : {1, 5, 50, 1000}) {
        double partial = 0.0;
        const std::int64_t M = 2000000;
        for (std::int64_t k = M; k >= K; --k) partial += border.value1(k);
        const Interval far = border.tail_from(M + 1);
        const Interval t = border.tail_from(K);
        CHECK(t.lo <= partial + far.hi);
        CHECK(t.hi >= partial + far.lo);
        CHECK(t.hi >= partial);  // the partial sum alone is a lower bound
    }
    const auto geo = SpectrumSpec::geometric(1.0, 2.0);
    double brute = 0.0;
    for (std::int64_t k = 200; k >= 7; --k) brute += geo.value1(k);
    CHECK(geo.tail_from(7).lo == doctest::Approx(brute).epsilon(1e-13));
    CHECK(geo.tail_from(7).hi == doctest::Approx(brute).epsilon(1e-13));
}

TEST_CASE("progression tails against partial-sum oracles") {
    const auto border = SpectrumSpec::border_univariate(1.0);
    const std::int64_t stride = 1024, M = 16, far_m = 300000;
    double partial = 0.0;
    for (std::int64_t m = far_m; m > M; --m) partial += border.value1(stride * m);
    const Interval far = border.progression_tail(stride, far_m);
    const Interval t = border.progression_tail(stride, M);
    CHECK(t.lo <= partial + far.hi);
    CHECK(t.hi >= partial + far.lo);

    const auto geo = SpectrumSpec::geometric(1.0, 2.0);
    // sum_{m>0} 2^{-2m} = 1/3
    CHECK(geo.progression_tail(2, 0).lo == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(geo.progression_tail(2, 0).hi == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("multivariate box tails majorize brute-force sums") {
    const auto iso = SpectrumSpec::isotropic_log(2, 1.0);
    const auto mixed = SpectrumSpec::mixed_log(2, 1.0);
    const std::int64_t R = 16, big = 400;
    for (const auto& spec : {iso, mixed}) {
        double outside = 0.0;
        for (std::int64_t k1 = -big; k1 <= big; ++k1)
            for (std::int64_t k2 = -big; k2 <= big; ++k2) {
                if (std::abs(k1) <= R && std::abs(k2) <= R) continue;
                const std::int32_t k[2] = {std::int32_t(k1), std::int32_t(k2)};
                outside += spec.value({k, 2});
            }
        CHECK(spec.box_tail(R).hi >= outside);
    }
}

TEST_CASE("convolution: identity, hand example, l1 multiplicativity") {
    const auto d0 = delta0();
    const auto id2 = convolve(d0, d0);
    CHECK(table_l1(id2) == doctest::Approx(1.0));
    CHECK(id2.value1(0) == doctest::Approx(1.0));

    const auto ind = SpectrumSpec::explicit_table(1, {-1, 0, 1}, {1.0, 1.0, 1.0});
    const auto sq = convolve(ind, ind);
    CHECK(sq.value1(-2) == doctest::Approx(1.0));
    CHECK(sq.value1(-1) == doctest::Approx(2.0));
    CHECK(sq.value1(0) == doctest::Approx(3.0));
    CHECK(sq.value1(1) == doctest::Approx(2.0));
    CHECK(sq.value1(2) == doctest::Approx(1.0));
    CHECK(sq.value1(3) == 0.0);

    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        std::vector<std::int32_t> pa, pb;
        std::vector<double> va, vb;
        const int na = int(rng.uniform_int(1, 6)), nb = int(rng.uniform_int(1, 6));
        for (int i = 0; i < na; ++i) {
            std::int32_t k = std::int32_t(rng.uniform_int(-8, 8));
            if (std::find(pa.begin(), pa.end(), k) != pa.end()) continue;
            pa.push_back(k);
            va.push_back(rng.uniform(0.0, 2.0));
        }
        for (int i = 0; i < nb; ++i) {
            std::int32_t k = std::int32_t(rng.uniform_int(-8, 8));
            if (std::find(pb.begin(), pb.end(), k) != pb.end()) continue;
            pb.push_back(k);
            vb.push_back(rng.uniform(0.0, 2.0));
        }
        const auto a = SpectrumSpec::explicit_table(1, pa, va);
        const auto b = SpectrumSpec::explicit_table(1, pb, vb);
        CHECK(table_l1(convolve(a, b)) ==
              doctest::Approx(table_l1(a) * table_l1(b)).epsilon(1e-12));
    }
}

TEST_CASE("dimension mismatch in convolve") {
    const auto a = delta0();
    const auto b = SpectrumSpec::explicit_table(2, {0, 0}, {1.0});
    CHECK_THROWS_AS(convolve(a, b), std::invalid_argument);
}

TEST_CASE("convolution-square minorant: geometric") {
    const auto geo = SpectrumSpec::geometric(1.0, 2.0);
    const TruncatedSpectrum t = truncate_at_radius(geo, 48);
    const MinorantResult m = convolution_square_minorant(t);
    CHECK(m.nu.lambda0() == doctest::Approx(1.0).epsilon(1e-12));
    // even mass 5/3, so ||nu||_1 >= (1 + 5/3)/2 = 4/3
    CHECK(m.even_mass == doctest::Approx(5.0 / 3.0).epsilon(1e-9));
    CHECK(table_l1(m.nu) >= 4.0 / 3.0 - 1e-9);
    CHECK(verify_convolution_square(m.nu, m.certificate));
}

TEST_CASE("convolution-square minorant: delta_0 maps to itself") {
    const TruncatedSpectrum t = truncate(delta0(), 0.5, 4);
    const MinorantResult m = convolution_square_minorant(t);
    CHECK(m.nu.table().size() == 1);
    CHECK(m.nu.lambda0() == doctest::Approx(1.0));
}

TEST_CASE("convolution-square minorant: isotropic pointwise domination") {
    const auto iso = SpectrumSpec::isotropic_log(2, 1.0);
    const TruncatedSpectrum t = truncate_at_radius(iso, 12);
    const MinorantResult m = convolution_square_minorant(t);  // asserts nu <= lambda internally
    CHECK(table_l1(m.nu) >= (iso.lambda0() + m.even_mass) / 2.0 - 1e-12);
    const auto& nt = m.nu.table();
    for (std::size_t i = 0; i < nt.size(); ++i)
        CHECK(nt.value(i) <= iso.value(nt.point(i)) * (1.0 + 1e-9));
}

TEST_CASE("minorant rejects spectra that are not norm-decreasing") {
    // increasing-away-from-zero explicit table, univariate monotone fails
    const auto bad = SpectrumSpec::explicit_table(1, {-1, 0, 1}, {1.0, 0.1, 1.0});
    const TruncatedSpectrum t = truncate(bad, 0.5, 4);
    CHECK_FALSE(bad.univariate_monotone());
    CHECK_THROWS(convolution_square_minorant(t));
}

TEST_CASE("serialization round-trips within 1 ulp") {
    std::vector<SpectrumSpec> specs = {
        SpectrumSpec::border_univariate(1.25),
        SpectrumSpec::geometric(0.7331264518373, 2.718),
        SpectrumSpec::mixed_log(3, 0.75),
        SpectrumSpec::norm_decreasing(2, NormDescriptor::sup(),
                                      {RadialProfile::Kind::power_log, 0, 0, 2.5, 1.0}),
        SpectrumSpec::explicit_table(2, {0, 0, 1, -1}, {0.123456789012345678, 1.0})};
    Rng rng(3);
    for (const auto& s : specs) {
        std::ostringstream os;
        s.write(os);
        std::istringstream is(os.str());
        const SpectrumSpec r = SpectrumSpec::read(is);
        CHECK(r.dimension() == s.dimension());
        CHECK(r.family() == s.family());
        for (int t = 0; t < 20; ++t) {
            std::vector<std::int32_t> k(std::size_t(s.dimension()));
            for (auto& v : k) v = std::int32_t(rng.uniform_int(-5, 5));
            CHECK(r.value(k) == s.value(k));
        }
    }
}

TEST_CASE("sublevel truncation certifies the out-of-support maximum") {
    const auto mixed = SpectrumSpec::mixed_log(2, 1.0);
    const TruncatedSpectrum t = truncate_sublevel(mixed, 1e-4);
    CHECK(t.support.size() > 100);
    for (double v : t.values) CHECK(v >= 1e-4);
    CHECK(t.out_max <= 1e-4 * (1.0 + 1e-8));
    // tail upper covers a brute-force outside sum on a window
    double outside = 0.0;
    const std::int64_t big = 300;
    for (std::int64_t k1 = -big; k1 <= big; ++k1)
        for (std::int64_t k2 = -big; k2 <= big; ++k2) {
            const std::int32_t k[2] = {std::int32_t(k1), std::int32_t(k2)};
            const double v = mixed.value({k, 2});
            if (v < 1e-4) outside += v;
        }
    CHECK(t.tail_upper >= outside * 0.999);
}

TEST_CASE("parallel and serial table fills agree exactly") {
    const auto iso = SpectrumSpec::isotropic_log(2, 1.0);
    const IndexSet box = IndexSet::box(2, 20);
    const auto serial = reference::fill_values(iso, box);
    const auto parallel = detail::fill_values_parallel(iso, box);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i] == parallel[i]);
}
