#include "pwce/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace pwce {

namespace {

double clamp0(double v) { return std::max(v, 0.0); }

// sum of lambda at the even points of the support (this is sum_k lambda_{2k}
// restricted to the truncation), small coordinates last
double even_point_mass(const TruncatedSpectrum& trunc) {
    double s = 0.0;
    for (std::size_t i = trunc.support.size(); i-- > 0;) {
        const auto p = trunc.support.point(i);
        bool even = true;
        for (auto v : p)
            if (v % 2 != 0) { even = false; break; }
        if (even) s += trunc.values[i];
    }
    return s;
}

}  // namespace

BoundJson BoundReport::to_json() const {
    BoundJson j;
    j["bound"] = bound_name;
    j["n"] = n;
    j["value"] = value;
    j["ingredients"] = ingredients;
    j["flags"] = flags;
    return j;
}

double bound_sum_of_squares(double norm_h_sq, double kappa, std::int64_t n) {
    if (kappa <= 0.0) throw std::invalid_argument("bound_sum_of_squares: kappa > 0 required");
    if (n < 0) throw std::invalid_argument("bound_sum_of_squares: n >= 0 required");
    return clamp0(norm_h_sq - double(n) / kappa);
}

BoundReport bound_convolution_square(const TruncatedSpectrum& trunc,
                                     const ConvSquareCertificate& cert, std::int64_t n) {
    if (!verify_convolution_square(trunc.spec, cert))
        throw std::invalid_argument(
            "bound_convolution_square: certificate verification failure");
    const double lam0 = trunc.lambda0();
    const Interval l1 = ell1_norm(trunc);
    const double value = clamp0(lam0 * (1.0 - double(n) * lam0 / l1.lo));

    BoundReport r;
    r.bound_name = "convsq";
    r.n = n;
    r.value = value;
    r.ingredients["lambda0"] = lam0;
    r.ingredients["l1_lo"] = l1.lo;
    r.ingredients["l1_hi"] = l1.hi;
    r.ingredients["factors"] = cert.factors.size();
    r.flags.push_back("requires convolution-square structure");
    return r;
}

BoundReport bound_via_minorant(const TruncatedSpectrum& trunc, std::int64_t n) {
    const MinorantResult m = convolution_square_minorant(trunc);
    const TruncatedSpectrum nu_trunc = truncate_at_radius(m.nu, 0);
    BoundReport r = bound_convolution_square(nu_trunc, m.certificate, n);
    r.ingredients["even_mass"] = m.even_mass;
    r.ingredients["atom"] = m.atom;
    r.flags.push_back("via convolution-square minorant of a norm-decreasing spectrum");
    return r;
}

BoundReport bound_norm_decreasing(const TruncatedSpectrum& trunc, std::int64_t n) {
    if (!trunc.spec.decreasing_norm().has_value())
        throw std::invalid_argument("bound_norm_decreasing: norm-decreasing spec required");
    const double lam0 = trunc.lambda0();
    double S = even_point_mass(trunc);
    if (trunc.dimension() == 1 && trunc.support.box_radius() >= 0)
        S += 2.0 * trunc.spec.progression_tail(2, trunc.support.box_radius() / 2).lo;
    const double value = clamp0(lam0 * (1.0 - 2.0 * double(n) * lam0 / (lam0 + S)));

    BoundReport r;
    r.bound_name = "normdec";
    r.n = n;
    r.value = value;
    r.ingredients["lambda0"] = lam0;
    r.ingredients["even_mass"] = S;
    return r;
}

double radius_rn(std::int64_t n, NormDescriptor norm, int d) {
    if (n < 1) throw std::invalid_argument("radius_rn: n >= 1 required");
    if (d < 1) throw std::invalid_argument("radius_rn: d >= 1 required");
    const std::int64_t need = 4 * n - 1;
    std::int64_t B = std::max<std::int64_t>(
        2, std::int64_t(std::ceil(std::pow(double(need), 1.0 / d))));
    while (true) {
        const IndexSet box = IndexSet::box(d, B);
        std::vector<double> norms;
        norms.reserve(box.size());
        for (std::size_t i = 0; i < box.size(); ++i) norms.push_back(2.0 * norm(box.point(i)));
        std::sort(norms.begin(), norms.end());
        if (std::int64_t(norms.size()) >= need && norms[std::size_t(need - 1)] <= 2.0 * double(B))
            return norms[std::size_t(need - 1)];
        B *= 2;
    }
}

BoundReport bound_rn_multivariate(const TruncatedSpectrum& trunc, std::int64_t n) {
    const auto nd = trunc.spec.decreasing_norm();
    if (!nd.has_value())
        throw std::invalid_argument("bound_rn_multivariate: norm-decreasing spec required");
    const int d = trunc.dimension();
    const double lam0 = trunc.lambda0();
    const double rn = radius_rn(n, *nd, d);

    // T = sum of lambda_{2k} over |2k| > r_n, in-support part plus a certified
    // lower tail in the univariate case
    double T = 0.0;
    std::vector<std::int32_t> dbl(d);
    for (std::size_t i = trunc.support.size(); i-- > 0;) {
        const auto p = trunc.support.point(i);
        bool even = true;
        for (auto v : p)
            if (v % 2 != 0) { even = false; break; }
        if (!even) continue;
        if ((*nd)(p) * 2.0 > rn) T += trunc.values[i];
    }
    if (d == 1 && trunc.support.box_radius() >= 0)
        T += 2.0 * trunc.spec.progression_tail(2, trunc.support.box_radius() / 2).lo;

    const double value = std::min(lam0 / 2.0, T / (8.0 * double(n)));

    BoundReport r;
    r.bound_name = "rn";
    r.n = n;
    r.value = value;
    r.ingredients["lambda0"] = lam0;
    r.ingredients["r_n"] = rn;
    r.ingredients["tail_even_mass"] = T;
    return r;
}

BoundReport bound_univariate(const TruncatedSpectrum& trunc, std::int64_t n) {
    if (trunc.dimension() != 1)
        throw std::invalid_argument("bound_univariate: univariate spectra only");
    if (!trunc.spec.univariate_monotone())
        throw std::invalid_argument(
            "bound_univariate: spectrum is not symmetric non-increasing on N_0");
    if (n < 1) throw std::invalid_argument("bound_univariate: n >= 1 required");

    const double lam0 = trunc.lambda0();
    double T = 0.0;
    if (trunc.spec.family() == SpectrumFamily::explicit_table) {
        const auto& t = trunc.spec.table();
        for (std::size_t i = 0; i < t.size(); ++i)
            if (std::int64_t(t.point(i)[0]) >= 4 * n) T += t.value(i);
    } else {
        const std::int64_t R = trunc.support.box_radius();
        for (std::int64_t k = R; k >= 4 * n; --k) T += trunc.spec.value1(k);
        T += trunc.spec.tail_from(std::max<std::int64_t>(R + 1, 4 * n)).lo;
    }
    const double value = std::min(lam0 / 2.0, T / (8.0 * double(n)));

    BoundReport r;
    r.bound_name = "univariate";
    r.n = n;
    r.value = value;
    r.ingredients["lambda0"] = lam0;
    r.ingredients["tail_4n"] = T;
    return r;
}

double bound_analytic(double c, double omega, std::int64_t n) {
    if (c <= 0.0 || omega <= 1.0)
        throw std::invalid_argument("bound_analytic: c > 0 and omega > 1 required");
    if (n < 1) throw std::invalid_argument("bound_analytic: n >= 1 required");
    const double t = std::pow(omega, -4.0 * double(n)) / (4.0 * double(n)) /
                     (1.0 - 1.0 / omega);
    return 0.5 * c * std::min(1.0, t);
}

std::optional<double> bound_curse_fd2(double tau, std::int64_t n, int d) {
    if (tau <= 0.0) throw std::invalid_argument("bound_curse_fd2: tau > 0 required");
    if (d < 2) throw std::invalid_argument("bound_curse_fd2: d >= 2 required");
    if (n < 0) throw std::invalid_argument("bound_curse_fd2: n >= 0 required");
    bool applies;
    if (d > 40) {
        applies = true;  // 3^d exceeds any representable 4n - 1
    } else {
        std::uint64_t p3 = 1;
        for (int i = 0; i < d; ++i) p3 *= 3;
        applies = std::uint64_t(4 * n - 1) <= p3;
    }
    if (!applies) return std::nullopt;
    return 1.0 / (2.0 * tau);
}

std::vector<std::string> applicable_bounds(const SpectrumSpec& spec) {
    std::vector<std::string> out;
    if (spec.dimension() == 1 && spec.univariate_monotone()) out.push_back("univariate");
    if (spec.family() == SpectrumFamily::mixed_log && spec.dimension() > 1)
        out.push_back("univariate");  // transfers through the first-coordinate factor
    if (spec.decreasing_norm().has_value()) {
        out.push_back("normdec");
        out.push_back("rn");
        out.push_back("convsq");
    }
    if (spec.family() == SpectrumFamily::geometric) out.push_back("analytic");
    return out;
}

BoundReport compute_bound(const std::string& name, const TruncatedSpectrum& trunc,
                          std::int64_t n) {
    const auto& spec = trunc.spec;
    if (name == "univariate") {
        if (spec.family() == SpectrumFamily::mixed_log && spec.dimension() > 1) {
            // a rule on [0,1]^d projects to its first coordinates, so the
            // univariate factor bound is a valid lower bound for the product
            const SpectrumSpec factor = SpectrumSpec::border_univariate(spec.beta);
            const std::int64_t R =
                std::max<std::int64_t>({trunc.support.box_radius(), 8 * n, 4096});
            BoundReport r = bound_univariate(truncate_at_radius(factor, R), n);
            r.flags.push_back("via the univariate factor of a mixed spectrum");
            return r;
        }
        return bound_univariate(trunc, n);
    }
    if (name == "normdec") return bound_norm_decreasing(trunc, n);
    if (name == "rn") return bound_rn_multivariate(trunc, n);
    if (name == "convsq") return bound_via_minorant(trunc, n);
    if (name == "analytic") {
        if (spec.family() != SpectrumFamily::geometric)
            throw std::invalid_argument("analytic bound: geometric spectra only");
        BoundReport r;
        r.bound_name = "analytic";
        r.n = n;
        r.value = bound_analytic(spec.c, spec.omega, n);
        r.ingredients["c"] = spec.c;
        r.ingredients["omega"] = spec.omega;
        return r;
    }
    throw std::invalid_argument("unknown bound selector: " + name);
}

}  // namespace pwce
