#include "pwce/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace pwce {

namespace {

constexpr double kE = 2.718281828459045235360287471353;

// univariate border factor f(x) = (1+x)^{-1} log^{-2 beta}(e+x), x >= 0
double border_factor(double x, double beta) {
    return 1.0 / ((1.0 + x) * std::pow(std::log(kE + x), 2.0 * beta));
}

// integral of the minorant (e+x)^{-1} log^{-2 beta}(e+x) over [y, inf)
double border_tail_integral(double y, double beta) {
    return std::pow(std::log(kE + y), 1.0 - 2.0 * beta) / (2.0 * beta - 1.0);
}

// f <= ratio * minorant on [y, inf)
double border_ratio(double y) { return (kE + y) / (1.0 + y); }

// enclosure of sum_{k >= K} border_factor(k), K >= 1
Interval border_geq(double K, double beta) {
    const double lo = border_tail_integral(K, beta);
    const double hi = border_factor(K, beta) + border_ratio(K) * lo;
    return {lo, hi};
}

double sobolev_factor(double x, double s) { return std::pow(1.0 + x * x, -s); }

// enclosure of sum_{k >= K} (1+k^2)^{-s}, K >= 1, s > 1/2
Interval sobolev_geq(double K, double s) {
    const double lo = std::pow(1.0 + K, 1.0 - 2.0 * s) / (2.0 * s - 1.0);
    const double hi = sobolev_factor(K, s) + std::pow(K, 1.0 - 2.0 * s) / (2.0 * s - 1.0);
    return {lo, hi};
}

// exact sum_{k >= K} w^{-k}
double geometric_geq(double K, double omega) {
    return std::pow(omega, -K) / (1.0 - 1.0 / omega);
}

// generic power-log profile sum_{k >= K} (1+k)^{-a} log^{-2b}(e+k); upper only
// unless a == 1 (border form).
Interval powlog_geq(double K, double a, double b) {
    if (a == 1.0) return border_geq(K, b);
    const double hi = std::pow(1.0 + K, -a) * std::pow(std::log(kE + K), -2.0 * b) +
                      std::pow(1.0 + K, 1.0 - a) / (a - 1.0);
    return {0.0, hi};
}

// sum over |k| <= R of a univariate factor, small terms first
template <typename F>
double univ_box_mass(std::int64_t R, F&& f) {
    double s = 0.0;
    for (std::int64_t k = R; k >= 1; --k) s += 2.0 * f(double(k));
    return s + f(0.0);
}

// 2 d 3^{d-1}: shell count majorant factor, #shell(m) <= 2 d (3m)^{d-1}
double shell_factor(int d) { return 2.0 * d * std::pow(3.0, d - 1); }

// max over x >= 1 of log^{2b}(e+x) / sqrt(x), with a safety factor
double log_sq_growth_constant(double b) {
    const double x_hi = std::max(1e12, std::exp(5.0 * std::max(1.0, 2.0 * b)));
    const double lf = std::log(1.0), hf = std::log(x_hi);
    double best = 0.0;
    const int grid = 4000;
    for (int i = 0; i <= grid; ++i) {
        const double x = std::exp(lf + (hf - lf) * double(i) / grid);
        best = std::max(best, std::pow(std::log(kE + x), 2.0 * b) / std::sqrt(x));
    }
    return best * 1.05;
}

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

double RadialProfile::operator()(double r) const {
    if (kind == Kind::exponential) return c * std::pow(omega, -r);
    return std::pow(1.0 + r, -a) * std::pow(std::log(kE + r), -2.0 * b);
}

// ---------------------------------------------------------------------------
// ExplicitTable
// ---------------------------------------------------------------------------

namespace {

// (|k|_2^2 as integer, then lex) comparator on flattened points
struct PointLess {
    const std::vector<std::int32_t>* pts;
    int d;
    bool operator()(std::size_t i, std::size_t j) const {
        const std::int32_t* a = pts->data() + i * d;
        const std::int32_t* b = pts->data() + j * d;
        std::int64_t na = 0, nb = 0;
        for (int t = 0; t < d; ++t) {
            na += std::int64_t(a[t]) * a[t];
            nb += std::int64_t(b[t]) * b[t];
        }
        if (na != nb) return na < nb;
        for (int t = 0; t < d; ++t)
            if (a[t] != b[t]) return a[t] < b[t];
        return false;
    }
    bool equal(std::size_t i, std::size_t j) const {
        const std::int32_t* a = pts->data() + i * d;
        const std::int32_t* b = pts->data() + j * d;
        for (int t = 0; t < d; ++t)
            if (a[t] != b[t]) return false;
        return true;
    }
};

std::size_t hash_point(std::span<const std::int32_t> k) {
    std::size_t h = 1469598103934665603ull;
    for (auto v : k) {
        h ^= std::size_t(std::uint32_t(v));
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

ExplicitTable::ExplicitTable(int dim, std::vector<std::int32_t> flat, std::vector<double> values)
    : dim_(dim) {
    require(dim >= 1, "explicit table: dimension must be >= 1");
    require(flat.size() == values.size() * std::size_t(dim),
            "explicit table: point/value count mismatch");
    for (double v : values) require(v >= 0.0, "explicit table: negative value");

    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    PointLess less{&flat, dim};
    std::sort(order.begin(), order.end(), less);
    for (std::size_t i = 1; i < n; ++i)
        require(!less.equal(order[i - 1], order[i]), "explicit table: duplicate point");

    points_.resize(flat.size());
    values_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::copy_n(flat.data() + order[i] * dim, dim, points_.data() + i * dim);
        values_[i] = values[order[i]];
    }
    for (auto v : points_) max_abs_coord_ = std::max<std::int64_t>(max_abs_coord_, std::abs(std::int64_t(v)));

    // open-addressing-free bucket table
    const std::size_t nbuckets = std::max<std::size_t>(16, 2 * n);
    bucket_head_.assign(nbuckets + 1, 0);
    std::vector<std::size_t> bucket(n);
    for (std::size_t i = 0; i < n; ++i) {
        bucket[i] = hash_point(point(i)) % nbuckets;
        ++bucket_head_[bucket[i] + 1];
    }
    for (std::size_t b = 0; b < nbuckets; ++b) bucket_head_[b + 1] += bucket_head_[b];
    order_.resize(n);
    std::vector<std::size_t> cursor(bucket_head_.begin(), bucket_head_.end() - 1);
    for (std::size_t i = 0; i < n; ++i) order_[cursor[bucket[i]]++] = i;
}

std::size_t ExplicitTable::bucket_of(std::span<const std::int32_t> k) const {
    return hash_point(k) % (bucket_head_.size() - 1);
}

double ExplicitTable::lookup(std::span<const std::int32_t> k) const {
    if (values_.empty()) return 0.0;
    const std::size_t b = bucket_of(k);
    for (std::size_t j = bucket_head_[b]; j < bucket_head_[b + 1]; ++j) {
        const std::size_t i = order_[j];
        const auto p = point(i);
        bool eq = true;
        for (int t = 0; t < dim_; ++t)
            if (p[t] != k[t]) { eq = false; break; }
        if (eq) return values_[i];
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// SpectrumSpec
// ---------------------------------------------------------------------------

SpectrumSpec SpectrumSpec::border_univariate(double beta) {
    require(beta > 0.5, "border spectrum: beta > 1/2 required");
    SpectrumSpec s;
    s.family_ = SpectrumFamily::border_univariate;
    s.dim_ = 1;
    s.beta = beta;
    return s;
}

SpectrumSpec SpectrumSpec::isotropic_log(int d, double beta) {
    require(d >= 1, "isotropic spectrum: d >= 1 required");
    require(beta > 0.5, "isotropic spectrum: beta > 1/2 required");
    SpectrumSpec s;
    s.family_ = SpectrumFamily::isotropic_log;
    s.dim_ = d;
    s.beta = beta;
    return s;
}

SpectrumSpec SpectrumSpec::mixed_log(int d, double beta) {
    require(d >= 1, "mixed spectrum: d >= 1 required");
    require(beta > 0.5, "mixed spectrum: beta > 1/2 required");
    SpectrumSpec s;
    s.family_ = SpectrumFamily::mixed_log;
    s.dim_ = d;
    s.beta = beta;
    return s;
}

SpectrumSpec SpectrumSpec::sobolev_isotropic(int d, double s_) {
    require(d >= 1, "sobolev spectrum: d >= 1 required");
    require(s_ > 0.5 * d, "sobolev isotropic spectrum: s > d/2 required");
    SpectrumSpec s;
    s.family_ = SpectrumFamily::sobolev_isotropic;
    s.dim_ = d;
    s.s = s_;
    return s;
}

SpectrumSpec SpectrumSpec::sobolev_mixed(int d, double s_) {
    require(d >= 1, "sobolev mixed spectrum: d >= 1 required");
    require(s_ > 0.5, "sobolev mixed spectrum: s > 1/2 required");
    SpectrumSpec s;
    s.family_ = SpectrumFamily::sobolev_mixed;
    s.dim_ = d;
    s.s = s_;
    return s;
}

SpectrumSpec SpectrumSpec::geometric(double c, double omega) {
    require(c > 0.0, "geometric spectrum: c > 0 required");
    require(omega > 1.0, "geometric spectrum: omega > 1 required");
    SpectrumSpec s;
    s.family_ = SpectrumFamily::geometric;
    s.dim_ = 1;
    s.c = c;
    s.omega = omega;
    return s;
}

SpectrumSpec SpectrumSpec::norm_decreasing(int d, NormDescriptor norm, RadialProfile g) {
    require(d >= 1, "norm-decreasing spectrum: d >= 1 required");
    require(norm.p >= 1.0, "norm-decreasing spectrum: p >= 1 required");
    if (g.kind == RadialProfile::Kind::exponential) {
        require(g.c > 0.0 && g.omega > 1.0, "norm-decreasing spectrum: need c > 0, omega > 1");
    } else {
        require(g.b >= 0.0, "norm-decreasing spectrum: b >= 0 required");
        require(g.a > double(d) || (g.a == double(d) && g.b > 0.5),
                "norm-decreasing spectrum: need a > d, or a = d with b > 1/2");
    }
    SpectrumSpec s;
    s.family_ = SpectrumFamily::norm_decreasing;
    s.dim_ = d;
    s.norm = norm;
    s.profile = g;
    return s;
}

SpectrumSpec SpectrumSpec::explicit_table(int d, std::vector<std::int32_t> flat,
                                          std::vector<double> values) {
    SpectrumSpec s;
    s.family_ = SpectrumFamily::explicit_table;
    s.dim_ = d;
    s.table_ = std::make_shared<ExplicitTable>(d, std::move(flat), std::move(values));
    return s;
}

const ExplicitTable& SpectrumSpec::table() const {
    require(table_ != nullptr, "spectrum is not explicit");
    return *table_;
}

double SpectrumSpec::value(std::span<const std::int32_t> k) const {
    if (int(k.size()) != dim_) throw std::invalid_argument("lambda_value: dimension mismatch");
    switch (family_) {
        case SpectrumFamily::border_univariate:
            return border_factor(std::abs(double(k[0])), beta);
        case SpectrumFamily::isotropic_log: {
            const double r = NormDescriptor::euclidean()(k);
            return std::pow(1.0 + r, -double(dim_)) * std::pow(std::log(kE + r), -2.0 * beta);
        }
        case SpectrumFamily::mixed_log: {
            double v = 1.0;
            for (auto kj : k) v *= border_factor(std::abs(double(kj)), beta);
            return v;
        }
        case SpectrumFamily::sobolev_isotropic: {
            std::int64_t sq = 0;
            for (auto kj : k) sq += std::int64_t(kj) * kj;
            return std::pow(1.0 + double(sq), -s);
        }
        case SpectrumFamily::sobolev_mixed: {
            double v = 1.0;
            for (auto kj : k) v *= sobolev_factor(std::abs(double(kj)), s);
            return v;
        }
        case SpectrumFamily::geometric:
            return c * std::pow(omega, -std::abs(double(k[0])));
        case SpectrumFamily::norm_decreasing:
            return profile(norm(k));
        case SpectrumFamily::explicit_table:
            return table_->lookup(k);
    }
    return 0.0;
}

double SpectrumSpec::value1(std::int64_t k) const {
    const std::int32_t kk = std::int32_t(k);
    return value(std::span<const std::int32_t>(&kk, 1));
}

double SpectrumSpec::lambda0() const {
    std::vector<std::int32_t> zero(dim_, 0);
    return value(zero);
}

double lambda_value(const SpectrumSpec& spec, std::span<const std::int32_t> k) {
    return spec.value(k);
}

std::optional<NormDescriptor> SpectrumSpec::decreasing_norm() const {
    switch (family_) {
        case SpectrumFamily::border_univariate:
        case SpectrumFamily::geometric:
            return NormDescriptor::euclidean();  // d = 1, any p coincides
        case SpectrumFamily::isotropic_log:
        case SpectrumFamily::sobolev_isotropic:
            return NormDescriptor::euclidean();
        case SpectrumFamily::norm_decreasing:
            return norm;
        case SpectrumFamily::mixed_log:
        case SpectrumFamily::sobolev_mixed:
            if (dim_ == 1) return NormDescriptor::euclidean();
            return std::nullopt;
        case SpectrumFamily::explicit_table:
            return std::nullopt;
    }
    return std::nullopt;
}

bool SpectrumSpec::univariate_monotone() const {
    if (dim_ != 1) return false;
    if (family_ != SpectrumFamily::explicit_table) return true;
    // explicit: check symmetry and monotonicity on the table
    const auto& t = *table_;
    const std::int64_t m = t.max_abs_coord();
    double prev = lambda0();
    for (std::int64_t k = 1; k <= m; ++k) {
        const double v = value1(k);
        if (v != value1(-k)) return false;
        if (v > prev * (1.0 + 1e-12)) return false;
        prev = v;
    }
    return true;
}

Interval SpectrumSpec::tail_from(std::int64_t K) const {
    require(dim_ == 1, "tail_from: univariate only");
    require(K >= 1, "tail_from: K >= 1 required");
    const double Kd = double(K);
    switch (family_) {
        case SpectrumFamily::geometric: {
            const double t = c * geometric_geq(Kd, omega);
            return widened(t, t);
        }
        case SpectrumFamily::border_univariate:
        case SpectrumFamily::isotropic_log:
        case SpectrumFamily::mixed_log:
            return widened(border_geq(Kd, beta));
        case SpectrumFamily::sobolev_isotropic:
        case SpectrumFamily::sobolev_mixed:
            return widened(sobolev_geq(Kd, s));
        case SpectrumFamily::norm_decreasing:
            if (profile.kind == RadialProfile::Kind::exponential) {
                const double t = profile.c * geometric_geq(Kd, profile.omega);
                return widened(t, t);
            }
            return widened(powlog_geq(Kd, profile.a, profile.b));
        case SpectrumFamily::explicit_table: {
            double sum = 0.0;
            for (std::int64_t k = table_->max_abs_coord(); k >= K; --k) sum += value1(k);
            return {sum, sum};
        }
    }
    return {0.0, 0.0};
}

Interval SpectrumSpec::progression_tail(std::int64_t stride, std::int64_t M) const {
    require(dim_ == 1, "progression_tail: univariate only");
    require(stride >= 1 && M >= 0, "progression_tail: bad arguments");
    const double K = double(stride) * double(M + 1);  // first included index
    switch (family_) {
        case SpectrumFamily::geometric: {
            const double t = c * std::pow(omega, -K) / (1.0 - std::pow(omega, -double(stride)));
            return widened(t, t);
        }
        case SpectrumFamily::border_univariate:
        case SpectrumFamily::isotropic_log:
        case SpectrumFamily::mixed_log: {
            const double ig = border_tail_integral(K, beta) / double(stride);
            return widened(ig, border_factor(K, beta) + border_ratio(K) * ig);
        }
        case SpectrumFamily::sobolev_isotropic:
        case SpectrumFamily::sobolev_mixed: {
            const double lo = std::pow(1.0 + K, 1.0 - 2.0 * s) / ((2.0 * s - 1.0) * stride);
            const double hi =
                sobolev_factor(K, s) + std::pow(K, 1.0 - 2.0 * s) / ((2.0 * s - 1.0) * stride);
            return widened(lo, hi);
        }
        case SpectrumFamily::norm_decreasing: {
            if (profile.kind == RadialProfile::Kind::exponential) {
                const double t = profile.c * std::pow(profile.omega, -K) /
                                 (1.0 - std::pow(profile.omega, -double(stride)));
                return widened(t, t);
            }
            if (profile.a == 1.0) {
                const double ig = border_tail_integral(K, profile.b) / double(stride);
                return widened(ig, profile(K) + border_ratio(K) * ig);
            }
            const double hi =
                profile(K) + std::pow(1.0 + K, 1.0 - profile.a) / ((profile.a - 1.0) * stride);
            return widened(0.0, hi);
        }
        case SpectrumFamily::explicit_table: {
            double sum = 0.0;
            const std::int64_t m_max = table_->max_abs_coord() / stride;
            for (std::int64_t m = m_max; m > M; --m) sum += value1(stride * m);
            return {sum, sum};
        }
    }
    return {0.0, 0.0};
}

Interval SpectrumSpec::box_tail(std::int64_t R) const {
    require(R >= 0, "box_tail: R >= 0 required");
    if (family_ == SpectrumFamily::explicit_table) {
        double sum = 0.0;
        const auto& t = *table_;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const auto p = t.point(i);
            bool outside = false;
            for (auto v : p)
                if (std::abs(std::int64_t(v)) > R) { outside = true; break; }
            if (outside) sum += t.value(i);
        }
        return {sum, sum};
    }
    if (dim_ == 1) {
        const Interval t = tail_from(R + 1);
        return widened(2.0 * t.lo, 2.0 * t.hi);
    }
    const double Rn = double(R + 1);
    switch (family_) {
        case SpectrumFamily::isotropic_log: {
            // lambda on the l_inf shell m is at most the radial value at m
            const double hi = shell_factor(dim_) * border_geq(Rn, beta).hi;
            return widened(0.0, hi);
        }
        case SpectrumFamily::mixed_log: {
            const Interval t1 = {2.0 * border_geq(Rn, beta).lo, 2.0 * border_geq(Rn, beta).hi};
            const double s1 =
                univ_box_mass(R, [&](double x) { return border_factor(x, beta); }) + t1.hi;
            const double hi = dim_ * t1.hi * std::pow(s1, dim_ - 1);
            return widened(0.0, hi);
        }
        case SpectrumFamily::sobolev_isotropic: {
            const double e = double(dim_) - 2.0 * s;  // < 0
            const double hi = shell_factor(dim_) * std::pow(2.0, dim_ - 1) *
                              (std::pow(Rn, e - 1.0) + std::pow(Rn, e) / (2.0 * s - dim_));
            return widened(0.0, hi);
        }
        case SpectrumFamily::sobolev_mixed: {
            const Interval g = sobolev_geq(Rn, s);
            const double t1 = 2.0 * g.hi;
            const double s1 = univ_box_mass(R, [&](double x) { return sobolev_factor(x, s); }) + t1;
            return widened(0.0, dim_ * t1 * std::pow(s1, dim_ - 1));
        }
        case SpectrumFamily::norm_decreasing: {
            if (profile.kind == RadialProfile::Kind::power_log) {
                const double a = profile.a, b = profile.b;
                double series;  // sum_{m > R} (1+m)^{d-1} (1+m)^{-a} log^{-2b}
                if (a == double(dim_)) {
                    series = border_geq(Rn, b).hi;
                } else {
                    series = std::pow(1.0 + Rn, double(dim_) - 1.0 - a) +
                             std::pow(1.0 + Rn, double(dim_) - a) / (a - double(dim_));
                }
                return widened(0.0, shell_factor(dim_) * series);
            }
            // exponential profile: numeric shell series with geometric remainder
            const double w = profile.omega;
            double sum = 0.0;
            std::int64_t m = R + 1;
            double term = std::pow(double(m), dim_ - 1) * std::pow(w, -double(m));
            while (true) {
                sum += term;
                ++m;
                const double next = std::pow(double(m), dim_ - 1) * std::pow(w, -double(m));
                const double ratio = std::pow(double(m + 1) / double(m), dim_ - 1) / w;
                if (ratio < 0.5 && next < 1e-3 * sum) {
                    sum += next / (1.0 - ratio);
                    break;
                }
                term = next;
                if (m > R + 100000) { sum += next / (1.0 - std::min(ratio, 0.999)); break; }
            }
            return widened(0.0, shell_factor(dim_) * profile.c * sum);
        }
        default:
            break;
    }
    throw std::logic_error("box_tail: unhandled family");
}

double SpectrumSpec::out_of_box_max(std::int64_t R) const {
    const double Rn = double(R + 1);
    switch (family_) {
        case SpectrumFamily::border_univariate:
            return border_factor(Rn, beta);
        case SpectrumFamily::isotropic_log:
            return std::pow(1.0 + Rn, -double(dim_)) * std::pow(std::log(kE + Rn), -2.0 * beta);
        case SpectrumFamily::mixed_log:
            return border_factor(Rn, beta);
        case SpectrumFamily::sobolev_isotropic:
        case SpectrumFamily::sobolev_mixed:
            return sobolev_factor(Rn, s);
        case SpectrumFamily::geometric:
            return c * std::pow(omega, -Rn);
        case SpectrumFamily::norm_decreasing:
            return profile(Rn);
        case SpectrumFamily::explicit_table: {
            double m = 0.0;
            const auto& t = *table_;
            for (std::size_t i = 0; i < t.size(); ++i) {
                const auto p = t.point(i);
                for (auto v : p)
                    if (std::abs(std::int64_t(v)) > R) { m = std::max(m, t.value(i)); break; }
            }
            return m;
        }
    }
    return 0.0;
}

std::optional<std::pair<double, double>> SpectrumSpec::inv_lambda_power_bound() const {
    if (dim_ != 1) return std::nullopt;
    switch (family_) {
        case SpectrumFamily::border_univariate:
        case SpectrumFamily::isotropic_log:
        case SpectrumFamily::mixed_log:
            // (1+k) log^{2b}(e+k) <= 2 C_b k^{3/2}
            return std::make_pair(1.5, 2.0 * log_sq_growth_constant(beta));
        case SpectrumFamily::sobolev_isotropic:
        case SpectrumFamily::sobolev_mixed:
            if (2.0 * s >= 3.0) return std::nullopt;
            return std::make_pair(2.0 * s, std::pow(2.0, s));
        case SpectrumFamily::norm_decreasing:
            if (profile.kind == RadialProfile::Kind::power_log && profile.a + 0.5 < 3.0)
                return std::make_pair(profile.a + 0.5,
                                      std::pow(2.0, profile.a) * log_sq_growth_constant(profile.b));
            return std::nullopt;
        default:
            return std::nullopt;
    }
}

std::int64_t SpectrumSpec::sublevel_max_coord(double threshold) const {
    require(threshold > 0.0, "sublevel_max_coord: threshold > 0 required");
    auto axis_value = [&](std::int64_t m) {
        std::vector<std::int32_t> k(dim_, 0);
        k[0] = std::int32_t(m);
        return value(k);
    };
    if (family_ == SpectrumFamily::explicit_table) {
        std::int64_t best = -1;
        for (std::int64_t m = 0; m <= table_->max_abs_coord(); ++m)
            if (axis_value(m) >= threshold) best = m;
        return best;
    }
    if (axis_value(0) < threshold) return -1;
    std::int64_t lo = 0, hi = 1;
    while (axis_value(hi) >= threshold) {
        lo = hi;
        hi *= 2;
        if (hi > (std::int64_t(1) << 40)) throw std::invalid_argument("sublevel set too large");
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        (axis_value(mid) >= threshold ? lo : hi) = mid;
    }
    return lo;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

namespace {
std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}
}  // namespace

std::string SpectrumSpec::descriptor() const {
    switch (family_) {
        case SpectrumFamily::border_univariate:
            return "border " + fmt(beta);
        case SpectrumFamily::isotropic_log:
            return "iso " + std::to_string(dim_) + " " + fmt(beta);
        case SpectrumFamily::mixed_log:
            return "mixed " + std::to_string(dim_) + " " + fmt(beta);
        case SpectrumFamily::sobolev_isotropic:
            return "sobolev_iso " + std::to_string(dim_) + " " + fmt(s);
        case SpectrumFamily::sobolev_mixed:
            return "sobolev_mixed " + std::to_string(dim_) + " " + fmt(s);
        case SpectrumFamily::geometric:
            return "geometric " + fmt(c) + " " + fmt(omega);
        case SpectrumFamily::norm_decreasing: {
            std::string p = norm.is_sup() ? std::string("inf") : fmt(norm.p);
            if (profile.kind == RadialProfile::Kind::exponential)
                return "normdec " + std::to_string(dim_) + " " + p + " exp " + fmt(profile.c) +
                       " " + fmt(profile.omega);
            return "normdec " + std::to_string(dim_) + " " + p + " powlog " + fmt(profile.a) +
                   " " + fmt(profile.b);
        }
        case SpectrumFamily::explicit_table:
            return "explicit " + std::to_string(dim_);
    }
    return "";
}

void SpectrumSpec::write(std::ostream& os) const {
    os << descriptor() << "\n";
    if (family_ == SpectrumFamily::explicit_table) {
        const auto& t = *table_;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const auto p = t.point(i);
            for (auto v : p) os << v << " ";
            os << fmt(t.value(i)) << "\n";
        }
    }
}

SpectrumSpec SpectrumSpec::read(std::istream& is) {
    std::string name;
    if (!(is >> name)) throw std::invalid_argument("spectrum read: empty input");
    if (name == "border") {
        double b;
        is >> b;
        return border_univariate(b);
    }
    if (name == "iso" || name == "mixed") {
        int d;
        double b;
        is >> d >> b;
        return name == "iso" ? isotropic_log(d, b) : mixed_log(d, b);
    }
    if (name == "sobolev_iso" || name == "sobolev_mixed") {
        int d;
        double sv;
        is >> d >> sv;
        return name == "sobolev_iso" ? sobolev_isotropic(d, sv) : sobolev_mixed(d, sv);
    }
    if (name == "geometric") {
        double cv, w;
        is >> cv >> w;
        return geometric(cv, w);
    }
    if (name == "normdec") {
        int d;
        std::string p_s, kind;
        is >> d >> p_s >> kind;
        NormDescriptor nd =
            (p_s == "inf") ? NormDescriptor::sup() : NormDescriptor{std::stod(p_s)};
        RadialProfile g;
        if (kind == "exp") {
            g.kind = RadialProfile::Kind::exponential;
            is >> g.c >> g.omega;
        } else if (kind == "powlog") {
            g.kind = RadialProfile::Kind::power_log;
            is >> g.a >> g.b;
        } else {
            throw std::invalid_argument("spectrum read: unknown profile " + kind);
        }
        return norm_decreasing(d, nd, g);
    }
    if (name == "explicit") {
        int d;
        is >> d;
        std::vector<std::int32_t> flat;
        std::vector<double> vals;
        std::string line;
        std::getline(is, line);  // rest of header
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::vector<std::int32_t> k(d);
            double v;
            for (int t = 0; t < d; ++t)
                if (!(ls >> k[t])) throw std::invalid_argument("spectrum read: bad point line");
            if (!(ls >> v)) throw std::invalid_argument("spectrum read: bad value");
            flat.insert(flat.end(), k.begin(), k.end());
            vals.push_back(v);
        }
        return explicit_table(d, std::move(flat), std::move(vals));
    }
    throw std::invalid_argument("spectrum read: unknown family " + name);
}

// ---------------------------------------------------------------------------
// IndexSet
// ---------------------------------------------------------------------------

namespace {

std::vector<std::int32_t> sort_points(int dim, std::vector<std::int32_t> flat,
                                      const NormDescriptor& order) {
    const std::size_t n = flat.size() / std::size_t(dim);
    std::vector<double> key(n);
    for (std::size_t i = 0; i < n; ++i)
        key[i] = order(std::span<const std::int32_t>(flat.data() + i * dim, std::size_t(dim)));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (key[a] != key[b]) return key[a] < key[b];
        const std::int32_t* pa = flat.data() + a * dim;
        const std::int32_t* pb = flat.data() + b * dim;
        for (int t = 0; t < dim; ++t)
            if (pa[t] != pb[t]) return pa[t] < pb[t];
        return false;
    });
    std::vector<std::int32_t> out(flat.size());
    for (std::size_t i = 0; i < n; ++i)
        std::copy_n(flat.data() + idx[i] * dim, dim, out.data() + i * dim);
    return out;
}

std::vector<std::int32_t> enumerate_box(int dim, std::int64_t R) {
    const double count = std::pow(2.0 * double(R) + 1.0, dim);
    if (count > 3e8) throw std::invalid_argument("index set too large");
    std::vector<std::int32_t> flat;
    flat.reserve(std::size_t(count) * dim);
    std::vector<std::int32_t> k(dim, std::int32_t(-R));
    while (true) {
        flat.insert(flat.end(), k.begin(), k.end());
        int j = dim - 1;
        while (j >= 0 && k[j] == std::int32_t(R)) {
            k[j] = std::int32_t(-R);
            --j;
        }
        if (j < 0) break;
        ++k[j];
    }
    return flat;
}

}  // namespace

IndexSet IndexSet::box(int dim, std::int64_t radius, NormDescriptor order) {
    require(dim >= 1 && radius >= 0, "IndexSet::box: bad arguments");
    IndexSet s;
    s.dim_ = dim;
    s.shape_ = Shape::box;
    s.box_radius_ = radius;
    s.points_ = sort_points(dim, enumerate_box(dim, radius), order);
    return s;
}

IndexSet IndexSet::ball(int dim, NormDescriptor norm, double radius) {
    require(dim >= 1 && radius >= 0.0, "IndexSet::ball: bad arguments");
    const std::int64_t R = std::int64_t(std::floor(radius * (1.0 + 1e-12)));
    auto boxed = enumerate_box(dim, R);
    std::vector<std::int32_t> flat;
    const std::size_t n = boxed.size() / std::size_t(dim);
    for (std::size_t i = 0; i < n; ++i) {
        std::span<const std::int32_t> k(boxed.data() + i * dim, std::size_t(dim));
        if (norm(k) <= radius * (1.0 + 1e-12)) flat.insert(flat.end(), k.begin(), k.end());
    }
    IndexSet s;
    s.dim_ = dim;
    s.shape_ = Shape::ball;
    s.points_ = sort_points(dim, std::move(flat), norm);
    return s;
}

IndexSet IndexSet::explicit_set(int dim, std::vector<std::int32_t> flat, NormDescriptor order) {
    require(dim >= 1 && flat.size() % std::size_t(dim) == 0, "IndexSet::explicit_set: bad input");
    IndexSet s;
    s.dim_ = dim;
    s.shape_ = Shape::explicit_set;
    s.points_ = sort_points(dim, std::move(flat), order);
    const std::size_t n = s.size();
    for (std::size_t i = 1; i < n; ++i) {
        const auto a = s.point(i - 1), b = s.point(i);
        if (std::equal(a.begin(), a.end(), b.begin()))
            throw std::invalid_argument("IndexSet: duplicate point");
    }
    return s;
}

// ---------------------------------------------------------------------------
// truncation
// ---------------------------------------------------------------------------

namespace reference {
std::vector<double> fill_values(const SpectrumSpec& spec, const IndexSet& support) {
    std::vector<double> v(support.size());
    for (std::size_t i = 0; i < support.size(); ++i) v[i] = spec.value(support.point(i));
    return v;
}
}  // namespace reference

namespace detail {
std::vector<double> fill_values_parallel(const SpectrumSpec& spec, const IndexSet& support) {
    std::vector<double> v(support.size());
    const std::int64_t n = std::int64_t(support.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) v[std::size_t(i)] = spec.value(support.point(std::size_t(i)));
    return v;
}
}  // namespace detail

namespace {

TruncatedSpectrum make_trunc(const SpectrumSpec& spec, IndexSet support, double tail_upper,
                             double out_max) {
    TruncatedSpectrum t;
    t.spec = spec;
    t.support = std::move(support);
    t.values = detail::fill_values_parallel(spec, t.support);
    double mass = 0.0;
    for (double v : t.values) mass += v;  // fixed support order
    t.mass = mass;
    t.tail_upper = tail_upper;
    t.out_max = out_max;
    return t;
}

TruncatedSpectrum truncate_explicit(const SpectrumSpec& spec) {
    const auto& tbl = spec.table();
    std::vector<std::int32_t> flat(tbl.point(0).data(),
                                   tbl.point(0).data() + tbl.size() * tbl.dimension());
    return make_trunc(spec, IndexSet::explicit_set(spec.dimension(), std::move(flat)), 0.0, 0.0);
}

// in-support l1 mass of the radius-R box without materializing points
double box_mass(const SpectrumSpec& spec, std::int64_t R) {
    if (spec.dimension() == 1) {
        double m = 0.0;
        for (std::int64_t k = R; k >= 1; --k) m += spec.value1(k) + spec.value1(-k);
        return m + spec.lambda0();
    }
    const IndexSet box = IndexSet::box(spec.dimension(), R);
    const auto vals = detail::fill_values_parallel(spec, box);
    double m = 0.0;
    for (double v : vals) m += v;
    return m;
}

}  // namespace

TruncatedSpectrum truncate_at_radius(const SpectrumSpec& spec, std::int64_t R) {
    if (spec.family() == SpectrumFamily::explicit_table) return truncate_explicit(spec);
    NormDescriptor order = spec.decreasing_norm().value_or(NormDescriptor::euclidean());
    return make_trunc(spec, IndexSet::box(spec.dimension(), R, order), spec.box_tail(R).hi,
                      spec.out_of_box_max(R));
}

TruncatedSpectrum truncate(const SpectrumSpec& spec, double rel_tol, std::int64_t max_radius) {
    require(rel_tol > 0.0 && rel_tol < 1.0, "truncate: need 0 < rel_tol < 1");
    require(max_radius >= 0, "truncate: max_radius >= 0 required");
    if (spec.family() == SpectrumFamily::explicit_table) return truncate_explicit(spec);

    auto ok = [&](std::int64_t R) {
        return spec.box_tail(R).hi <= rel_tol * box_mass(spec, R);
    };
    std::int64_t hi = 1;
    while (hi <= max_radius && !ok(hi)) hi *= 2;
    if (hi > max_radius) {
        if (ok(max_radius)) {
            hi = max_radius;
        } else {
            const double achieved = spec.box_tail(max_radius).hi;
            std::ostringstream msg;
            msg << "truncate: tolerance " << rel_tol << " not reached at max radius "
                << max_radius << "; achieved certified tail " << achieved;
            throw TruncationError(msg.str(), achieved, max_radius);
        }
    }
    std::int64_t lo = hi / 2;  // ok(lo) is false (or lo == 0)
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        (ok(mid) ? hi : lo) = mid;
    }
    if (hi > 0 && ok(hi - 1)) hi = hi - 1;  // R = 0 corner
    return truncate_at_radius(spec, hi);
}

TruncatedSpectrum truncate_sublevel(const SpectrumSpec& spec, double threshold) {
    require(threshold > 0.0, "truncate_sublevel: threshold > 0 required");
    const int d = spec.dimension();
    const double out_max_fuzz = threshold * (1.0 + 1e-9);

    switch (spec.family()) {
        case SpectrumFamily::explicit_table: {
            const auto& tbl = spec.table();
            std::vector<std::int32_t> flat;
            double excl = 0.0, excl_max = 0.0;
            for (std::size_t i = 0; i < tbl.size(); ++i) {
                if (tbl.value(i) >= threshold) {
                    const auto p = tbl.point(i);
                    flat.insert(flat.end(), p.begin(), p.end());
                } else {
                    excl += tbl.value(i);
                    excl_max = std::max(excl_max, tbl.value(i));
                }
            }
            return make_trunc(spec, IndexSet::explicit_set(d, std::move(flat)), excl, excl_max);
        }
        case SpectrumFamily::border_univariate:
        case SpectrumFamily::geometric: {
            const std::int64_t m = spec.sublevel_max_coord(threshold);
            require(m >= 0, "truncate_sublevel: empty sublevel set");
            return truncate_at_radius(spec, m);
        }
        case SpectrumFamily::isotropic_log:
        case SpectrumFamily::sobolev_isotropic:
        case SpectrumFamily::norm_decreasing: {
            if (d == 1) {
                const std::int64_t m = spec.sublevel_max_coord(threshold);
                require(m >= 0, "truncate_sublevel: empty sublevel set");
                return truncate_at_radius(spec, m);
            }
            const NormDescriptor nd = *spec.decreasing_norm();
            auto radial = [&](double r) {
                if (spec.family() == SpectrumFamily::isotropic_log)
                    return std::pow(1.0 + r, -double(d)) * std::pow(std::log(kE + r), -2.0 * spec.beta);
                if (spec.family() == SpectrumFamily::sobolev_isotropic)
                    return std::pow(1.0 + r * r, -spec.s);
                return spec.profile(r);
            };
            require(radial(0.0) >= threshold, "truncate_sublevel: empty sublevel set");
            double lo = 0.0, hi = 1.0;
            while (radial(hi) >= threshold) {
                lo = hi;
                hi *= 2.0;
                if (hi > 1e9) throw std::invalid_argument("sublevel set too large");
            }
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (radial(mid) >= threshold ? lo : hi) = mid;
            }
            // box(Rin) is inside the p-ball of radius lo: |k|_p <= d^{1/p} |k|_inf
            const double embed = nd.is_sup() ? 1.0 : std::pow(double(d), 1.0 / nd.p);
            const std::int64_t Rin = std::int64_t(std::floor(lo / embed));
            const double tail = spec.box_tail(std::max<std::int64_t>(Rin, 0)).hi;
            return make_trunc(spec, IndexSet::ball(d, nd, lo), tail, out_max_fuzz);
        }
        case SpectrumFamily::mixed_log:
        case SpectrumFamily::sobolev_mixed: {
            // hyperbolic-cross enumeration over the product constraint
            auto factor = [&](std::int64_t m) {
                return spec.family() == SpectrumFamily::mixed_log
                           ? border_factor(double(std::abs(m)), spec.beta)
                           : sobolev_factor(double(std::abs(m)), spec.s);
            };
            std::vector<std::int32_t> flat;
            std::vector<std::int32_t> current(d, 0);
            double in_mass = 0.0;
            auto max_coord = [&](double budget) {
                // largest m with factor(m) >= budget
                if (factor(0) < budget) return std::int64_t(-1);
                std::int64_t l = 0, h = 1;
                while (factor(h) >= budget) {
                    l = h;
                    h *= 2;
                    if (h > (std::int64_t(1) << 40))
                        throw std::invalid_argument("sublevel set too large");
                }
                while (h - l > 1) {
                    const std::int64_t mid = l + (h - l) / 2;
                    (factor(mid) >= budget ? l : h) = mid;
                }
                return l;
            };
            std::function<void(int, double)> rec = [&](int j, double prod) {
                if (j == d) {
                    flat.insert(flat.end(), current.begin(), current.end());
                    in_mass += prod;
                    return;
                }
                const std::int64_t m_max = max_coord(threshold / prod);
                for (std::int64_t m = -m_max; m <= m_max; ++m) {
                    current[j] = std::int32_t(m);
                    rec(j + 1, prod * factor(m));
                }
                current[j] = 0;
            };
            require(spec.lambda0() >= threshold, "truncate_sublevel: empty sublevel set");
            rec(0, 1.0);
            const std::int64_t n_max = spec.sublevel_max_coord(threshold);
            double b1 = univ_box_mass(n_max, [&](double x) { return factor(std::int64_t(x)); });
            const double inside_complement = std::max(0.0, std::pow(b1, d) - in_mass);
            const double tail = inside_complement * (1.0 + 1e-12) + spec.box_tail(n_max).hi;
            return make_trunc(spec, IndexSet::explicit_set(d, std::move(flat)), tail,
                              out_max_fuzz);
        }
    }
    throw std::logic_error("truncate_sublevel: unhandled family");
}

Interval ell1_norm(const TruncatedSpectrum& trunc) {
    return widened(trunc.mass, trunc.mass + trunc.tail_upper);
}

// ---------------------------------------------------------------------------
// convolution
// ---------------------------------------------------------------------------

SpectrumSpec convolve(const SpectrumSpec& a, const SpectrumSpec& b) {
    require(a.family() == SpectrumFamily::explicit_table &&
                b.family() == SpectrumFamily::explicit_table,
            "convolve: explicit spectra required");
    if (a.dimension() != b.dimension())
        throw std::invalid_argument("convolve: dimension mismatch");
    const int d = a.dimension();
    const auto& ta = a.table();
    const auto& tb = b.table();
    std::map<std::vector<std::int32_t>, double> acc;
    std::vector<std::int32_t> key(d);
    for (std::size_t i = 0; i < ta.size(); ++i) {
        const auto pa = ta.point(i);
        const double va = ta.value(i);
        if (va == 0.0) continue;
        for (std::size_t j = 0; j < tb.size(); ++j) {
            const auto pb = tb.point(j);
            const double vb = tb.value(j);
            if (vb == 0.0) continue;
            for (int t = 0; t < d; ++t) key[t] = pb[t] - pa[t];  // k = m - l
            acc[key] += va * vb;
        }
    }
    std::vector<std::int32_t> flat;
    std::vector<double> vals;
    flat.reserve(acc.size() * d);
    vals.reserve(acc.size());
    for (const auto& [k, v] : acc) {
        flat.insert(flat.end(), k.begin(), k.end());
        vals.push_back(v);
    }
    return SpectrumSpec::explicit_table(d, std::move(flat), std::move(vals));
}

bool verify_convolution_square(const SpectrumSpec& target, const ConvSquareCertificate& cert,
                               double rel_tol) {
    if (target.family() != SpectrumFamily::explicit_table || cert.factors.empty()) return false;
    const int d = target.dimension();
    std::map<std::vector<std::int32_t>, double> acc;
    for (const auto& f : cert.factors) {
        if (f.dimension() != d || f.family() != SpectrumFamily::explicit_table) return false;
        const SpectrumSpec sq = convolve(f, f);
        const auto& t = sq.table();
        for (std::size_t i = 0; i < t.size(); ++i) {
            const auto p = t.point(i);
            acc[std::vector<std::int32_t>(p.begin(), p.end())] += t.value(i);
        }
    }
    const auto& tt = target.table();
    double scale = 0.0;
    for (std::size_t i = 0; i < tt.size(); ++i) scale = std::max(scale, tt.value(i));
    for (std::size_t i = 0; i < tt.size(); ++i) {
        const auto p = tt.point(i);
        auto it = acc.find(std::vector<std::int32_t>(p.begin(), p.end()));
        const double got = (it == acc.end()) ? 0.0 : it->second;
        if (std::abs(got - tt.value(i)) > rel_tol * scale) return false;
        if (it != acc.end()) acc.erase(it);
    }
    for (const auto& [k, v] : acc)
        if (std::abs(v) > rel_tol * scale) return false;  // mass outside the target support
    return true;
}

MinorantResult convolution_square_minorant(const TruncatedSpectrum& trunc) {
    const auto& spec = trunc.spec;
    if (!spec.decreasing_norm().has_value())
        throw std::invalid_argument("convolution_square_minorant: norm-decreasing spec required");
    const int d = spec.dimension();
    const double lam0 = spec.lambda0();

    // mu support: l with 2l in the truncation support
    std::vector<std::int32_t> mu_pts;
    std::vector<double> lam2;  // lambda_{2l}
    std::vector<std::int32_t> half(d);
    for (std::size_t i = 0; i < trunc.support.size(); ++i) {
        const auto p = trunc.support.point(i);
        bool even = true;
        for (auto v : p)
            if (v % 2 != 0) { even = false; break; }
        if (!even) continue;
        for (int t = 0; t < d; ++t) half[t] = p[t] / 2;
        mu_pts.insert(mu_pts.end(), half.begin(), half.end());
        lam2.push_back(trunc.values[i]);
    }
    double S = 0.0;
    for (double v : lam2) S += v;
    require(S > 0.0, "convolution_square_minorant: empty even part");

    const double scale = 1.0 / std::sqrt(2.0 * S);
    std::vector<double> mu_vals(lam2.size());
    for (std::size_t i = 0; i < lam2.size(); ++i) mu_vals[i] = lam2[i] * scale;
    SpectrumSpec mu = SpectrumSpec::explicit_table(d, mu_pts, mu_vals);

    SpectrumSpec musq = convolve(mu, mu);
    std::vector<std::int32_t> zero(d, 0);
    const double musq0 = musq.table().lookup(zero);
    double atom = lam0 - musq0;
    if (atom < -1e-12 * lam0)
        throw std::domain_error(
            "convolution_square_minorant: atom weight negative; spectrum is not norm-decreasing");
    atom = std::max(atom, 0.0);

    // nu = mu*mu + atom * delta_0
    std::vector<std::int32_t> nu_pts;
    std::vector<double> nu_vals;
    const auto& mt = musq.table();
    bool has_zero = false;
    for (std::size_t i = 0; i < mt.size(); ++i) {
        const auto p = mt.point(i);
        double v = mt.value(i);
        if (std::all_of(p.begin(), p.end(), [](std::int32_t x) { return x == 0; })) {
            v += atom;
            has_zero = true;
        }
        nu_pts.insert(nu_pts.end(), p.begin(), p.end());
        nu_vals.push_back(v);
    }
    if (!has_zero) {
        nu_pts.insert(nu_pts.end(), zero.begin(), zero.end());
        nu_vals.push_back(atom);
    }
    SpectrumSpec nu = SpectrumSpec::explicit_table(d, nu_pts, nu_vals);

    // minorant property, checked entrywise on the nu support
    const auto& nt = nu.table();
    for (std::size_t i = 0; i < nt.size(); ++i) {
        const double lam = spec.value(nt.point(i));
        if (nt.value(i) > lam * (1.0 + 1e-9) + 1e-300)
            throw std::domain_error(
                "convolution_square_minorant: nu exceeds lambda; spectrum is not norm-decreasing");
    }

    MinorantResult res;
    res.nu = std::move(nu);
    res.atom = atom;
    res.even_mass = S;
    res.certificate.factors.push_back(std::move(mu));
    if (atom > 0.0) {
        res.certificate.factors.push_back(
            SpectrumSpec::explicit_table(d, zero, {std::sqrt(atom)}));
    }
    return res;
}

}  // namespace pwce
