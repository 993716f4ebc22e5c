#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>

namespace pwce {

// Certified enclosure of a non-negative scalar.  Endpoints are widened
// outward so that double rounding cannot push the true value outside.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

inline Interval widened(double lo, double hi) {
    constexpr double rel = 4.0 * std::numeric_limits<double>::epsilon();
    constexpr double tiny = 1e-300;
    double l = lo - std::abs(lo) * rel - tiny;
    double h = hi + std::abs(hi) * rel + tiny;
    if (l < 0.0 && lo >= 0.0) l = 0.0;
    return {l, h};
}

inline Interval widened(const Interval& iv) { return widened(iv.lo, iv.hi); }

// p-norm on lattice points, p in [1, inf].
struct NormDescriptor {
    double p = 2.0;

    static NormDescriptor euclidean() { return {2.0}; }
    static NormDescriptor sup() { return {std::numeric_limits<double>::infinity()}; }
    static NormDescriptor taxicab() { return {1.0}; }

    bool is_sup() const { return std::isinf(p); }

    double operator()(std::span<const std::int32_t> k) const {
        if (is_sup()) {
            std::int64_t m = 0;
            for (auto v : k) m = std::max<std::int64_t>(m, std::abs(std::int64_t(v)));
            return double(m);
        }
        if (p == 2.0) {
            std::int64_t s = 0;
            for (auto v : k) s += std::int64_t(v) * std::int64_t(v);
            return std::sqrt(double(s));
        }
        if (p == 1.0) {
            std::int64_t s = 0;
            for (auto v : k) s += std::abs(std::int64_t(v));
            return double(s);
        }
        double s = 0.0;
        for (auto v : k) s += std::pow(std::abs(double(v)), p);
        return std::pow(s, 1.0 / p);
    }
};

// Deterministic RNG: splitmix64 streams keyed by (seed, stream).  Used
// everywhere randomness appears so that results are reproducible across
// platforms and thread schedules.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : state_(mix(seed + 0x9e3779b97f4a7c15ull * (stream + 1))) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        // inclusive bounds
        return lo + std::int64_t(next_u64() % std::uint64_t(hi - lo + 1));
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double two_pi = 6.283185307179586476925286766559;
        spare_ = r * std::sin(two_pi * u2);
        have_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

    std::complex<double> gaussian_complex() {
        return {gaussian() * 0.7071067811865475244, gaussian() * 0.7071067811865475244};
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdull;
        z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ull;
        return z ^ (z >> 33);
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Thrown by truncate() when the tolerance cannot be met within the radius
// budget; carries the best certified tail so callers can decide to proceed.
class TruncationError : public std::runtime_error {
  public:
    TruncationError(const std::string& msg, double achieved_tail, std::int64_t radius)
        : std::runtime_error(msg), achieved_tail(achieved_tail), radius(radius) {}

    double achieved_tail;
    std::int64_t radius;
};

}  // namespace pwce
