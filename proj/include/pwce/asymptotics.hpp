#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pwce/spectrum.hpp"

namespace pwce {

// Number of leading approximation numbers certified by the truncation: the
// count of in-support values >= the certified out-of-support maximum.
std::size_t certified_prefix(const TruncatedSpectrum& trunc);

// a_m = sqrt of the (m+1)-st largest in-support lambda, m = 0..N-1, ties
// broken by the enumeration order.  Errors (with the safe prefix length in
// the message) when N exceeds the certified prefix.
std::vector<double> approximation_numbers(const TruncatedSpectrum& trunc, std::size_t N);

// Exact #{k in Z^d : prod_j (1+|k_j|) log^{2 beta}(e+|k_j|) <= r} by
// recursive enumeration with per-coordinate cutoffs.
std::int64_t count_lattice(double r, int d, double beta);

// min{sigma_0, sqrt((1/n) sum_{k>=n} sigma_k^2)}; tail_sq is a caller-supplied
// bound on the squared mass beyond the list.
double sigma_star(std::span<const double> sigma, std::int64_t n, double tail_sq = 0.0);

// least squares for value(n) = C n^{-a} (log n)^{-b} on log values
struct RateFit {
    double C = 0.0;
    double a = 0.0;
    double b = 0.0;
    double residual_rms = 0.0;
    std::size_t points = 0;
};

// pairs of (n, value); fixed_a pins the n-exponent and fits (C, b) only.
RateFit rate_fit(std::span<const std::pair<double, double>> pairs,
                 std::optional<double> fixed_a = std::nullopt);

}  // namespace pwce
