#include "pwce/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

namespace pwce {

std::size_t certified_prefix(const TruncatedSpectrum& trunc) {
    std::size_t count = 0;
    for (double v : trunc.values)
        if (v >= trunc.out_max) ++count;
    return count;
}

std::vector<double> approximation_numbers(const TruncatedSpectrum& trunc, std::size_t N) {
    if (N > trunc.values.size())
        throw std::invalid_argument("approximation_numbers: N exceeds the support size");
    const std::size_t safe = certified_prefix(trunc);
    if (N > safe) {
        std::ostringstream msg;
        msg << "approximation_numbers: only " << safe
            << " values are certified by this truncation (requested " << N << ")";
        throw std::invalid_argument(msg.str());
    }
    // stable sort keeps the enumeration order on ties
    std::vector<std::size_t> idx(trunc.values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return trunc.values[a] > trunc.values[b];
    });
    std::vector<double> out(N);
    for (std::size_t m = 0; m < N; ++m) out[m] = std::sqrt(trunc.values[idx[m]]);
    return out;
}

namespace {

constexpr double kE = 2.718281828459045235360287471353;

double mixed_weight(double m, double beta) {
    return (1.0 + m) * std::pow(std::log(kE + m), 2.0 * beta);
}

// largest m >= 0 with (1+m) log^{2 beta}(e+m) <= r, or -1
std::int64_t weight_max_coord(double r, double beta) {
    if (mixed_weight(0.0, beta) > r) return -1;
    std::int64_t lo = 0, hi = 1;
    while (mixed_weight(double(hi), beta) <= r) {
        lo = hi;
        hi *= 2;
        if (hi > (std::int64_t(1) << 52))
            throw std::invalid_argument("count_lattice: r too large");
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        (mixed_weight(double(mid), beta) <= r ? lo : hi) = mid;
    }
    return lo;
}

std::int64_t count_rec(double r, int d, double beta) {
    if (r < 1.0) return 0;
    const std::int64_t m = weight_max_coord(r, beta);
    if (m < 0) return 0;
    if (d == 1) return 2 * m + 1;
    std::int64_t total = count_rec(r, d - 1, beta);  // n_1 = 0
    for (std::int64_t v = 1; v <= m; ++v)
        total += 2 * count_rec(r / mixed_weight(double(v), beta), d - 1, beta);
    return total;
}

}  // namespace

std::int64_t count_lattice(double r, int d, double beta) {
    if (r < 1.0) throw std::invalid_argument("count_lattice: r >= 1 required");
    if (d < 1) throw std::invalid_argument("count_lattice: d >= 1 required");
    if (r > 1e15) throw std::invalid_argument("count_lattice: r too large (overflow guard)");
    return count_rec(r, d, beta);
}

double sigma_star(std::span<const double> sigma, std::int64_t n, double tail_sq) {
    if (n < 1) throw std::invalid_argument("sigma_star: n >= 1 required");
    if (sigma.empty()) throw std::invalid_argument("sigma_star: empty sequence");
    if (tail_sq < 0.0) throw std::invalid_argument("sigma_star: tail_sq >= 0 required");
    for (std::size_t i = 1; i < sigma.size(); ++i)
        if (sigma[i] > sigma[i - 1] * (1.0 + 1e-12))
            throw std::invalid_argument("sigma_star: sequence is not non-increasing");
    double tail = tail_sq;
    for (std::size_t i = sigma.size(); i-- > std::size_t(std::min<std::int64_t>(n, sigma.size()));)
        tail += sigma[i] * sigma[i];
    return std::min(sigma[0], std::sqrt(tail / double(n)));
}

RateFit rate_fit(std::span<const std::pair<double, double>> pairs,
                 std::optional<double> fixed_a) {
    if (pairs.size() < 6) throw std::invalid_argument("rate_fit: at least 6 points required");
    for (const auto& [n, v] : pairs) {
        if (n < 3.0) throw std::invalid_argument("rate_fit: n >= 3 required");
        if (v <= 0.0) throw std::invalid_argument("rate_fit: positive values required");
    }
    const Eigen::Index m = Eigen::Index(pairs.size());
    const int cols = fixed_a.has_value() ? 2 : 3;
    Eigen::MatrixXd X(m, cols);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double ln = std::log(pairs[std::size_t(i)].first);
        X(i, 0) = 1.0;
        if (cols == 3) {
            X(i, 1) = ln;
            X(i, 2) = std::log(ln);
        } else {
            X(i, 1) = std::log(ln);
        }
        y[i] = std::log(pairs[std::size_t(i)].second);
        if (fixed_a.has_value()) y[i] += *fixed_a * ln;
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues().minCoeff() < 1e-9 * svd.singularValues().maxCoeff())
        throw std::invalid_argument("rate_fit: degenerate design matrix (n-range too narrow)");
    const Eigen::VectorXd beta = svd.solve(y);

    RateFit fit;
    fit.points = pairs.size();
    fit.C = std::exp(beta[0]);
    if (cols == 3) {
        fit.a = -beta[1];
        fit.b = -beta[2];
    } else {
        fit.a = *fixed_a;
        fit.b = -beta[1];
    }
    fit.residual_rms = std::sqrt((X * beta - y).squaredNorm() / double(m));
    return fit;
}

}  // namespace pwce
