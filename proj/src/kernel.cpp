#include "pwce/kernel.hpp"

#include <cmath>
#include <ostream>

namespace pwce {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double reduce_mod1(double x) {
    double r = x - std::floor(x);
    if (r >= 1.0) r = 0.0;
    return r;
}

std::complex<double> eval_diff(const TruncatedSpectrum& t, const double* diff, int d) {
    double re = 0.0, im = 0.0;
    const std::size_t n = t.support.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = t.support.point(i);
        double dot = 0.0;
        for (int j = 0; j < d; ++j) dot += double(k[j]) * diff[j];
        const double ang = kTwoPi * dot;
        re += t.values[i] * std::cos(ang);
        im += t.values[i] * std::sin(ang);
    }
    return {re, im};
}

}  // namespace

std::complex<double> kernel_eval(const KernelApprox& K, std::span<const double> x,
                                 std::span<const double> y) {
    const int d = K.dimension();
    if (int(x.size()) != d || int(y.size()) != d)
        throw std::invalid_argument("kernel_eval: dimension mismatch");
    std::vector<double> diff(d);
    for (int j = 0; j < d; ++j) diff[j] = reduce_mod1(x[j]) - reduce_mod1(y[j]);
    return eval_diff(K.trunc, diff.data(), d);
}

namespace reference {

Eigen::MatrixXcd gram_matrix(const KernelApprox& K, const std::vector<Point>& nodes) {
    const int n = int(nodes.size());
    if (n < 1) throw std::invalid_argument("gram_matrix: at least one node required");
    const int d = K.dimension();
    Eigen::MatrixXcd G(n, n);
    std::vector<double> diff(d);
    for (int j = 0; j < n; ++j) {
        G(j, j) = K.diagonal;
        for (int k = j + 1; k < n; ++k) {
            for (int t = 0; t < d; ++t)
                diff[t] = reduce_mod1(nodes[j][t]) - reduce_mod1(nodes[k][t]);
            const std::complex<double> v = eval_diff(K.trunc, diff.data(), d);
            G(j, k) = v;
            G(k, j) = std::conj(v);
        }
    }
    return G;
}

}  // namespace reference

Eigen::MatrixXcd gram_matrix(const KernelApprox& K, const std::vector<Point>& nodes) {
    const int n = int(nodes.size());
    if (n < 1) throw std::invalid_argument("gram_matrix: at least one node required");
    const int d = K.dimension();
    Eigen::MatrixXcd G(n, n);
    // strict upper triangle, flattened
    const std::int64_t pairs = std::int64_t(n) * (n - 1) / 2;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t p = 0; p < pairs; ++p) {
        // invert p = j*n - j(j+1)/2 + (k - j - 1)
        std::int64_t j = 0, off = 0;
        while (off + (n - 1 - j) <= p) {
            off += n - 1 - j;
            ++j;
        }
        const std::int64_t k = j + 1 + (p - off);
        std::vector<double> diff(d);
        for (int t = 0; t < d; ++t)
            diff[t] = reduce_mod1(nodes[j][t]) - reduce_mod1(nodes[std::size_t(k)][t]);
        const std::complex<double> v = eval_diff(K.trunc, diff.data(), d);
        G(j, k) = v;
        G(k, j) = std::conj(v);
    }
    for (int j = 0; j < n; ++j) G(j, j) = K.diagonal;
    return G;
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& m) {
    os.precision(17);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) os << ",";
            os << m(r, c).real() << "," << m(r, c).imag();
        }
        os << "\n";
    }
}

}  // namespace pwce
