#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "pwce/spectrum.hpp"

namespace pwce {

using Point = std::vector<double>;

// Truncated reproducing kernel K(x,y) = sum_{k in support} lambda_k e^{2 pi i <k, x-y>}.
// The diagonal is constant and equals the in-support l1 mass.
struct KernelApprox {
    TruncatedSpectrum trunc;
    double diagonal = 0.0;

    explicit KernelApprox(TruncatedSpectrum t) : trunc(std::move(t)), diagonal(trunc.mass) {}

    int dimension() const { return trunc.dimension(); }
    double tail_upper() const { return trunc.tail_upper; }
    double lambda0() const { return trunc.lambda0(); }
};

// Points are reduced mod 1 before evaluation; the summation order over the
// support is the fixed enumeration order, so values are bit-reproducible.
std::complex<double> kernel_eval(const KernelApprox& K, std::span<const double> x,
                                 std::span<const double> y);

// Hermitian Gram matrix (K(x_j, x_k))_{j,k}; assembly parallelizes over
// entries, each entry summed serially in support order.
Eigen::MatrixXcd gram_matrix(const KernelApprox& K, const std::vector<Point>& nodes);

namespace reference {
// Serial Gram assembly, kept as the reference for the parallel kernel.
Eigen::MatrixXcd gram_matrix(const KernelApprox& K, const std::vector<Point>& nodes);
}  // namespace reference

// row-major CSV, each entry as a "re,im" pair
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& m);

}  // namespace pwce
