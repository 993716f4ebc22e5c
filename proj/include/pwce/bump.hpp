#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "pwce/spectrum.hpp"

namespace pwce {

// Continuous bumps supported on [0, 1/(2n)], shifted and summed into
// fooling-function candidates.
class BumpSpec {
  public:
    enum class Family { cosine_squared, polynomial_spline, paper_phi };

    // sin^2(2 pi n t) on [0, 1/(2n)]
    static BumpSpec cosine_squared(std::int64_t n);
    // (2u(1-u))^degree with u = 2nt, degree in [1, 6]
    static BumpSpec polynomial_spline(std::int64_t n, int degree);
    // sum_{m=1}^{L} lambda_{2nm} (1 - e_{2nm}(t)) on [0, 1/(2n)]
    static BumpSpec paper_phi(std::int64_t n, int truncation_level, SpectrumSpec lambda);

    Family family() const { return family_; }
    std::int64_t scale() const { return n_; }
    int degree() const { return degree_; }
    int truncation_level() const { return level_; }

    // Fourier coefficient of the single bump placed at 0.
    std::complex<double> coefficient(std::int64_t k) const;
    double integral() const;  // real part of coefficient(0)

    // Certified majorant |coefficient(k)| <= A / k^2 for |k| > F.
    double tail_majorant(std::int64_t F) const;
    std::int64_t min_trunc_freq() const;

  private:
    BumpSpec() = default;
    Family family_ = Family::cosine_squared;
    std::int64_t n_ = 2;
    int degree_ = 1;
    int level_ = 0;
    std::vector<double> lam2nm_;  // lambda_{2nm}, m = 1..level (paper_phi)
};

// Interleaved node pattern z_{2j+1} = 4j/(2n), z_{2j+2} = (4j+1)/(2n).
std::vector<double> adversarial_nodes(std::int64_t n);
// The full grid {j/(2n) : j = 0..2n-1}.
std::vector<double> full_grid(std::int64_t n);

struct FourierTable {
    std::int64_t trunc_freq = 0;
    std::int64_t scale = 0;
    std::size_t placements = 0;
    std::string placement_label;
    std::vector<std::complex<double>> coeffs;  // index k + trunc_freq
    double tail_majorant_A = 0.0;              // |c_k| <= A / k^2 for |k| > trunc_freq

    std::complex<double> at(std::int64_t k) const {
        return coeffs[std::size_t(k + trunc_freq)];
    }
};

// Coefficients of sum_j phi(. - z_j) for |k| <= trunc_freq.
FourierTable phi_n_fourier(const BumpSpec& bump, const std::vector<double>& placements,
                           std::int64_t trunc_freq, std::string placement_label = "custom");

struct FoolingReport {
    std::int64_t n = 0;
    std::string placement;
    double integral = 0.0;
    Interval norm;  // H_lambda norm enclosure
    double ratio = 0.0;  // integral / norm.hi (certified achievable ratio)
};

// integral = coefficient at 0; norm^2 = sum |c_k|^2 / lambda_k with a
// certified remainder beyond the frequency truncation.
FoolingReport fooling_ratio(const FourierTable& coeffs, const TruncatedSpectrum& trunc);

// Closed form for the full-grid function Phi_n (coefficients at the
// multiples of 2n only): ratio = T / sqrt(T + T^2/lambda_0) with
// T = sum_{m>=1} lambda_{2nm}, evaluated on the certified enclosure of T.
Interval phi_n_ratio_closed(const SpectrumSpec& spec, std::int64_t n);

// gamma_j = 1 + int_0^1 omega_beta(h)^2 |e^{2 pi i j h} - 1|^2 dh with
// omega_beta(h) = (1 - log h)^beta / h, by adaptive quadrature split at
// 1/(2 pi |j|).
double gamma_weight(std::int64_t j, double beta, double quad_tol);

}  // namespace pwce
