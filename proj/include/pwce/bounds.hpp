#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pwce/spectrum.hpp"

namespace pwce {

using BoundJson = nlohmann::ordered_json;

// Certified lower bound on e_n(H_lambda)^2 together with the quantities that
// produced it.  All in-bound sums use the safe end of their enclosures:
// lower ends where the sum helps the bound, upper ends where it hurts.
struct BoundReport {
    std::string bound_name;
    std::int64_t n = 0;
    double value = 0.0;
    BoundJson ingredients;
    std::vector<std::string> flags;

    BoundJson to_json() const;
};

// max(0, ||h||^2 - n / kappa) for kernels that are sums of squares of
// reproducing kernels with constant diagonal kappa.
double bound_sum_of_squares(double norm_h_sq, double kappa, std::int64_t n);

// lambda_0 (1 - n lambda_0 / ||lambda||_1) for spectra certified as sums of
// convolution squares; the certificate is verified entrywise.
BoundReport bound_convolution_square(const TruncatedSpectrum& trunc,
                                     const ConvSquareCertificate& cert, std::int64_t n);

// Convolution-square route for a norm-decreasing spectrum: builds the
// minorant nu, certifies it, and bounds e_n(H_lambda) >= e_n(H_nu).
BoundReport bound_via_minorant(const TruncatedSpectrum& trunc, std::int64_t n);

// lambda_0 (1 - 2 n lambda_0 / (lambda_0 + S)), S = sum_k lambda_{2k}.
BoundReport bound_norm_decreasing(const TruncatedSpectrum& trunc, std::int64_t n);

// min r >= 0 with #{k in Z^d : |2k| <= r} >= 4n - 1.
double radius_rn(std::int64_t n, NormDescriptor norm, int d);

// min{lambda_0/2, (1/8n) sum_{|2k| > r_n} lambda_{2k}} for norm-decreasing spectra.
BoundReport bound_rn_multivariate(const TruncatedSpectrum& trunc, std::int64_t n);

// min{lambda_0/2, (1/8n) sum_{k >= 4n} lambda_k} for symmetric spectra
// non-increasing on N_0 (d = 1).
BoundReport bound_univariate(const TruncatedSpectrum& trunc, std::int64_t n);

// (c/2) min{1, w^{-4n} / (4n (1 - 1/w))} for lambda_k >= c w^{-|k|}.
double bound_analytic(double c, double omega, std::int64_t n);

// 1/(2 tau) when 4n - 1 <= 3^d, absent otherwise (classes F_d^2 with
// g(2) <= tau).
std::optional<double> bound_curse_fd2(double tau, std::int64_t n, int d);

// Bound selectors applicable to a spectrum, by name:
// univariate, normdec, rn, convsq, analytic.  For mixed spectra the
// univariate bound transfers through the first-coordinate factor.
std::vector<std::string> applicable_bounds(const SpectrumSpec& spec);
BoundReport compute_bound(const std::string& name, const TruncatedSpectrum& trunc,
                          std::int64_t n);

}  // namespace pwce
