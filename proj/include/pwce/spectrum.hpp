#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pwce/common.hpp"

namespace pwce {

// Spectral sequences lambda on Z^d.  Built-in families are symmetric,
// non-negative and l1-summable for admissible parameters; each family ships
// analytic tail majorants (and minorants where the decay is logarithmic)
// so that truncations carry certified enclosures.

enum class SpectrumFamily {
    border_univariate,  // (1+|k|)^{-1} log^{-2b}(e+|k|), d = 1
    isotropic_log,      // (1+|k|_2)^{-d} log^{-2b}(e+|k|_2)
    mixed_log,          // prod_j (1+|k_j|)^{-1} log^{-2b}(e+|k_j|)
    sobolev_isotropic,  // (1+|k|_2^2)^{-s}
    sobolev_mixed,      // prod_j (1+k_j^2)^{-s}
    geometric,          // c * w^{-|k|}, d = 1
    norm_decreasing,    // g(|k|_p) with non-increasing profile g
    explicit_table,     // finite table, 0 outside
};

// Radial profile for the norm_decreasing family.
struct RadialProfile {
    enum class Kind { exponential, power_log };
    Kind kind = Kind::exponential;
    // exponential: g(r) = c * omega^{-r}
    double c = 1.0;
    double omega = 2.0;
    // power_log: g(r) = (1+r)^{-a} * log^{-2b}(e+r)
    double a = 1.0;
    double b = 1.0;

    double operator()(double r) const;
};

class ExplicitTable {
  public:
    ExplicitTable(int dim, std::vector<std::int32_t> flat_points, std::vector<double> values);

    int dimension() const { return dim_; }
    std::size_t size() const { return values_.size(); }
    std::span<const std::int32_t> point(std::size_t i) const {
        return {points_.data() + i * dim_, std::size_t(dim_)};
    }
    double value(std::size_t i) const { return values_[i]; }
    double lookup(std::span<const std::int32_t> k) const;  // 0 outside the table
    std::int64_t max_abs_coord() const { return max_abs_coord_; }

  private:
    int dim_;
    std::vector<std::int32_t> points_;  // flattened, sorted by (|k|_2, lex)
    std::vector<double> values_;
    std::vector<std::size_t> order_;  // hash buckets, see .cpp
    std::vector<std::size_t> bucket_head_;
    std::int64_t max_abs_coord_ = 0;

    std::size_t bucket_of(std::span<const std::int32_t> k) const;
    friend void build_lookup(ExplicitTable&);
};

class SpectrumSpec {
  public:
    static SpectrumSpec border_univariate(double beta);
    static SpectrumSpec isotropic_log(int d, double beta);
    static SpectrumSpec mixed_log(int d, double beta);
    static SpectrumSpec sobolev_isotropic(int d, double s);
    static SpectrumSpec sobolev_mixed(int d, double s);
    static SpectrumSpec geometric(double c, double omega);
    static SpectrumSpec norm_decreasing(int d, NormDescriptor norm, RadialProfile g);
    static SpectrumSpec explicit_table(int d, std::vector<std::int32_t> flat_points,
                                       std::vector<double> values);

    SpectrumFamily family() const { return family_; }
    int dimension() const { return dim_; }

    double value(std::span<const std::int32_t> k) const;
    double value1(std::int64_t k) const;  // univariate convenience
    double lambda0() const;

    // Norm descriptor under which the sequence is non-increasing, if any.
    std::optional<NormDescriptor> decreasing_norm() const;
    // d == 1, symmetric and non-increasing on N_0.
    bool univariate_monotone() const;

    // --- certified tails ------------------------------------------------
    // Enclosure of sum_{|k|_inf > R} lambda_k.  hi is always a valid upper
    // bound; lo may be 0 when no analytic minorant is implemented.
    Interval box_tail(std::int64_t R) const;
    // d == 1: enclosure of sum_{k >= K} lambda_k (one-sided), K >= 1.
    Interval tail_from(std::int64_t K) const;
    // d == 1: enclosure of sum_{m > M} lambda_{stride*m}, stride >= 1, M >= 0.
    Interval progression_tail(std::int64_t stride, std::int64_t M) const;
    // sup of lambda outside the box of radius R.
    double out_of_box_max(std::int64_t R) const;
    // Growth bound 1/lambda_k <= C * k^gamma for k >= 1 (univariate families
    // with at most polynomial inverse growth); nullopt otherwise.
    std::optional<std::pair<double, double>> inv_lambda_power_bound() const;

    // Largest |coordinate| m such that a point with that single non-zero
    // coordinate still satisfies lambda >= threshold (monotone families).
    std::int64_t sublevel_max_coord(double threshold) const;

    // --- serialization ---------------------------------------------------
    std::string descriptor() const;  // canonical one-line form (families) or "explicit d"
    void write(std::ostream& os) const;
    static SpectrumSpec read(std::istream& is);

    const ExplicitTable& table() const;

    // family parameters (valid fields depend on family)
    double beta = 0.0, s = 0.0, c = 0.0, omega = 0.0;
    NormDescriptor norm{};
    RadialProfile profile{};

    SpectrumSpec() = default;  // empty placeholder; use the factories

  private:
    SpectrumFamily family_ = SpectrumFamily::explicit_table;
    int dim_ = 1;
    std::shared_ptr<const ExplicitTable> table_;
};

// Spec-level evaluation entry point.
double lambda_value(const SpectrumSpec& spec, std::span<const std::int32_t> k);

// Finite index sets in Z^d with deterministic enumeration order:
// shells of increasing norm, lexicographic inside shells.
class IndexSet {
  public:
    enum class Shape { box, ball, explicit_set };

    static IndexSet box(int dim, std::int64_t radius,
                        NormDescriptor order = NormDescriptor::euclidean());
    static IndexSet ball(int dim, NormDescriptor norm, double radius);
    static IndexSet explicit_set(int dim, std::vector<std::int32_t> flat_points,
                                 NormDescriptor order = NormDescriptor::euclidean());

    int dimension() const { return dim_; }
    std::size_t size() const { return points_.size() / std::size_t(dim_); }
    std::span<const std::int32_t> point(std::size_t i) const {
        return {points_.data() + i * std::size_t(dim_), std::size_t(dim_)};
    }
    Shape shape() const { return shape_; }
    std::int64_t box_radius() const { return box_radius_; }  // -1 unless box

    const std::vector<std::int32_t>& flat() const { return points_; }

    IndexSet() = default;

  private:
    int dim_ = 1;
    Shape shape_ = Shape::explicit_set;
    std::int64_t box_radius_ = -1;
    std::vector<std::int32_t> points_;
};

struct TruncatedSpectrum {
    SpectrumSpec spec;
    IndexSet support;
    std::vector<double> values;  // spec value at each support point, support order
    double tail_upper = 0.0;     // certified bound on the discarded l1 mass
    double mass = 0.0;           // in-support l1 mass, summed in support order
    double out_max = 0.0;        // certified sup of lambda outside the support

    double lambda0() const { return spec.lambda0(); }
    int dimension() const { return spec.dimension(); }
};

// Smallest box radius R <= max_radius with tail_upper <= rel_tol * mass(R);
// throws TruncationError (with the achieved tail) if the budget is exhausted.
TruncatedSpectrum truncate(const SpectrumSpec& spec, double rel_tol, std::int64_t max_radius);

// Truncation at a fixed box radius, certified tail attached.
TruncatedSpectrum truncate_at_radius(const SpectrumSpec& spec, std::int64_t R);

// Support = {k : lambda_k >= threshold} for families with enumerable
// sublevel sets (monotone radial families and mixed_log).  The certified
// tail covers everything outside the sublevel set.
TruncatedSpectrum truncate_sublevel(const SpectrumSpec& spec, double threshold);

Interval ell1_norm(const TruncatedSpectrum& trunc);

// Convolution of explicit spectra: (a*b)_k = sum_l a_l b_{l+k}.
SpectrumSpec convolve(const SpectrumSpec& a, const SpectrumSpec& b);

struct ConvSquareCertificate {
    std::vector<SpectrumSpec> factors;  // explicit; certified spectrum = sum_i f_i * f_i
};

// Checks that sum_i f_i * f_i equals `target` entrywise (relative tol).
bool verify_convolution_square(const SpectrumSpec& target, const ConvSquareCertificate& cert,
                               double rel_tol = 1e-12);

struct MinorantResult {
    SpectrumSpec nu;  // explicit convolution-square minorant, nu_0 = lambda_0
    ConvSquareCertificate certificate;
    double atom = 0.0;       // weight of the delta_0 square
    double even_mass = 0.0;  // in-support sum of lambda_{2k}
};

// Convolution-square minorant of a norm-decreasing spectrum:
// nu = mu*mu + t*delta_0 with mu_l = lambda_{2l} / sqrt(2 S), S the
// in-support even mass, t fixed by nu_0 = lambda_0.  Guarantees nu <= lambda
// on the support (checked) and ||nu||_1 >= (lambda_0 + S)/2.
MinorantResult convolution_square_minorant(const TruncatedSpectrum& trunc);

namespace reference {
// Serial table fill, kept as the reference implementation for the
// OpenMP-parallel one in truncate_at_radius.
std::vector<double> fill_values(const SpectrumSpec& spec, const IndexSet& support);
}  // namespace reference

namespace detail {
std::vector<double> fill_values_parallel(const SpectrumSpec& spec, const IndexSet& support);
}  // namespace detail

}  // namespace pwce
