#include "pwce/bump.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace pwce {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;

// E(v) = int_0^a e^{-2 pi i v t} dt
std::complex<double> base_integral(double v, double a) {
    if (v == 0.0) return {a, 0.0};
    const double ang = kTwoPi * v * a;
    const std::complex<double> num(1.0 - std::cos(ang), std::sin(ang));
    return num / std::complex<double>(0.0, kTwoPi * v);
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}

// int_0^a t^m e^{-2 pi i k t} dt
std::complex<double> monomial_integral(int m, double k, double a) {
    if (k == 0.0) return {std::pow(a, m + 1) / double(m + 1), 0.0};
    const double x = kTwoPi * k * a;
    if (std::abs(x) < 0.5) {
        // series sum_q (-2 pi i k)^q a^{m+q+1} / (q! (m+q+1))
        std::complex<double> sum = 0.0, term = std::pow(a, m + 1);
        for (int q = 0; q < 40; ++q) {
            sum += term / double(m + q + 1);
            term *= std::complex<double>(0.0, -kTwoPi * k) * a / double(q + 1);
            if (std::abs(term) < 1e-20 * std::abs(sum)) break;
        }
        return sum;
    }
    const std::complex<double> inv_ik(0.0, -1.0 / (kTwoPi * k));  // 1/(2 pi i k)
    const std::complex<double> ea(std::cos(x), -std::sin(x));     // e^{-2 pi i k a}
    std::complex<double> I = base_integral(k, a);
    for (int q = 1; q <= m; ++q) I = inv_ik * (-std::pow(a, q) * ea + double(q) * I);
    return I;
}

}  // namespace

BumpSpec BumpSpec::cosine_squared(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("bump: scale n >= 1 required");
    BumpSpec b;
    b.family_ = Family::cosine_squared;
    b.n_ = n;
    return b;
}

BumpSpec BumpSpec::polynomial_spline(std::int64_t n, int degree) {
    if (n < 1) throw std::invalid_argument("bump: scale n >= 1 required");
    if (degree < 1 || degree > 6)
        throw std::invalid_argument("bump: spline degree must be in [1, 6]");
    BumpSpec b;
    b.family_ = Family::polynomial_spline;
    b.n_ = n;
    b.degree_ = degree;
    return b;
}

BumpSpec BumpSpec::paper_phi(std::int64_t n, int truncation_level, SpectrumSpec lambda) {
    if (n < 1) throw std::invalid_argument("bump: scale n >= 1 required");
    if (truncation_level < 1) throw std::invalid_argument("bump: truncation level >= 1 required");
    if (lambda.dimension() != 1) throw std::invalid_argument("bump: univariate spectrum required");
    BumpSpec b;
    b.family_ = Family::paper_phi;
    b.n_ = n;
    b.level_ = truncation_level;
    b.lam2nm_.resize(std::size_t(truncation_level));
    for (int m = 1; m <= truncation_level; ++m)
        b.lam2nm_[std::size_t(m - 1)] = lambda.value1(2 * n * std::int64_t(m));
    return b;
}

std::complex<double> BumpSpec::coefficient(std::int64_t k) const {
    const double a = 1.0 / (2.0 * double(n_));
    const double kd = double(k);
    switch (family_) {
        case Family::cosine_squared:
            // sin^2(2 pi n t) = 1/2 - (1/4) e_{2n} - (1/4) e_{-2n} on the support
            return 0.5 * base_integral(kd, a) - 0.25 * base_integral(kd - 2.0 * n_, a) -
                   0.25 * base_integral(kd + 2.0 * n_, a);
        case Family::polynomial_spline: {
            std::complex<double> sum = 0.0;
            const int p = degree_;
            for (int i = 0; i <= p; ++i) {
                const double coeff = std::pow(2.0, p) * binomial(p, i) * ((i % 2) ? -1.0 : 1.0) *
                                     std::pow(2.0 * double(n_), p + i);
                sum += coeff * monomial_integral(p + i, kd, a);
            }
            return sum;
        }
        case Family::paper_phi: {
            std::complex<double> sum = 0.0;
            for (int m = 1; m <= level_; ++m) {
                const double lam = lam2nm_[std::size_t(m - 1)];
                const std::int64_t f = 2 * n_ * std::int64_t(m);
                if (k == 0) {
                    sum += lam * a;  // E(0) - E(-f) = a
                } else if (k == f) {
                    sum += lam * (-a);  // E(f) - E(0) = -a
                } else {
                    // shared numerator: E(k) - E(k-f) = num/(2 pi i) (1/k - 1/(k-f))
                    const double ang = kTwoPi * kd * a;
                    const std::complex<double> num(1.0 - std::cos(ang), std::sin(ang));
                    const std::complex<double> diff =
                        num / std::complex<double>(0.0, kTwoPi) *
                        (-double(f) / (kd * (kd - double(f))));
                    sum += lam * diff;
                }
            }
            return sum;
        }
    }
    return 0.0;
}

double BumpSpec::integral() const {
    const double a = 1.0 / (2.0 * double(n_));
    switch (family_) {
        case Family::cosine_squared:
            return 0.5 * a;
        case Family::polynomial_spline:
        case Family::paper_phi:
            return coefficient(0).real();
    }
    return 0.0;
}

double BumpSpec::tail_majorant(std::int64_t F) const {
    const double Fd = double(F + 1);
    switch (family_) {
        case Family::cosine_squared: {
            // |c_k| <= 2 n^2 / (pi |k| (k^2 - 4n^2)) for |k| > 2n
            const double q = 2.0 * double(n_) / Fd;
            if (q >= 1.0) throw std::invalid_argument("tail_majorant: F too small");
            return 2.0 * double(n_) * double(n_) / (kPi * Fd * (1.0 - q * q));
        }
        case Family::polynomial_spline: {
            // two integrations by parts
            const int p = degree_;
            double m2 = 0.0;
            for (int i = 0; i <= p; ++i)
                m2 += std::pow(2.0, p) * binomial(p, i) * double((p + i) * (p + i - 1));
            const double edge = (p == 1) ? 2.0 * (2.0 * double(n_)) * 2.0 : 0.0;
            return (edge + 2.0 * double(n_) * m2) / (4.0 * kPi * kPi);
        }
        case Family::paper_phi: {
            double w = 0.0;
            for (int m = 1; m <= level_; ++m) w += double(m) * lam2nm_[std::size_t(m - 1)];
            const double shift = 2.0 * double(n_) * double(level_);
            if (shift / Fd >= 0.5) throw std::invalid_argument("tail_majorant: F too small");
            return 2.0 * double(n_) * w / (kPi * (1.0 - shift / Fd));
        }
    }
    return 0.0;
}

std::int64_t BumpSpec::min_trunc_freq() const {
    switch (family_) {
        case Family::cosine_squared:
            return 4 * n_;
        case Family::polynomial_spline:
            return 4 * n_;
        case Family::paper_phi:
            return 4 * n_ * std::int64_t(level_);
    }
    return 4 * n_;
}

std::vector<double> adversarial_nodes(std::int64_t n) {
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("adversarial_nodes: even n >= 2 required");
    std::vector<double> z(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n / 2; ++j) {
        z[std::size_t(2 * j)] = double(4 * j) / (2.0 * double(n));
        z[std::size_t(2 * j + 1)] = double(4 * j + 1) / (2.0 * double(n));
    }
    return z;
}

std::vector<double> full_grid(std::int64_t n) {
    std::vector<double> z(static_cast<std::size_t>(2 * n));
    for (std::int64_t j = 0; j < 2 * n; ++j) z[std::size_t(j)] = double(j) / (2.0 * double(n));
    return z;
}

FourierTable phi_n_fourier(const BumpSpec& bump, const std::vector<double>& placements,
                           std::int64_t trunc_freq, std::string placement_label) {
    if (trunc_freq < bump.min_trunc_freq())
        throw std::invalid_argument("phi_n_fourier: frequency truncation below the bump guard");
    for (double z : placements)
        if (z < 0.0 || z >= 1.0)
            throw std::invalid_argument("phi_n_fourier: placements must lie in [0,1)");

    FourierTable t;
    t.trunc_freq = trunc_freq;
    t.scale = bump.scale();
    t.placements = placements.size();
    t.placement_label = std::move(placement_label);
    t.coeffs.assign(std::size_t(2 * trunc_freq + 1), {0.0, 0.0});
    t.tail_majorant_A = bump.tail_majorant(trunc_freq) * double(placements.size());

#pragma omp parallel for schedule(static)
    for (std::int64_t k = -trunc_freq; k <= trunc_freq; ++k) {
        std::complex<double> w = 0.0;
        for (double z : placements) {
            const double ang = kTwoPi * double(k) * z;
            w += std::complex<double>(std::cos(ang), -std::sin(ang));
        }
        t.coeffs[std::size_t(k + trunc_freq)] = bump.coefficient(k) * w;
    }
    return t;
}

FoolingReport fooling_ratio(const FourierTable& table, const TruncatedSpectrum& trunc) {
    if (trunc.dimension() != 1)
        throw std::invalid_argument("fooling_ratio: univariate spectra only");
    const auto& spec = trunc.spec;
    const std::int64_t F = table.trunc_freq;

    double coeff_scale = 0.0;
    for (const auto& c : table.coeffs) coeff_scale = std::max(coeff_scale, std::abs(c));

    double norm_sq = 0.0;
    for (std::int64_t k = -F; k <= F; ++k) {
        const std::complex<double> c = table.at(k);
        const double lam = spec.value1(k);
        if (lam == 0.0) {
            if (std::abs(c) > 1e-13 * coeff_scale)
                throw std::invalid_argument(
                    "fooling_ratio: coefficient outside the spectrum support "
                    "(function not in H_lambda)");
            continue;
        }
        norm_sq += std::norm(c) / lam;
    }

    // remainder: sum_{|k| > F} |c_k|^2 / lambda_k with |c_k| <= A/k^2 and
    // 1/lambda_k <= C k^gamma
    const auto growth = spec.inv_lambda_power_bound();
    if (!growth.has_value())
        throw std::invalid_argument(
            "fooling_ratio: no polynomial growth bound for 1/lambda; cannot certify the "
            "frequency-truncation remainder");
    const auto [gamma, C] = *growth;
    const double A = table.tail_majorant_A;
    const double Fd = double(F + 1);
    const double remainder =
        2.0 * A * A * C *
        (std::pow(Fd, gamma - 4.0) + std::pow(Fd, gamma - 3.0) / (3.0 - gamma));
    if (!(remainder < 0.25 * norm_sq))
        throw std::invalid_argument(
            "fooling_ratio: frequency truncation too small relative to the spectral "
            "tolerance (remainder bound " +
            std::to_string(remainder) + " vs norm^2 " + std::to_string(norm_sq) + ")");

    const std::complex<double> c0 = table.at(0);
    if (std::abs(c0.imag()) > 1e-10 * std::max(1.0, std::abs(c0.real())))
        throw std::invalid_argument("fooling_ratio: integral is not real");

    FoolingReport rep;
    rep.n = table.scale;
    rep.placement = table.placement_label;
    rep.integral = c0.real();
    const Interval nsq = widened(norm_sq, norm_sq + remainder);
    rep.norm = {std::sqrt(nsq.lo), std::sqrt(nsq.hi)};
    if (rep.norm.hi <= 0.0)
        throw std::invalid_argument("fooling_ratio: zero function");
    rep.ratio = rep.integral / rep.norm.hi;
    return rep;
}

Interval phi_n_ratio_closed(const SpectrumSpec& spec, std::int64_t n) {
    if (spec.dimension() != 1)
        throw std::invalid_argument("phi_n_ratio_closed: univariate spectra only");
    const Interval T = spec.progression_tail(2 * n, 0);
    const double lam0 = spec.lambda0();
    auto f = [&](double t) { return t <= 0.0 ? 0.0 : t / std::sqrt(t + t * t / lam0); };
    return widened(f(T.lo), f(T.hi));
}

// ---------------------------------------------------------------------------
// gamma weights
// ---------------------------------------------------------------------------

namespace {

struct SimpsonState {
    double achieved = 0.0;
    std::int64_t evals = 0;
};

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double eps, int depth,
                        SimpsonState& st) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    st.evals += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = (left + right - whole) / 15.0;
    if (depth <= 0 || std::abs(err) <= eps) {
        st.achieved += std::abs(err);
        return left + right + err;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1, st) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1, st);
}

double integrate(const std::function<double(double)>& f, double a, double b, double eps,
                 SimpsonState& st) {
    if (b <= a) return 0.0;
    const double fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
    st.evals += 3;
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, 0.5 * (a + b), fa, f(0.25 * (3 * a + b)), fm,
                            (b - a) / 12.0 * (fa + 4.0 * f(0.25 * (3 * a + b)) + fm), eps, 48,
                            st) +
           adaptive_simpson(f, 0.5 * (a + b), b, fm, f(0.25 * (a + 3 * b)), fb,
                            (b - a) / 12.0 * (fm + 4.0 * f(0.25 * (a + 3 * b)) + fb), eps, 48,
                            st);
}

}  // namespace

double gamma_weight(std::int64_t j, double beta, double quad_tol) {
    if (beta <= 0.5) throw std::invalid_argument("gamma_weight: beta > 1/2 required");
    if (quad_tol <= 0.0 || quad_tol >= 1.0)
        throw std::invalid_argument("gamma_weight: quadrature tolerance in (0,1) required");
    if (j == 0) return 1.0;  // the integrand vanishes
    const double aj = double(std::abs(j));

    // sin(pi j h)/h, stable near h = 0
    auto ratio = [&](double h) {
        const double x = kPi * aj * h;
        if (std::abs(x) < 1e-8) return kPi * aj * (1.0 - x * x / 6.0);
        return std::sin(x) / h;
    };
    auto integrand = [&](double h) {
        const double r = ratio(h);
        return 4.0 * std::pow(1.0 - std::log(h), 2.0 * beta) * r * r;
    };

    const double h0 = std::min(1.0 / (kTwoPi * aj), 1.0);
    const double U = 199.0;  // lower cutoff h = e^{-U}; remainder below is certified

    // analytic remainder over (0, e^{-U}]
    const double Uq = 1.0 + U;
    const double below = 4.0 * kPi * kPi * aj * aj * std::exp(1.0) *
                         std::pow(Uq, 2.0 * beta) * std::exp(-Uq) /
                         (1.0 - 2.0 * beta / Uq);

    SimpsonState st;
    // smooth piece on [e^{-U}, h0] via h = e^{-u}:
    // G(u) = 4 (1+u)^{2 beta} (sin(pi j e^{-u}) e^{u/2})^2
    auto smooth = [&](double u) {
        const double s = std::sin(kPi * aj * std::exp(-u)) * std::exp(0.5 * u);
        return 4.0 * std::pow(1.0 + u, 2.0 * beta) * s * s;
    };
    const double u0 = -std::log(h0);
    double piece_a = integrate(smooth, u0, U, 1.0, st);
    piece_a = integrate(smooth, u0, U, quad_tol * std::abs(piece_a) / 8.0 + 1e-300, st);

    // oscillatory piece on [h0, 1], split at half-periods m/(2j)
    double piece_b = 0.0;
    {
        std::vector<double> cuts;
        cuts.push_back(h0);
        const std::int64_t m_lo = std::int64_t(std::ceil(h0 * 2.0 * aj));
        for (std::int64_t m = m_lo; m < std::int64_t(2.0 * aj); ++m) {
            const double c = double(m) / (2.0 * aj);
            if (c > h0 && c < 1.0) cuts.push_back(c);
        }
        cuts.push_back(1.0);
        double rough = 0.0;
        std::vector<double> first(cuts.size() - 1);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            SimpsonState tmp;
            first[i] = integrate(integrand, cuts[i], cuts[i + 1], 1e300, tmp);
            rough += std::abs(first[i]);
        }
        const double eps_piece = quad_tol * std::max(rough, 1.0) / (8.0 * double(cuts.size()));
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            piece_b += integrate(integrand, cuts[i], cuts[i + 1], eps_piece, st);
    }

    const double gamma = 1.0 + piece_a + piece_b + 0.0;
    const double achieved = (st.achieved + below) / std::max(gamma, 1.0);
    if (achieved > quad_tol) {
        std::ostringstream msg;
        msg << "gamma_weight: quadrature did not reach tolerance " << quad_tol
            << " (achieved " << achieved << ")";
        throw std::runtime_error(msg.str());
    }
    return gamma;
}

}  // namespace pwce
