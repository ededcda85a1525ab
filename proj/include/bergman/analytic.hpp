#pragma once

#include <cmath>
#include <complex>
#include <variant>
#include <vector>

#include "bergman/quadrature.hpp"
#include "bergman/weights.hpp"

namespace bergman {

inline double falling_factorial(double k, int n) {
    double out = 1.0;
    for (int i = 0; i < n; ++i) out *= (k - i);
    return out;
}

/// C_{delta,n} = delta (delta+1) ... (delta+n-1); equals 1 at n = 0.
inline double rising_factorial(double delta, int n) {
    double out = 1.0;
    for (int i = 0; i < n; ++i) out *= (delta + i);
    return out;
}

/// z^n for integer n >= 0 (std::pow(complex, ...) mishandles 0^0).
inline Complex cpow_int(Complex z, long n) {
    Complex out = 1.0, base = z;
    for (long e = n; e > 0; e >>= 1) {
        if (e & 1) out *= base;
        base *= base;
    }
    return out;
}

struct TaylorPoly {
    std::vector<Complex> coeffs;  // a_0 .. a_d

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }

    Complex eval(Complex z) const {
        Complex acc = 0.0;
        for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * z + coeffs[k];
        return acc;
    }

    Complex derivative_eval(int n, Complex z) const {
        if (n < 0) throw std::invalid_argument("derivative order must be >= 0");
        Complex acc = 0.0;
        for (int k = degree(); k >= n; --k)
            acc = acc * z + coeffs[k] * falling_factorial(static_cast<double>(k), n);
        return acc;
    }
};

enum class TestVariant { one_minus_a, one_minus_a_sq };

/// The delta exponent of the test family; the paper only asserts existence of
/// a large enough value, so the basis is recorded.
struct DeltaChoice {
    enum class Basis { user, heuristic };
    double value = 2.0;
    Basis basis = Basis::user;

    static DeltaChoice user(double v) {
        if (!(v > 0.0)) throw std::invalid_argument("delta must be > 0");
        return DeltaChoice{v, Basis::user};
    }
};

/// Heuristic delta = max(2, 2 (beta_high + 1) / p): clears the Forelli-Rudin
/// integrability threshold for the measured tail exponent with factor-2 slack.
inline DeltaChoice choose_delta(const RadialWeight&, double p, const DoublingReport& report) {
    DeltaChoice out;
    out.value = std::max(2.0, 2.0 * (report.beta_high + 1.0) / p);
    out.basis = DeltaChoice::Basis::heuristic;
    return out;
}

/// Analytic function: finite Taylor polynomial, the kernel-type test function
/// f_a(z) = ((1-|a|)/(1 - conj(a) z))^delta w(S(a))^{-1/p}, or the normalized
/// monomial z^n / ||z^n||.
class AnalyticFunction {
public:
    struct TestFn {
        Complex a;
        double delta;
        RadialWeight w;
        double p;
        TestVariant variant;
        double box_mass;    // w(S(a))
        double norm_factor; // (1-|a|)^delta (or |a|^2 variant) * box_mass^{-1/p}
    };

    struct Monomial {
        long n;
        RadialWeight w;
        double p;
        double norm;  // ||z^n||_{A^p_w} = (2 w_{np+1})^{1/p}
    };

    static AnalyticFunction taylor(std::vector<Complex> coeffs) {
        if (coeffs.empty()) coeffs.push_back(0.0);
        for (Complex c : coeffs)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                throw std::invalid_argument("taylor coefficients must be finite");
        return AnalyticFunction(TaylorPoly{std::move(coeffs)});
    }

    static AnalyticFunction test_function(Complex a, const DeltaChoice& delta,
                                          const RadialWeight& w, double p,
                                          TestVariant variant = TestVariant::one_minus_a) {
        if (!(std::abs(a) < 1.0))
            throw std::invalid_argument("test function: |a| must be < 1");
        if (!(delta.value > 0.0)) throw std::invalid_argument("test function: delta must be > 0");
        if (!(p > 0.0)) throw std::invalid_argument("test function: p must be > 0");
        TestFn fn{a, delta.value, w, p, variant, 0.0, 0.0};
        fn.box_mass = w.carleson_box(a);
        const double top = variant == TestVariant::one_minus_a ? 1.0 - std::abs(a)
                                                               : 1.0 - std::norm(a);
        fn.norm_factor = std::pow(top, delta.value) * std::pow(fn.box_mass, -1.0 / p);
        return AnalyticFunction(std::move(fn));
    }

    static AnalyticFunction normalized_monomial(long n, const RadialWeight& w, double p) {
        if (n < 0) throw std::invalid_argument("monomial degree must be >= 0");
        if (!(p > 0.0)) throw std::invalid_argument("monomial: p must be > 0");
        Monomial m{n, w, p, 0.0};
        m.norm = std::pow(2.0 * w.moment_real(static_cast<double>(n) * p + 1.0), 1.0 / p);
        return AnalyticFunction(std::move(m));
    }

    Complex operator()(Complex z) const { return derivative(0, z); }

    /// Exact n-th derivative at z: term-wise for Taylor polynomials, the
    /// closed form with C_{delta,n} for the test family.
    Complex derivative(int n, Complex z) const {
        if (n < 0) throw std::invalid_argument("derivative order must be >= 0");
        if (const auto* t = std::get_if<TaylorPoly>(&repr_)) return t->derivative_eval(n, z);
        if (const auto* f = std::get_if<TestFn>(&repr_)) {
            const Complex abar = std::conj(f->a);
            const Complex base = 1.0 - abar * z;  // Re > 0 on the disk
            return rising_factorial(f->delta, n) * cpow_int(abar, n) * f->norm_factor *
                   std::pow(base, -(f->delta + n));
        }
        const auto& m = std::get<Monomial>(repr_);
        if (n > m.n) return 0.0;
        return falling_factorial(static_cast<double>(m.n), n) * cpow_int(z, m.n - n) / m.norm;
    }

    bool is_taylor() const { return std::holds_alternative<TaylorPoly>(repr_); }
    const TaylorPoly& taylor_poly() const { return std::get<TaylorPoly>(repr_); }
    const TestFn* as_test_fn() const { return std::get_if<TestFn>(&repr_); }
    const Monomial* as_monomial() const { return std::get_if<Monomial>(&repr_); }

    /// Taylor expansion to the given degree. Exact for polynomials within
    /// range; for the test family, the magnitude of the first dropped
    /// coefficient is reported through next_coeff_mag.
    TaylorPoly expand(int degree, double* next_coeff_mag = nullptr) const {
        if (degree < 0) throw std::invalid_argument("expand: degree must be >= 0");
        if (next_coeff_mag) *next_coeff_mag = 0.0;
        if (const auto* t = std::get_if<TaylorPoly>(&repr_)) {
            TaylorPoly out = *t;
            if (out.degree() > degree) {
                if (next_coeff_mag) *next_coeff_mag = std::abs(out.coeffs[degree + 1]);
                out.coeffs.resize(degree + 1);
            }
            return out;
        }
        if (const auto* f = std::get_if<TestFn>(&repr_)) {
            // (1 - conj(a) z)^{-delta} = sum_k (delta)_k / k! (conj(a) z)^k
            TaylorPoly out;
            out.coeffs.resize(degree + 1);
            Complex c = f->norm_factor;
            const Complex abar = std::conj(f->a);
            for (int k = 0; k <= degree; ++k) {
                out.coeffs[k] = c;
                c *= abar * ((f->delta + k) / (k + 1.0));
            }
            if (next_coeff_mag) *next_coeff_mag = std::abs(c);
            return out;
        }
        const auto& m = std::get<Monomial>(repr_);
        TaylorPoly out;
        if (m.n > degree) {
            if (next_coeff_mag) *next_coeff_mag = 1.0 / m.norm;
            out.coeffs.assign(degree + 1, 0.0);
        } else {
            out.coeffs.assign(m.n + 1, 0.0);
            out.coeffs[m.n] = 1.0 / m.norm;
        }
        return out;
    }

private:
    using Repr = std::variant<TaylorPoly, TestFn, Monomial>;
    explicit AnalyticFunction(Repr repr) : repr_(std::move(repr)) {}
    Repr repr_;
};

/// ||f||_{A^p_w} by disk quadrature. A divergent outcome (possible only for
/// the test family with delta too small for the grid) propagates as an error.
inline double bergman_norm(const AnalyticFunction& f, const RadialWeight& w, double p,
                           const QuadratureSpec& spec = {}) {
    if (!(p > 0.0)) throw std::invalid_argument("bergman_norm: p must be > 0");
    const auto outcome = integrate_disk(
        [&](Complex z) { return std::pow(std::abs(f(z)), p) * w(std::abs(z)); }, spec);
    if (outcome.divergent())
        throw QuadratureError("bergman_norm: |f|^p w diverges on the quadrature grid");
    return std::pow(outcome.value, 1.0 / p);
}

/// p = 2 norm of a Taylor polynomial by the moment formula
/// ||f||^2 = sum_k |a_k|^2 2 w_{2k+1}; the quadrature cross-check route.
inline double bergman_norm_moments(const TaylorPoly& f, const RadialWeight& w) {
    double acc = 0.0;
    for (std::size_t k = 0; k < f.coeffs.size(); ++k)
        acc += std::norm(f.coeffs[k]) * 2.0 * w.moment(2 * static_cast<long>(k) + 1);
    return std::sqrt(acc);
}

/// Measured constant of the pointwise growth bound: max over the grid of
/// |f^{(n)}(z)| w(S(z))^{1/p} (1-|z|)^n / ||f||.
inline double growth_ratio(const AnalyticFunction& f, const RadialWeight& w, double p, int n,
                           const std::vector<Complex>& grid, const QuadratureSpec& spec = {}) {
    const double norm = (f.is_taylor() && p == 2.0)
                            ? bergman_norm_moments(f.taylor_poly(), w)
                            : bergman_norm(f, w, p, spec);
    if (!(norm > 0.0)) throw std::invalid_argument("growth_ratio: ||f|| must be > 0");
    double best = 0.0;
    for (Complex z : grid) {
        const double r = std::abs(z);
        const double val = std::abs(f.derivative(n, z)) * std::pow(w.carleson_box(r), 1.0 / p) *
                           std::pow(1.0 - r, n);
        best = std::max(best, val);
    }
    return best / norm;
}

}  // namespace bergman
