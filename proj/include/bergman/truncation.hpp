#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "bergman/analytic.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/weights.hpp"

namespace bergman {

enum class TruncationFlavor { sharp, fejer };

/// Coefficient split f = head + tail. Sharp: head keeps a_k for k < m.
/// Fejer: head coefficient k is (1 - k/m) a_k for k < m.
struct TruncationPair {
    TaylorPoly head;
    TaylorPoly tail;
    int m = 0;
    TruncationFlavor flavor = TruncationFlavor::sharp;
};

inline TruncationPair truncate(const AnalyticFunction& f, int m, TruncationFlavor flavor) {
    if (m < 1) throw std::invalid_argument("truncate: m must be >= 1");
    if (!f.is_taylor())
        throw std::invalid_argument(
            "truncate: unsupported representation; expand closed forms to Taylor first");
    const TaylorPoly& poly = f.taylor_poly();
    const std::size_t n = poly.coeffs.size();
    TruncationPair out;
    out.m = m;
    out.flavor = flavor;
    out.head.coeffs.assign(n, 0.0);
    out.tail.coeffs.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = (static_cast<int>(k) < m)
                             ? (flavor == TruncationFlavor::sharp
                                    ? 1.0
                                    : 1.0 - static_cast<double>(k) / m)
                             : 0.0;
        out.head.coeffs[k] = w * poly.coeffs[k];
        out.tail.coeffs[k] = poly.coeffs[k] - out.head.coeffs[k];
    }
    return out;
}

/// Closed-form inputs are expanded to the requested degree first (default 256).
inline TruncationPair truncate_expanded(const AnalyticFunction& f, int m, TruncationFlavor flavor,
                                        int expansion_degree = 256,
                                        double* expansion_error = nullptr) {
    if (f.is_taylor()) return truncate(f, m, flavor);
    const TaylorPoly poly = f.expand(expansion_degree, expansion_error);
    return truncate(AnalyticFunction::taylor(poly.coeffs), m, flavor);
}

/// ||T_m f|| / ||f||; the moment route is exact at p = 2, quadrature otherwise.
/// The sharp flavor is the p > 1 statement, Fejer covers p >= 1.
inline double truncation_norm_ratio(const AnalyticFunction& f, const RadialWeight& w, double p,
                                    int m, TruncationFlavor flavor,
                                    const QuadratureSpec& spec = {}) {
    if (flavor == TruncationFlavor::sharp && !(p > 1.0))
        throw std::invalid_argument("sharp truncation ratio needs p > 1");
    if (flavor == TruncationFlavor::fejer && !(p >= 1.0))
        throw std::invalid_argument("fejer truncation ratio needs p >= 1");
    const TruncationPair pair = truncate(f, m, flavor);
    double head_norm, full_norm;
    if (p == 2.0) {
        head_norm = bergman_norm_moments(pair.head, w);
        full_norm = bergman_norm_moments(f.taylor_poly(), w);
    } else {
        head_norm = bergman_norm(AnalyticFunction::taylor(pair.head.coeffs), w, p, spec);
        full_norm = bergman_norm(f, w, p, spec);
    }
    if (!(full_norm > 0.0))
        throw std::invalid_argument("truncation_norm_ratio: ||f|| must be > 0");
    return head_norm / full_norm;
}

/// Partial sum of the reproducing kernel: sum_{k<=N} (xi conj(z))^k / (2 w_{2k+1}).
inline Complex kernel_partial_sum(const RadialWeight& w, Complex z, Complex xi, int N) {
    if (N < 0) throw std::invalid_argument("kernel_partial_sum: N must be >= 0");
    const Complex base = xi * std::conj(z);
    Complex acc = 0.0, power = 1.0;
    for (int k = 0; k <= N; ++k) {
        acc += power / (2.0 * w.moment(2L * k + 1));
        power *= base;
    }
    return acc;
}

/// Moment tail sum_{k>=m} r^k / (2 w_{2k+1}), summed until terms fall below
/// 1e-16 of the running sum. Detects non-decaying terms (r too close to 1 for
/// the weight's moment decay) and reports them as divergence.
inline double kernel_tail(const RadialWeight& w, double r, int m) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("kernel_tail: r must be in (0,1)");
    if (m < 0) throw std::invalid_argument("kernel_tail: m must be >= 0");
    double acc = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    int growth_streak = 0;
    double power = std::pow(r, m);
    for (long k = m; k < m + 2000000; ++k) {
        const double term = power / (2.0 * w.moment(2 * k + 1));
        acc += term;
        power *= r;
        if (term > prev) {
            if (++growth_streak > 64 && k > m + 64)
                throw QuadratureError("kernel_tail: terms not decaying; series diverges");
        } else {
            growth_streak = 0;
        }
        prev = term;
        if (term < 1e-16 * acc && k > m + 8) return acc;
    }
    throw QuadratureError("kernel_tail: no convergence within the term budget");
}

/// Fejer remainder bound: kernel_tail plus the Cesaro correction
/// (1/m) sum_{k>=1} k r^{k-1} / (2 w_{2k+1}).
inline double fejer_tail_bound(const RadialWeight& w, double r, int m) {
    if (m < 1) throw std::invalid_argument("fejer_tail_bound: m must be >= 1");
    double acc = 0.0;
    double power = 1.0;  // r^{k-1} at k = 1
    for (long k = 1; k < 2000000; ++k) {
        const double term = static_cast<double>(k) * power / (2.0 * w.moment(2 * k + 1));
        acc += term;
        power *= r;
        if (term < 1e-16 * acc && k > 8) break;
    }
    return kernel_tail(w, r, m) + acc / m;
}

/// Measured sup over the closed sub-disk D_r of |R_m f| / ||f||; the lemma
/// counterpart bound is kernel_tail (fejer_tail_bound for the Fejer flavor).
inline double remainder_sup_check(const AnalyticFunction& f, const RadialWeight& w, double p,
                                  int m, double r,
                                  TruncationFlavor flavor = TruncationFlavor::sharp,
                                  const QuadratureSpec& spec = {}) {
    if (!(r > 0.0 && r < 1.0))
        throw std::invalid_argument("remainder_sup_check: r must be in (0,1)");
    const TruncationPair pair = truncate(f, m, flavor);
    const double norm = (p == 2.0) ? bergman_norm_moments(f.taylor_poly(), w)
                                   : bergman_norm(f, w, p, spec);
    if (!(norm > 0.0)) throw std::invalid_argument("remainder_sup_check: ||f|| must be > 0");
    double sup = std::abs(pair.tail.eval(0.0));
    constexpr int kRadii = 24, kAngles = 48;
    for (int i = 1; i <= kRadii; ++i) {
        const double rr = r * i / kRadii;
        for (int k = 0; k < kAngles; ++k)
            sup = std::max(sup, std::abs(pair.tail.eval(std::polar(rr, 2.0 * kPi * k / kAngles))));
    }
    return sup / norm;
}

/// Residual |<f, B_z(.;N)> - f(z)| with the pairing evaluated by the exact
/// coefficient formula (monomial orthogonality at p = 2).
inline double reproducing_residual(const RadialWeight& w, const TaylorPoly& f, Complex z, int N) {
    (void)w;  // the coefficient pairing cancels the moments exactly
    Complex acc = 0.0, power = 1.0;
    const int top = std::min<int>(N, f.degree());
    for (int k = 0; k <= top; ++k) {
        acc += f.coeffs[k] * power;
        power *= z;
    }
    return std::abs(acc - f.eval(z));
}

/// Quadrature route for the same pairing: int f conj(B_z(.;N)) w dA, via two
/// real disk integrals. Cross-validates the coefficient formula.
inline Complex kernel_pairing_quadrature(const RadialWeight& w, const TaylorPoly& f, Complex z,
                                         int N, const QuadratureSpec& spec = {}) {
    auto integrand = [&](Complex xi) {
        return f.eval(xi) * std::conj(kernel_partial_sum(w, z, xi, N)) * w(std::abs(xi));
    };
    const auto re = integrate_disk([&](Complex xi) { return integrand(xi).real(); }, spec);
    const auto im = integrate_disk([&](Complex xi) { return integrand(xi).imag(); }, spec);
    return Complex(re.value, im.value);
}

}  // namespace bergman
