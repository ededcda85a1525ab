// Test-only oracles, independent of the disk quadrature engine they check.
#pragma once

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bergman/util.hpp"
#include "bergman/weights.hpp"

namespace oracles {

using bergman::Complex;

/// int_D dA / |1 - c xi|^{2m} for integer m >= 1, |c| < 1, by the binomial
/// series: sum_k binom(k+m-1, m-1)^2 c^{2k} / (k+1).
inline double mobius_kernel_integral(double c, int m) {
    double acc = 0.0, pw = 1.0;
    const double c2 = c * c;
    for (long k = 0;; ++k) {
        double b = 1.0;
        for (int i = 1; i < m; ++i) b *= static_cast<double>(k + i) / i;
        const double term = b * b * pw / (k + 1);
        acc += term;
        pw *= c2;
        if (term < 1e-17 * acc && k > 8) break;
        if (k > 80000000) break;
    }
    return acc;
}

/// Nested 1-D Gauss-Kronrod for int_D g(|xi|, theta) dA with a radial factor
/// and the |1 - rho e^{i theta}|^{-s} angular profile: the reduction oracle
/// for radial-density kernel integrals.
inline double radial_kernel_oracle(const std::function<double(double)>& radial_density,
                                   double a_modulus, double s) {
    auto angular = [&](double r) {
        const double rho = a_modulus * r;
        auto f = [rho, s](double t) {
            const double d2 = 1.0 - 2.0 * rho * std::cos(t) + rho * rho;
            return std::pow(d2, -0.5 * s);
        };
        double err;
        return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, bergman::kPi,
                                                                             25, 1e-10, &err) /
               bergman::kPi;
    };
    auto outer = [&](double r) { return 2.0 * r * radial_density(r) * angular(r); };
    double err;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(outer, 0.0, 1.0, 25,
                                                                         1e-10, &err);
}

/// Random polynomial with coefficients uniform in the complex unit square.
inline std::vector<Complex> random_coeffs(bergman::SplitMix64& rng, int degree) {
    std::vector<Complex> out(degree + 1);
    for (auto& c : out) c = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    return out;
}

}  // namespace oracles
