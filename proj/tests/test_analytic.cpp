#include <catch2/catch_amalgamated.hpp>

#include <boost/math/special_functions/beta.hpp>

#include "bergman/analytic.hpp"
#include "bergman/criteria.hpp"
#include "oracles.hpp"

using namespace bergman;
using Catch::Approx;

TEST_CASE("derivatives of Taylor polynomials") {
    const auto z3 = AnalyticFunction::taylor({0, 0, 0, 1});
    CHECK(z3.derivative(1, Complex(0.5, 0)).real() == Approx(0.75).epsilon(1e-14));
    const auto p = AnalyticFunction::taylor({1, 2, 3});
    CHECK(p.derivative(2, Complex(0.1, 0.7)).real() == Approx(6.0).epsilon(1e-14));
    CHECK(p.derivative(2, Complex(-0.4, 0.1)).imag() == Approx(0.0).margin(1e-14));
    CHECK(p.derivative(5, Complex(0.3, 0)) == Complex(0.0));
}

TEST_CASE("test function values and derivatives") {
    const auto w0 = RadialWeight::standard(0.0);
    const Complex a(0.4, 0.3);
    const double delta = 3.0, p = 2.0;
    const auto f = AnalyticFunction::test_function(a, DeltaChoice::user(delta), w0, p);

    // f_a(a) = (1+|a|)^{-delta} w(S(a))^{-1/p}
    const double expected =
        std::pow(1.0 + std::abs(a), -delta) * std::pow(w0.carleson_box(a), -1.0 / p);
    CHECK(std::abs(f(a)) == Approx(expected).epsilon(1e-12));

    // derivatives against central finite differences of the 0th derivative
    for (int n : {1, 2}) {
        for (const Complex z : {Complex(0.2, 0.1), Complex(-0.5, 0.4), Complex(0.7, -0.3)}) {
            const double h = 1e-5;
            Complex fd;
            if (n == 1) {
                fd = (f(z + h) - f(z - h)) / (2.0 * h);
            } else {
                fd = (f.derivative(1, z + h) - f.derivative(1, z - h)) / (2.0 * h);
            }
            CHECK(std::abs(f.derivative(n, z) - fd) <=
                  1e-6 * std::max(1.0, std::abs(f.derivative(n, z))));
        }
    }
}

TEST_CASE("Bergman norms") {
    const auto w0 = RadialWeight::standard(0.0);
    CHECK(bergman_norm(AnalyticFunction::taylor({1}), w0, 2) == Approx(1.0).epsilon(1e-7));
    CHECK(bergman_norm(AnalyticFunction::taylor({0, 1}), w0, 2) ==
          Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));

    // ||z^k||_{A^2_alpha} = B(k+1, alpha+1)^{1/2}
    for (double alpha : {0.0, 1.0, 2.0}) {
        const auto w = RadialWeight::standard(alpha);
        for (int k : {1, 3}) {
            std::vector<Complex> c(k + 1, 0.0);
            c[k] = 1.0;
            CHECK(bergman_norm(AnalyticFunction::taylor(c), w, 2) ==
                  Approx(std::sqrt(boost::math::beta(k + 1.0, alpha + 1.0))).epsilon(1e-6));
        }
    }
}

TEST_CASE("moment-formula norm agrees with quadrature at p=2") {
    SplitMix64 rng(5150);
    for (double alpha : {0.0, 1.0}) {
        const auto w = RadialWeight::standard(alpha);
        for (int trial = 0; trial < 4; ++trial) {
            const auto poly = AnalyticFunction::taylor(oracles::random_coeffs(rng, 8));
            const double quad = bergman_norm(poly, w, 2);
            const double mom = bergman_norm_moments(poly.taylor_poly(), w);
            CHECK(quad == Approx(mom).epsilon(1e-6));
        }
    }
}

TEST_CASE("normalized monomials have unit norm") {
    const auto w1 = RadialWeight::standard(1.0);
    for (long n : {0L, 2L, 7L}) {
        const auto m = AnalyticFunction::normalized_monomial(n, w1, 2.0);
        CHECK(bergman_norm(m, w1, 2) == Approx(1.0).epsilon(1e-6));
    }
    // non-integer p uses the fractional moment route
    const auto m = AnalyticFunction::normalized_monomial(3, w1, 1.5);
    CHECK(bergman_norm(m, w1, 1.5) == Approx(1.0).epsilon(1e-5));
}

TEST_CASE("test family: constant member and uniformity") {
    const auto w0 = RadialWeight::standard(0.0);
    // a = 0: f is the constant w(D)^{-1/p}, norm exactly 1
    const auto f0 = AnalyticFunction::test_function(0.0, DeltaChoice::user(3.0), w0, 2.0);
    CHECK(bergman_norm(f0, w0, 2) == Approx(1.0).epsilon(1e-7));

    double lo = 1e300, hi = 0.0;
    for (double r : {0.25, 0.5, 0.8, 0.95, 0.99, 0.999}) {
        for (int k = 0; k < 4; ++k) {
            const Complex a = std::polar(r, 2.0 * kPi * k / 4 + 0.3);
            const double n = test_function_norm(a, DeltaChoice::user(3.0), w0, 2.0);
            lo = std::min(lo, n);
            hi = std::max(hi, n);
        }
    }
    CHECK(hi / lo <= 20.0);

    // below the integrability threshold (delta p <= alpha + 2) the norms blow up
    const double n_mid = test_function_norm(0.5, DeltaChoice::user(0.5), w0, 2.0);
    const double n_edge = test_function_norm(0.999, DeltaChoice::user(0.5), w0, 2.0);
    CHECK(n_edge > 10.0 * n_mid);
}

TEST_CASE("the two normalization variants stay within 2^delta of each other") {
    const auto w0 = RadialWeight::standard(0.0);
    const double delta = 3.0;
    for (double r : {0.3, 0.9, 0.99}) {
        const Complex a(r, 0.0);
        const double n1 =
            test_function_norm(a, DeltaChoice::user(delta), w0, 2.0, TestVariant::one_minus_a);
        const double n2 = test_function_norm(a, DeltaChoice::user(delta), w0, 2.0,
                                             TestVariant::one_minus_a_sq);
        const double ratio = n2 / n1;  // (1-|a|^2)^d / (1-|a|)^d = (1+|a|)^d
        CHECK(ratio >= 1.0 - 1e-9);
        CHECK(ratio <= std::pow(2.0, delta) + 1e-9);
        CHECK(ratio == Approx(std::pow(1.0 + r, delta)).epsilon(1e-6));
    }
}

TEST_CASE("delta heuristic") {
    const auto w0 = RadialWeight::standard(0.0);
    const auto rep0 = doubling_report(w0);
    const auto d0 = choose_delta(w0, 2.0, rep0);
    CHECK(d0.value == Approx(2.0).epsilon(0.02));
    CHECK(d0.basis == DeltaChoice::Basis::heuristic);

    const auto w2 = RadialWeight::standard(2.0);
    const auto d2 = choose_delta(w2, 1.0, doubling_report(w2));
    CHECK(d2.value == Approx(8.0).epsilon(0.02));

    const auto user = DeltaChoice::user(5.0);
    CHECK(user.value == 5.0);
    CHECK(user.basis == DeltaChoice::Basis::user);
    CHECK_THROWS_AS(DeltaChoice::user(0.0), std::invalid_argument);
}

TEST_CASE("growth ratio") {
    const auto w0 = RadialWeight::standard(0.0);
    std::vector<Complex> grid{0.0};
    for (double r : {0.3, 0.6, 0.9, 0.99})
        for (int k = 0; k < 8; ++k) grid.push_back(std::polar(r, 2.0 * kPi * k / 8));

    const auto one = AnalyticFunction::taylor({1});
    const double g0 = growth_ratio(one, w0, 2.0, 0, grid);
    CHECK(g0 == Approx(1.0).epsilon(1e-6));  // attained at z = 0 where S(0) = D
    CHECK(growth_ratio(one, w0, 2.0, 1, grid) == 0.0);

    // scalar homogeneity: the ratio ignores rescaling of f
    SplitMix64 rng(31);
    const auto f = AnalyticFunction::taylor(oracles::random_coeffs(rng, 6));
    auto scaled = f.taylor_poly().coeffs;
    for (auto& c : scaled) c *= Complex(0.0, -7.25);
    const auto f2 = AnalyticFunction::taylor(scaled);
    CHECK(growth_ratio(f, w0, 2.0, 1, grid) ==
          Approx(growth_ratio(f2, w0, 2.0, 1, grid)).epsilon(1e-12));

    CHECK_THROWS_AS(growth_ratio(AnalyticFunction::taylor({0}), w0, 2.0, 0, grid),
                    std::invalid_argument);
}

TEST_CASE("Taylor expansion of closed forms") {
    const auto w0 = RadialWeight::standard(0.0);
    const auto f = AnalyticFunction::test_function(Complex(0.5, 0.2), DeltaChoice::user(2.5),
                                                   w0, 2.0);
    double next = 0.0;
    const auto poly = f.expand(120, &next);
    for (const Complex z : {Complex(0.3, 0.1), Complex(-0.6, 0.2)})
        CHECK(std::abs(poly.eval(z) - f(z)) <= 1e-10);
    CHECK(next < 1e-12);

    const auto mono = AnalyticFunction::normalized_monomial(4, w0, 2.0);
    const auto mp = mono.expand(10);
    CHECK(mp.degree() == 4);
    CHECK(std::abs(mp.coeffs[4]) == Approx(1.0 / std::sqrt(boost::math::beta(5.0, 1.0))));
}

TEST_CASE("construction errors") {
    const auto w0 = RadialWeight::standard(0.0);
    CHECK_THROWS_AS(AnalyticFunction::test_function(Complex(1.0, 0), DeltaChoice::user(2.0),
                                                    w0, 2.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(AnalyticFunction::normalized_monomial(-1, w0, 2.0), std::invalid_argument);
}
