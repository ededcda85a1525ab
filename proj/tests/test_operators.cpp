#include <catch2/catch_amalgamated.hpp>

#include "bergman/criteria.hpp"
#include "bergman/operators.hpp"
#include "oracles.hpp"

using namespace bergman;
using Catch::Approx;

TEST_CASE("operator action") {
    // n=1, u(z)=z, phi(z)=z^2, f=z^3: u(z) f'(z^2) = z * 3 z^4
    const auto op = make_operator(SymbolMap::power(2), SymbolMap::scaling(1.0), 1);
    const auto f = AnalyticFunction::taylor({0, 0, 0, 1});
    CHECK(apply(op, f, Complex(0.5, 0)).real() == Approx(0.09375).epsilon(1e-14));

    // the identity operator
    const auto id = make_operator(SymbolMap::identity(), SymbolMap::constant(1.0), 0);
    SplitMix64 rng(17);
    const auto g = AnalyticFunction::taylor(oracles::random_coeffs(rng, 5));
    const Complex z = rng.in_disk(0.9);
    CHECK(std::abs(apply(id, g, z) - g(z)) < 1e-14);

    // derivative order beyond the degree annihilates
    const auto d2 = make_operator(SymbolMap::identity(), SymbolMap::constant(1.0), 2);
    const auto lin = AnalyticFunction::taylor({3.0, 2.0});
    CHECK(std::abs(apply(d2, lin, z)) == 0.0);
}

TEST_CASE("self-map certification") {
    CHECK_THROWS_AS(make_operator(SymbolMap::constant(1.0), SymbolMap::constant(1.0), 0),
                    SelfMapViolation);
    CHECK_THROWS_AS(make_operator(SymbolMap::scaling(1.2), SymbolMap::constant(1.0), 0),
                    SelfMapViolation);
    CHECK_THROWS_AS(make_operator(SymbolMap::taylor({0.0, 0.8, 0.4}), SymbolMap::constant(1.0), 0),
                    SelfMapViolation);
    CHECK_NOTHROW(make_operator(SymbolMap::taylor({0.0, 0.5, 0.25}), SymbolMap::constant(1.0), 0));
    CHECK_NOTHROW(make_operator(SymbolMap::blaschke(Complex(0.3, 0.4)), SymbolMap::constant(1.0), 0));
    CHECK_THROWS_AS(make_operator(SymbolMap::identity(), SymbolMap::constant(1.0), -1),
                    std::invalid_argument);
    CHECK_THROWS_AS(SymbolMap::power(0), std::invalid_argument);
}

TEST_CASE("image norms") {
    const auto w0 = RadialWeight::standard(0.0);
    const auto id = make_operator(SymbolMap::identity(), SymbolMap::constant(1.0), 0);
    SplitMix64 rng(23);
    const auto f = AnalyticFunction::taylor(oracles::random_coeffs(rng, 6));
    CHECK(image_norm(id, f, w0, 2) ==
          Approx(bergman_norm_moments(f.taylor_poly(), w0)).epsilon(1e-6));

    // phi = 0: the image is the constant f(0)
    const auto op0 = make_operator(SymbolMap::constant(0.0), SymbolMap::constant(1.0), 0);
    CHECK(image_norm(op0, f, w0, 2) == Approx(std::abs(f(0.0))).epsilon(1e-6));

    // n=1, f=z^2: ||2z|| = sqrt(2)
    const auto d1 = make_operator(SymbolMap::identity(), SymbolMap::constant(1.0), 1);
    const auto z2 = AnalyticFunction::taylor({0, 0, 1});
    CHECK(image_norm(d1, z2, w0, 2) == Approx(std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("pullback measure") {
    const auto w0 = RadialWeight::standard(0.0);
    const auto u1 = SymbolMap::constant(1.0);

    // total mass is nu(D)
    auto pm = make_pullback(make_operator(SymbolMap::scaling(0.5), u1, 0), w0, 2.0);
    CHECK(pm.total_mass == Approx(1.0).epsilon(1e-8));
    CHECK(pullback_integrate(pm, [](Complex) { return 1.0; }).value ==
          Approx(1.0).epsilon(1e-8));

    // phi = z^2, g = |w|^2: int |z|^4 dA = 1/3
    auto pm2 = make_pullback(make_operator(SymbolMap::power(2), u1, 0), w0, 2.0);
    CHECK(pullback_integrate(pm2, [](Complex w) { return std::norm(w); }).value ==
          Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("change-of-variables identity for operator image norms") {
    SplitMix64 rng(404);
    const auto w0 = RadialWeight::standard(0.0);
    const auto w1 = RadialWeight::standard(1.0);
    struct Case {
        OperatorSymbol op;
        const RadialWeight& nu;
        double q;
    };
    const std::vector<Case> cases = {
        {make_operator(SymbolMap::scaling(0.5), SymbolMap::scaling(1.0), 1), w0, 2.0},
        {make_operator(SymbolMap::blaschke(0.3), SymbolMap::taylor({1.0, 0.5}), 0), w1, 2.0},
        {make_operator(SymbolMap::power(2), SymbolMap::constant(1.0), 2), w0, 3.0},
    };
    for (const auto& c : cases) {
        const auto f = AnalyticFunction::taylor(oracles::random_coeffs(rng, 6));
        const double lhs = std::pow(image_norm(c.op, f, c.nu, c.q), c.q);
        const auto pm = make_pullback(c.op, c.nu, c.q);
        const double rhs =
            pullback_integrate(pm, [&](Complex z) {
                return std::pow(std::abs(f.derivative(c.op.n, z)), c.q);
            }).value;
        CHECK(lhs == Approx(rhs).epsilon(1e-5));
    }
}

TEST_CASE("pullback region masses") {
    const auto w0 = RadialWeight::standard(0.0);
    const auto u1 = SymbolMap::constant(1.0);
    QuadratureSpec mass_spec;
    mass_spec.rel_error_target = 1e-3;
    mass_spec.max_refinement_levels = 20;

    const auto id = make_pullback(make_operator(SymbolMap::identity(), u1, 0), w0, 2.0);
    CHECK(pullback_region_mass(id, Region(FullDisk{})) == Approx(1.0).epsilon(1e-8));
    CHECK(pullback_region_mass(id, Region(PseudoDisk{0.0, 0.5}), mass_spec) ==
          Approx(0.25).epsilon(2e-3));

    // constant phi: empty preimage gives zero mass
    const auto c0 = make_pullback(make_operator(SymbolMap::constant(0.0), u1, 0), w0, 2.0);
    CHECK(pullback_region_mass(c0, Region(PseudoDisk{Complex(0.7, 0), 0.5}), mass_spec) == 0.0);
    // and full mass once the constant is inside
    CHECK(pullback_region_mass(c0, Region(PseudoDisk{Complex(0.1, 0), 0.5}), mass_spec) ==
          Approx(1.0).epsilon(1e-6));
}

TEST_CASE("measure additivity and monotonicity") {
    const auto w0 = RadialWeight::standard(0.0);
    const auto pm = make_pullback(
        make_operator(SymbolMap::identity(), SymbolMap::taylor({1.0, 0.25}), 0), w0, 2.0);
    QuadratureSpec mass_spec;
    mass_spec.rel_error_target = 1e-3;
    mass_spec.max_refinement_levels = 20;

    const Region d1 = PseudoDisk{Complex(-0.5, 0), 0.3};
    const Region d2 = PseudoDisk{Complex(0.5, 0), 0.3};
    const double m1 = pullback_region_mass(pm, d1, mass_spec);
    const double m2 = pullback_region_mass(pm, d2, mass_spec);
    // union of the two disjoint disks via a joint mask
    const auto un = integrate_disk_masked(
        [&](Complex z) { return std::pow(std::abs(pm.symbol.u(z)), 2.0) * w0(std::abs(z)); },
        [&](Complex z) { return std::min(region_margin(d1, z), region_margin(d2, z)); },
        mass_spec);
    CHECK(un.value == Approx(m1 + m2).epsilon(5e-3));

    const double small = pullback_region_mass(pm, Region(PseudoDisk{0.0, 0.3}), mass_spec);
    const double large = pullback_region_mass(pm, Region(PseudoDisk{0.0, 0.6}), mass_spec);
    CHECK(small <= large + 1e-9);
}
