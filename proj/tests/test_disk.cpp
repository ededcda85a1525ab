#include <catch2/catch_amalgamated.hpp>

#include "bergman/disk.hpp"
#include "bergman/util.hpp"

using namespace bergman;
using Catch::Approx;

TEST_CASE("pseudo-hyperbolic distance basics") {
    CHECK(pseudo_distance(0.0, Complex(0.3, 0.4)) == Approx(0.5).epsilon(1e-14));
    CHECK(pseudo_distance(Complex(0.2, -0.7), Complex(0.2, -0.7)) == 0.0);
    CHECK(pseudo_distance(Complex(0.5, 0), Complex(-0.5, 0)) == Approx(0.8).epsilon(1e-14));
}

TEST_CASE("metric symmetry and range") {
    SplitMix64 rng(41);
    for (int i = 0; i < 300; ++i) {
        const Complex z = rng.in_disk(0.999), w = rng.in_disk(0.999);
        const double d = pseudo_distance(z, w);
        CHECK(d == Approx(pseudo_distance(w, z)).margin(1e-14));
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
    }
}

TEST_CASE("Moebius invariance") {
    SplitMix64 rng(99);
    for (int i = 0; i < 200; ++i) {
        const Complex a = rng.in_disk(0.95), z = rng.in_disk(0.98), w = rng.in_disk(0.98);
        CHECK(pseudo_distance(mobius(a, z), mobius(a, w)) ==
              Approx(pseudo_distance(z, w)).margin(1e-12));
    }
}

TEST_CASE("points of a pseudo-disk have comparable boundary distance") {
    SplitMix64 rng(7);
    const double r = 0.6;
    for (int i = 0; i < 150; ++i) {
        const Complex z = rng.in_disk(0.97);
        const auto hull = euclidean_hull(PseudoDisk{z, r});
        // rejection-sample a point of Delta(z, r)
        Complex w;
        for (;;) {
            w = hull.center + std::polar(hull.radius * std::sqrt(rng.uniform()),
                                         rng.uniform(0.0, 2.0 * kPi));
            if (pseudo_distance(z, w) < r) break;
        }
        const double ratio = (1.0 - std::abs(w)) / (1.0 - std::abs(z));
        CHECK(ratio >= (1.0 - r) / (1.0 + r) - 1e-12);
        CHECK(ratio <= (1.0 + r) / (1.0 - r) + 1e-12);
    }
}

TEST_CASE("euclidean hull agrees with the metric ball") {
    SplitMix64 rng(123);
    for (int i = 0; i < 100; ++i) {
        const Complex c = rng.in_disk(0.95);
        const double s = rng.uniform(0.05, 0.9);
        const auto hull = euclidean_hull(PseudoDisk{c, s});
        CHECK(std::abs(hull.center) + hull.radius < 1.0);
        const Complex xi = rng.in_disk(0.999);
        CHECK((pseudo_distance(c, xi) < s) == (std::abs(xi - hull.center) < hull.radius));
    }
}

TEST_CASE("region membership") {
    // S(0) = D: everything belongs
    const Region s0 = CarlesonSquare{0.0};
    CHECK(region_contains(s0, Complex(0.99, 0)));
    CHECK(region_contains(s0, Complex(-0.3, 0.7)));

    const Region pd = PseudoDisk{0.0, 0.5};
    CHECK(region_contains(pd, Complex(0.4, 0)));
    CHECK_FALSE(region_contains(pd, Complex(0.6, 0)));

    // Carleson square at z = 0.9: |arg xi| < 0.05 and |xi| >= 0.9
    const Region sq = CarlesonSquare{Complex(0.9, 0)};
    CHECK(region_contains(sq, std::polar(0.95, 0.04)));
    CHECK_FALSE(region_contains(sq, std::polar(0.95, 0.06)));
    CHECK_FALSE(region_contains(sq, std::polar(0.85, 0.0)));
    CHECK(region_contains(sq, std::polar(0.9, 0.0)));  // the |xi| >= |z| edge is inclusive

    // angles compare modulo 2 pi
    const Region sq2 = CarlesonSquare{std::polar(0.9, kPi - 0.01)};
    CHECK(region_contains(sq2, std::polar(0.95, -kPi + 0.02)));

    const Region dr = ClosedDisk{0.7};
    CHECK(region_contains(dr, Complex(0.7, 0)));  // closed
    CHECK_FALSE(region_contains(dr, Complex(0.71, 0)));

    CHECK_THROWS_AS(region_contains(s0, Complex(1.0, 0)), std::invalid_argument);
}

TEST_CASE("region margins have the right sign") {
    SplitMix64 rng(2024);
    const std::vector<Region> regions = {
        Region(PseudoDisk{Complex(0.3, 0.2), 0.4}),
        Region(CarlesonSquare{Complex(0.0, 0.8)}),
        Region(ClosedDisk{0.6}),
        Region(FullDisk{}),
    };
    for (const auto& reg : regions) {
        for (int i = 0; i < 200; ++i) {
            const Complex xi = rng.in_disk(0.999);
            const double m = region_margin(reg, xi);
            if (region_contains(reg, xi))
                CHECK(m <= 1e-12);
            else
                CHECK(m >= -1e-12);
        }
    }
}

TEST_CASE("angle wrapping") {
    CHECK(wrap_angle(3.0 * kPi) == Approx(kPi).margin(1e-12));
    CHECK(wrap_angle(-3.0 * kPi) == Approx(kPi).margin(1e-12));
    CHECK(wrap_angle(0.3) == Approx(0.3));
    CHECK(wrap_angle(2.0 * kPi - 0.3) == Approx(-0.3).margin(1e-12));
}
