#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <variant>

#include "bergman/util.hpp"

namespace bergman {

/// Pseudo-hyperbolic metric rho(z,w) = |(w-z)/(1 - conj(w) z)|.
inline double pseudo_distance(Complex z, Complex w) {
    return std::abs((w - z) / (1.0 - std::conj(w) * z));
}

/// Disk automorphism phi_a(u) = (a-u)/(1 - conj(a) u); an involution.
inline Complex mobius(Complex a, Complex u) { return (a - u) / (1.0 - std::conj(a) * u); }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double t) {
    t = std::fmod(t, 2.0 * kPi);
    if (t <= -kPi) t += 2.0 * kPi;
    if (t > kPi) t -= 2.0 * kPi;
    return t;
}

// --- regions -------------------------------------------------------------------

struct FullDisk {};

/// Delta(center, radius): ball of the pseudo-hyperbolic metric.
struct PseudoDisk {
    Complex center;
    double radius;  // in (0,1)
};

/// S(z): |z| <= |xi| < 1, |arg xi - arg z| < (1-|z|)/2. S(0) is the full disk.
struct CarlesonSquare {
    Complex anchor;
};

/// D_r = {|xi| <= r}: the complement of the boundary annulus (the paper's
/// closed sub-disk D_r).
struct ClosedDisk {
    double radius;  // in (0,1)
};

using Region = std::variant<FullDisk, PseudoDisk, CarlesonSquare, ClosedDisk>;

/// Signed margin: negative inside the region, positive outside, commensurate
/// with distance to the boundary. Drives indicator-aware refinement.
inline double region_margin(const Region& reg, Complex xi) {
    struct Visitor {
        Complex xi;
        double operator()(const FullDisk&) const { return -1.0; }
        double operator()(const PseudoDisk& d) const {
            return pseudo_distance(d.center, xi) - d.radius;
        }
        double operator()(const CarlesonSquare& s) const {
            const double rz = std::abs(s.anchor);
            if (rz == 0.0) return -1.0;
            const double radial = rz - std::abs(xi);  // membership needs |xi| >= |z|
            const double ang = std::abs(wrap_angle(std::arg(xi) - std::arg(s.anchor))) -
                               0.5 * (1.0 - rz);
            return std::max(radial, ang);
        }
        double operator()(const ClosedDisk& d) const { return std::abs(xi) - d.radius; }
    };
    return std::visit(Visitor{xi}, reg);
}

/// Exact membership. Boundaries are excluded except the |xi| >= |z| edge of
/// Carleson squares and the |xi| <= r edge of D_r.
inline bool region_contains(const Region& reg, Complex xi) {
    struct Visitor {
        Complex xi;
        bool operator()(const FullDisk&) const { return true; }
        bool operator()(const PseudoDisk& d) const {
            return pseudo_distance(d.center, xi) < d.radius;
        }
        bool operator()(const CarlesonSquare& s) const {
            const double rz = std::abs(s.anchor);
            if (rz == 0.0) return true;
            if (std::abs(xi) < rz) return false;
            return std::abs(wrap_angle(std::arg(xi) - std::arg(s.anchor))) < 0.5 * (1.0 - rz);
        }
        bool operator()(const ClosedDisk& d) const { return std::abs(xi) <= d.radius; }
    };
    if (!(std::abs(xi) < 1.0)) throw std::invalid_argument("region_contains: |xi| must be < 1");
    return std::visit(Visitor{xi}, reg);
}

/// Euclidean circle equal to a pseudo-hyperbolic disk.
struct EuclideanDisk {
    Complex center;
    double radius;
};

inline EuclideanDisk euclidean_hull(const PseudoDisk& d) {
    const double s2 = d.radius * d.radius;
    const double c2 = std::norm(d.center);
    const double denom = 1.0 - s2 * c2;
    return EuclideanDisk{d.center * (1.0 - s2) / denom,
                         d.radius * (1.0 - c2) / denom};
}

inline PseudoDisk make_pseudo_disk(Complex center, double radius) {
    if (!(radius > 0.0 && radius < 1.0))
        throw std::invalid_argument("pseudo disk radius must lie in (0,1)");
    if (!(std::abs(center) < 1.0))
        throw std::invalid_argument("pseudo disk center must lie in the disk");
    return PseudoDisk{center, radius};
}

inline CarlesonSquare make_carleson_square(Complex anchor) {
    if (!(std::abs(anchor) < 1.0))
        throw std::invalid_argument("Carleson square anchor must lie in the disk");
    return CarlesonSquare{anchor};
}

}  // namespace bergman
