#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "bergman/analytic.hpp"
#include "bergman/disk.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/weights.hpp"

namespace bergman {

class SelfMapViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedRegime : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Closed-form or polynomial map of the disk, used for both the composition
/// symbol phi and the multiplier u.
class SymbolMap {
public:
    struct Constant { Complex c; };
    struct Scaling { Complex lambda; };  // lambda z; identity at lambda = 1
    struct Power { int k; };             // z^k, k >= 1
    struct Blaschke { Complex a; };      // (a - z)/(1 - conj(a) z)
    struct Taylor { TaylorPoly poly; };

    static SymbolMap constant(Complex c) { return SymbolMap(Constant{c}, "constant"); }
    static SymbolMap scaling(Complex lambda) { return SymbolMap(Scaling{lambda}, "scaling"); }
    static SymbolMap identity() { return scaling(1.0); }
    static SymbolMap power(int k) {
        if (k < 1) throw std::invalid_argument("power map needs k >= 1");
        return SymbolMap(Power{k}, "power");
    }
    static SymbolMap blaschke(Complex a) {
        if (!(std::abs(a) < 1.0)) throw std::invalid_argument("blaschke map needs |a| < 1");
        return SymbolMap(Blaschke{a}, "blaschke");
    }
    static SymbolMap taylor(std::vector<Complex> coeffs) {
        if (coeffs.empty()) coeffs.push_back(0.0);
        return SymbolMap(Taylor{TaylorPoly{std::move(coeffs)}}, "taylor");
    }

    Complex operator()(Complex z) const {
        if (const auto* c = std::get_if<Constant>(&repr_)) return c->c;
        if (const auto* s = std::get_if<Scaling>(&repr_)) return s->lambda * z;
        if (const auto* p = std::get_if<Power>(&repr_)) return cpow_int(z, p->k);
        if (const auto* b = std::get_if<Blaschke>(&repr_)) return mobius(b->a, z);
        return std::get<Taylor>(repr_).poly.eval(z);
    }

    const std::string& kind_name() const { return kind_; }
    bool is_taylor() const { return std::holds_alternative<Taylor>(repr_); }

    template <class T>
    const T* get_if() const {
        return std::get_if<T>(&repr_);
    }

private:
    using Repr = std::variant<Constant, Scaling, Power, Blaschke, Taylor>;
    SymbolMap(Repr repr, std::string kind) : repr_(std::move(repr)), kind_(std::move(kind)) {}
    Repr repr_;
    std::string kind_;
};

/// Self-map certificate: analytic for the closed forms, a dense sample for
/// Taylor symbols (quadrature-style grid plus 4096 points at |z| = 0.9999).
/// A certificate, not a proof.
inline void certify_self_map(const SymbolMap& phi) {
    if (const auto* c = phi.get_if<SymbolMap::Constant>()) {
        if (!(std::abs(c->c) < 1.0))
            throw SelfMapViolation("constant symbol lies outside the disk");
        return;
    }
    if (const auto* s = phi.get_if<SymbolMap::Scaling>()) {
        if (!(std::abs(s->lambda) <= 1.0))
            throw SelfMapViolation("scaling symbol needs |lambda| <= 1");
        return;
    }
    if (phi.get_if<SymbolMap::Power>() || phi.get_if<SymbolMap::Blaschke>()) return;

    auto check = [&phi](Complex z) {
        if (!(std::abs(phi(z)) < 1.0)) {
            std::ostringstream msg;
            msg << "self-map violation: |phi(z)| >= 1 at z = (" << z.real() << ", " << z.imag()
                << ")";
            throw SelfMapViolation(msg.str());
        }
    };
    for (int j = 1; j <= 16; ++j) {
        const double r = 1.0 - std::pow(2.0, -j);
        for (int k = 0; k < 64; ++k) check(std::polar(r, 2.0 * kPi * k / 64.0));
    }
    for (int k = 0; k < 4096; ++k) check(std::polar(0.9999, 2.0 * kPi * k / 4096.0));
}

/// The generalized weighted composition symbol (phi, u, n) defining
/// f -> u * (f^{(n)} o phi).
struct OperatorSymbol {
    SymbolMap phi;
    SymbolMap u;
    int n = 0;
};

inline OperatorSymbol make_operator(SymbolMap phi, SymbolMap u, int n) {
    if (n < 0) throw std::invalid_argument("operator order n must be >= 0");
    certify_self_map(phi);
    return OperatorSymbol{std::move(phi), std::move(u), n};
}

/// (D^n_{phi,u} f)(z) = u(z) f^{(n)}(phi(z)).
inline Complex apply(const OperatorSymbol& op, const AnalyticFunction& f, Complex z) {
    const Complex w = op.phi(z);
    if (!(std::abs(w) < 1.0)) {
        std::ostringstream msg;
        msg << "self-map violation at evaluation: |phi(z)| >= 1 for z = (" << z.real() << ", "
            << z.imag() << ")";
        throw SelfMapViolation(msg.str());
    }
    return op.u(z) * f.derivative(op.n, w);
}

/// ||D^n_{phi,u} f||_{A^q_nu} by direct quadrature of |u (f^{(n)} o phi)|^q nu.
inline double image_norm(const OperatorSymbol& op, const AnalyticFunction& f,
                         const RadialWeight& nu, double q, const QuadratureSpec& spec = {}) {
    if (!(q > 0.0)) throw std::invalid_argument("image_norm: q must be > 0");
    const auto outcome = integrate_disk(
        [&](Complex z) {
            const Complex v = op.u(z) * f.derivative(op.n, op.phi(z));
            return std::pow(std::abs(v), q) * nu(std::abs(z));
        },
        spec);
    if (outcome.divergent())
        throw QuadratureError("image_norm: operator image is not in A^q_nu for this f");
    return std::pow(outcome.value, 1.0 / q);
}

/// mu^nu_{phi,u}(E) = int_{phi^{-1}(E)} |u|^q nu dA. Integrals against it are
/// always computed on the source side (change of variables).
struct PullbackMeasure {
    OperatorSymbol symbol;
    RadialWeight nu;
    double q;
    double total_mass = 0.0;
};

inline PullbackMeasure make_pullback(OperatorSymbol symbol, const RadialWeight& nu, double q,
                                     const QuadratureSpec& spec = {}) {
    if (!(q > 0.0)) throw std::invalid_argument("pullback: q must be > 0");
    PullbackMeasure pm{std::move(symbol), nu, q, 0.0};
    const auto mass = integrate_disk(
        [&pm](Complex z) {
            return std::pow(std::abs(pm.symbol.u(z)), pm.q) * pm.nu(std::abs(z));
        },
        spec);
    if (mass.divergent())
        throw std::invalid_argument("pullback: u is not in A^q_nu (infinite total mass)");
    pm.total_mass = mass.value;
    return pm;
}

/// int_D g d(mu^nu_{phi,u}) = int_D g(phi(z)) |u(z)|^q nu(z) dA(z).
inline IntegralOutcome pullback_integrate(const PullbackMeasure& pm, const Density& g,
                                          const QuadratureSpec& spec = {}) {
    return integrate_disk(
        [&](Complex z) {
            return g(pm.symbol.phi(z)) * std::pow(std::abs(pm.symbol.u(z)), pm.q) *
                   pm.nu(std::abs(z));
        },
        spec);
}

/// mu^nu_{phi,u}(reg) via the source-side indicator, with mask-aware
/// refinement so small preimages are not missed.
inline IntegralOutcome pullback_region_mass_outcome(const PullbackMeasure& pm, const Region& reg,
                                                    const QuadratureSpec& spec = {}) {
    const Density base = [&](Complex z) {
        return std::pow(std::abs(pm.symbol.u(z)), pm.q) * pm.nu(std::abs(z));
    };
    if (std::holds_alternative<FullDisk>(reg)) return integrate_disk(base, spec);
    const MaskMargin margin = [&pm, reg](Complex z) {
        return region_margin(reg, pm.symbol.phi(z));
    };
    return integrate_disk_masked(base, margin, spec);
}

inline double pullback_region_mass(const PullbackMeasure& pm, const Region& reg,
                                   const QuadratureSpec& spec = {}) {
    return pullback_region_mass_outcome(pm, reg, spec).value;
}

}  // namespace bergman
