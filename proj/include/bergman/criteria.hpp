#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bergman/analytic.hpp"
#include "bergman/disk.hpp"
#include "bergman/operators.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/util.hpp"
#include "bergman/weights.hpp"

namespace bergman {

enum class CriterionKind {
    order_bounded,
    bounded,
    carleson,
    carleson_vanishing,
    essential_norm,
    compact_probe
};

enum class Verdict { holds, fails, undecided };

struct PerPoint {
    Complex param;  // the a or z the local value belongs to
    double value;
};

struct CriterionResult {
    CriterionKind kind = CriterionKind::order_bounded;
    double value = 0.0;  // +inf flags a divergent criterion integral
    Verdict verdict = Verdict::undecided;
    std::vector<PerPoint> per_point;

    // diagnostics
    double delta_used = std::numeric_limits<double>::quiet_NaN();
    int quad_converged = 0;
    int quad_divergent = 0;
    int quad_undecided = 0;
    int skipped_points = 0;
    std::vector<double> tail_radii;   // dyadic radii of any tail diagnostic
    std::vector<double> tail_values;  // sup sequence over those radii
    double decay_exponent = std::numeric_limits<double>::quiet_NaN();
    IntegralOutcome main_outcome;  // the single integral, where there is one
    std::string note;
};

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::fails: return "fails";
        case Verdict::undecided: return "undecided";
    }
    return "?";
}

inline const char* to_string(CriterionKind k) {
    switch (k) {
        case CriterionKind::order_bounded: return "order_bounded";
        case CriterionKind::bounded: return "bounded";
        case CriterionKind::carleson: return "carleson";
        case CriterionKind::carleson_vanishing: return "carleson_vanishing";
        case CriterionKind::essential_norm: return "essential_norm";
        case CriterionKind::compact_probe: return "compact_probe";
    }
    return "?";
}

inline std::vector<Complex> polar_grid(const std::vector<double>& radii, int angles,
                                       double angle_offset = 0.0) {
    std::vector<Complex> out;
    out.reserve(radii.size() * angles);
    for (double r : radii)
        for (int k = 0; k < angles; ++k)
            out.push_back(std::polar(r, angle_offset + 2.0 * kPi * k / angles));
    return out;
}

/// Every theorem exercised here assumes p <= q.
inline void require_embedding_regime(double p, double q) {
    if (!(p > 0.0) || !(q > 0.0)) throw std::invalid_argument("exponents must be positive");
    if (p > q)
        throw UnsupportedRegime("unsupported regime: the criteria require 0 < p <= q");
}

/// Raises the refinement depth cap so cells can shrink to the kernel peak
/// scale 1-|a| near the boundary; the caller's error target is kept.
inline QuadratureSpec deepen_for_tail(QuadratureSpec spec, double one_minus_a) {
    one_minus_a = std::max(one_minus_a, 1e-12);
    const double theta0 = 2.0 * kPi / std::max(1, spec.angular_nodes_per_ring);
    const double halvings = std::ceil(std::log2(theta0 / (0.25 * one_minus_a)));
    // splits alternate between directions, so budget twice the angular need
    const int levels = static_cast<int>(2.0 * std::max(halvings, 0.0)) + 6;
    spec.max_refinement_levels = std::max(spec.max_refinement_levels, levels);
    spec.cell_budget = std::max(spec.cell_budget, 300000L);
    return spec;
}

/// Mask-boundary resolution costs O(1/eps) cells, so indicator-masked masses
/// run at a 1e-3 target; they only ever enter O(1) ratio comparisons.
inline QuadratureSpec mass_spec_for(QuadratureSpec spec, double feature_scale) {
    spec = deepen_for_tail(spec, feature_scale);
    spec.rel_error_target = std::max(spec.rel_error_target, 1e-3);
    // the region mass scales like feature^2 while the boundary band only
    // shrinks linearly per split pair: grant extra depth
    spec.max_refinement_levels = std::max(spec.max_refinement_levels + 12, 20);
    spec.cell_budget = std::max(spec.cell_budget, 200000L);
    return spec;
}

/// Focused integral computed twice, the second time on a rotated copy of the
/// integrand (the same integral; dA is rotation invariant). The rotation is a
/// golden fraction of an angular cell so a kernel peak never aligns with the
/// dyadic sample lines of both grids at once. The better-certified pass wins;
/// a genuine contradiction between the passes downgrades the verdict.
inline IntegralOutcome integrate_focused_checked(const Density& f, const FocusMargin& focus,
                                                 const QuadratureSpec& spec) {
    const double cell = 2.0 * kPi / std::max(1, spec.angular_nodes_per_ring);
    const Complex phase = std::polar(1.0, 0.3819660112501051 * cell);
    const auto pass1 = integrate_disk_focused(f, focus, spec);
    if (pass1.divergent()) return pass1;
    QuadratureSpec check_spec = spec;  // the check pass is advisory: cap its cost
    check_spec.cell_budget = std::min(check_spec.cell_budget, 120000L);
    const auto pass2 = integrate_disk_focused(
        [&f, phase](Complex z) { return f(z * phase); },
        [&focus, phase](Complex z) { return focus(z * phase); }, check_spec);
    if (pass2.divergent()) return pass2;

    const auto rel = [](const IntegralOutcome& o) {
        return o.error_estimate / std::max(std::abs(o.value), 1e-300);
    };
    IntegralOutcome out = rel(pass1) <= rel(pass2) ? pass1 : pass2;
    out.evaluations = pass1.evaluations + pass2.evaluations;
    const double diff = std::abs(pass1.value - pass2.value);
    if (diff > 3.0 * (pass1.error_estimate + pass2.error_estimate)) {
        out.verdict = IntegralVerdict::undecided;
        out.error_estimate = std::max(out.error_estimate, diff);
    }
    return out;
}

// --- order boundedness (the (3.1)-type integral) --------------------------------

/// Pointwise majorant h(z) = |u(z)| / ((1-|phi(z)|^2)^n w(S(phi(z)))^{1/p});
/// its L^q_nu norm to the q-th power is the order-boundedness integral.
inline double order_majorant(const OperatorSymbol& op, const RadialWeight& w, double p,
                             Complex z) {
    const Complex phi_z = op.phi(z);
    const double r = std::abs(phi_z);
    if (!(r < 1.0)) throw SelfMapViolation("order_majorant: |phi(z)| >= 1");
    const double box = (r == 0.0) ? w.disk_mass() : w.carleson_box(r);
    double denom = std::pow(box, 1.0 / p);
    if (op.n > 0) denom *= std::pow(1.0 - r * r, op.n);
    return std::abs(op.u(z)) / denom;
}

/// Order-boundedness criterion: the operator is order bounded iff
/// I = int |u|^q nu / ((1-|phi|^2)^{nq} w(S(phi))^{q/p}) dA is finite.
/// The verdict follows the divergence dichotomy of the quadrature engine.
inline CriterionResult order_bounded_criterion(const OperatorSymbol& op, const RadialWeight& w,
                                               double p, const RadialWeight& nu, double q,
                                               const QuadratureSpec& spec = {}) {
    if (!(p > 0.0) || !(q > 0.0)) throw std::invalid_argument("exponents must be positive");
    const BoxProfile profile(w);
    const double nq = static_cast<double>(op.n) * q;
    const double qp = q / p;
    const auto outcome = integrate_disk(
        [&](Complex z) {
            const Complex phi_z = op.phi(z);
            const double r = std::abs(phi_z);
            if (!(r < 1.0)) throw SelfMapViolation("order_bounded: |phi(z)| >= 1 at a node");
            double den = std::pow(profile(r), qp);
            if (op.n > 0) den *= std::pow(1.0 - r * r, nq);
            return std::pow(std::abs(op.u(z)), q) * nu(std::abs(z)) / den;
        },
        spec);

    CriterionResult res;
    res.kind = CriterionKind::order_bounded;
    res.main_outcome = outcome;
    if (outcome.divergent()) {
        res.value = std::numeric_limits<double>::infinity();
        res.verdict = Verdict::fails;
        res.quad_divergent = 1;
    } else if (outcome.converged()) {
        res.value = outcome.value;
        res.verdict = Verdict::holds;
        res.quad_converged = 1;
    } else {
        res.value = outcome.value;
        res.verdict = Verdict::undecided;
        res.quad_undecided = 1;
    }
    return res;
}

// --- the sup-integral quantity B(a) ----------------------------------------------

/// B(a) = int (1-|a|)^{dq} |u|^q nu / (|1 - conj(a) phi|^{(d+n)q} w(S(a))^{q/p}) dA.
/// The constant prefactor stays inside the integrand so magnitudes remain
/// O(1) near the boundary.
inline IntegralOutcome boundedness_integrand_value(const OperatorSymbol& op,
                                                   const RadialWeight& w, double p,
                                                   const RadialWeight& nu, double q,
                                                   double delta, Complex a,
                                                   const QuadratureSpec& spec) {
    const double ra = std::abs(a);
    if (!(ra < 1.0)) throw std::invalid_argument("B(a): |a| must be < 1");
    const double box = (ra == 0.0) ? w.disk_mass() : w.carleson_box(ra);
    const double prefactor = std::pow(1.0 - ra, delta * q) / std::pow(box, q / p);
    const double s = (delta + op.n) * q;
    const Complex abar = std::conj(a);
    QuadratureSpec deep = deepen_for_tail(spec, 1.0 - ra);
    // B(a) feeds ratio-level comparisons; certifying beyond 1e-4 only burns cells
    deep.rel_error_target = std::max(deep.rel_error_target, 1e-4);
    // the kernel concentrates where phi(xi) ~ a; declare that set to the engine
    const double peak_scale = 4.0 * (1.0 - ra);
    return integrate_focused_checked(
        [&op, &nu, prefactor, s, abar, q](Complex xi) {
            const Complex d = 1.0 - abar * op.phi(xi);
            return prefactor * std::pow(std::abs(op.u(xi)), q) * nu(std::abs(xi)) *
                   std::pow(std::norm(d), -0.5 * s);
        },
        [&op, abar, peak_scale](Complex xi) {
            return std::abs(1.0 - abar * op.phi(xi)) / peak_scale - 1.0;
        },
        deep);
}

/// A finite outcome whose error estimate is within 1% of its value is usable
/// for the ratio-level comparisons the criteria make, even when the engine
/// could not certify the caller's tighter target.
inline bool effectively_converged(const IntegralOutcome& o, double tol = 1e-2) {
    if (o.converged()) return true;
    if (o.divergent()) return false;
    return std::isfinite(o.value) &&
           o.error_estimate <= tol * std::max(std::abs(o.value), 1e-12);
}

namespace detail {

inline void tally(CriterionResult& res, const IntegralOutcome& o) {
    if (o.divergent())
        ++res.quad_divergent;
    else if (effectively_converged(o))
        ++res.quad_converged;
    else
        ++res.quad_undecided;
}

/// Radial maxima of a per-point table, in increasing radius order.
inline std::vector<std::pair<double, double>> radial_maxima(
    const std::vector<PerPoint>& pts) {
    std::vector<std::pair<double, double>> out;
    for (const auto& pp : pts) {
        const double r = std::abs(pp.param);
        bool found = false;
        for (auto& e : out)
            if (std::abs(e.first - r) < 1e-12) {
                e.second = std::max(e.second, pp.value);
                found = true;
            }
        if (!found) out.emplace_back(r, pp.value);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// Boundedness criterion: sup over the a-grid of B(a); holds iff the sup is
/// finite and the boundary tail of the radial maxima shows no growth trend.
inline CriterionResult boundedness_criterion(const OperatorSymbol& op, const RadialWeight& w,
                                             double p, const RadialWeight& nu, double q,
                                             const DeltaChoice& delta,
                                             const std::vector<Complex>& a_grid,
                                             const QuadratureSpec& spec = {}) {
    require_embedding_regime(p, q);
    if (!(delta.value > 0.0)) throw std::invalid_argument("delta must be > 0");
    if (a_grid.empty()) throw std::invalid_argument("boundedness: empty a-grid");

    CriterionResult res;
    res.kind = CriterionKind::bounded;
    res.delta_used = delta.value;
    std::vector<IntegralOutcome> outcomes(a_grid.size());
    parallel_for(a_grid.size(), [&](std::size_t i) {
        outcomes[i] = boundedness_integrand_value(op, w, p, nu, q, delta.value, a_grid[i], spec);
    });

    double best = 0.0;
    bool any_divergent = false;
    for (std::size_t i = 0; i < a_grid.size(); ++i) {
        detail::tally(res, outcomes[i]);
        if (outcomes[i].divergent()) any_divergent = true;
        res.per_point.push_back({a_grid[i], outcomes[i].value});
        best = std::max(best, outcomes[i].value);
    }
    res.value = any_divergent ? std::numeric_limits<double>::infinity() : best;

    if (any_divergent) {
        res.verdict = Verdict::fails;
        return res;
    }
    const auto maxima = detail::radial_maxima(res.per_point);
    bool growing = maxima.size() >= 4;
    for (std::size_t i = maxima.size() >= 4 ? maxima.size() - 3 : 0;
         growing && i < maxima.size(); ++i)
        growing = maxima[i].second > 1.25 * maxima[i - 1].second;
    if (growing) {
        res.verdict = Verdict::fails;
        res.note = "radial maxima of B(a) grow toward the boundary";
    } else if (res.quad_undecided > 0) {
        res.verdict = Verdict::undecided;
    } else {
        res.verdict = Verdict::holds;
    }
    return res;
}

// --- Carleson criterion -----------------------------------------------------------

/// Per-point Carleson quantity mu(Delta(z,r)) / (w(S(z))^{q/p} (1-|z|)^{nq})
/// with mu the pullback measure; reports the sup and the vanishing tail.
inline CriterionResult carleson_criterion(const OperatorSymbol& op, const RadialWeight& w,
                                          double p, const RadialWeight& nu, double q, double r,
                                          const std::vector<Complex>& z_grid,
                                          const QuadratureSpec& spec = {}) {
    require_embedding_regime(p, q);
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("carleson: r must be in (0,1)");
    if (z_grid.empty()) throw std::invalid_argument("carleson: empty z-grid");
    const PullbackMeasure pm = make_pullback(op, nu, q, spec);

    CriterionResult res;
    res.kind = CriterionKind::carleson;
    std::vector<IntegralOutcome> outcomes(z_grid.size());
    parallel_for(z_grid.size(), [&](std::size_t i) {
        const QuadratureSpec deep = mass_spec_for(spec, 1.0 - std::abs(z_grid[i]));
        outcomes[i] =
            pullback_region_mass_outcome(pm, Region(PseudoDisk{z_grid[i], r}), deep);
    });

    double best = 0.0;
    bool any_divergent = false;
    for (std::size_t i = 0; i < z_grid.size(); ++i) {
        const Complex z = z_grid[i];
        const double rz = std::abs(z);
        detail::tally(res, outcomes[i]);
        if (outcomes[i].divergent()) any_divergent = true;
        double den = std::pow(w.carleson_box(rz), q / p);
        if (op.n > 0) den *= std::pow(1.0 - rz, static_cast<double>(op.n) * q);
        const double val = outcomes[i].value / den;
        res.per_point.push_back({z, val});
        best = std::max(best, val);
    }
    res.value = any_divergent ? std::numeric_limits<double>::infinity() : best;
    res.verdict = any_divergent ? Verdict::fails
                : res.quad_undecided > 0 ? Verdict::undecided
                                         : Verdict::holds;

    // vanishing diagnostic: sup of per_point over |z| >= r_j
    const auto maxima = detail::radial_maxima(res.per_point);
    for (int j = 1;; ++j) {
        const double rj = 1.0 - std::pow(2.0, -j);
        if (rj > maxima.back().first + 1e-12) break;
        double sup = 0.0;
        for (const auto& m : maxima)
            if (m.first >= rj - 1e-12) sup = std::max(sup, m.second);
        res.tail_radii.push_back(rj);
        res.tail_values.push_back(sup);
        if (j > 60) break;
    }
    return res;
}

/// Reads the vanishing (compactness) side of an already-computed Carleson
/// result: the tail sup sequence must decay to zero.
inline CriterionResult carleson_vanishing_view(const CriterionResult& carleson) {
    CriterionResult res = carleson;
    res.kind = CriterionKind::carleson_vanishing;
    if (res.tail_values.empty()) {
        res.verdict = Verdict::undecided;
        return res;
    }
    double peak = 0.0;
    for (double v : res.tail_values) peak = std::max(peak, v);
    const double last = res.tail_values.back();
    res.value = last;
    bool nonincreasing = true;
    for (std::size_t i = res.tail_values.size() >= 3 ? res.tail_values.size() - 2 : 1;
         i < res.tail_values.size(); ++i)
        nonincreasing = nonincreasing && res.tail_values[i] <= res.tail_values[i - 1] * (1 + 1e-9);
    if (peak <= 1e-300 || (last <= 0.01 * peak && nonincreasing))
        res.verdict = Verdict::holds;
    else if (last >= 0.2 * peak)
        res.verdict = Verdict::fails;
    else
        res.verdict = Verdict::undecided;
    return res;
}

// --- equivalence of the Carleson and sup-integral quantities ------------------------

struct RatioBracket {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    int used = 0;
    int skipped = 0;
    bool empty() const { return used == 0; }
};

/// Measures the two-sided comparability constants between the per-point
/// Carleson quantity and B(z) on a grid. Points where both vanish are skipped.
inline RatioBracket equivalence_gap(const OperatorSymbol& op, const RadialWeight& w, double p,
                                    const RadialWeight& nu, double q, double r,
                                    const DeltaChoice& delta,
                                    const std::vector<Complex>& grid,
                                    const QuadratureSpec& spec = {}) {
    require_embedding_regime(p, q);
    const PullbackMeasure pm = make_pullback(op, nu, q, spec);
    RatioBracket bracket;
    std::vector<double> carleson_vals(grid.size()), b_vals(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const Complex z = grid[i];
        const double rz = std::abs(z);
        const QuadratureSpec deep = mass_spec_for(spec, 1.0 - rz);
        double den = std::pow(w.carleson_box(rz), q / p);
        if (op.n > 0) den *= std::pow(1.0 - rz, static_cast<double>(op.n) * q);
        carleson_vals[i] =
            pullback_region_mass_outcome(pm, Region(PseudoDisk{z, r}), deep).value / den;
        b_vals[i] = boundedness_integrand_value(op, w, p, nu, q, delta.value, z, spec).value;
    });
    constexpr double kTiny = 1e-250;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (carleson_vals[i] <= kTiny && b_vals[i] <= kTiny) {
            ++bracket.skipped;
            continue;
        }
        const double ratio = carleson_vals[i] / b_vals[i];
        bracket.lo = std::min(bracket.lo, ratio);
        bracket.hi = std::max(bracket.hi, ratio);
        ++bracket.used;
    }
    return bracket;
}

// --- essential norm ------------------------------------------------------------------

/// Two-sided essential-norm proxy: E_j = sup over |a| = tail_radii[j] of B(a).
/// The last value stands in for the limsup; compactness is declared when the
/// tail decays below 1e-6 of E_0 with a monotone trend over the last 4 radii.
inline CriterionResult essential_norm_estimate(const OperatorSymbol& op, const RadialWeight& w,
                                               double p, const RadialWeight& nu, double q,
                                               const DeltaChoice& delta,
                                               const CriterionResult& boundedness,
                                               const std::vector<double>& tail_radii,
                                               int angles = 16,
                                               const QuadratureSpec& spec = {}) {
    require_embedding_regime(p, q);
    if (!(p >= 1.0))
        throw UnsupportedRegime("essential norm estimate requires 1 <= p <= q");
    if (boundedness.verdict != Verdict::holds)
        throw std::invalid_argument(
            "essential_norm_estimate: operator not certified bounded (precondition)");
    if (tail_radii.empty()) throw std::invalid_argument("essential norm: empty radii");
    if (angles < 1) throw std::invalid_argument("essential norm: angles must be >= 1");

    CriterionResult res;
    res.kind = CriterionKind::essential_norm;
    res.delta_used = delta.value;
    res.tail_radii = tail_radii;
    res.tail_values.assign(tail_radii.size(), 0.0);

    std::vector<std::vector<IntegralOutcome>> outcomes(tail_radii.size());
    for (auto& v : outcomes) v.resize(angles);
    parallel_for(tail_radii.size() * angles, [&](std::size_t idx) {
        const std::size_t j = idx / angles;
        const int k = static_cast<int>(idx % angles);
        const Complex a = std::polar(tail_radii[j], 2.0 * kPi * k / angles);
        outcomes[j][k] = boundedness_integrand_value(op, w, p, nu, q, delta.value, a, spec);
    });

    for (std::size_t j = 0; j < tail_radii.size(); ++j) {
        double e_j = 0.0;
        for (int k = 0; k < angles; ++k) {
            detail::tally(res, outcomes[j][k]);
            e_j = std::max(e_j, outcomes[j][k].value);
            res.per_point.push_back(
                {std::polar(tail_radii[j], 2.0 * kPi * k / angles), outcomes[j][k].value});
        }
        res.tail_values[j] = e_j;
    }
    res.value = res.tail_values.back();  // limsup proxy

    // log-log decay fit over the last five radii
    const std::size_t fit_len = std::min<std::size_t>(5, res.tail_values.size());
    if (fit_len >= 2) {
        std::vector<double> xs, ys;
        bool positive = true;
        for (std::size_t j = res.tail_values.size() - fit_len; j < res.tail_values.size(); ++j) {
            if (!(res.tail_values[j] > 0.0)) positive = false;
            if (positive) {
                xs.push_back(std::log(1.0 - tail_radii[j]));
                ys.push_back(std::log(res.tail_values[j]));
            }
        }
        if (positive && xs.size() >= 2) res.decay_exponent = fit_line(xs, ys).slope;
    }

    const double e0 = res.tail_values.front();
    bool monotone = true;
    for (std::size_t j = res.tail_values.size() >= 4 ? res.tail_values.size() - 3 : 1;
         j < res.tail_values.size(); ++j)
        monotone = monotone && res.tail_values[j] <= res.tail_values[j - 1] * (1 + 1e-9);
    const bool decayed = res.value <= 1e-6 * std::max(e0, 1e-300);
    if (decayed && monotone)
        res.verdict = Verdict::holds;  // compact
    else if (res.quad_undecided > 0)
        res.verdict = Verdict::undecided;
    else
        res.verdict = Verdict::fails;
    return res;
}

/// ||f_a||_{A^p_w} with the kernel-peak focus hint; reliable arbitrarily close
/// to the boundary.
inline double test_function_norm(Complex a, const DeltaChoice& delta, const RadialWeight& w,
                                 double p, TestVariant variant = TestVariant::one_minus_a,
                                 const QuadratureSpec& spec = {}) {
    const auto f = AnalyticFunction::test_function(a, delta, w, p, variant);
    QuadratureSpec deep = deepen_for_tail(spec, 1.0 - std::abs(a));
    deep.rel_error_target = std::max(deep.rel_error_target, 1e-4);
    const Complex abar = std::conj(a);
    const double peak_scale = 4.0 * (1.0 - std::abs(a));
    const auto outcome = integrate_focused_checked(
        [&](Complex z) { return std::pow(std::abs(f(z)), p) * w(std::abs(z)); },
        [abar, peak_scale](Complex z) { return std::abs(1.0 - abar * z) / peak_scale - 1.0; },
        deep);
    if (outcome.divergent())
        throw QuadratureError("test_function_norm: |f_a|^p w diverges (delta too small)");
    return std::pow(outcome.value, 1.0 / p);
}

// --- weakly-null compactness probe ----------------------------------------------------

struct ProbeResult {
    std::vector<Complex> a_sequence;
    std::vector<double> image_norms;    // ||D^n_{phi,u} f_a||_{A^q_nu}
    std::vector<double> testfn_norms;   // ||f_a||_{A^p_w} (uniformity certificate)
};

/// Image norms of the weakly-null test family along a boundary-bound sequence;
/// they must vanish for any compact operator. Throws if the family's norms are
/// not uniformly bounded (delta too small).
inline ProbeResult compact_probe(const OperatorSymbol& op, const RadialWeight& w, double p,
                                 const RadialWeight& nu, double q, const DeltaChoice& delta,
                                 const std::vector<Complex>& a_sequence,
                                 const QuadratureSpec& spec = {},
                                 TestVariant variant = TestVariant::one_minus_a) {
    require_embedding_regime(p, q);
    if (a_sequence.empty()) throw std::invalid_argument("compact_probe: empty sequence");
    ProbeResult out;
    out.a_sequence = a_sequence;
    out.image_norms.resize(a_sequence.size());
    out.testfn_norms.resize(a_sequence.size());
    parallel_for(a_sequence.size(), [&](std::size_t i) {
        const Complex a = a_sequence[i];
        QuadratureSpec deep = deepen_for_tail(spec, 1.0 - std::abs(a));
        deep.rel_error_target = std::max(deep.rel_error_target, 1e-4);
        const auto f = AnalyticFunction::test_function(a, delta, w, p, variant);
        out.testfn_norms[i] = test_function_norm(a, delta, w, p, variant, spec);
        // image integrand concentrates where phi approaches a
        const Complex abar = std::conj(a);
        const double peak_scale = 4.0 * (1.0 - std::abs(a));
        const auto img = integrate_focused_checked(
            [&](Complex z) {
                const Complex v = op.u(z) * f.derivative(op.n, op.phi(z));
                return std::pow(std::abs(v), q) * nu(std::abs(z));
            },
            [&op, abar, peak_scale](Complex z) {
                return std::abs(1.0 - abar * op.phi(z)) / peak_scale - 1.0;
            },
            deep);
        if (img.divergent())
            throw QuadratureError("compact_probe: image norm diverges");
        out.image_norms[i] = std::pow(img.value, 1.0 / q);
    });
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double v : out.testfn_norms) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi < 100.0 * std::max(lo, 1e-300)))
        throw std::invalid_argument(
            "compact_probe: test family norms not uniformly bounded; raise delta");
    return out;
}

}  // namespace bergman
