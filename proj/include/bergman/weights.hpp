#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "bergman/util.hpp"

namespace bergman {

enum class WeightKind { standard, table, custom };

/// A radial weight w(r) >= 0 on [0,1) with integrable tail. Immutable after
/// construction except the moment cache, which is safe for concurrent use.
///
/// Conventions (normalized area measure dA, area(D) = 1):
///   tail(r)        = \int_r^1 w(s) ds
///   tail_s(r)      = \int_r^1 s w(s) ds
///   moment(n)      = \int_0^1 r^n w(r) dr
///   carleson_box(r)= (1/pi) (1-r) tail_s(r) for r > 0,  disk_mass() at r = 0
///   disk_mass()    = w(D) = 2 moment(1)
class RadialWeight {
public:
    static RadialWeight standard(double alpha) {
        if (!(alpha > -1.0))
            throw std::invalid_argument("standard weight requires alpha > -1");
        auto impl = std::make_shared<Impl>();
        impl->kind = WeightKind::standard;
        impl->alpha = alpha;
        impl->label = "standard:alpha=" + format_alpha(alpha);
        impl->density = [alpha](double r) { return std::pow(1.0 - r * r, alpha); };
        return RadialWeight(std::move(impl));
    }

    /// Piecewise-linear density through (r_i, w_i); r strictly increasing in
    /// [0,1), w_i >= 0. Constant extension outside the sampled range.
    static RadialWeight from_table(std::vector<double> r, std::vector<double> w,
                                   std::string label = "table") {
        if (r.size() != w.size() || r.size() < 2)
            throw std::invalid_argument("table weight: need >= 2 matched samples");
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (!(r[i] >= 0.0 && r[i] < 1.0))
                throw std::invalid_argument("table weight: radius out of [0,1) at row " +
                                            std::to_string(i + 1));
            if (i > 0 && !(r[i] > r[i - 1]))
                throw std::invalid_argument("table weight: radii not strictly increasing at row " +
                                            std::to_string(i + 1));
            if (!(w[i] >= 0.0))
                throw std::invalid_argument("table weight: negative sample at row " +
                                            std::to_string(i + 1));
        }
        auto impl = std::make_shared<Impl>();
        impl->kind = WeightKind::table;
        impl->label = std::move(label);
        impl->tab_r = std::move(r);
        impl->tab_w = std::move(w);
        const auto* ir = &impl->tab_r;
        const auto* iw = &impl->tab_w;
        impl->density = [ir, iw](double s) { return table_eval(*ir, *iw, s); };
        return RadialWeight(std::move(impl));
    }

    static RadialWeight custom(std::function<double(double)> density,
                               std::string label = "custom") {
        auto impl = std::make_shared<Impl>();
        impl->kind = WeightKind::custom;
        impl->label = std::move(label);
        impl->density = std::move(density);
        return RadialWeight(std::move(impl));
    }

    double operator()(double r) const { return impl_->density(r); }

    WeightKind kind() const { return impl_->kind; }
    double alpha() const { return impl_->alpha; }
    const std::string& label() const { return impl_->label; }

    /// omega-hat: \int_r^1 w(s) ds. Closed form (incomplete Beta) for standard
    /// weights, exact piecewise integration for tables, adaptive 1-D
    /// quadrature (rel. error <= 1e-10) otherwise.
    double tail(double r) const {
        require_radius(r);
        switch (impl_->kind) {
            case WeightKind::standard: {
                const double a = impl_->alpha;
                // \int_r^1 (1-s^2)^a ds = (1/2) B(a+1, 1/2) I_{1-r^2}(a+1, 1/2)
                const double x = (1.0 - r) * (1.0 + r);
                return 0.5 * boost::math::beta(a + 1.0, 0.5) *
                       boost::math::ibeta(a + 1.0, 0.5, std::min(1.0, std::max(0.0, x)));
            }
            case WeightKind::table:
                return table_integral(r, /*s_power=*/0);
            case WeightKind::custom:
                return integrate_1d(impl_->density, r, 1.0, 1e-11);
        }
        return 0.0;
    }

    /// \int_r^1 s w(s) ds (radial factor of the Carleson-box mass).
    double tail_s(double r) const {
        require_radius(r);
        switch (impl_->kind) {
            case WeightKind::standard: {
                const double a = impl_->alpha;
                return std::pow((1.0 - r) * (1.0 + r), a + 1.0) / (2.0 * (a + 1.0));
            }
            case WeightKind::table:
                return table_integral(r, /*s_power=*/1);
            case WeightKind::custom: {
                const auto& w = impl_->density;
                return integrate_1d([&w](double s) { return s * w(s); }, r, 1.0, 1e-11);
            }
        }
        return 0.0;
    }

    /// omega_n, cached per n.
    double moment(long n) const {
        if (n < 0) throw std::invalid_argument("moment: n must be >= 0");
        {
            std::lock_guard<std::mutex> lock(impl_->cache_mutex);
            auto it = impl_->moments.find(n);
            if (it != impl_->moments.end()) return it->second;
        }
        const double value = moment_real(static_cast<double>(n));
        std::lock_guard<std::mutex> lock(impl_->cache_mutex);
        impl_->moments.emplace(n, value);
        return value;
    }

    /// \int_0^1 r^s w(r) dr for real s >= 0 (monomial norms need fractional s).
    double moment_real(double s) const {
        if (!(s >= 0.0)) throw std::invalid_argument("moment_real: s must be >= 0");
        switch (impl_->kind) {
            case WeightKind::standard:
                // substitute u = r^2: (1/2) B((s+1)/2, alpha+1)
                return 0.5 * boost::math::beta(0.5 * (s + 1.0), impl_->alpha + 1.0);
            case WeightKind::table:
                return table_moment(s);
            case WeightKind::custom: {
                const auto& w = impl_->density;
                return integrate_1d([&w, s](double r) { return std::pow(r, s) * w(r); }, 0.0,
                                    1.0, 1e-11);
            }
        }
        return 0.0;
    }

    /// omega-tilde: tail(r)/(1-r).
    double tilde(double r) const { return tail(r) / (1.0 - r); }

    /// Total mass w(D) under normalized area measure.
    double disk_mass() const { return 2.0 * moment(1); }

    /// Carleson-box mass w(S(z)) for |z| = r; S(0) = D by convention.
    double carleson_box(double r) const {
        require_radius(r);
        if (r == 0.0) return disk_mass();
        return (1.0 - r) * tail_s(r) / kPi;
    }

    double carleson_box(Complex z) const { return carleson_box(std::abs(z)); }

private:
    struct Impl {
        WeightKind kind = WeightKind::custom;
        double alpha = std::numeric_limits<double>::quiet_NaN();
        std::string label;
        std::function<double(double)> density;
        std::vector<double> tab_r, tab_w;
        mutable std::mutex cache_mutex;
        mutable std::map<long, double> moments;
    };

    explicit RadialWeight(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}

    static void require_radius(double r) {
        if (!(r >= 0.0 && r < 1.0))
            throw std::invalid_argument("radius must lie in [0,1)");
    }

    static std::string format_alpha(double a) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", a);
        return buf;
    }

    static double table_eval(const std::vector<double>& r, const std::vector<double>& w,
                             double s) {
        if (s <= r.front()) return w.front();
        if (s >= r.back()) return w.back();
        const auto it = std::upper_bound(r.begin(), r.end(), s);
        const std::size_t i = static_cast<std::size_t>(it - r.begin()) - 1;
        const double t = (s - r[i]) / (r[i + 1] - r[i]);
        return w[i] + t * (w[i + 1] - w[i]);
    }

    // exact \int_lo^1 s^pow * density ds over the piecewise-linear density
    double table_integral(double lo, int s_power) const {
        const auto& r = impl_->tab_r;
        const auto& w = impl_->tab_w;
        double acc = 0.0;
        auto seg = [&](double a, double b) {
            if (b <= lo) return;
            a = std::max(a, lo);
            if (a >= b) return;
            const double wa = table_eval(r, w, a), wb = table_eval(r, w, b);
            // density linear on [a,b]: w(s) = wa + (wb-wa)(s-a)/(b-a)
            const double slope = (b > a) ? (wb - wa) / (b - a) : 0.0;
            const double c0 = wa - slope * a;  // w(s) = c0 + slope*s
            auto prim = [&](double s) {
                if (s_power == 0) return c0 * s + 0.5 * slope * s * s;
                return 0.5 * c0 * s * s + slope * s * s * s / 3.0;
            };
            acc += prim(b) - prim(a);
        };
        double prev = 0.0;
        for (double knot : r) {
            seg(prev, knot);
            prev = knot;
        }
        seg(prev, 1.0);
        return acc;
    }

    double table_moment(double s) const {
        const auto& r = impl_->tab_r;
        const auto& w = impl_->tab_w;
        double acc = 0.0;
        auto seg = [&](double a, double b) {
            if (a >= b) return;
            const double wa = table_eval(r, w, a), wb = table_eval(r, w, b);
            const double slope = (b > a) ? (wb - wa) / (b - a) : 0.0;
            const double c0 = wa - slope * a;
            auto prim = [&](double t) {
                return c0 * std::pow(t, s + 1.0) / (s + 1.0) +
                       slope * std::pow(t, s + 2.0) / (s + 2.0);
            };
            acc += prim(b) - prim(a);
        };
        double prev = 0.0;
        for (double knot : r) {
            seg(prev, knot);
            prev = knot;
        }
        seg(prev, 1.0);
        return acc;
    }

    std::shared_ptr<Impl> impl_;
};

// --- doubling diagnostics ------------------------------------------------------

/// Measured doubling certificate on a radial grid. All constants are grid
/// measurements, not proofs.
struct DoublingReport {
    double upper_constant = 1.0;  // C_hat = max_r tail(r)/tail((1+r)/2)
    std::optional<std::pair<double, double>> lower_pair;  // (C_check, theta)
    double alpha_low = 0.0;   // min per-pair exponent of the tail ratio
    double beta_high = 0.0;   // max per-pair exponent
    double fitted_exponent = 0.0;  // least-squares slope through the origin
    std::vector<double> grid;      // radii actually used
    int dropped_points = 0;        // underflow-dropped grid points
    bool in_Dhat = false;
    bool in_Dcheck = false;
    bool in_D = false;
};

inline std::vector<double> dyadic_radii(int j_max, int j_min = 1) {
    std::vector<double> out;
    for (int j = j_min; j <= j_max; ++j) out.push_back(1.0 - std::pow(2.0, -j));
    return out;
}

/// Doubling-class diagnostics. Defaults follow the dyadic structure of the
/// upper-doubling condition: r_j = 1 - 2^{-j}, j = 1..40, theta candidates
/// {1.5, 2, 4, 8}, margin 0.05 on the lower-doubling constant.
inline DoublingReport doubling_report(const RadialWeight& w,
                                      std::vector<double> grid = {},
                                      std::vector<double> theta_candidates = {1.5, 2.0, 4.0,
                                                                              8.0}) {
    if (grid.empty()) grid = dyadic_radii(40);
    if (grid.empty()) throw std::invalid_argument("doubling_report: empty grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0 && grid[i] < 1.0))
            throw std::invalid_argument("doubling_report: grid radius out of [0,1)");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw std::invalid_argument("doubling_report: grid not sorted");
    }
    for (double t : theta_candidates)
        if (!(t > 1.0)) throw std::invalid_argument("doubling_report: theta must be > 1");

    constexpr double kUnderflow = 1e-290;
    DoublingReport rep;
    std::vector<double> tails;
    for (double r : grid) {
        // tail underflow or an uncertifiable quadrature near 1 drops the point
        try {
            const double t0 = w.tail(r);
            const double t1 = w.tail(0.5 * (1.0 + r));
            if (!(t0 > kUnderflow) || !(t1 > kUnderflow)) {
                ++rep.dropped_points;
                continue;
            }
            rep.grid.push_back(r);
            tails.push_back(t0);
        } catch (const QuadratureError&) {
            ++rep.dropped_points;
        }
    }
    if (rep.grid.empty())
        throw std::invalid_argument("doubling_report: all grid points dropped (tail underflow)");

    std::vector<double> upper_ratio(rep.grid.size());
    for (std::size_t i = 0; i < rep.grid.size(); ++i)
        upper_ratio[i] = tails[i] / w.tail(0.5 * (1.0 + rep.grid[i]));
    rep.upper_constant = *std::max_element(upper_ratio.begin(), upper_ratio.end());

    // Blow-up screen: ratios of a doubling weight settle; outside D-hat they
    // explode along the dyadic grid.
    {
        const std::size_t half = std::max<std::size_t>(1, rep.grid.size() / 2);
        double front = 0.0, back = 0.0;
        for (std::size_t i = 0; i < rep.grid.size(); ++i)
            (i < half ? front : back) = std::max(i < half ? front : back, upper_ratio[i]);
        rep.in_Dhat = std::isfinite(rep.upper_constant) &&
                      (rep.grid.size() <= half || back <= 1.25 * front);
    }

    constexpr double kMargin = 0.05;
    for (double theta : theta_candidates) {
        double c_check = std::numeric_limits<double>::infinity();
        bool usable = true;
        for (std::size_t i = 0; i < rep.grid.size(); ++i) {
            const double r = rep.grid[i];
            double inner;
            try {
                inner = w.tail(1.0 - (1.0 - r) / theta);
            } catch (const QuadratureError&) {
                usable = false;
                break;
            }
            if (!(inner > kUnderflow)) {
                usable = false;
                break;
            }
            c_check = std::min(c_check, tails[i] / inner);
        }
        if (usable && c_check > 1.0 + kMargin) {
            rep.lower_pair = std::make_pair(c_check, theta);
            break;  // candidates ordered: smallest admissible theta wins
        }
    }
    rep.in_Dcheck = rep.lower_pair.has_value();
    rep.in_D = rep.in_Dhat && rep.in_Dcheck;

    // Exponent bracket of the tail ratio power bounds, from all grid pairs
    // r < t with t - r >= 0.01.
    std::vector<double> xs, ys;
    rep.alpha_low = std::numeric_limits<double>::infinity();
    rep.beta_high = 0.0;
    for (std::size_t i = 0; i < rep.grid.size(); ++i) {
        for (std::size_t j = i + 1; j < rep.grid.size(); ++j) {
            if (rep.grid[j] - rep.grid[i] < 0.01) continue;
            const double x = std::log((1.0 - rep.grid[i]) / (1.0 - rep.grid[j]));
            const double y = std::log(tails[i] / tails[j]);
            xs.push_back(x);
            ys.push_back(y);
            const double e = y / x;
            rep.alpha_low = std::min(rep.alpha_low, e);
            rep.beta_high = std::max(rep.beta_high, e);
        }
    }
    if (!xs.empty()) rep.fitted_exponent = fit_slope_through_origin(xs, ys);
    if (!std::isfinite(rep.alpha_low)) rep.alpha_low = rep.beta_high = rep.fitted_exponent;
    return rep;
}

// --- memoized Carleson-box radial profile ---------------------------------------

/// w(S(t)) as a function of t, evaluated millions of times by the criterion
/// integrands. Standard weights use the closed form; other kinds are memoized
/// on a 4096-point grid, geometric in 1-t, with monotone-cubic interpolation
/// of log w(S) against log(1-t). Read-only after construction.
class BoxProfile {
public:
    explicit BoxProfile(const RadialWeight& w, int points = 4096) : w_(w) {
        if (w.kind() == WeightKind::standard) return;
        std::vector<double> xs(points), ys(points);
        const double x_lo = std::log(std::pow(2.0, -48.0));  // t = 1 - 2^{-48}
        const double x_hi = 0.0;                             // t = 0
        for (int i = 0; i < points; ++i) {
            const double x = x_hi + (x_lo - x_hi) * static_cast<double>(i) / (points - 1);
            const double t = 1.0 - std::exp(x);
            xs[i] = -x;  // increasing abscissa: -log(1-t)
            ys[i] = std::log(std::max(1e-300, (1.0 - t) * w.tail_s(t) / kPi));
        }
        memo_ = MonotoneCubic(std::move(xs), std::move(ys));
        memoized_ = true;
    }

    /// Box mass at radius t; t = 0 uses the full-disk convention.
    double operator()(double t) const {
        if (t == 0.0) return w_.disk_mass();
        if (!memoized_) return w_.carleson_box(t);
        return std::exp(memo_(-std::log(1.0 - t)));
    }

private:
    RadialWeight w_;
    MonotoneCubic memo_;
    bool memoized_ = false;
};

}  // namespace bergman
