#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "bergman/disk.hpp"
#include "bergman/util.hpp"

namespace bergman {

/// Disk-integration policy. Radial rings are geometric (ring j spans
/// 1-2^{-(j-1)} .. 1-2^{-j}) so the grid concentrates where every criterion
/// integrand lives; refinement splits cells anisotropically where the
/// two-level midpoint comparison flags error.
struct QuadratureSpec {
    int radial_rings = 48;
    int angular_nodes_per_ring = 64;
    double rel_error_target = 1e-6;
    double divergence_cap = 1e12;
    int max_refinement_levels = 6;
    long cell_budget = 400000;  // safety valve on adaptive growth
};

enum class IntegralVerdict { converged, divergent, undecided };

struct IntegralOutcome {
    double value = 0.0;
    double error_estimate = 0.0;
    IntegralVerdict verdict = IntegralVerdict::undecided;
    std::vector<double> partial_values;  // I(r_j): cumulative mass through ring j
    std::vector<double> ring_radii;      // outer radius of ring j
    long evaluations = 0;

    bool converged() const { return verdict == IntegralVerdict::converged; }
    bool divergent() const { return verdict == IntegralVerdict::divergent; }
};

using Density = std::function<double(Complex)>;
/// Signed mask margin: <= 0 inside the integration region (see region_margin).
using MaskMargin = std::function<double(Complex)>;
/// Signed focus margin: <= 0 near a known thin feature (kernel peak) that the
/// integrand concentrates on, in units of the feature scale (margin = -1 at
/// the peak, 0 on the feature boundary, +k at k feature-widths away). Cells
/// that cannot be certified clear of the feature keep refining until they are
/// resolved to the feature scale, so thin peaks are never jumped over.
using FocusMargin = std::function<double(Complex)>;

namespace detail {

struct Cell {
    double r0, r1, t0, t1;
    double est = 0.0;   // current estimate of the cell integral
    double err = 0.0;   // two-level refinement indicator (+ mask booster)
    double f_lo = 0.0;  // cached child midpoint densities along the chosen split
    double f_hi = 0.0;
    int ring = 0;
    int depth = 0;
    bool split_radial = true;
    bool mask_suspect = false;  // straddles the mask boundary (value uncertainty)
    bool focus_hot = false;     // unresolved relative to a declared feature
    bool alive = true;
};

inline double cell_area(double r0, double r1, double t0, double t1) {
    return (r1 * r1 - r0 * r0) * (t1 - t0) / (2.0 * kPi);
}

struct EngineContext {
    const Density* f = nullptr;
    const MaskMargin* margin = nullptr;
    const FocusMargin* focus = nullptr;
    long evaluations = 0;
    double scale_seen = 0.0;  // max |masked density| observed

    double sample(double r, double t) {
        const Complex z = std::polar(r, t);
        if (margin && *margin) {
            if ((*margin)(z) > 0.0) {
                ++evaluations;
                return 0.0;
            }
        }
        const double v = (*f)(z);
        ++evaluations;
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "density not finite at node z = (" << z.real() << ", " << z.imag() << ")";
            throw QuadratureError(msg.str());
        }
        scale_seen = std::max(scale_seen, std::abs(v));
        return v;
    }

    // Fills estimate/indicator/split caches of a cell whose midpoint density
    // is already known.
    void refresh(Cell& c, double f_center) {
        const double rm = 0.5 * (c.r0 + c.r1);
        const double tm = 0.5 * (c.t0 + c.t1);
        const double area = cell_area(c.r0, c.r1, c.t0, c.t1);
        const double i0 = f_center * area;

        const double fr_lo = sample(0.5 * (c.r0 + rm), tm);
        const double fr_hi = sample(0.5 * (rm + c.r1), tm);
        const double ir = fr_lo * cell_area(c.r0, rm, c.t0, c.t1) +
                          fr_hi * cell_area(rm, c.r1, c.t0, c.t1);

        const double ft_lo = sample(rm, 0.5 * (c.t0 + tm));
        const double ft_hi = sample(rm, 0.5 * (tm + c.t1));
        const double it = (ft_lo + ft_hi) * 0.5 * area;

        const double dr = std::abs(ir - i0);
        const double dt = std::abs(it - i0);
        // directional Richardson: composite-midpoint halving cuts each
        // direction's leading error by 4 (rough cells are downgraded below)
        c.est = (4.0 * (ir + it) - 5.0 * i0) / 3.0;
        c.err = (dr + dt) / 3.0;
        c.split_radial = dr >= dt;

        // Mask-boundary screen: unless sampled margins certify the whole cell
        // inside or outside, keep the cell hot so thin features cannot hide
        // between nodes.
        if (margin && *margin) {
            double m[5];
            m[0] = (*margin)(std::polar(rm, tm));
            m[1] = (*margin)(std::polar(0.5 * (c.r0 + rm), tm));
            m[2] = (*margin)(std::polar(0.5 * (rm + c.r1), tm));
            m[3] = (*margin)(std::polar(rm, 0.5 * (c.t0 + tm)));
            m[4] = (*margin)(std::polar(rm, 0.5 * (tm + c.t1)));
            double lo = m[0], hi = m[0];
            for (double v : m) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            const double spread = hi - lo;
            const bool certain = (lo > spread + 1e-12) || (hi < -spread - 1e-12);
            if (!certain) {
                c.err += area * std::max(scale_seen, 1.0);
                c.mask_suspect = true;
                // split across the mask boundary: the direction with the larger
                // sampled margin variation; longer side when ambiguous
                const double var_r = std::abs(m[2] - m[1]);
                const double var_t = std::abs(m[4] - m[3]);
                if (var_r > 1.2 * var_t)
                    c.split_radial = true;
                else if (var_t > 1.2 * var_r)
                    c.split_radial = false;
                else
                    c.split_radial = (c.r1 - c.r0) >= rm * (c.t1 - c.t0);
            }
        }

        if (focus && *focus) {
            double m[5];
            m[0] = (*focus)(std::polar(rm, tm));
            m[1] = (*focus)(std::polar(0.5 * (c.r0 + rm), tm));
            m[2] = (*focus)(std::polar(0.5 * (rm + c.r1), tm));
            m[3] = (*focus)(std::polar(rm, 0.5 * (c.t0 + tm)));
            m[4] = (*focus)(std::polar(rm, 0.5 * (tm + c.t1)));
            double lo = m[0], hi = m[0];
            for (double v : m) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            const double spread = hi - lo;
            // clear of the feature, or already resolved to its scale: done
            const bool clear = (lo > spread + 1e-15) || (spread <= 0.5);
            if (!clear) {
                c.focus_hot = true;
                const double var_r = std::abs(m[2] - m[1]);
                const double var_t = std::abs(m[4] - m[3]);
                if (var_r > 1.2 * var_t)
                    c.split_radial = true;
                else if (var_t > 1.2 * var_r)
                    c.split_radial = false;
                else
                    c.split_radial = (c.r1 - c.r0) >= rm * (c.t1 - c.t0);
            }
        }

        if (c.mask_suspect || c.focus_hot || (margin && *margin)) {
            // no smoothness certificate: extrapolating across a mask edge or a
            // kernel peak can produce wild (even negative) estimates
            c.est = 0.5 * (ir + it);
            c.err = std::max(c.err, dr + dt);
        }
        if (f_center >= 0.0 && fr_lo >= 0.0 && fr_hi >= 0.0 && ft_lo >= 0.0 && ft_hi >= 0.0)
            c.est = std::max(c.est, 0.0);

        if (c.split_radial) {
            c.f_lo = fr_lo;
            c.f_hi = fr_hi;
        } else {
            c.f_lo = ft_lo;
            c.f_hi = ft_hi;
        }
    }
};

struct Layout {
    std::vector<Cell> cells;
    std::vector<double> ring_radii;
    bool boundary_tail = false;  // rings approach |z| = 1
};

inline Layout disk_layout(const QuadratureSpec& spec) {
    Layout lay;
    lay.boundary_tail = true;
    const int rings = std::max(1, spec.radial_rings);
    const int ang = std::max(1, spec.angular_nodes_per_ring);
    lay.cells.reserve(static_cast<std::size_t>(rings) * ang);
    for (int j = 1; j <= rings; ++j) {
        const double r0 = 1.0 - std::pow(2.0, -(j - 1));
        const double r1 = 1.0 - std::pow(2.0, -j);
        lay.ring_radii.push_back(r1);
        for (int k = 0; k < ang; ++k) {
            Cell c;
            c.r0 = r0;
            c.r1 = r1;
            c.t0 = 2.0 * kPi * k / ang;
            c.t1 = 2.0 * kPi * (k + 1) / ang;
            c.ring = j - 1;
            lay.cells.push_back(c);
        }
    }
    return lay;
}

inline Layout carleson_layout(const CarlesonSquare& sq, const QuadratureSpec& spec) {
    const double rz = std::abs(sq.anchor);
    const double width = 1.0 - rz;
    const double tc = std::arg(sq.anchor);
    Layout lay;
    lay.boundary_tail = true;
    const int rings = std::max(1, spec.radial_rings);
    const int ang =
        std::max(2, static_cast<int>(std::lround(spec.angular_nodes_per_ring * width /
                                                 (2.0 * kPi))));
    for (int j = 1; j <= rings; ++j) {
        const double r0 = 1.0 - width * std::pow(2.0, -(j - 1));
        const double r1 = 1.0 - width * std::pow(2.0, -j);
        lay.ring_radii.push_back(r1);
        for (int k = 0; k < ang; ++k) {
            Cell c;
            c.r0 = r0;
            c.r1 = r1;
            c.t0 = tc - 0.5 * width + width * k / ang;
            c.t1 = tc - 0.5 * width + width * (k + 1) / ang;
            c.ring = j - 1;
            lay.cells.push_back(c);
        }
    }
    return lay;
}

inline Layout band_layout(double r_lo, double r_hi, double t_lo, double t_hi, int bands,
                          int ang) {
    Layout lay;
    for (int j = 1; j <= bands; ++j) {
        const double r0 = r_lo + (r_hi - r_lo) * (j - 1) / bands;
        const double r1 = r_lo + (r_hi - r_lo) * j / bands;
        lay.ring_radii.push_back(r1);
        for (int k = 0; k < ang; ++k) {
            Cell c;
            c.r0 = r0;
            c.r1 = r1;
            c.t0 = t_lo + (t_hi - t_lo) * k / ang;
            c.t1 = t_lo + (t_hi - t_lo) * (k + 1) / ang;
            c.ring = j - 1;
            lay.cells.push_back(c);
        }
    }
    return lay;
}

inline IntegralOutcome run_engine(Layout lay, const Density& f, const MaskMargin& margin,
                                  const QuadratureSpec& spec, const FocusMargin& focus = {}) {
    EngineContext ctx;
    ctx.f = &f;
    ctx.margin = &margin;
    ctx.focus = &focus;

    std::vector<Cell>& cells = lay.cells;
    const std::size_t n_rings = lay.ring_radii.size();

    // Initial sweep: midpoint density per cell (parallel, slot-ordered), then
    // a deterministic sequential refresh for estimates and indicators.
    {
        std::vector<double> mid(cells.size());
        std::vector<char> masked(cells.size(), 0);
        parallel_for(cells.size(), [&](std::size_t i) {
            const Cell& c = cells[i];
            const Complex z = std::polar(0.5 * (c.r0 + c.r1), 0.5 * (c.t0 + c.t1));
            if (margin && margin(z) > 0.0) {
                masked[i] = 1;
                mid[i] = 0.0;
                return;
            }
            mid[i] = f(z);
        });
        for (std::size_t i = 0; i < cells.size(); ++i) {
            ctx.evaluations++;
            if (!masked[i]) {
                if (!std::isfinite(mid[i])) {
                    std::ostringstream msg;
                    const Cell& c = cells[i];
                    msg << "density not finite at node (r=" << 0.5 * (c.r0 + c.r1)
                        << ", theta=" << 0.5 * (c.t0 + c.t1) << ")";
                    throw QuadratureError(msg.str());
                }
                ctx.scale_seen = std::max(ctx.scale_seen, std::abs(mid[i]));
            }
        }
        for (std::size_t i = 0; i < cells.size(); ++i) ctx.refresh(cells[i], mid[i]);
    }

    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry> queue;     // by error indicator
    std::priority_queue<Entry> hot_queue; // focus-unresolved cells, by area
    long hot_open = 0;                    // focus-hot cells not yet resolvable
    double total = 0.0, err_total = 0.0;
    std::vector<double> ring_sums(n_rings, 0.0);
    auto enqueue = [&](std::size_t i) {
        const Cell& c = cells[i];
        if (c.depth >= spec.max_refinement_levels) return;
        if (c.focus_hot) {
            hot_queue.emplace(cell_area(c.r0, c.r1, c.t0, c.t1), i);
            ++hot_open;
        } else {
            queue.emplace(c.err, i);
        }
    };
    for (std::size_t i = 0; i < cells.size(); ++i) {
        total += cells[i].est;
        err_total += cells[i].err;
        ring_sums[cells[i].ring] += cells[i].est;
        enqueue(i);
    }

    const double floor_abs = 1e-14;
    bool divergent = false;

    auto divergence_check = [&]() {
        if (std::abs(total) > spec.divergence_cap) {
            divergent = true;
            return;
        }
        if (n_rings < 6 || !lay.boundary_tail) return;
        double prev = 0.0;
        // cumulative partials over rings; the last five must each grow >= 5%
        std::vector<double> partial(n_rings);
        double acc = 0.0;
        for (std::size_t j = 0; j < n_rings; ++j) {
            acc += ring_sums[j];
            partial[j] = acc;
        }
        bool growing = std::abs(partial.back()) > 1e-280;
        for (std::size_t j = n_rings - 5; j < n_rings && growing; ++j) {
            prev = partial[j - 1];
            if (!(partial[j] > prev && std::abs(partial[j]) >= 1.05 * std::abs(prev)))
                growing = false;
        }
        if (growing) divergent = true;
    };

    auto tail_estimate = [&]() -> double {
        if (!lay.boundary_tail || n_rings < 4) return 0.0;
        const double last = std::abs(ring_sums[n_rings - 1]);
        if (last <= 1e-300) return 0.0;
        double ratio = 0.0;
        for (std::size_t j = n_rings - 3; j < n_rings; ++j) {
            const double a = std::abs(ring_sums[j - 1]);
            if (a <= 1e-300) return std::numeric_limits<double>::infinity();
            ratio = std::max(ratio, std::abs(ring_sums[j]) / a);
        }
        if (ratio >= 0.97) return std::numeric_limits<double>::infinity();
        return last * ratio / (1.0 - ratio);
    };

    divergence_check();
    long splits = 0;
    while (!divergent) {
        // focus-hot cells must be resolved before convergence may be declared
        const bool hot = !hot_queue.empty();
        if (!hot) {
            const double tol = spec.rel_error_target * std::abs(total) + floor_abs;
            if (err_total + tail_estimate() <= tol) break;
            if (queue.empty()) break;
        }
        if (static_cast<long>(cells.size()) > spec.cell_budget) break;

        std::size_t idx;
        if (hot) {
            idx = hot_queue.top().second;
            hot_queue.pop();
            --hot_open;
        } else {
            idx = queue.top().second;
            queue.pop();
        }
        if (!cells[idx].alive) continue;

        // split into two children along the flagged direction
        Cell parent = cells[idx];
        cells[idx].alive = false;
        Cell a, b;
        const double rm = 0.5 * (parent.r0 + parent.r1);
        const double tm = 0.5 * (parent.t0 + parent.t1);
        if (parent.split_radial) {
            a = Cell{parent.r0, rm, parent.t0, parent.t1};
            b = Cell{rm, parent.r1, parent.t0, parent.t1};
        } else {
            a = Cell{parent.r0, parent.r1, parent.t0, tm};
            b = Cell{parent.r0, parent.r1, tm, parent.t1};
        }
        a.ring = b.ring = parent.ring;
        a.depth = b.depth = parent.depth + 1;
        ctx.refresh(a, parent.f_lo);
        ctx.refresh(b, parent.f_hi);

        const double d_est = a.est + b.est - parent.est;
        // Observed parent-level extrapolation error damps the children's
        // indicators once the asymptotic regime is reached. Capped at 4x per
        // level (the rule's own order), so accidental cancellation in a rough
        // region cannot silence a cell that still hides error.
        if (!margin) {
            const double observed = std::abs(d_est);
            if (!a.mask_suspect && !a.focus_hot)
                a.err = std::min(a.err, std::max(observed, 0.25 * a.err));
            if (!b.mask_suspect && !b.focus_hot)
                b.err = std::min(b.err, std::max(observed, 0.25 * b.err));
        }
        total += d_est;
        err_total += a.err + b.err - parent.err;
        ring_sums[parent.ring] += d_est;

        const std::size_t ia = cells.size();
        cells.push_back(a);
        cells.push_back(b);
        enqueue(ia);
        enqueue(ia + 1);

        if ((++splits & 0x1ff) == 0) divergence_check();
    }
    divergence_check();

    // Exact deterministic re-reduction over live cells.
    total = 0.0;
    err_total = 0.0;
    std::fill(ring_sums.begin(), ring_sums.end(), 0.0);
    for (const Cell& c : cells) {
        if (!c.alive) continue;
        total += c.est;
        err_total += c.err;
        ring_sums[c.ring] += c.est;
    }

    IntegralOutcome out;
    out.value = total;
    out.ring_radii = lay.ring_radii;
    out.partial_values.resize(n_rings);
    double acc = 0.0;
    for (std::size_t j = 0; j < n_rings; ++j) {
        acc += ring_sums[j];
        out.partial_values[j] = acc;
    }
    out.evaluations = ctx.evaluations;

    const double tail = tail_estimate();
    out.error_estimate = err_total + (std::isfinite(tail) ? tail : 0.0);
    if (divergent) {
        out.verdict = IntegralVerdict::divergent;
    } else if (std::isfinite(tail) &&
               err_total + tail <= spec.rel_error_target * std::abs(total) + floor_abs) {
        out.verdict = IntegralVerdict::converged;
    } else {
        out.verdict = IntegralVerdict::undecided;
        if (!std::isfinite(tail)) out.error_estimate = err_total + std::abs(total);
    }
    return out;
}

}  // namespace detail

/// Integral of f over the unit disk against normalized area measure.
inline IntegralOutcome integrate_disk(const Density& f, const QuadratureSpec& spec = {}) {
    return detail::run_engine(detail::disk_layout(spec), f, MaskMargin{}, spec);
}

/// Integral of f with a mask margin (f is only evaluated where margin <= 0).
inline IntegralOutcome integrate_disk_masked(const Density& f, const MaskMargin& margin,
                                             const QuadratureSpec& spec = {}) {
    return detail::run_engine(detail::disk_layout(spec), f, margin, spec);
}

/// Integral of f whose mass concentrates near a thin feature declared by the
/// focus margin; guarantees the refinement walks into the feature instead of
/// certifying a value that missed it.
inline IntegralOutcome integrate_disk_focused(const Density& f, const FocusMargin& focus,
                                              const QuadratureSpec& spec = {}) {
    return detail::run_engine(detail::disk_layout(spec), f, MaskMargin{}, spec, focus);
}

/// Integral of f restricted to a region. Carleson squares and D_r get exact
/// region-fitted cells; pseudo-disks use a bounding polar box with
/// indicator-masked refinement.
inline IntegralOutcome integrate_region(const Density& f, const Region& reg,
                                        const QuadratureSpec& spec = {}) {
    if (std::holds_alternative<FullDisk>(reg)) return integrate_disk(f, spec);
    if (const auto* sq = std::get_if<CarlesonSquare>(&reg)) {
        if (std::abs(sq->anchor) == 0.0) return integrate_disk(f, spec);
        return detail::run_engine(detail::carleson_layout(*sq, spec), f, MaskMargin{}, spec);
    }
    if (const auto* d = std::get_if<ClosedDisk>(&reg)) {
        const int bands = std::min(32, std::max(8, spec.radial_rings));
        auto lay = detail::band_layout(0.0, d->radius, 0.0, 2.0 * kPi, bands,
                                       std::max(1, spec.angular_nodes_per_ring));
        return detail::run_engine(std::move(lay), f, MaskMargin{}, spec);
    }
    const auto& pd = std::get<PseudoDisk>(reg);
    const EuclideanDisk hull = euclidean_hull(pd);
    const double rc = std::abs(hull.center);
    double r_lo, r_hi, t_lo, t_hi;
    if (rc <= hull.radius) {
        r_lo = 0.0;
        r_hi = rc + hull.radius;
        t_lo = 0.0;
        t_hi = 2.0 * kPi;
    } else {
        r_lo = rc - hull.radius;
        r_hi = rc + hull.radius;
        const double half = std::asin(std::min(1.0, hull.radius / rc)) * 1.0001 + 1e-12;
        t_lo = std::arg(hull.center) - half;
        t_hi = std::arg(hull.center) + half;
    }
    auto lay = detail::band_layout(r_lo, r_hi, t_lo, t_hi, 24, 24);
    MaskMargin margin = [reg](Complex z) { return region_margin(reg, z); };
    return detail::run_engine(std::move(lay), f, margin, spec);
}

/// Raw truncated-disk partial integrals I(r_j), r_j = 1 - 2^{-j}; the data
/// behind every finite-vs-divergent verdict.
inline std::vector<double> divergence_probe(const Density& f, const QuadratureSpec& spec = {}) {
    return integrate_disk(f, spec).partial_values;
}

}  // namespace bergman
