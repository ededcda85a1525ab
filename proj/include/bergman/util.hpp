#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace bergman {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Thrown when a 1-D quadrature cannot reach its error target; carries the
/// achieved estimate in the message.
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive Gauss-Kronrod on [a,b]. Relative tolerance; throws if the
/// achieved error estimate exceeds it by a wide margin.
inline double integrate_1d(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-12) {
    if (a == b) return 0.0;
    double err = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, /*max_depth=*/25, rel_tol, &err);
    // absolute floor: underflow-tiny integrals carry no meaningful relative error
    if (!(err <= 100.0 * rel_tol * std::max(std::abs(value), 1e-300) + 1e-250)) {
        char msg[128];
        std::snprintf(msg, sizeof(msg),
                      "1-D quadrature did not converge: error estimate %.3e for value %.3e", err,
                      value);
        throw QuadratureError(msg);
    }
    return value;
}

// --- deterministic sampling -------------------------------------------------

/// splitmix64: tiny deterministic generator; identical streams on every
/// platform, unlike std distributions.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform point of the sub-disk |z| <= max_r (area measure).
    Complex in_disk(double max_r) {
        const double r = max_r * std::sqrt(uniform());
        const double t = uniform(0.0, 2.0 * kPi);
        return std::polar(r, t);
    }
};

// --- least squares -----------------------------------------------------------

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need >= 2 matched samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LinearFit out;
    out.slope = (n * sxy - sx * sy) / denom;
    out.intercept = (sy - out.slope * sx) / n;
    return out;
}

inline double fit_slope_through_origin(const std::vector<double>& x,
                                       const std::vector<double>& y) {
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_slope_through_origin: zero abscissae");
    return sxy / sxx;
}

// --- monotone cubic interpolation (Fritsch-Carlson) ---------------------------

/// Shape-preserving piecewise cubic through strictly increasing abscissae.
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::invalid_argument("MonotoneCubic: need >= 2 matched nodes");
        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double h = x_[i + 1] - x_[i];
            if (h <= 0.0) throw std::invalid_argument("MonotoneCubic: abscissae not increasing");
            d[i] = (y_[i + 1] - y_[i]) / h;
        }
        m_.assign(n, 0.0);
        m_[0] = d[0];
        m_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i)
            m_[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (d[i] == 0.0) {
                m_[i] = m_[i + 1] = 0.0;
                continue;
            }
            const double a = m_[i] / d[i], b = m_[i + 1] / d[i];
            const double s = a * a + b * b;
            if (s > 9.0) {
                const double t = 3.0 / std::sqrt(s);
                m_[i] = t * a * d[i];
                m_[i + 1] = t * b * d[i];
            }
        }
    }

    double operator()(double x) const {
        const std::size_t n = x_.size();
        if (x <= x_.front())
            return y_.front() + m_.front() * (x - x_.front());
        if (x >= x_.back())
            return y_.back() + m_.back() * (x - x_.back());
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * m_[i] +
               (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * m_[i + 1];
    }

private:
    std::vector<double> x_, y_, m_;
};

// --- bounded deterministic parallelism ----------------------------------------

inline int& worker_budget_ref() {
    static int budget = static_cast<int>(std::thread::hardware_concurrency());
    return budget;
}

inline void set_worker_budget(int n) { worker_budget_ref() = std::max(1, n); }
inline int worker_budget() { return std::max(1, worker_budget_ref()); }

/// Runs f(i) for i in [0, count). Results must be written to per-index slots by
/// the caller; chunked threads keep every run bit-identical regardless of the
/// worker count.
template <class F>
void parallel_for(std::size_t count, F&& f) {
    const int workers = std::min<std::size_t>(worker_budget(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = static_cast<std::size_t>(w); i < count;
                     i += static_cast<std::size_t>(workers))
                    f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace bergman
