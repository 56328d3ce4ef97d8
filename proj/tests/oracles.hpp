#pragma once

// Reference computations used only by the tests. They follow different
// algebraic routes from the library code they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "twinbeam/fitting.hpp"

namespace twinbeam::oracle {

// Single-beam spectrum in long double, written as a ratio of expanded
// polynomials in r = sqrt(s) and x = f / G.
inline double single_beam(double f, double eta_e, double gamma, double s) {
    const long double r = std::sqrt(static_cast<long double>(s));
    const long double x2 = static_cast<long double>(f) * f / (static_cast<long double>(gamma) * gamma);
    const long double num = eta_e * (r * r - 2.0L * r);
    const long double den = 2.0L * (r * r - 2.0L * r + 1.0L + 2.0L * x2 + x2 * r * r - 2.0L * x2 * r + x2 * x2);
    return static_cast<double>(1.0L - num / den);
}

// Linewidth that puts the difference spectrum at `level` (linear) at `f`.
inline double invert_difference_linewidth(double f, double level, double eta_product) {
    return f / std::sqrt(eta_product / (1.0 - level) - 1.0);
}

// Best epsilon for a fixed threshold: the model is linear in epsilon.
inline double profile_epsilon(const PowerDataset& d, double p_th, double p_max = 0.0) {
    long double num = 0.0L, den = 0.0L;
    for (const auto& p : d.points) {
        if (p_max > 0.0 && p.p_pump_mw > p_max) continue;
        const long double g = p.p_pump_mw < p_th ? 0.0L : 2.0L * (std::sqrt(static_cast<long double>(p_th) * p.p_pump_mw) - p_th);
        num += p.weight * g * p.p_out_mw;
        den += p.weight * g * g;
    }
    return den > 0.0L ? static_cast<double>(num / den) : 0.0;
}

inline double profile_ssr(const PowerDataset& d, double p_th, double p_max = 0.0) {
    const long double eps = profile_epsilon(d, p_th, p_max);
    long double ssr = 0.0L;
    for (const auto& p : d.points) {
        if (p_max > 0.0 && p.p_pump_mw > p_max) continue;
        const long double m = p.p_pump_mw < p_th ? 0.0L : 2.0L * eps * (std::sqrt(static_cast<long double>(p_th) * p.p_pump_mw) - p_th);
        const long double e = p.p_out_mw - m;
        ssr += p.weight * e * e;
    }
    return static_cast<double>(ssr);
}

struct ProfileFit {
    double p_threshold_mw;
    double epsilon;
    double ssr;
};

// Dense scan of the profiled objective over (lo, hi) followed by
// golden-section refinement around the best scan cell.
inline ProfileFit profile_fit(const PowerDataset& d, double lo, double hi, double p_max = 0.0) {
    constexpr int kScan = 4000;
    double best_x = lo, best_v = std::numeric_limits<double>::infinity();
    const double h = (hi - lo) / kScan;
    for (int i = 0; i <= kScan; ++i) {
        const double x = lo + h * i;
        const double v = profile_ssr(d, x, p_max);
        if (v < best_v) {
            best_v = v;
            best_x = x;
        }
    }
    double a = std::max(lo, best_x - h), b = std::min(hi, best_x + h);
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - phi * (b - a), e = a + phi * (b - a);
    double fc = profile_ssr(d, c, p_max), fe = profile_ssr(d, e, p_max);
    for (int it = 0; it < 200 && (b - a) > 1e-13 * std::fabs(b); ++it) {
        if (fc < fe) {
            b = e; e = c; fe = fc; c = b - phi * (b - a); fc = profile_ssr(d, c, p_max);
        } else {
            a = c; c = e; fc = fe; e = a + phi * (b - a); fe = profile_ssr(d, e, p_max);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, profile_epsilon(d, x, p_max), profile_ssr(d, x, p_max)};
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double stddev(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= v.size();
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (v.size() - 1));
}

}  // namespace twinbeam::oracle
