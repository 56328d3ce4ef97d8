#include "twinbeam/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "twinbeam/error.hpp"

namespace twinbeam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Lower bound of the linewidth in units of the top grid frequency.
constexpr double kMinGamma = 1e-9;

const char* const kThreshold = "p_threshold_mw";
const char* const kEpsilon = "epsilon";

template <typename... Parts>
std::string concat(const Parts&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    return os.str();
}

double point_weight(const PowerPoint& p, Weighting weighting) {
    if (weighting == Weighting::inverse_y) {
        return p.weight / (p.p_out_mw * p.p_out_mw);
    }
    return p.weight;
}

// Model of the power curve extended by zero below threshold.
double model_output(double p_pump, double p_th, double eps) {
    if (p_pump < p_th) {
        return 0.0;
    }
    return 2.0 * eps * (std::sqrt(p_th * p_pump) - p_th);
}

struct PowerLsq {
    std::vector<PowerPoint> points;
    Weighting weighting;

    bool evaluate(const lsq::Vec2& params, std::span<double> r, std::span<lsq::Vec2> jac) const {
        const double p_th = params[0];
        const double eps = params[1];
        if (!(p_th > 0.0) || !(eps > 0.0) || !std::isfinite(p_th) || !std::isfinite(eps)) {
            return false;
        }
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto& p = points[i];
            const double sw = std::sqrt(point_weight(p, weighting));
            r[i] = sw * (p.p_out_mw - model_output(p.p_pump_mw, p_th, eps));
            if (p.p_pump_mw < p_th) {
                jac[i] = {0.0, 0.0};
            } else {
                const double root = std::sqrt(p_th * p.p_pump_mw);
                const double d_eps = 2.0 * (root - p_th);
                const double d_th = 2.0 * eps * (0.5 * std::sqrt(p.p_pump_mw / p_th) - 1.0);
                jac[i] = {-sw * d_th, -sw * d_eps};
            }
        }
        return true;
    }

    lsq::Summary solve(const lsq::Vec2& start, const lsq::Options& options) const {
        lsq::Problem problem;
        problem.n_residuals = points.size();
        problem.evaluate = [this](const lsq::Vec2& p, std::span<double> r, std::span<lsq::Vec2> j) {
            return evaluate(p, r, j);
        };
        return lsq::levenberg_marquardt(problem, start, options);
    }
};

// Residual-scaled covariance sigmas; infinite when undetermined.
lsq::Vec2 covariance_sigmas(const lsq::Summary& s, std::size_t n, std::vector<std::string>& warnings) {
    if (n <= 2) {
        warnings.emplace_back("no residual degrees of freedom; uncertainties undefined");
        return {kInf, kInf};
    }
    lsq::Mat2 inv{};
    if (!lsq::invert(s.normal, inv)) {
        warnings.emplace_back("singular normal matrix; parameters not separately identifiable");
        return {kInf, kInf};
    }
    const double variance = s.ssr / static_cast<double>(n - 2);
    return {std::sqrt(std::max(0.0, variance * inv[0][0])), std::sqrt(std::max(0.0, variance * inv[1][1]))};
}

// Wald-Wolfowitz runs statistic of the residual signs ordered by pump
// power. Strongly negative z means long same-sign stretches: the model shape
// does not follow the data.
double residual_runs_z(const std::vector<PowerPoint>& points, double p_th, double eps) {
    std::vector<std::pair<double, double>> ordered;
    for (const auto& p : points) {
        ordered.emplace_back(p.p_pump_mw, p.p_out_mw - model_output(p.p_pump_mw, p_th, eps));
    }
    std::sort(ordered.begin(), ordered.end());
    double n_pos = 0.0, n_neg = 0.0, runs = 0.0;
    int last = 0;
    for (const auto& [x, e] : ordered) {
        const int sign = e > 0.0 ? 1 : (e < 0.0 ? -1 : 0);
        if (sign == 0) {
            continue;
        }
        (sign > 0 ? n_pos : n_neg) += 1.0;
        if (sign != last) {
            runs += 1.0;
            last = sign;
        }
    }
    const double n = n_pos + n_neg;
    if (n_pos == 0.0 || n_neg == 0.0) {
        return n >= 4.0 ? -kInf : 0.0;
    }
    const double mean = 2.0 * n_pos * n_neg / n + 1.0;
    const double var = 2.0 * n_pos * n_neg * (2.0 * n_pos * n_neg - n) / (n * n * (n - 1.0));
    return var > 0.0 ? (runs - mean) / std::sqrt(var) : 0.0;
}

std::vector<PowerPoint> windowed(const PowerDataset& data, double p_max) {
    std::vector<PowerPoint> out;
    for (const auto& p : data.points) {
        if (p_max <= 0.0 || p.p_pump_mw <= p_max) {
            out.push_back(p);
        }
    }
    return out;
}

double sample_stddev(const std::vector<double>& v) {
    if (v.size() < 2) {
        return kInf;
    }
    double mean = 0.0;
    for (double x : v) {
        mean += x;
    }
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mean) * (x - mean);
    }
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

void bootstrap_power_fit(const PowerLsq& base, const lsq::Vec2& estimate, const PowerFitOptions& options,
                         FitResult& result) {
    const auto replicates = static_cast<std::size_t>(std::max(0, options.bootstrap_replicates));
    std::vector<lsq::Vec2> estimates(replicates);
    std::vector<char> ok(replicates, 0);
    const std::size_t n = base.points.size();

    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                              static_cast<std::uint32_t>(k)};
            std::mt19937_64 rng(seq);
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            PowerLsq replica{{}, base.weighting};
            replica.points.reserve(n);
            for (std::size_t i = 0; i < n; ++i) {
                replica.points.push_back(base.points[pick(rng)]);
            }
            const auto fit = replica.solve(estimate, options.lm);
            if (fit.converged) {
                estimates[k] = fit.params;
                ok[k] = 1;
            }
        }
    };

    const std::size_t workers =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, replicates));
    std::vector<std::thread> pool;
    const std::size_t chunk = (replicates + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(replicates, begin + chunk);
        if (begin < end) {
            pool.emplace_back(run, begin, end);
        }
    }
    for (auto& t : pool) {
        t.join();
    }

    std::vector<double> th, eps;
    for (std::size_t k = 0; k < replicates; ++k) {
        if (ok[k]) {
            th.push_back(estimates[k][0]);
            eps.push_back(estimates[k][1]);
        }
    }
    result.bootstrap_used = th.size();
    result.bootstrap_sigmas[kThreshold] = sample_stddev(th);
    result.bootstrap_sigmas[kEpsilon] = sample_stddev(eps);
}

}  // namespace

void PowerDataset::validate(std::size_t min_points) const {
    if (points.size() < min_points) {
        throw InsufficientData(concat("power dataset: need at least ", min_points, " points, got ", points.size()));
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (!(std::isfinite(p.p_pump_mw) && p.p_pump_mw > 0.0)) {
            throw DataError(concat("power dataset: pump power at point ", i, " must be positive"), i);
        }
        if (!std::isfinite(p.p_out_mw)) {
            throw DataError(concat("power dataset: output power at point ", i, " is not finite"), i);
        }
        if (!(std::isfinite(p.weight) && p.weight > 0.0)) {
            throw DataError(concat("power dataset: weight at point ", i, " must be positive"), i);
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (points[j].p_pump_mw == p.p_pump_mw) {
                throw DataError(concat("power dataset: duplicate pump power at points ", j, " and ", i), i);
            }
        }
    }
}

FitResult fit_linear(const PowerDataset& data) {
    const auto& pts = data.points;
    if (pts.size() >= 2 && std::all_of(pts.begin(), pts.end(),
                                       [&](const PowerPoint& p) { return p.p_pump_mw == pts.front().p_pump_mw; })) {
        throw SingularFit("linear fit: all abscissas are equal");
    }
    data.validate(2);

    const double n = static_cast<double>(pts.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : pts) {
        mx += p.p_pump_mw;
        my += p.p_out_mw;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : pts) {
        sxx += (p.p_pump_mw - mx) * (p.p_pump_mw - mx);
        sxy += (p.p_pump_mw - mx) * (p.p_out_mw - my);
    }
    if (!(sxx > 0.0)) {
        throw SingularFit("linear fit: degenerate design");
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ssr = 0.0;
    for (const auto& p : pts) {
        const double e = p.p_out_mw - (slope * p.p_pump_mw + intercept);
        ssr += e * e;
    }

    FitResult result;
    result.method = "ordinary-least-squares";
    result.n_points = pts.size();
    result.converged = true;
    result.residual_norm = ssr;
    result.params["slope"] = slope;
    result.params["intercept"] = intercept;
    result.params["x_intercept"] = slope != 0.0 ? -intercept / slope : kInf;

    if (pts.size() > 2) {
        const double s2 = ssr / (n - 2.0);
        const double var_slope = s2 / sxx;
        const double var_intercept = s2 * (1.0 / n + mx * mx / sxx);
        const double cov = -mx * s2 / sxx;
        result.sigmas["slope"] = std::sqrt(var_slope);
        result.sigmas["intercept"] = std::sqrt(var_intercept);
        if (slope != 0.0) {
            // Delta method for -b / a.
            const double ga = intercept / (slope * slope);
            const double gb = -1.0 / slope;
            const double var = ga * ga * var_slope + gb * gb * var_intercept + 2.0 * ga * gb * cov;
            result.sigmas["x_intercept"] = std::sqrt(std::max(0.0, var));
        } else {
            result.sigmas["x_intercept"] = kInf;
        }
    } else {
        result.warnings.emplace_back("two points: exact interpolation, uncertainties undefined");
        result.sigmas["slope"] = kInf;
        result.sigmas["intercept"] = kInf;
        result.sigmas["x_intercept"] = kInf;
    }
    return result;
}

double power_curve_objective(const PowerDataset& data, double p_threshold_mw, double epsilon, Weighting weighting,
                             double p_max_mw) {
    double ssr = 0.0;
    for (const auto& p : data.points) {
        if (p_max_mw > 0.0 && p.p_pump_mw > p_max_mw) {
            continue;
        }
        const double e = p.p_out_mw - model_output(p.p_pump_mw, p_threshold_mw, epsilon);
        ssr += point_weight(p, weighting) * e * e;
    }
    return ssr;
}

OperatingPoint initial_guess(const PowerDataset& data) {
    data.validate(2);
    const auto line = fit_linear(data);
    double p_min = kInf;
    for (const auto& p : data.points) {
        p_min = std::min(p_min, p.p_pump_mw);
    }
    double p_th = line.param("x_intercept");
    if (!(p_th > 0.0 && p_th < p_min)) {
        p_th = 0.5 * p_min;
    }
    double num = 0.0, den = 0.0;
    for (const auto& p : data.points) {
        const double g = model_output(p.p_pump_mw, p_th, 1.0);
        num += g * p.p_out_mw;
        den += g * g;
    }
    const double eps = (den > 0.0 && num > 0.0) ? num / den : 1.0;
    return {p_min, p_th, eps};
}

FitResult fit_power_curve(const PowerDataset& data, const OperatingPoint& init, const PowerFitOptions& options) {
    data.validate(4);
    init.validate();
    if (options.weighting == Weighting::inverse_y) {
        for (std::size_t i = 0; i < data.points.size(); ++i) {
            if (!(data.points[i].p_out_mw > 0.0)) {
                throw DataError(concat("power fit: 1/y weighting needs positive output power, point ", i), i);
            }
        }
    }

    FitResult result;
    result.method = "levenberg-marquardt";
    result.n_points = data.points.size();

    const bool use_window = options.window_factor > 0.0;
    lsq::Vec2 estimate{init.p_threshold_mw, init.epsilon};
    PowerLsq problem{{}, options.weighting};
    lsq::Summary summary;
    double p_max = 0.0;
    std::size_t previous_count = 0;
    constexpr int kMaxWindowPasses = 8;
    int total_iterations = 0;
    for (int pass = 0; pass < kMaxWindowPasses; ++pass) {
        p_max = use_window ? options.window_factor * estimate[0] : 0.0;
        auto points = windowed(data, p_max);
        if (points.size() < 4) {
            throw InsufficientData(concat("power fit: only ", points.size(), " points within ",
                                          options.window_factor, " x threshold (", p_max, " mW)"));
        }
        const bool stable = pass > 0 && points.size() == previous_count;
        if (stable) {
            break;
        }
        previous_count = points.size();
        problem.points = std::move(points);
        summary = problem.solve(estimate, options.lm);
        total_iterations += summary.iterations;
        if (!summary.converged && summary.domain_rejections > 0) {
            throw DomainError(concat("power fit: threshold iterate driven out of the positive domain (",
                                     summary.domain_rejections, " rejected trial points)"));
        }
        estimate = summary.params;
        if (!use_window) {
            break;
        }
    }

    result.params[kThreshold] = estimate[0];
    result.params[kEpsilon] = estimate[1];
    result.residual_norm = summary.ssr;
    result.converged = summary.converged;
    result.iterations = total_iterations;
    result.message = summary.message;
    result.window = FitWindow{use_window ? options.window_factor : 0.0, p_max, problem.points.size()};

    const auto sig = covariance_sigmas(summary, problem.points.size(), result.warnings);
    result.sigmas[kThreshold] = sig[0];
    result.sigmas[kEpsilon] = sig[1];
    if (!(sig[0] < estimate[0])) {
        result.warnings.emplace_back("threshold uncertainty exceeds the estimate; curvature not identifiable");
    }
    double y_ss = 0.0;
    for (const auto& p : problem.points) {
        y_ss += point_weight(p, options.weighting) * p.p_out_mw * p.p_out_mw;
    }
    if (summary.ssr > 1e-18 * y_ss) {
        const double z = residual_runs_z(problem.points, estimate[0], estimate[1]);
        if (z < -3.0) {
            result.warnings.emplace_back(concat("residual signs form long runs (z = ", z,
                                                "); data do not follow the square-root curve"));
        }
    }

    if (options.bootstrap && result.converged) {
        bootstrap_power_fit(problem, estimate, options, result);
    }
    return result;
}

FitResult fit_diff_spectrum(const NoiseSpectrum& spectrum, const SpectrumFitOptions& options) {
    const auto freqs = spectrum.freqs_hz();
    const auto values = spectrum.values();
    const std::size_t n = spectrum.size();
    if (n < 5) {
        throw InsufficientData(concat("spectrum fit: need at least 5 bins, got ", n));
    }
    if (freqs.front() > 0.0 && freqs.back() / freqs.front() < 10.0) {
        throw InvalidParameter("spectrum fit: grid must span at least one decade");
    }
    double max_dip = 0.0;
    for (double v : values) {
        max_dip = std::max(max_dip, std::fabs(1.0 - v));
    }
    if (!(max_dip > 1e-12)) {
        throw Unidentifiable("spectrum fit: spectrum is flat at the shot-noise level");
    }

    // Work in units of the top frequency so the fit does not depend on the
    // frequency unit of the input.
    const double scale = freqs.back();
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = freqs[i] / scale;
    }

    // Start from the linearization 1 / (1 - v) = 1/eta + u^2 / (eta g^2).
    double g0 = 0.0, eta0 = 0.0;
    {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, m = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dip = 1.0 - values[i];
            if (dip > 0.05 * max_dip) {
                const double x = u[i] * u[i];
                const double y = 1.0 / dip;
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
                m += 1.0;
            }
        }
        const double det = m * sxx - sx * sx;
        if (m >= 2.0 && det > 0.0) {
            const double slope = (m * sxy - sx * sy) / det;
            const double intercept = (sy - slope * sx) / m;
            if (intercept > 0.0 && slope > 0.0) {
                eta0 = 1.0 / intercept;
                g0 = std::sqrt(intercept / slope);
            }
        }
        if (!(eta0 > 0.0 && eta0 <= 1.0) || !(g0 > 0.0)) {
            eta0 = std::clamp(max_dip, 1e-3, 1.0);
            g0 = u[n / 2];
        }
    }

    lsq::Problem problem;
    problem.n_residuals = n;
    problem.project = [](const lsq::Vec2& p) {
        return lsq::Vec2{std::max(p[0], kMinGamma), std::clamp(p[1], 0.0, 1.0)};
    };
    problem.evaluate = [&](const lsq::Vec2& p, std::span<double> r, std::span<lsq::Vec2> jac) {
        const double g = p[0];
        const double eta = p[1];
        if (!(g > 0.0) || !std::isfinite(g) || !std::isfinite(eta)) {
            return false;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double x2 = (u[i] / g) * (u[i] / g);
            const double lor = 1.0 / (1.0 + x2);
            r[i] = values[i] - (1.0 - eta * lor);
            // r = v - 1 + eta L, dL/dg = 2 x^2 / g L^2
            jac[i] = {eta * 2.0 * x2 / g * lor * lor, lor};
        }
        return true;
    };
    const auto summary = lsq::levenberg_marquardt(problem, {g0, eta0}, options.lm);

    FitResult result;
    result.method = "levenberg-marquardt";
    result.n_points = n;
    result.converged = summary.converged;
    result.iterations = summary.iterations;
    result.message = summary.message;
    result.residual_norm = summary.ssr;
    result.params["gamma_hz"] = summary.params[0] * scale;
    result.params["eta_product"] = summary.params[1];
    const auto sig = covariance_sigmas(summary, n, result.warnings);
    result.sigmas["gamma_hz"] = sig[0] * scale;
    result.sigmas["eta_product"] = sig[1];
    if (summary.params[1] < 1e-9) {
        result.warnings.emplace_back("fitted correlation is zero; linewidth not identifiable");
    }
    return result;
}

GridSearchResult grid_search_oracle(const std::function<double(double, double)>& objective, const GridBounds& b,
                                    std::size_t resolution) {
    if (resolution < 32) {
        throw InvalidParameter(concat("grid search: resolution must be at least 32, got ", resolution));
    }
    if (!(std::isfinite(b.x_min) && std::isfinite(b.x_max) && std::isfinite(b.y_min) && std::isfinite(b.y_max)) ||
        !(b.x_min < b.x_max) || !(b.y_min < b.y_max)) {
        throw InvalidParameter("grid search: bounds must be finite and ordered");
    }
    GridSearchResult best;
    best.dx = (b.x_max - b.x_min) / static_cast<double>(resolution - 1);
    best.dy = (b.y_max - b.y_min) / static_cast<double>(resolution - 1);
    best.value = kInf;
    best.max_value = -kInf;
    for (std::size_t ix = 0; ix < resolution; ++ix) {
        const double x = b.x_min + best.dx * static_cast<double>(ix);
        for (std::size_t iy = 0; iy < resolution; ++iy) {
            const double y = b.y_min + best.dy * static_cast<double>(iy);
            const double v = objective(x, y);
            best.max_value = std::max(best.max_value, v);
            if (v < best.value) {
                best.value = v;
                best.x = x;
                best.y = y;
                best.ix = ix;
                best.iy = iy;
            }
        }
    }
    return best;
}

}  // namespace twinbeam
