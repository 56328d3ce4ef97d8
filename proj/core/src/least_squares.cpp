#include "twinbeam/least_squares.hpp"

#include <cmath>
#include <vector>

namespace twinbeam::lsq {

bool invert(const Mat2& m, Mat2& out) noexcept {
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    const double scale = std::fabs(m[0][0] * m[1][1]) + std::fabs(m[0][1] * m[1][0]);
    if (!(std::fabs(det) > 1e-14 * scale) || !std::isfinite(det)) {
        return false;
    }
    out[0][0] = m[1][1] / det;
    out[1][1] = m[0][0] / det;
    out[0][1] = -m[0][1] / det;
    out[1][0] = -m[1][0] / det;
    return true;
}

namespace {

struct Linearization {
    double ssr = 0.0;
    Mat2 jtj{};
    Vec2 jtr{};
};

Linearization linearize(std::span<const double> r, std::span<const Vec2> jac) {
    Linearization lin;
    for (std::size_t i = 0; i < r.size(); ++i) {
        lin.ssr += r[i] * r[i];
        for (int a = 0; a < 2; ++a) {
            lin.jtr[a] += jac[i][a] * r[i];
            for (int b = 0; b < 2; ++b) {
                lin.jtj[a][b] += jac[i][a] * jac[i][b];
            }
        }
    }
    return lin;
}

double sum_squares(std::span<const double> r) {
    double s = 0.0;
    for (double v : r) {
        s += v * v;
    }
    return s;
}

}  // namespace

Summary levenberg_marquardt(const Problem& problem, Vec2 start, const Options& options) {
    const std::size_t n = problem.n_residuals;
    std::vector<double> r(n), r_trial(n);
    std::vector<Vec2> jac(n), jac_trial(n);

    Summary summary;
    if (problem.project) {
        start = problem.project(start);
    }
    summary.params = start;
    if (!problem.evaluate(start, r, jac)) {
        summary.message = "starting point outside the model domain";
        return summary;
    }
    Linearization lin = linearize(r, jac);
    summary.ssr = lin.ssr;
    double damping = options.initial_damping;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        summary.iterations = iter + 1;
        if (lin.ssr == 0.0) {
            summary.converged = true;
            summary.message = "exact fit";
            break;
        }

        bool accepted = false;
        Vec2 step{};
        while (!accepted) {
            Mat2 a = lin.jtj;
            for (int k = 0; k < 2; ++k) {
                // Marquardt scaling; the floor keeps a dead direction solvable.
                a[k][k] += damping * std::max(lin.jtj[k][k], 1e-300);
            }
            Mat2 inv{};
            bool solvable = invert(a, inv);
            Vec2 trial = summary.params;
            if (solvable) {
                step = {-(inv[0][0] * lin.jtr[0] + inv[0][1] * lin.jtr[1]),
                        -(inv[1][0] * lin.jtr[0] + inv[1][1] * lin.jtr[1])};
                trial = {summary.params[0] + step[0], summary.params[1] + step[1]};
                if (problem.project) {
                    trial = problem.project(trial);
                }
                step = {trial[0] - summary.params[0], trial[1] - summary.params[1]};
            }
            bool in_domain = solvable && problem.evaluate(trial, r_trial, jac_trial);
            if (solvable && !in_domain) {
                ++summary.domain_rejections;
            }
            if (in_domain && sum_squares(r_trial) < lin.ssr) {
                summary.params = trial;
                r.swap(r_trial);
                jac.swap(jac_trial);
                lin = linearize(r, jac);
                summary.ssr = lin.ssr;
                damping /= options.damping_factor;
                accepted = true;
            } else {
                damping *= options.damping_factor;
                if (damping > options.max_damping) {
                    break;
                }
            }
        }

        if (!accepted) {
            summary.converged = true;
            summary.message = "no further decrease at working precision";
            break;
        }
        bool small = true;
        for (int k = 0; k < 2; ++k) {
            const double tol = options.relative_tolerance * (std::fabs(summary.params[k]) + options.relative_tolerance);
            if (std::fabs(step[k]) > tol) {
                small = false;
            }
        }
        if (small) {
            summary.converged = true;
            summary.message = "relative parameter change below tolerance";
            break;
        }
    }
    if (!summary.converged && summary.message.empty()) {
        summary.message = "iteration limit reached";
    }
    summary.normal = lin.jtj;
    return summary;
}

}  // namespace twinbeam::lsq
