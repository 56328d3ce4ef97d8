#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>

namespace twinbeam::lsq {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

// Two-parameter nonlinear least-squares problem. `evaluate` fills the
// (already weighted) residuals and their Jacobian rows at `params` and
// returns false when `params` lies outside the model domain.
struct Problem {
    std::size_t n_residuals = 0;
    std::function<bool(const Vec2& params, std::span<double> residuals, std::span<Vec2> jacobian)>
        evaluate;
    // Optional box projection applied to every trial point.
    std::function<Vec2(const Vec2&)> project;
};

struct Options {
    double initial_damping = 1e-3;
    double damping_factor = 10.0;
    double relative_tolerance = 1e-9;
    int max_iterations = 200;
    // Damping beyond which no descent is possible at working precision.
    double max_damping = 1e16;
};

struct Summary {
    Vec2 params{};
    double ssr = 0.0;
    bool converged = false;
    int iterations = 0;
    // J^T J at the final point.
    Mat2 normal{};
    std::string message;
    // Number of trial points rejected because evaluate() returned false.
    int domain_rejections = 0;
};

// Damped Gauss-Newton with Marquardt diagonal scaling. The damping is
// multiplied by `damping_factor` after a rejected step and divided by it
// after an accepted one.
Summary levenberg_marquardt(const Problem& problem, Vec2 start, const Options& options = {});

// Inverse of a symmetric 2x2 matrix; returns false when singular.
bool invert(const Mat2& m, Mat2& out) noexcept;

}  // namespace twinbeam::lsq
