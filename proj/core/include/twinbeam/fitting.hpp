#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twinbeam/least_squares.hpp"
#include "twinbeam/opo_model.hpp"

namespace twinbeam {

struct PowerPoint {
    double p_pump_mw = 0.0;
    double p_out_mw = 0.0;
    double weight = 1.0;
};

// Output power observations versus pump power.
struct PowerDataset {
    std::vector<PowerPoint> points;

    // Distinct, positive pump powers and at least `min_points` entries.
    void validate(std::size_t min_points) const;
};

enum class Weighting {
    uniform,
    // Residuals divided by the observed output, suited to multiplicative noise.
    inverse_y,
};

// Pump-power range admitted into a fit of the power curve.
struct FitWindow {
    double max_threshold_factor = 0.0;  // <= 0 disables the window
    double p_max_mw = 0.0;
    std::size_t n_used = 0;
};

struct FitResult {
    std::string method;
    std::map<std::string, double> params;
    std::map<std::string, double> sigmas;
    double residual_norm = 0.0;
    bool converged = false;
    int iterations = 0;
    std::size_t n_points = 0;
    std::string message;
    std::optional<FitWindow> window;
    // Filled only when bootstrap resampling was requested.
    std::map<std::string, double> bootstrap_sigmas;
    std::size_t bootstrap_used = 0;
    // Identifiability and conditioning notes; empty for a clean fit.
    std::vector<std::string> warnings;

    double param(const std::string& name) const { return params.at(name); }
    double sigma(const std::string& name) const { return sigmas.at(name); }
};

// Ordinary least squares line. Reports slope, intercept and the abscissa
// intercept (the linear-model threshold).
FitResult fit_linear(const PowerDataset& data);

struct PowerFitOptions {
    // Fit only P_p <= factor * P_th. Re-evaluated until the admitted set is
    // stable. Non-positive disables the window.
    double window_factor = 13.0;
    Weighting weighting = Weighting::uniform;
    bool bootstrap = false;
    int bootstrap_replicates = 500;
    std::uint64_t seed = 20031;
    lsq::Options lm;
};

// Weighted sum of squared residuals of the power-curve model. Points below
// threshold are compared against zero output. Points with P_p above
// `p_max_mw` (when positive) are skipped.
double power_curve_objective(const PowerDataset& data, double p_threshold_mw, double epsilon,
                             Weighting weighting = Weighting::uniform, double p_max_mw = 0.0);

// Starting point derived from the linear fit: P_th from the abscissa
// intercept, eps from the linear sub-problem at that threshold.
OperatingPoint initial_guess(const PowerDataset& data);

// Two-parameter least-squares fit of the square-root power curve for
// (p_threshold_mw, epsilon).
FitResult fit_power_curve(const PowerDataset& data, const OperatingPoint& init,
                          const PowerFitOptions& options = {});

struct SpectrumFitOptions {
    lsq::Options lm;
};

// Fit of the twin-beam difference spectrum for (gamma_hz, eta_product) with
// gamma_hz > 0 and 0 <= eta_product <= 1.
FitResult fit_diff_spectrum(const NoiseSpectrum& spectrum, const SpectrumFitOptions& options = {});

struct GridBounds {
    double x_min, x_max;
    double y_min, y_max;
};

struct GridSearchResult {
    double x = 0.0;
    double y = 0.0;
    double value = 0.0;
    double max_value = 0.0;
    std::size_t ix = 0;
    std::size_t iy = 0;
    double dx = 0.0;
    double dy = 0.0;
};

// Exhaustive evaluation on a `resolution` x `resolution` grid including the
// bounds. First minimum in row-major order wins ties.
GridSearchResult grid_search_oracle(const std::function<double(double, double)>& objective,
                                    const GridBounds& bounds, std::size_t resolution);

}  // namespace twinbeam
