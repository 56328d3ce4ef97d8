#include "cli/commands.hpp"

#include <charconv>
#include <cmath>

#include "cli/svg_plot.hpp"
#include "json.hpp"
#include "twinbeam/error.hpp"
#include "twinbeam/fitting.hpp"
#include "twinbeam/measurement.hpp"
#include "twinbeam/units.hpp"

namespace twinbeam::cli {

namespace {

using nlohmann::ordered_json;

// Six significant digits, locale independent.
std::string g6(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

void require_output_path(const std::string& path, const char* what) {
    if (path.empty()) {
        throw InvalidParameter(std::string(what) + " path is empty");
    }
}

ordered_json number_map(const std::map<std::string, double>& m) {
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

std::vector<double> db_values(std::span<const double> linear) {
    std::vector<double> out;
    out.reserve(linear.size());
    for (double v : linear) out.push_back(v > 0.0 ? to_db(v) : -INFINITY);
    return out;
}

std::vector<double> in_mhz(std::span<const double> hz) {
    std::vector<double> out;
    for (double f : hz) out.push_back(f / 1e6);
    return out;
}

}  // namespace

std::vector<double> GridOptions::grid() const {
    TraceGenConfig cfg;
    cfg.n_bins = n_bins;
    cfg.f_min_hz = f_min_hz;
    cfg.f_max_hz = f_max_hz;
    return make_grid(cfg);
}

CommandOutput cmd_simulate(const SimulateOptions& o) {
    if (o.model != "difference" && o.model != "single") {
        throw InvalidParameter("simulate: model must be 'difference' or 'single', got '" + o.model + "'");
    }
    require_output_path(o.out, "output");
    TraceGenConfig cfg;
    cfg.seed = o.seed;
    cfg.jitter_db = o.jitter_db;
    cfg.rbw_hz = o.rbw_hz;
    cfg.vbw_hz = o.vbw_hz;
    cfg.n_bins = o.grid.n_bins;
    cfg.f_min_hz = o.grid.f_min_hz;
    cfg.f_max_hz = o.grid.f_max_hz;
    cfg.validate();
    o.cavity.validate();
    o.detection.validate();
    const auto grid = make_grid(cfg);

    std::vector<double> excess(grid.size(), 0.0);
    std::optional<NoiseSpectrum> model;
    std::string title;
    if (o.model == "difference") {
        model = twin_difference_spectrum(grid, o.cavity, o.detection);
        title = "Twin-beam intensity-difference noise";
    } else {
        model = single_beam_spectrum(grid, o.cavity, o.s);
        if (o.relaxation) {
            excess = excess_noise_profile(grid, PumpMap::default_map().at(o.s));
        }
        title = "Single-beam intensity noise, s = " + g6(o.s);
    }

    // Route through the simulated analyzer whenever it changes the result.
    const double spacing = grid.size() > 1 ? grid[1] - grid[0] : 0.0;
    const bool analyzer = o.jitter_db > 0.0 || o.relaxation || std::round(o.rbw_hz / spacing) > 1.0;
    NoiseSpectrum result = *model;
    if (analyzer) {
        const auto traces = synth_noise_trace(*model, excess, cfg);
        result = normalize_to_snl(traces.sum, traces.diff);
    }

    CommandOutput out;
    out.files.push_back({o.out, spectrum_csv(result)});
    if (!o.svg.empty()) {
        PlotSpec plot{title, "Frequency (MHz)", "Noise relative to shot noise (dB)",
                      {{"", in_mhz(result.freqs_hz()), db_values(result.values())}}, 0.0};
        out.files.push_back({o.svg, render_svg(plot)});
    }
    const auto v = result.values();
    const auto it = std::min_element(v.begin(), v.end());
    const auto idx = static_cast<std::size_t>(it - v.begin());
    out.report = "minimum " + (*it > 0.0 ? format_fixed(to_db(*it), 4) : std::string("-inf")) + " dB at " +
                 g6(result.freqs_hz()[idx]) + " Hz\n";
    return out;
}

CommandOutput cmd_synth_power(const SynthPowerOptions& o) {
    require_output_path(o.out, "output");
    const auto data = synth_power_dataset(o.truth, o.n_points, o.noise_frac, o.seed, o.sweep);
    CommandOutput out;
    out.files.push_back({o.out, power_csv(data)});
    return out;
}

CommandOutput cmd_fit_power(const FitPowerOptions& o) {
    Weighting weighting;
    if (o.weighting == "uniform") {
        weighting = Weighting::uniform;
    } else if (o.weighting == "inverse-y") {
        weighting = Weighting::inverse_y;
    } else {
        throw InvalidParameter("fit-power: weighting must be 'uniform' or 'inverse-y', got '" + o.weighting + "'");
    }
    if (o.bootstrap && o.replicates < 2) {
        throw InvalidParameter("fit-power: at least 2 bootstrap replicates required");
    }
    if (!std::isfinite(o.window)) {
        throw InvalidParameter("fit-power: window must be finite (use 0 to disable)");
    }
    const auto data = read_power_csv(o.data);
    PowerFitOptions fit_options;
    fit_options.window_factor = o.window;
    fit_options.weighting = weighting;
    fit_options.bootstrap = o.bootstrap;
    fit_options.bootstrap_replicates = o.replicates;
    fit_options.seed = o.seed;
    const auto fit = fit_power_curve(data, initial_guess(data), fit_options);
    const auto line = fit_linear(data);

    std::string r;
    r += "linear fit (ordinary least squares, " + std::to_string(line.n_points) + " points)\n";
    r += "  slope       " + g6(line.param("slope")) + " +- " + g6(line.sigma("slope")) + "\n";
    r += "  x_intercept " + g6(line.param("x_intercept")) + " +- " + g6(line.sigma("x_intercept")) + " mW\n";
    const auto& w = *fit.window;
    r += "power-curve fit (" + fit.method + ", ";
    r += w.max_threshold_factor > 0.0 ? "P_p <= " + g6(w.max_threshold_factor) + " x P_th = " + g6(w.p_max_mw) + " mW"
                                      : std::string("no window");
    r += ", " + std::to_string(w.n_used) + " of " + std::to_string(fit.n_points) + " points)\n";
    r += "  p_threshold_mw " + g6(fit.param("p_threshold_mw")) + " +- " + g6(fit.sigma("p_threshold_mw")) + "\n";
    r += "  epsilon        " + g6(fit.param("epsilon")) + " +- " + g6(fit.sigma("epsilon")) + "\n";
    if (o.bootstrap) {
        r += "  bootstrap sigmas (" + std::to_string(fit.bootstrap_used) + " replicates): p_threshold_mw " +
             g6(fit.bootstrap_sigmas.at("p_threshold_mw")) + ", epsilon " + g6(fit.bootstrap_sigmas.at("epsilon")) +
             "\n";
    }
    r += "  residual_norm  " + g6(fit.residual_norm) + "\n";
    r += "  converged      " + std::string(fit.converged ? "yes" : "no") + " (" + std::to_string(fit.iterations) +
         " iterations; " + fit.message + ")\n";
    for (const auto& warning : fit.warnings) {
        r += "  warning: " + warning + "\n";
    }

    CommandOutput out;
    out.report = r;
    out.exit_code = fit.converged ? kExitOk : kExitNonConvergence;
    if (!o.json.empty()) {
        ordered_json j;
        j["method"] = fit.method;
        j["params"] = number_map(fit.params);
        j["sigmas"] = number_map(fit.sigmas);
        j["residual_norm"] = fit.residual_norm;
        j["converged"] = fit.converged;
        j["window"] = {{"max_threshold_factor", w.max_threshold_factor},
                       {"p_max_mw", w.p_max_mw},
                       {"n_used", w.n_used},
                       {"n_total", fit.n_points}};
        j["seed"] = o.seed;
        j["iterations"] = fit.iterations;
        j["weighting"] = o.weighting;
        j["message"] = fit.message;
        j["warnings"] = fit.warnings;
        if (o.bootstrap) {
            j["bootstrap"] = {{"replicates", o.replicates},
                              {"used", fit.bootstrap_used},
                              {"sigmas", number_map(fit.bootstrap_sigmas)}};
        } else {
            j["bootstrap"] = nullptr;
        }
        j["linear"] = {{"method", line.method},
                       {"params", number_map(line.params)},
                       {"sigmas", number_map(line.sigmas)},
                       {"residual_norm", line.residual_norm},
                       {"converged", line.converged}};
        out.files.push_back({o.json, j.dump(2) + "\n"});
    }
    return out;
}

CommandOutput cmd_fit_spectrum(const FitSpectrumOptions& o) {
    const auto spectrum = read_spectrum_csv(o.data);
    const auto fit = fit_diff_spectrum(spectrum);

    CommandOutput out;
    out.exit_code = fit.converged ? kExitOk : kExitNonConvergence;
    out.report = "difference-spectrum fit (" + fit.method + ", " + std::to_string(fit.n_points) + " bins)\n";
    out.report += "  gamma_hz    " + g6(fit.param("gamma_hz")) + " +- " + g6(fit.sigma("gamma_hz")) + "\n";
    out.report += "  eta_product " + g6(fit.param("eta_product")) + " +- " + g6(fit.sigma("eta_product")) + "\n";
    out.report += "  residual_norm " + g6(fit.residual_norm) + "\n";
    out.report += "  converged   " + std::string(fit.converged ? "yes" : "no") + " (" + fit.message + ")\n";
    for (const auto& warning : fit.warnings) {
        out.report += "  warning: " + warning + "\n";
    }
    if (!o.json.empty()) {
        ordered_json j;
        j["method"] = fit.method;
        j["params"] = number_map(fit.params);
        j["sigmas"] = number_map(fit.sigmas);
        j["residual_norm"] = fit.residual_norm;
        j["converged"] = fit.converged;
        j["window"] = {{"f_min_hz", spectrum.freqs_hz().front()}, {"f_max_hz", spectrum.freqs_hz().back()},
                       {"n_used", spectrum.size()}};
        j["seed"] = nullptr;
        j["iterations"] = fit.iterations;
        j["message"] = fit.message;
        j["warnings"] = fit.warnings;
        out.files.push_back({o.json, j.dump(2) + "\n"});
    }
    return out;
}

CommandOutput cmd_infer_squeeze(const InferOptions& o) {
    require_output_path(o.out, "output");
    const auto one = read_spectrum_csv(o.step1);
    const auto two = read_spectrum_csv(o.step2);
    if (!one.same_grid(two)) {
        throw StructuralError("infer-squeeze: step I and step II spectra use different frequency grids");
    }
    const double band_lo = o.band_min_hz.value_or(one.freqs_hz().front());
    const double band_hi = o.band_max_hz.value_or(one.freqs_hz().back());
    if (!(band_lo <= band_hi)) {
        throw InvalidParameter("infer-squeeze: band minimum exceeds band maximum");
    }

    std::string csv = "freq_hz,s_s,v_ex,flag\n";
    double band_sum = 0.0;
    std::size_t band_n = 0, n_unphysical = 0, n_negative = 0;
    for (std::size_t i = 0; i < one.size(); ++i) {
        const TwoStepReading reading{one.values()[i], two.values()[i]};
        const auto est = infer_squeezing(reading);
        const double v_ex = reading.v_d_one - est.s_s;
        std::string flag = "ok";
        if (est.unphysical) {
            flag = "unphysical";
            ++n_unphysical;
        } else {
            try {
                decompose_noise(reading.v_d_one, est.s_s);
            } catch (const NegativeExcessNoise&) {
                flag = "negative_excess";
                ++n_negative;
            }
        }
        const double f = one.freqs_hz()[i];
        if (f >= band_lo && f <= band_hi) {
            band_sum += est.s_s;
            ++band_n;
        }
        csv += format_number(f) + "," + format_number(est.s_s) + "," + format_number(v_ex) + "," + flag + "\n";
    }
    if (band_n == 0) {
        throw InvalidParameter("infer-squeeze: no bins inside the averaging band");
    }
    CommandOutput out;
    out.files.push_back({o.out, csv});
    const double mean = band_sum / static_cast<double>(band_n);
    out.report = "band-averaged S_s over [" + g6(band_lo) + ", " + g6(band_hi) + "] Hz: " + g6(mean) + " (" +
                 (mean > 0.0 ? format_fixed(to_db(mean), 4) + " dB" : std::string("unphysical")) + ", " +
                 std::to_string(band_n) + " bins); flagged bins: " + std::to_string(n_unphysical) + " unphysical, " +
                 std::to_string(n_negative) + " negative excess\n";
    return out;
}

CommandOutput cmd_sweep(const SweepOptions& o) {
    require_output_path(o.out, "output");
    const double eta_e = escape_efficiency(o.cavity);
    if (!(std::isfinite(o.omega0_hz) && o.omega0_hz >= 0.0)) {
        throw InvalidParameter("sweep: analysis frequency must be non-negative");
    }
    std::vector<double> s_values = o.s_values;
    if (s_values.empty()) {
        if (o.s_steps < 2 || !(o.s_max > o.s_min)) {
            throw InvalidParameter("sweep: need s-steps >= 2 and s-max > s-min");
        }
        for (std::size_t i = 0; i < o.s_steps; ++i) {
            s_values.push_back(o.s_min + (o.s_max - o.s_min) * static_cast<double>(i) / static_cast<double>(o.s_steps - 1));
        }
        s_values.back() = o.s_max;
    }
    std::vector<double> values;
    for (double s : s_values) {
        values.push_back(single_beam_value(o.omega0_hz, eta_e, o.cavity.linewidth_hz, s));
    }

    std::string csv = "s,linear,db\n";
    for (std::size_t i = 0; i < s_values.size(); ++i) {
        csv += format_number(s_values[i]) + "," + format_number(values[i]) + "," + format_fixed(to_db(values[i]), 4) +
               "\n";
    }
    CommandOutput out;
    out.files.push_back({o.out, csv});
    if (!o.svg.empty()) {
        PlotSpec plot{"Single-beam quantum noise at " + g6(o.omega0_hz / 1e6) + " MHz", "Threshold factor s",
                      "Noise relative to shot noise (dB)", {{"", s_values, db_values(values)}}, 0.0};
        out.files.push_back({o.svg, render_svg(plot)});
    }
    return out;
}

CommandOutput cmd_relaxation(const RelaxationOptions& o) {
    require_output_path(o.out, "output");
    const auto grid = o.grid.grid();
    const auto traces = pump_sweep_scenario(o.s_values, grid, o.cavity, PumpMap::default_map());
    std::string csv = "s,freq_hz,linear,db,peak_center_hz\n";
    PlotSpec plot{"Single-beam noise with relaxation peak", "Frequency (MHz)", "Noise relative to shot noise (dB)", {},
                  0.0};
    for (const auto& t : traces) {
        const auto f = t.spectrum.freqs_hz();
        const auto v = t.spectrum.values();
        for (std::size_t i = 0; i < t.spectrum.size(); ++i) {
            csv += format_number(t.s) + "," + format_number(f[i]) + "," + format_number(v[i]) + "," +
                   format_fixed(to_db(v[i]), 4) + "," + format_number(t.peak.f_center_hz) + "\n";
        }
        plot.series.push_back({"s = " + g6(t.s), in_mhz(f), db_values(v)});
    }
    CommandOutput out;
    out.files.push_back({o.out, csv});
    if (!o.svg.empty()) {
        out.files.push_back({o.svg, render_svg(plot)});
    }
    return out;
}

}  // namespace twinbeam::cli
