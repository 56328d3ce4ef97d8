#include "cli/app.hpp"

#include <fstream>
#include <functional>
#include <memory>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "cli/json_config.hpp"
#include "twinbeam/error.hpp"

namespace twinbeam::cli {

namespace {

void add_cavity(CLI::App* cmd, CavityParams& c) {
    cmd->add_option("--t-out", c.t_out, "Output coupler transmission")->capture_default_str();
    cmd->add_option("--t-hr", c.t_hr, "Back mirror transmission")->capture_default_str();
    cmd->add_option("--loss-extra", c.loss_extra, "Round-trip loss")->capture_default_str();
    cmd->add_option("--gamma-hz", c.linewidth_hz, "Cavity linewidth (Hz)")->capture_default_str();
}

void add_grid(CLI::App* cmd, GridOptions& g) {
    cmd->add_option("--f-min", g.f_min_hz, "Lowest analysis frequency (Hz)")->capture_default_str();
    cmd->add_option("--f-max", g.f_max_hz, "Highest analysis frequency (Hz)")->capture_default_str();
    cmd->add_option("--n-bins", g.n_bins, "Number of frequency bins")->capture_default_str();
}

void write_outputs(const std::vector<OutputFile>& files, std::ostream& out) {
    for (const auto& f : files) {
        if (f.path == "-") {
            out << f.content;
            continue;
        }
        std::ofstream os(f.path, std::ios::binary);
        if (!os) throw IoError("cannot open '" + f.path + "' for writing");
        os << f.content;
        os.close();
        if (!os) throw IoError("failed writing '" + f.path + "'");
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Twin-beam OPO noise modelling, fitting and trace synthesis", "twinbeam"};
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON run configuration (sections per subcommand)")->envname("TWINBEAM_CONFIG");

    std::function<CommandOutput()> action;

    SimulateOptions sim;
    auto* c_sim = app.add_subcommand("simulate", "Model noise spectrum as CSV (and SVG)");
    c_sim->add_option("--model", sim.model, "difference | single")->capture_default_str();
    add_cavity(c_sim, sim.cavity);
    c_sim->add_option("--eta-pd", sim.detection.eta_pd, "Photodiode quantum efficiency")->capture_default_str();
    c_sim->add_option("--eta-prop", sim.detection.eta_prop, "Propagation efficiency")->capture_default_str();
    add_grid(c_sim, sim.grid);
    c_sim->add_option("--s", sim.s, "Threshold factor P_p/P_th (single model)")->capture_default_str();
    c_sim->add_flag("--relaxation", sim.relaxation, "Add the pump-dependent relaxation peak (single model)");
    c_sim->add_option("--jitter-db", sim.jitter_db, "Analyzer dB jitter at 100 Hz VBW")->capture_default_str();
    c_sim->add_option("--rbw-hz", sim.rbw_hz, "Resolution bandwidth (Hz)")->capture_default_str();
    c_sim->add_option("--vbw-hz", sim.vbw_hz, "Video bandwidth (Hz)")->capture_default_str();
    c_sim->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
    c_sim->add_option("-o,--out", sim.out, "CSV output path, - for stdout")->capture_default_str();
    c_sim->add_option("--svg", sim.svg, "SVG plot output path");
    c_sim->callback([&] { action = [&] { return cmd_simulate(sim); }; });

    SynthPowerOptions syn;
    auto* c_syn = app.add_subcommand("synth-power", "Synthetic output-power dataset");
    c_syn->add_option("--p-threshold", syn.truth.p_threshold_mw, "True threshold (mW)")->capture_default_str();
    c_syn->add_option("--epsilon", syn.truth.epsilon, "True conversion factor")->capture_default_str();
    c_syn->add_option("--n-points", syn.n_points, "Number of pump powers")->capture_default_str();
    c_syn->add_option("--noise", syn.noise_frac, "Multiplicative noise fraction")->capture_default_str();
    c_syn->add_option("--p-min", syn.sweep.p_min_mw, "Lowest pump power (mW)")->capture_default_str();
    c_syn->add_option("--p-max", syn.sweep.p_max_mw, "Highest pump power (mW)")->capture_default_str();
    c_syn->add_option("--seed", syn.seed, "Random seed")->capture_default_str();
    c_syn->add_option("-o,--out", syn.out, "CSV output path, - for stdout")->capture_default_str();
    c_syn->callback([&] { action = [&] { return cmd_synth_power(syn); }; });

    FitPowerOptions fp;
    auto* c_fp = app.add_subcommand("fit-power", "Fit threshold and conversion factor to a power curve");
    c_fp->add_option("data", fp.data, "CSV with p_pump_mw,p_out_mw")->required();
    c_fp->add_option("--window", fp.window, "Fit P_p <= window x P_th; 0 disables")->capture_default_str();
    c_fp->add_option("--weighting", fp.weighting, "uniform | inverse-y")->capture_default_str();
    c_fp->add_flag("--bootstrap", fp.bootstrap, "Bootstrap parameter uncertainties");
    c_fp->add_option("--replicates", fp.replicates, "Bootstrap replicates")->capture_default_str();
    c_fp->add_option("--seed", fp.seed, "Bootstrap seed")->capture_default_str();
    c_fp->add_option("--json", fp.json, "JSON report path, - for stdout");
    c_fp->callback([&] { action = [&] { return cmd_fit_power(fp); }; });

    FitSpectrumOptions fs;
    auto* c_fs = app.add_subcommand("fit-spectrum", "Fit linewidth and efficiency to a difference spectrum");
    c_fs->add_option("data", fs.data, "Spectrum CSV (freq_hz,linear[,db])")->required();
    c_fs->add_option("--json", fs.json, "JSON report path, - for stdout");
    c_fs->callback([&] { action = [&] { return cmd_fit_spectrum(fs); }; });

    InferOptions inf;
    double band_min = 0.0, band_max = 0.0;
    auto* c_inf = app.add_subcommand("infer-squeeze", "Two-step single-beam squeezing inference");
    c_inf->add_option("step1", inf.step1, "Normalized spectrum, full beam")->required();
    c_inf->add_option("step2", inf.step2, "Normalized spectrum, after the splitter")->required();
    auto* o_bmin = c_inf->add_option("--band-min", band_min, "Averaging band start (Hz)");
    auto* o_bmax = c_inf->add_option("--band-max", band_max, "Averaging band end (Hz)");
    c_inf->add_option("-o,--out", inf.out, "CSV output path, - for stdout")->capture_default_str();
    c_inf->callback([&] {
        if (o_bmin->count() > 0) inf.band_min_hz = band_min;
        if (o_bmax->count() > 0) inf.band_max_hz = band_max;
        action = [&] { return cmd_infer_squeeze(inf); };
    });

    SweepOptions sw;
    auto* c_sw = app.add_subcommand("sweep", "Single-beam noise at one frequency versus threshold factor");
    add_cavity(c_sw, sw.cavity);
    c_sw->add_option("--s-values", sw.s_values, "Explicit threshold factors")->delimiter(',');
    c_sw->add_option("--s-min", sw.s_min, "Range start")->capture_default_str();
    c_sw->add_option("--s-max", sw.s_max, "Range end")->capture_default_str();
    c_sw->add_option("--s-steps", sw.s_steps, "Range points")->capture_default_str();
    c_sw->add_option("--omega0-hz", sw.omega0_hz, "Analysis frequency (Hz)")->capture_default_str();
    c_sw->add_option("-o,--out", sw.out, "CSV output path, - for stdout")->capture_default_str();
    c_sw->add_option("--svg", sw.svg, "SVG plot output path");
    c_sw->callback([&] { action = [&] { return cmd_sweep(sw); }; });

    RelaxationOptions rx;
    auto* c_rx = app.add_subcommand("relaxation", "Single-beam spectra with relaxation peak for several pumps");
    add_cavity(c_rx, rx.cavity);
    add_grid(c_rx, rx.grid);
    c_rx->add_option("--s-values", rx.s_values, "Threshold factors")->delimiter(',');
    c_rx->add_option("-o,--out", rx.out, "CSV output path, - for stdout")->capture_default_str();
    c_rx->add_option("--svg", rx.svg, "SVG plot output path");
    c_rx->callback([&] { action = [&] { return cmd_relaxation(rx); }; });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << "twinbeam 0.1.0\n";
        return kExitOk;
    } catch (const CLI::FileError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        const CommandOutput result = action();
        write_outputs(result.files, out);
        if (!result.report.empty()) {
            // Keep stdout clean when it already carries a table.
            bool stdout_used = false;
            for (const auto& f : result.files) stdout_used = stdout_used || f.path == "-";
            (stdout_used ? err : out) << result.report;
        }
        return result.exit_code;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}

}  // namespace twinbeam::cli
