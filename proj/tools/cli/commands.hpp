#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cli/csv_io.hpp"
#include "twinbeam/opo_model.hpp"
#include "twinbeam/tracegen.hpp"

namespace twinbeam::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitNonConvergence = 2,
    kExitIo = 3,
};

// Result of a command: files to write (rendered up front so nothing is
// written when validation fails), a human-readable report, and the exit code.
struct CommandOutput {
    std::vector<OutputFile> files;
    std::string report;
    int exit_code = kExitOk;
};

struct GridOptions {
    double f_min_hz = 1e6;
    double f_max_hz = 50e6;
    std::size_t n_bins = 200;

    std::vector<double> grid() const;
};

struct SimulateOptions {
    std::string model = "difference";  // "difference" or "single"
    CavityParams cavity;
    DetectionChain detection;
    GridOptions grid;
    double s = 8.0;
    bool relaxation = false;
    double jitter_db = 0.0;
    double rbw_hz = kDefaultRbwHz;
    double vbw_hz = kDefaultVbwHz;
    std::uint64_t seed = 1;
    std::string out = "-";
    std::string svg;
};

struct SynthPowerOptions {
    OperatingPoint truth{0.0, 8.5, 1.2};
    std::size_t n_points = 25;
    double noise_frac = 0.03;
    PowerSweep sweep;
    std::uint64_t seed = 7;
    std::string out = "-";
};

struct FitPowerOptions {
    std::string data;
    double window = 13.0;
    std::string weighting = "uniform";  // "uniform" or "inverse-y"
    bool bootstrap = false;
    int replicates = 500;
    std::uint64_t seed = 20031;
    std::string json;
};

struct FitSpectrumOptions {
    std::string data;
    std::string json;
};

struct InferOptions {
    std::string step1;
    std::string step2;
    std::optional<double> band_min_hz;
    std::optional<double> band_max_hz;
    std::string out = "-";
};

struct SweepOptions {
    CavityParams cavity;
    std::vector<double> s_values;  // overrides the range when non-empty
    double s_min = 1.0;
    double s_max = 20.0;
    std::size_t s_steps = 39;
    double omega0_hz = 35e6;
    std::string out = "-";
    std::string svg;
};

struct RelaxationOptions {
    CavityParams cavity;
    GridOptions grid;
    std::vector<double> s_values{12.5 / 8.5, 18.0 / 8.5, 23.0 / 8.5, 28.0 / 8.5};
    std::string out = "-";
    std::string svg;
};

CommandOutput cmd_simulate(const SimulateOptions& options);
CommandOutput cmd_synth_power(const SynthPowerOptions& options);
CommandOutput cmd_fit_power(const FitPowerOptions& options);
CommandOutput cmd_fit_spectrum(const FitSpectrumOptions& options);
CommandOutput cmd_infer_squeeze(const InferOptions& options);
CommandOutput cmd_sweep(const SweepOptions& options);
CommandOutput cmd_relaxation(const RelaxationOptions& options);

}  // namespace twinbeam::cli
