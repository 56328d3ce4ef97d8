#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "twinbeam/fitting.hpp"
#include "twinbeam/opo_model.hpp"

namespace twinbeam {

struct TraceGenConfig {
    std::uint64_t seed = 1;
    double jitter_db = 0.0;
    double rbw_hz = kDefaultRbwHz;
    double vbw_hz = kDefaultVbwHz;
    std::size_t n_bins = 200;
    double f_min_hz = 1e6;
    double f_max_hz = 50e6;

    void validate() const;
};

// VBW at which jitter_db is the per-bin standard deviation.
inline constexpr double kReferenceVbwHz = 100.0;

// Evenly spaced grid of cfg.n_bins frequencies from f_min_hz to f_max_hz.
std::vector<double> make_grid(const TraceGenConfig& cfg);

struct RelaxationPeak {
    double f_center_hz = 2e6;
    double width_hz = 4e6;  // FWHM
    double height = 0.0;

    void validate() const;
};

// Piecewise-linear map from threshold factor to relaxation peak parameters,
// clamped outside the knot range.
class PumpMap {
public:
    struct Knot {
        double s;
        double f_center_hz;
        double width_hz;
        double height;
    };

    // Knots must have increasing s and non-decreasing f_center_hz.
    explicit PumpMap(std::vector<Knot> knots);

    // Center 2 -> 12 MHz and height 30 -> 5 over s in [1.4, 6.5]. Only the
    // qualitative trend (peak moves up, excess falls with pump) is intended.
    static PumpMap default_map();
    // Default knots with every height set to zero.
    static PumpMap quiet();

    RelaxationPeak at(double s) const;
    const std::vector<Knot>& knots() const noexcept { return knots_; }

private:
    std::vector<Knot> knots_;
};

struct PowerSweep {
    double p_min_mw = 18.0;
    double p_max_mw = 110.0;
};

// Output-power observations along `sweep` with multiplicative Gaussian noise
// P_out (1 + noise_frac g).
PowerDataset synth_power_dataset(const OperatingPoint& truth, std::size_t n_points, double noise_frac,
                                 std::uint64_t seed, const PowerSweep& sweep = {});

// Lorentzian excess noise height (w/2)^2 / ((f - fc)^2 + (w/2)^2).
std::vector<double> excess_noise_profile(std::span<const double> freqs_hz, const RelaxationPeak& peak);

struct RawTraces {
    NoiseSpectrum sum;
    NoiseSpectrum diff;
};

// Simulated analyzer traces of the balanced detector: the sum port carries
// model + excess noise, the difference port the shot-noise level. Both are
// smoothed over the RBW and jittered in dB with independent streams.
RawTraces synth_noise_trace(const NoiseSpectrum& model, std::span<const double> v_ex_profile,
                            const TraceGenConfig& cfg);

struct ScenarioTrace {
    double s;
    RelaxationPeak peak;
    NoiseSpectrum spectrum;
};

// Single-beam spectra with an injected relaxation peak for each threshold
// factor, ordered by s.
std::vector<ScenarioTrace> pump_sweep_scenario(std::span<const double> s_values,
                                               std::span<const double> freqs_hz,
                                               const CavityParams& cavity, const PumpMap& pump_map);

}  // namespace twinbeam
