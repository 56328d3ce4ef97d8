#pragma once

#include <span>
#include <vector>

namespace twinbeam {

// Defaults follow the cavity of a pump-enhanced KTP OPO: 5% output coupler,
// HR facet and extra loss taken at their upper bounds. The linewidth default
// reproduces a -7.2 dB intensity-difference dip at 3 MHz with eta_d = 0.90.
struct CavityParams {
    double t_out = 0.05;
    double t_hr = 0.001;
    double loss_extra = 0.003;
    double linewidth_hz = 17.5e6;

    // Throws InvalidParameter when an invariant is violated.
    void validate() const;
};

struct OperatingPoint {
    double p_pump_mw = 0.0;
    double p_threshold_mw = 8.5;
    double epsilon = 1.2;

    void validate() const;
};

struct DetectionChain {
    double eta_pd = 0.92;
    double eta_prop = 0.98;

    void validate() const;
    double total() const noexcept { return eta_pd * eta_prop; }
};

inline constexpr double kDefaultRbwHz = 100e3;
inline constexpr double kDefaultVbwHz = 100.0;

// Noise power on a frequency grid, in linear units of the shot-noise level.
class NoiseSpectrum {
public:
    NoiseSpectrum(std::vector<double> freqs_hz, std::vector<double> values,
                  double rbw_hz = kDefaultRbwHz, double vbw_hz = kDefaultVbwHz);

    std::span<const double> freqs_hz() const noexcept { return freqs_; }
    std::span<const double> values() const noexcept { return values_; }
    double rbw_hz() const noexcept { return rbw_hz_; }
    double vbw_hz() const noexcept { return vbw_hz_; }
    std::size_t size() const noexcept { return freqs_.size(); }

    // True when both grids hold identical frequencies.
    bool same_grid(const NoiseSpectrum& other) const noexcept;

private:
    std::vector<double> freqs_;
    std::vector<double> values_;
    double rbw_hz_;
    double vbw_hz_;
};

// Validates a caller-supplied grid: non-empty, finite, non-negative and
// strictly increasing.
void validate_grid(std::span<const double> freqs_hz);

double escape_efficiency(const CavityParams& cavity);

double threshold_factor(double p_pump_mw, double p_threshold_mw);

// Output power above threshold, 2 eps (sqrt(Pth Pp) - Pth).
double output_power(const OperatingPoint& op);

// Same relation in threshold units: 2 eps (sqrt(s) - 1).
double normalized_output(double s, double epsilon);

// Partial derivatives of output_power with respect to (eps, Pth).
struct OutputPowerGradient {
    double d_epsilon;
    double d_threshold;
};
OutputPowerGradient output_power_gradient(const OperatingPoint& op);

// Intensity-difference spectrum of the twin beams, 1 - eta_e eta_d / (1 + (f/G)^2).
double twin_difference_value(double freq_hz, double eta_product, double linewidth_hz) noexcept;
NoiseSpectrum twin_difference_spectrum(std::span<const double> freqs_hz,
                                       const CavityParams& cavity,
                                       const DetectionChain& det);

// Single-beam intensity spectrum without pump excess noise, at threshold
// factor s. Evaluated with the escape efficiency only.
double single_beam_value(double freq_hz, double eta_e, double linewidth_hz, double s);
NoiseSpectrum single_beam_spectrum(std::span<const double> freqs_hz,
                                   const CavityParams& cavity, double s);

}  // namespace twinbeam
