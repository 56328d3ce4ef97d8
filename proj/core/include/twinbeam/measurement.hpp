#pragma once

#include <utility>
#include <vector>

#include "twinbeam/opo_model.hpp"

namespace twinbeam {

// Noise of one beam split into a classical part and a quantum part, both in
// units of the shot-noise level (V_SNL = 1).
struct NoiseBudget {
    double v_ex = 0.0;  // classical excess noise, >= 0
    double s_s = 1.0;   // quantum noise factor, < 1 means squeezed

    void validate() const;
    double detected() const noexcept { return v_ex + s_s; }
};

// Power transmission of a lossy element, mu in [0, 1].
class LossElement {
public:
    explicit LossElement(double mu);
    double mu() const noexcept { return mu_; }

private:
    double mu_;
};

// Readings of the two-step protocol: step I detects the bare signal beam,
// step II the 50/50 signal/idler mix with both detector ports summed.
struct TwoStepReading {
    double v_d_one = 0.0;
    double v_d_two = 0.0;

    void validate() const;
};

struct SqueezingEstimate {
    double s_s = 1.0;
    // Set when s_s <= 0. The raw value is kept unchanged.
    bool unphysical = false;
};

// Quantum noise after loss: mu s_in + (1 - mu). Shot noise is the fixed point.
double attenuate_quantum(double s_in, const LossElement& loss);

// Classical excess noise after loss, mu v_ex.
double attenuate_classical(double v_ex, const LossElement& loss);

// Detected noise of one transmitted port: mu v_ex + mu [mu s_s + (1 - mu)].
double detected_noise_after_loss(const NoiseBudget& budget, const LossElement& loss);

// Forward model of the balanced two-step measurement.
TwoStepReading two_step_measurement(const NoiseBudget& budget);

// Inverse of two_step_measurement: s_s = 1 - 2 (V_II - V_I).
SqueezingEstimate infer_squeezing(const TwoStepReading& reading);

// Splits detected noise into (v_d - s_s, s_s). Throws NegativeExcessNoise
// when v_d < s_s.
NoiseBudget decompose_noise(double v_d, double s_s);

// Half-wave plate at theta followed by a polarizer: returns the transmitted
// and reflected power fractions (cos^2 2theta, sin^2 2theta).
std::pair<LossElement, LossElement> splitter_transmission(double theta_deg);

// Pointwise ratio of the balanced-detector sum trace (intensity noise) to the
// difference trace (shot-noise level). Throws StructuralError on a grid
// mismatch and DataError naming the first non-positive shot-noise bin.
NoiseSpectrum normalize_to_snl(const NoiseSpectrum& sum_trace, const NoiseSpectrum& diff_trace);

}  // namespace twinbeam
