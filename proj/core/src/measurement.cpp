#include "twinbeam/measurement.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "twinbeam/error.hpp"

namespace twinbeam {

void NoiseBudget::validate() const {
    if (!(std::isfinite(v_ex) && v_ex >= 0.0)) {
        throw InvalidParameter("noise budget: v_ex must be finite and non-negative, got " +
                               std::to_string(v_ex));
    }
    if (!(std::isfinite(s_s) && s_s > 0.0)) {
        throw InvalidParameter("noise budget: s_s must be finite and positive, got " + std::to_string(s_s));
    }
}

LossElement::LossElement(double mu) : mu_(mu) {
    if (!(mu >= 0.0 && mu <= 1.0)) {
        throw InvalidParameter("loss element: mu must lie in [0, 1], got " + std::to_string(mu));
    }
}

void TwoStepReading::validate() const {
    if (!(std::isfinite(v_d_one) && v_d_one >= 0.0) || !(std::isfinite(v_d_two) && v_d_two >= 0.0)) {
        throw InvalidParameter("two-step reading: detected noise must be finite and non-negative");
    }
}

double attenuate_quantum(double s_in, const LossElement& loss) {
    if (!(std::isfinite(s_in) && s_in >= 0.0)) {
        throw InvalidParameter("attenuate_quantum: input noise must be non-negative, got " +
                               std::to_string(s_in));
    }
    const double mu = loss.mu();
    return mu * s_in + (1.0 - mu);
}

double attenuate_classical(double v_ex, const LossElement& loss) {
    if (!(std::isfinite(v_ex) && v_ex >= 0.0)) {
        throw InvalidParameter("attenuate_classical: excess noise must be non-negative, got " +
                               std::to_string(v_ex));
    }
    return loss.mu() * v_ex;
}

double detected_noise_after_loss(const NoiseBudget& budget, const LossElement& loss) {
    budget.validate();
    const double mu = loss.mu();
    return attenuate_classical(budget.v_ex, loss) + mu * attenuate_quantum(budget.s_s, loss);
}

TwoStepReading two_step_measurement(const NoiseBudget& budget) {
    budget.validate();
    // Step II: the mix is split by the 22.5 degree plate; each port sees half
    // the power and the two balanced ports are summed.
    const auto [transmitted, reflected] = splitter_transmission(22.5);
    return {
        budget.detected(),
        detected_noise_after_loss(budget, transmitted) + detected_noise_after_loss(budget, reflected),
    };
}

SqueezingEstimate infer_squeezing(const TwoStepReading& reading) {
    reading.validate();
    const double s_s = 1.0 - 2.0 * (reading.v_d_two - reading.v_d_one);
    return {s_s, !(s_s > 0.0)};
}

NoiseBudget decompose_noise(double v_d, double s_s) {
    if (!std::isfinite(v_d) || !std::isfinite(s_s)) {
        throw InvalidParameter("decompose_noise: inputs must be finite");
    }
    if (v_d < s_s) {
        throw NegativeExcessNoise("decompose_noise: detected noise " + std::to_string(v_d) +
                                  " is below the quantum factor " + std::to_string(s_s));
    }
    NoiseBudget budget{v_d - s_s, s_s};
    budget.validate();
    return budget;
}

std::pair<LossElement, LossElement> splitter_transmission(double theta_deg) {
    if (!std::isfinite(theta_deg)) {
        throw InvalidParameter("splitter_transmission: angle must be finite");
    }
    // Exact values at the two angles the detection setup uses.
    const double reduced = std::fmod(std::fabs(theta_deg), 90.0);
    if (reduced == 0.0) {
        return {LossElement(1.0), LossElement(0.0)};
    }
    if (reduced == 22.5 || reduced == 67.5) {
        return {LossElement(0.5), LossElement(0.5)};
    }
    if (reduced == 45.0) {
        return {LossElement(0.0), LossElement(1.0)};
    }
    const double two_theta = 2.0 * theta_deg * std::numbers::pi / 180.0;
    const double c = std::cos(two_theta);
    const double t = c * c;
    return {LossElement(t), LossElement(1.0 - t)};
}

NoiseSpectrum normalize_to_snl(const NoiseSpectrum& sum_trace, const NoiseSpectrum& diff_trace) {
    if (!sum_trace.same_grid(diff_trace)) {
        throw StructuralError("normalize_to_snl: sum and difference traces use different frequency grids");
    }
    const auto sum = sum_trace.values();
    const auto diff = diff_trace.values();
    std::vector<double> ratio(sum.size());
    for (std::size_t i = 0; i < sum.size(); ++i) {
        if (!(diff[i] > 0.0)) {
            throw DataError("normalize_to_snl: non-positive shot-noise level at bin " + std::to_string(i) +
                                " (f = " + std::to_string(diff_trace.freqs_hz()[i]) + " Hz)",
                            i);
        }
        ratio[i] = sum[i] / diff[i];
    }
    const auto freqs = sum_trace.freqs_hz();
    return NoiseSpectrum({freqs.begin(), freqs.end()}, std::move(ratio), sum_trace.rbw_hz(),
                         sum_trace.vbw_hz());
}

}  // namespace twinbeam
