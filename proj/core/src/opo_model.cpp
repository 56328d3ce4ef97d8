#include "twinbeam/opo_model.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "twinbeam/error.hpp"

namespace twinbeam {

namespace {

template <typename... Parts>
std::string concat(const Parts&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    return os.str();
}

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw InvalidParameter(what);
    }
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void CavityParams::validate() const {
    require(finite(t_out) && t_out > 0.0 && t_out <= 1.0,
            concat("cavity: t_out must lie in (0, 1], got ", t_out));
    require(finite(t_hr) && t_hr >= 0.0 && t_hr < 1.0,
            concat("cavity: t_hr must lie in [0, 1), got ", t_hr));
    require(finite(loss_extra) && loss_extra >= 0.0 && loss_extra < 1.0,
            concat("cavity: loss_extra must lie in [0, 1), got ", loss_extra));
    require(t_out + t_hr + loss_extra <= 1.0,
            concat("cavity: total round-trip loss exceeds 1, got ", t_out + t_hr + loss_extra));
    require(finite(linewidth_hz) && linewidth_hz > 0.0,
            concat("cavity: linewidth_hz must be positive, got ", linewidth_hz));
}

void OperatingPoint::validate() const {
    require(finite(p_threshold_mw) && p_threshold_mw > 0.0,
            concat("operating point: p_threshold_mw must be positive, got ", p_threshold_mw));
    require(finite(epsilon) && epsilon > 0.0,
            concat("operating point: epsilon must be positive, got ", epsilon));
    require(finite(p_pump_mw) && p_pump_mw >= 0.0,
            concat("operating point: p_pump_mw must be non-negative, got ", p_pump_mw));
}

void DetectionChain::validate() const {
    require(finite(eta_pd) && eta_pd >= 0.0 && eta_pd <= 1.0,
            concat("detection: eta_pd must lie in [0, 1], got ", eta_pd));
    require(finite(eta_prop) && eta_prop >= 0.0 && eta_prop <= 1.0,
            concat("detection: eta_prop must lie in [0, 1], got ", eta_prop));
}

void validate_grid(std::span<const double> freqs_hz) {
    require(!freqs_hz.empty(), "frequency grid is empty");
    for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
        require(finite(freqs_hz[i]) && freqs_hz[i] >= 0.0,
                concat("frequency grid: bin ", i, " is not a finite non-negative value"));
        if (i > 0) {
            require(freqs_hz[i] > freqs_hz[i - 1],
                    concat("frequency grid: not strictly increasing at bin ", i));
        }
    }
}

NoiseSpectrum::NoiseSpectrum(std::vector<double> freqs_hz, std::vector<double> values, double rbw_hz,
                             double vbw_hz)
    : freqs_(std::move(freqs_hz)), values_(std::move(values)), rbw_hz_(rbw_hz), vbw_hz_(vbw_hz) {
    validate_grid(freqs_);
    if (values_.size() != freqs_.size()) {
        throw StructuralError(concat("spectrum: ", values_.size(), " values for ", freqs_.size(),
                                     " frequencies"));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= 0.0)) {
            throw DataError(concat("spectrum: negative or NaN value at bin ", i), i);
        }
    }
    require(finite(rbw_hz_) && rbw_hz_ > 0.0, "spectrum: rbw_hz must be positive");
    require(finite(vbw_hz_) && vbw_hz_ > 0.0, "spectrum: vbw_hz must be positive");
}

bool NoiseSpectrum::same_grid(const NoiseSpectrum& other) const noexcept {
    return freqs_ == other.freqs_;
}

double escape_efficiency(const CavityParams& cavity) {
    cavity.validate();
    const double total = cavity.t_out + cavity.t_hr + cavity.loss_extra;
    if (!(total > 0.0)) {
        throw InvalidParameter("escape efficiency: total cavity loss is zero");
    }
    return cavity.t_out / total;
}

double threshold_factor(double p_pump_mw, double p_threshold_mw) {
    require(finite(p_threshold_mw) && p_threshold_mw > 0.0,
            concat("threshold factor: threshold must be positive, got ", p_threshold_mw));
    require(finite(p_pump_mw) && p_pump_mw >= 0.0,
            concat("threshold factor: pump power must be non-negative, got ", p_pump_mw));
    return p_pump_mw / p_threshold_mw;
}

double output_power(const OperatingPoint& op) {
    op.validate();
    if (op.p_pump_mw < op.p_threshold_mw) {
        throw BelowThreshold(concat("output power: pump ", op.p_pump_mw, " mW is below threshold ",
                                    op.p_threshold_mw, " mW"));
    }
    return 2.0 * op.epsilon * (std::sqrt(op.p_threshold_mw * op.p_pump_mw) - op.p_threshold_mw);
}

double normalized_output(double s, double epsilon) {
    require(finite(epsilon) && epsilon > 0.0, concat("normalized output: epsilon must be positive, got ", epsilon));
    if (!(s >= 1.0)) {
        throw BelowThreshold(concat("normalized output: threshold factor ", s, " < 1"));
    }
    return 2.0 * epsilon * (std::sqrt(s) - 1.0);
}

OutputPowerGradient output_power_gradient(const OperatingPoint& op) {
    op.validate();
    if (op.p_pump_mw < op.p_threshold_mw) {
        throw BelowThreshold("output power gradient: below threshold");
    }
    const double root = std::sqrt(op.p_threshold_mw * op.p_pump_mw);
    return {
        2.0 * (root - op.p_threshold_mw),
        2.0 * op.epsilon * (0.5 * std::sqrt(op.p_pump_mw / op.p_threshold_mw) - 1.0),
    };
}

double twin_difference_value(double freq_hz, double eta_product, double linewidth_hz) noexcept {
    const double x = freq_hz / linewidth_hz;
    return 1.0 - eta_product / (1.0 + x * x);
}

NoiseSpectrum twin_difference_spectrum(std::span<const double> freqs_hz, const CavityParams& cavity,
                                       const DetectionChain& det) {
    validate_grid(freqs_hz);
    det.validate();
    const double eta = escape_efficiency(cavity) * det.total();
    std::vector<double> values;
    values.reserve(freqs_hz.size());
    for (double f : freqs_hz) {
        values.push_back(twin_difference_value(f, eta, cavity.linewidth_hz));
    }
    return NoiseSpectrum({freqs_hz.begin(), freqs_hz.end()}, std::move(values));
}

double single_beam_value(double freq_hz, double eta_e, double linewidth_hz, double s) {
    if (!(s >= 1.0)) {
        throw BelowThreshold(concat("single-beam spectrum: threshold factor ", s, " < 1"));
    }
    const double x2 = (freq_hz / linewidth_hz) * (freq_hz / linewidth_hz);
    const double root = std::sqrt(s);
    const double detune = (root - 1.0) * (root - 1.0);
    const double denom = 2.0 * (1.0 + x2) * (detune + x2);
    if (!(denom > 0.0)) {
        // s = 1 at zero frequency: the spectrum diverges at threshold.
        throw DomainError("single-beam spectrum diverges at threshold for zero analysis frequency");
    }
    return 1.0 - eta_e * root * (root - 2.0) / denom;
}

NoiseSpectrum single_beam_spectrum(std::span<const double> freqs_hz, const CavityParams& cavity, double s) {
    validate_grid(freqs_hz);
    const double eta_e = escape_efficiency(cavity);
    std::vector<double> values;
    values.reserve(freqs_hz.size());
    for (double f : freqs_hz) {
        values.push_back(single_beam_value(f, eta_e, cavity.linewidth_hz, s));
    }
    return NoiseSpectrum({freqs_hz.begin(), freqs_hz.end()}, std::move(values));
}

}  // namespace twinbeam
