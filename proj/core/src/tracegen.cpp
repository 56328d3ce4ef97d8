#include "twinbeam/tracegen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "twinbeam/error.hpp"

namespace twinbeam {

namespace {

template <typename... Parts>
std::string concat(const Parts&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    return os.str();
}

// Independent stream per (seed, trace index).
std::mt19937_64 stream(std::uint64_t seed, std::uint32_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), index};
    return std::mt19937_64(seq);
}

std::vector<double> moving_average(std::span<const double> v, std::size_t width) {
    if (width <= 1) {
        return {v.begin(), v.end()};
    }
    const std::size_t n = v.size();
    const std::size_t left = (width - 1) / 2;
    const std::size_t right = width - 1 - left;
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        prefix[i + 1] = prefix[i] + v[i];
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Truncated at the edges.
        const std::size_t lo = i >= left ? i - left : 0;
        const std::size_t hi = std::min(n - 1, i + right);
        out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
    }
    return out;
}

void jitter(std::vector<double>& v, double sigma_db, std::mt19937_64& rng) {
    if (sigma_db <= 0.0) {
        return;
    }
    std::normal_distribution<double> gauss(0.0, sigma_db);
    for (double& x : v) {
        x *= std::pow(10.0, gauss(rng) / 10.0);
    }
}

}  // namespace

void TraceGenConfig::validate() const {
    if (!(std::isfinite(jitter_db) && jitter_db >= 0.0)) {
        throw InvalidParameter(concat("trace config: jitter_db must be non-negative, got ", jitter_db));
    }
    if (n_bins < 2) {
        throw InvalidParameter(concat("trace config: n_bins must be at least 2, got ", n_bins));
    }
    if (!(std::isfinite(f_min_hz) && std::isfinite(f_max_hz) && f_min_hz > 0.0 && f_min_hz < f_max_hz)) {
        throw InvalidParameter(concat("trace config: need 0 < f_min_hz < f_max_hz, got ", f_min_hz, ", ", f_max_hz));
    }
    if (!(std::isfinite(rbw_hz) && rbw_hz > 0.0) || !(std::isfinite(vbw_hz) && vbw_hz > 0.0)) {
        throw InvalidParameter("trace config: rbw_hz and vbw_hz must be positive");
    }
}

std::vector<double> make_grid(const TraceGenConfig& cfg) {
    cfg.validate();
    std::vector<double> grid(cfg.n_bins);
    const double step = (cfg.f_max_hz - cfg.f_min_hz) / static_cast<double>(cfg.n_bins - 1);
    for (std::size_t i = 0; i < cfg.n_bins; ++i) {
        grid[i] = cfg.f_min_hz + step * static_cast<double>(i);
    }
    grid.back() = cfg.f_max_hz;
    return grid;
}

void RelaxationPeak::validate() const {
    if (!(std::isfinite(f_center_hz) && f_center_hz > 0.0)) {
        throw InvalidParameter(concat("relaxation peak: f_center_hz must be positive, got ", f_center_hz));
    }
    if (!(std::isfinite(width_hz) && width_hz > 0.0)) {
        throw InvalidParameter(concat("relaxation peak: width_hz must be positive, got ", width_hz));
    }
    if (!(std::isfinite(height) && height >= 0.0)) {
        throw InvalidParameter(concat("relaxation peak: height must be non-negative, got ", height));
    }
}

PumpMap::PumpMap(std::vector<Knot> knots) : knots_(std::move(knots)) {
    if (knots_.empty()) {
        throw InvalidParameter("pump map: at least one knot required");
    }
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        const auto& k = knots_[i];
        RelaxationPeak{k.f_center_hz, k.width_hz, k.height}.validate();
        if (i > 0) {
            if (!(k.s > knots_[i - 1].s)) {
                throw InvalidParameter(concat("pump map: knot ", i, " does not increase in s"));
            }
            if (k.f_center_hz < knots_[i - 1].f_center_hz) {
                throw InvalidParameter(concat("pump map: center frequency decreases at knot ", i));
            }
        }
    }
}

PumpMap PumpMap::default_map() { return PumpMap({{1.4, 2e6, 4e6, 30.0}, {6.5, 12e6, 4e6, 5.0}}); }

PumpMap PumpMap::quiet() { return PumpMap({{1.4, 2e6, 4e6, 0.0}, {6.5, 12e6, 4e6, 0.0}}); }

RelaxationPeak PumpMap::at(double s) const {
    if (s <= knots_.front().s) {
        const auto& k = knots_.front();
        return {k.f_center_hz, k.width_hz, k.height};
    }
    if (s >= knots_.back().s) {
        const auto& k = knots_.back();
        return {k.f_center_hz, k.width_hz, k.height};
    }
    const auto hi = std::upper_bound(knots_.begin(), knots_.end(), s,
                                     [](double value, const Knot& k) { return value < k.s; });
    const auto lo = hi - 1;
    const double t = (s - lo->s) / (hi->s - lo->s);
    auto lerp = [t](double a, double b) { return a + t * (b - a); };
    return {lerp(lo->f_center_hz, hi->f_center_hz), lerp(lo->width_hz, hi->width_hz), lerp(lo->height, hi->height)};
}

PowerDataset synth_power_dataset(const OperatingPoint& truth, std::size_t n_points, double noise_frac,
                                 std::uint64_t seed, const PowerSweep& sweep) {
    truth.validate();
    if (n_points < 4) {
        throw InvalidParameter(concat("synth power dataset: need at least 4 points, got ", n_points));
    }
    if (!(std::isfinite(noise_frac) && noise_frac >= 0.0)) {
        throw InvalidParameter("synth power dataset: noise_frac must be non-negative");
    }
    if (!(sweep.p_min_mw > truth.p_threshold_mw) || !(sweep.p_max_mw > sweep.p_min_mw) ||
        !std::isfinite(sweep.p_max_mw)) {
        throw DomainError(concat("synth power dataset: pump range [", sweep.p_min_mw, ", ", sweep.p_max_mw,
                                 "] mW is not above threshold ", truth.p_threshold_mw, " mW"));
    }
    auto rng = stream(seed, 0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    PowerDataset data;
    data.points.reserve(n_points);
    const double step = (sweep.p_max_mw - sweep.p_min_mw) / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) {
        OperatingPoint op = truth;
        op.p_pump_mw = i + 1 == n_points ? sweep.p_max_mw : sweep.p_min_mw + step * static_cast<double>(i);
        const double clean = output_power(op);
        const double g = gauss(rng);
        data.points.push_back({op.p_pump_mw, noise_frac > 0.0 ? clean * (1.0 + noise_frac * g) : clean, 1.0});
    }
    return data;
}

std::vector<double> excess_noise_profile(std::span<const double> freqs_hz, const RelaxationPeak& peak) {
    peak.validate();
    const double hw2 = 0.25 * peak.width_hz * peak.width_hz;
    std::vector<double> out;
    out.reserve(freqs_hz.size());
    for (double f : freqs_hz) {
        const double d = f - peak.f_center_hz;
        out.push_back(peak.height * hw2 / (d * d + hw2));
    }
    return out;
}

RawTraces synth_noise_trace(const NoiseSpectrum& model, std::span<const double> v_ex_profile,
                            const TraceGenConfig& cfg) {
    cfg.validate();
    const auto freqs = model.freqs_hz();
    if (model.size() != cfg.n_bins) {
        throw StructuralError(concat("synth trace: model has ", model.size(), " bins, config expects ", cfg.n_bins));
    }
    auto close = [](double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(std::fabs(a), std::fabs(b)); };
    if (!close(freqs.front(), cfg.f_min_hz) || !close(freqs.back(), cfg.f_max_hz)) {
        throw StructuralError("synth trace: model grid span differs from config span");
    }
    if (v_ex_profile.size() != model.size()) {
        throw StructuralError(concat("synth trace: excess profile has ", v_ex_profile.size(), " bins, model has ",
                                     model.size()));
    }

    const double spacing = (cfg.f_max_hz - cfg.f_min_hz) / static_cast<double>(cfg.n_bins - 1);
    const auto width = static_cast<std::size_t>(std::max(1.0, std::round(cfg.rbw_hz / spacing)));
    const double sigma_db = cfg.jitter_db * std::sqrt(kReferenceVbwHz / cfg.vbw_hz);

    std::vector<double> sum(model.size());
    const auto values = model.values();
    for (std::size_t i = 0; i < sum.size(); ++i) {
        sum[i] = values[i] + v_ex_profile[i];
    }
    sum = moving_average(sum, width);
    auto sum_rng = stream(cfg.seed, 0);
    jitter(sum, sigma_db, sum_rng);

    std::vector<double> diff = moving_average(std::vector<double>(model.size(), 1.0), width);
    auto diff_rng = stream(cfg.seed, 1);
    jitter(diff, sigma_db, diff_rng);

    std::vector<double> grid(freqs.begin(), freqs.end());
    return {NoiseSpectrum(grid, std::move(sum), cfg.rbw_hz, cfg.vbw_hz),
            NoiseSpectrum(grid, std::move(diff), cfg.rbw_hz, cfg.vbw_hz)};
}

std::vector<ScenarioTrace> pump_sweep_scenario(std::span<const double> s_values, std::span<const double> freqs_hz,
                                               const CavityParams& cavity, const PumpMap& pump_map) {
    for (double s : s_values) {
        if (!(s >= 1.0)) {
            throw BelowThreshold(concat("pump sweep: threshold factor ", s, " < 1"));
        }
    }
    std::vector<double> sorted(s_values.begin(), s_values.end());
    std::stable_sort(sorted.begin(), sorted.end());

    std::vector<ScenarioTrace> out;
    out.reserve(sorted.size());
    for (double s : sorted) {
        const auto base = single_beam_spectrum(freqs_hz, cavity, s);
        const auto peak = pump_map.at(s);
        const auto excess = excess_noise_profile(freqs_hz, peak);
        std::vector<double> values(base.values().begin(), base.values().end());
        for (std::size_t i = 0; i < values.size(); ++i) {
            values[i] += excess[i];
        }
        out.push_back({s, peak, NoiseSpectrum({freqs_hz.begin(), freqs_hz.end()}, std::move(values))});
    }
    return out;
}

}  // namespace twinbeam
