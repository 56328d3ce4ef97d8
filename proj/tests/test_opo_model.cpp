#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "twinbeam/error.hpp"
#include "twinbeam/opo_model.hpp"
#include "twinbeam/units.hpp"

using namespace twinbeam;

namespace {

CavityParams cavity_with(double t_out, double t_hr, double loss) {
    CavityParams c;
    c.t_out = t_out;
    c.t_hr = t_hr;
    c.loss_extra = loss;
    return c;
}

// Cavity whose escape efficiency is exactly `eta_e` (no HR transmission).
CavityParams cavity_for_eta(double eta_e, double gamma = 17.5e6) {
    CavityParams c;
    c.t_out = 0.05;
    c.t_hr = 0.0;
    c.loss_extra = 0.05 * (1.0 - eta_e) / eta_e;
    c.linewidth_hz = gamma;
    return c;
}

}  // namespace

TEST_CASE("escape efficiency") {
    CHECK(std::fabs(escape_efficiency(cavity_with(0.05, 0.001, 0.003)) - 0.9259) < 1e-4);
    CHECK(escape_efficiency(cavity_with(0.05, 0.0, 0.0)) == 1.0);
    CHECK(escape_efficiency(cavity_with(0.02, 0.02, 0.0)) == 0.5);
}

TEST_CASE("cavity invariants are enforced") {
    CHECK_THROWS_AS(escape_efficiency(cavity_with(0.0, 0.0, 0.0)), InvalidParameter);
    CHECK_THROWS_AS(escape_efficiency(cavity_with(0.05, -0.01, 0.0)), InvalidParameter);
    CHECK_THROWS_AS(escape_efficiency(cavity_with(0.6, 0.3, 0.2)), InvalidParameter);
    CavityParams c;
    c.linewidth_hz = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
}

TEST_CASE("output power") {
    CHECK(output_power({8.5, 8.5, 1.2}) == 0.0);
    CHECK(std::fabs(output_power({40.0, 8.5, 1.2}) - 23.86) < 0.01);
    for (double p_th : {0.5, 8.5, 42.0}) {
        for (double eps : {0.3, 1.2, 2.9}) {
            CHECK(output_power({4.0 * p_th, p_th, eps}) == doctest::Approx(2.0 * eps * p_th).epsilon(1e-15));
        }
    }
}

TEST_CASE("below threshold is a distinct error") {
    CHECK_THROWS_AS(output_power({5.0, 8.5, 1.2}), BelowThreshold);
    CHECK_THROWS_AS(normalized_output(0.99, 1.2), BelowThreshold);
    CHECK_THROWS_AS(output_power({10.0, -1.0, 1.2}), InvalidParameter);
    CHECK_THROWS_AS(output_power({10.0, 8.5, 0.0}), InvalidParameter);
}

TEST_CASE("normalized output") {
    CHECK(normalized_output(1.0, 1.2) == 0.0);
    CHECK(normalized_output(4.0, 1.2) == doctest::Approx(2.4).epsilon(1e-15));
    CHECK(normalized_output(9.0, 0.5) == 2.0);
}

TEST_CASE("normalized output times threshold equals output power") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> s_dist(1.0, 50.0), th(0.5, 60.0), eps(0.1, 4.0);
    for (int i = 0; i < 500; ++i) {
        const double s = s_dist(rng), p_th = th(rng), e = eps(rng);
        const double direct = output_power({s * p_th, p_th, e});
        CHECK(std::fabs(normalized_output(s, e) * p_th - direct) <= 1e-12 * std::max(1.0, direct));
    }
}

TEST_CASE("threshold factor") {
    CHECK(std::fabs(threshold_factor(40.0, 8.5) - 4.706) < 1e-3);
    CHECK(threshold_factor(8.5, 8.5) == 1.0);
    CHECK(threshold_factor(0.0, 8.5) == 0.0);
    CHECK_THROWS_AS(threshold_factor(10.0, 0.0), InvalidParameter);
    CHECK_THROWS_AS(threshold_factor(10.0, -2.0), InvalidParameter);
}

TEST_CASE("gradient matches central differences") {
    const OperatingPoint op{30.0, 8.5, 1.2};
    const auto g = output_power_gradient(op);
    const double h = 1e-6;
    const double d_eps = (output_power({30.0, 8.5, 1.2 + h}) - output_power({30.0, 8.5, 1.2 - h})) / (2 * h);
    const double d_th = (output_power({30.0, 8.5 + h, 1.2}) - output_power({30.0, 8.5 - h, 1.2})) / (2 * h);
    CHECK(g.d_epsilon == doctest::Approx(d_eps).epsilon(1e-8));
    CHECK(g.d_threshold == doctest::Approx(d_th).epsilon(1e-7));
}

TEST_CASE("default linewidth reproduces the 3 MHz dip") {
    const DetectionChain det{0.9, 1.0};
    CavityParams cav = cavity_with(0.05, 0.001, 0.003);
    const double eta = escape_efficiency(cav) * det.total();
    // Independent inversion of the Lorentzian at -7.2 dB, 3 MHz.
    const double gamma = oracle::invert_difference_linewidth(3e6, from_db(-7.2), eta);
    CHECK(std::fabs(gamma - 17.5e6) < 0.1e6);
    CHECK(cav.linewidth_hz == 17.5e6);

    const std::vector<double> f{3e6};
    const auto spec = twin_difference_spectrum(f, cav, det);
    CHECK(std::fabs(spec.values()[0] - 0.1905) < 5e-4);
    CHECK(std::fabs(to_db(spec.values()[0]) + 7.2) < 0.3);
}

TEST_CASE("difference spectrum limits") {
    CavityParams cav = cavity_with(0.05, 0.001, 0.003);
    const DetectionChain det{0.9, 1.0};
    const std::vector<double> f{1e6 * cav.linewidth_hz};
    CHECK(std::fabs(twin_difference_spectrum(f, cav, det).values()[0] - 1.0) < 1e-9);

    const auto perfect = cavity_with(0.05, 0.0, 0.0);
    const std::vector<double> dc{0.0};
    CHECK(twin_difference_spectrum(dc, perfect, DetectionChain{1.0, 1.0}).values()[0] == 0.0);
}

TEST_CASE("difference spectrum is increasing and bounded") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> eta(0.05, 1.0), gamma(1e6, 1e8);
    for (int trial = 0; trial < 50; ++trial) {
        const double eta_e = eta(rng);
        CavityParams cav = cavity_for_eta(eta_e, gamma(rng));
        const DetectionChain det{eta(rng), 1.0};
        std::vector<double> f;
        for (int i = 0; i < 200; ++i) f.push_back(i * 1e6);
        const auto spec = twin_difference_spectrum(f, cav, det);
        const double floor = 1.0 - escape_efficiency(cav) * det.total();
        CHECK(spec.values()[0] == doctest::Approx(floor).epsilon(1e-12));
        for (std::size_t i = 1; i < spec.size(); ++i) {
            CHECK(spec.values()[i] > spec.values()[i - 1]);
            CHECK(spec.values()[i] <= 1.0);
            CHECK(spec.values()[i] > floor);
        }
    }
}

TEST_CASE("single-beam spectrum reference values") {
    const std::vector<double> f{0.0, 1e6, 35e6, 1e9};
    for (double eta_e : {0.3, 0.9259, 1.0}) {
        const auto spec = single_beam_spectrum(f, cavity_for_eta(eta_e), 4.0);
        for (double v : spec.values()) CHECK(v == 1.0);
    }
    const std::vector<double> dc{0.0};
    const double s8 = single_beam_spectrum(dc, cavity_with(0.05, 0.001, 0.003), 8.0).values()[0];
    CHECK(std::fabs(s8 - 0.6756) < 1e-3);
    CHECK(std::fabs(s8 - oracle::single_beam(0.0, 0.05 / 0.054, 17.5e6, 8.0)) < 1e-12);

    const double big = single_beam_spectrum(dc, cavity_with(0.05, 0.0, 0.0), 1e8).values()[0];
    CHECK(std::fabs(big - 0.5) < 1e-3);
}

TEST_CASE("single-beam spectrum matches expanded-form oracle") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> s_dist(1.01, 40.0), f_dist(0.0, 1e8), eta(0.05, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double s = s_dist(rng), f = f_dist(rng), e = eta(rng);
        CHECK(single_beam_value(f, e, 17.5e6, s) == doctest::Approx(oracle::single_beam(f, e, 17.5e6, s)).epsilon(1e-12));
    }
}

TEST_CASE("single-beam squeezing iff s > 4") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> s_dist(1.0001, 30.0), f_dist(0.0, 2e8), eta(0.01, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double s = s_dist(rng), f = f_dist(rng), e = eta(rng);
        const double v = single_beam_value(f, e, 17.5e6, s);
        const double lhs = 1.0 - v;
        CHECK((lhs > 0.0) == (s > 4.0));
    }
}

TEST_CASE("single-beam value non-increasing in s above 4") {
    for (double f : {0.0, 3e6, 17.5e6, 35e6, 1e8}) {
        double prev = 1.0;
        for (double s = 4.0; s < 200.0; s *= 1.1) {
            const double v = single_beam_value(f, 0.9259, 17.5e6, s);
            CHECK(v <= prev + 1e-15);
            prev = v;
        }
    }
}

TEST_CASE("single-beam errors") {
    const std::vector<double> f{0.0, 1e6};
    CHECK_THROWS_AS(single_beam_spectrum(f, CavityParams{}, 0.5), BelowThreshold);
    CHECK_THROWS_AS(single_beam_spectrum(f, CavityParams{}, 1.0), DomainError);
    const std::vector<double> above{1e6, 2e6};
    CHECK(single_beam_spectrum(above, CavityParams{}, 1.0).values()[0] > 1.0);
}

TEST_CASE("both spectra recover shot noise at high frequency") {
    CavityParams cav;
    const std::vector<double> f{1e5 * cav.linewidth_hz};
    CHECK(std::fabs(twin_difference_spectrum(f, cav, DetectionChain{}).values()[0] - 1.0) < 1e-9);
    for (double s : {1.5, 3.0, 9.0, 100.0}) {
        CHECK(std::fabs(single_beam_spectrum(f, cav, s).values()[0] - 1.0) < 1e-9);
    }
}

TEST_CASE("noise spectrum invariants") {
    CHECK_THROWS_AS(NoiseSpectrum({2.0, 1.0}, {1.0, 1.0}), InvalidParameter);
    CHECK_THROWS_AS(NoiseSpectrum({1.0, 2.0}, {1.0}), StructuralError);
    CHECK_THROWS_AS(NoiseSpectrum({1.0, 2.0}, {1.0, -0.1}), DataError);
    CHECK_THROWS_AS(NoiseSpectrum({1.0, 2.0}, {1.0, 1.0}, 0.0), InvalidParameter);
    CHECK_THROWS_AS(NoiseSpectrum({}, {}), InvalidParameter);
}
