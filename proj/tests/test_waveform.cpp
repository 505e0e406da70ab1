#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "freqbar/waveform.hpp"

using namespace freqbar;
using Catch::Approx;

TEST_CASE("phase shift aligns fast pulses with the schedule base", "[waveform]") {
    CHECK(phase_shift(10.0, 10.0) == 0.0);
    CHECK(phase_shift(750.0, 10.0) == Approx(-37.0 * std::numbers::pi).epsilon(1e-15));
    CHECK(phase_shift(10000.0, 10.0) == Approx(-499.5 * std::numbers::pi).epsilon(1e-15));
    CHECK_THROWS_AS(phase_shift(5.0, 10.0), ScheduleError);
    CHECK_THROWS_AS(phase_shift(10.0, 0.0), ScheduleError);
}

TEST_CASE("pulse value is a half-sine centred on the schedule peak", "[waveform]") {
    const auto schedule = build_schedule({{0.66, 10000.0}, {0.4, 750.0}, {0.2, 10.0}});
    REQUIRE(schedule.f_min_hz == 10.0);
    REQUIRE(schedule.t_peak_s == Approx(0.025));

    SECTION("slowest pulse starts at zero volts") {
        CHECK(pulse_value(schedule.pulses[2], 0.0) == Approx(0.0).margin(1e-15));
    }

    SECTION("every pulse attains its amplitude at t_peak") {
        for (const auto& p : schedule.pulses)
            CHECK(pulse_value(p, schedule.t_peak_s) == Approx(p.amplitude_v).epsilon(1e-12));
    }

    SECTION("outside the half-period support the pulse is exactly zero") {
        const auto& p750 = schedule.pulses[1];
        // support is 25 ms +/- (1/3) ms
        CHECK(pulse_value(p750, 0.020) == 0.0);
        CHECK(pulse_value(p750, 0.030) == 0.0);
        CHECK(pulse_value(p750, 0.025) == Approx(0.4).epsilon(1e-12));
    }

    SECTION("continuous at the support endpoints") {
        for (const auto& p : schedule.pulses) {
            CHECK(pulse_value(p, p.support_begin_s()) == Approx(0.0).margin(1e-9));
            CHECK(pulse_value(p, p.support_end_s()) == Approx(0.0).margin(1e-9));
        }
    }
}

TEST_CASE("build_schedule derives base frequency, phases and peak time", "[waveform]") {
    SECTION("uniform frequencies need no phase shifts") {
        const auto s = build_schedule({{0.3, 500.0}, {0.2, 500.0}, {0.1, 500.0}});
        CHECK(s.f_min_hz == 500.0);
        CHECK(s.t_peak_s == Approx(1.0 / 2000.0));
        for (const auto& p : s.pulses) CHECK(p.phase_rad == 0.0);
    }

    SECTION("mixed frequencies: slowest row sets the window") {
        const auto s = build_schedule({{0.66, 10000.0}, {0.66, 750.0}, {0.66, 10.0}});
        CHECK(s.f_min_hz == 10.0);
        CHECK(s.t_peak_s == Approx(0.025));
    }

    SECTION("two-row example") {
        const auto s = build_schedule({{0.5, 750.0}, {0.5, 500.0}});
        CHECK(s.f_min_hz == 500.0);
        CHECK(s.pulses[0].phase_rad == Approx(-std::numbers::pi / 4.0).epsilon(1e-15));
        CHECK(s.pulses[1].phase_rad == 0.0);
    }

    SECTION("rejects empty schedules and over-ceiling amplitudes") {
        CHECK_THROWS_AS(build_schedule({}), ScheduleError);
        CHECK_THROWS_AS(build_schedule({{0.7, 100.0}}), ScheduleError);
        CHECK_THROWS_AS(build_schedule({{-0.1, 100.0}}), ScheduleError);
    }
}

TEST_CASE("centred evaluation equals the phased sine inside the support", "[waveform][property]") {
    // V0 * sin(2*pi*f*t + phi) with the aligning phase is algebraically
    // cos(2*pi*f*(t - t_peak)); check the identity numerically across the
    // support, including large f/f_min ratios where the raw phase is huge.
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> logf(std::log10(0.5), std::log10(10000.0));
    for (int iter = 0; iter < 100; ++iter) {
        double fa = std::pow(10.0, logf(rng));
        double fb = std::pow(10.0, logf(rng));
        if (fa < fb) std::swap(fa, fb);
        const auto s = build_schedule({{0.5, fa}, {0.5, fb}});
        const auto& p = s.pulses[0];
        for (int k = 1; k < 40; ++k) {
            const double t = p.support_begin_s() + (p.support_end_s() - p.support_begin_s()) * k / 40.0;
            const double phased = p.amplitude_v * std::sin(2.0 * std::numbers::pi * p.freq_hz * t + p.phase_rad);
            CHECK(pulse_value(p, t) == Approx(phased).margin(1e-9 * p.amplitude_v));
        }
    }
}

TEST_CASE("schedules align, stay non-negative and fit the MAC window", "[waveform][property]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> amp(0.01, 0.66);
    std::uniform_real_distribution<double> logf(std::log10(0.5), std::log10(10000.0));
    std::uniform_int_distribution<int> n_rows(1, 9);

    for (int iter = 0; iter < 200; ++iter) {
        std::vector<std::pair<double, double>> rows;
        for (int j = n_rows(rng); j > 0; --j) rows.emplace_back(amp(rng), std::pow(10.0, logf(rng)));
        const auto s = build_schedule(rows);

        for (const auto& p : s.pulses) {
            CHECK(pulse_value(p, s.t_peak_s) == Approx(p.amplitude_v).epsilon(1e-12));
            CHECK(p.support_begin_s() >= -1e-15);
            CHECK(p.support_end_s() <= s.window_s() * (1.0 + 1e-12));
            for (int k = 0; k <= 50; ++k) {
                const double t = s.window_s() * k / 50.0;
                const double v = pulse_value(p, t);
                CHECK(v >= 0.0);
                CHECK(v <= p.amplitude_v * (1.0 + 1e-12));
            }
        }
    }
}
