#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "freqbar/errors.hpp"

namespace freqbar {

/// Read-disturb guard: the largest pulse amplitude the experiment drives.
inline constexpr double kDefaultAmplitudeCeilingV = 0.66;

/// Phase shift that aligns a pulse of frequency f with the slowest pulse of a
/// schedule: (pi/2) * (1 - f / f_min). The slowest pulse (f == f_min) needs no
/// shift; faster pulses are delayed so all maxima coincide at 1/(4*f_min).
[[nodiscard]] inline double phase_shift(double freq_hz, double f_min_hz) {
    if (!(f_min_hz > 0.0)) throw ScheduleError("waveform", "schedule base frequency must be positive");
    if (freq_hz < f_min_hz)
        throw ScheduleError("waveform", "pulse at " + std::to_string(freq_hz) +
                                            " Hz is slower than the schedule base " +
                                            std::to_string(f_min_hz) + " Hz and cannot align");
    return std::numbers::pi / 2.0 * (1.0 - freq_hz / f_min_hz);
}

/// One half-sine row input: V0 * sin(2*pi*f*t + phi) gated to the half-period
/// window centred on the schedule peak, zero elsewhere.
struct HalfSinePulse {
    double amplitude_v = 0.0;
    double freq_hz = 0.0;
    double phase_rad = 0.0;
    double f_min_hz = 0.0;  // schedule-wide base frequency

    /// Instant at which every pulse of the schedule attains its maximum.
    [[nodiscard]] double t_peak_s() const noexcept { return 1.0 / (4.0 * f_min_hz); }
    [[nodiscard]] double support_begin_s() const noexcept { return t_peak_s() - 1.0 / (4.0 * freq_hz); }
    [[nodiscard]] double support_end_s() const noexcept { return t_peak_s() + 1.0 / (4.0 * freq_hz); }
};

/// Pulse voltage at time t. Inside the support window the phased sine equals
/// cos(2*pi*f*(t - t_peak)), which is how it is evaluated: the centred form is
/// immune to the catastrophic cancellation of the raw phase at large f/f_min.
[[nodiscard]] inline double pulse_value(const HalfSinePulse& p, double t_s) noexcept {
    if (t_s < p.support_begin_s() || t_s > p.support_end_s()) return 0.0;
    const double v = p.amplitude_v * std::cos(2.0 * std::numbers::pi * p.freq_hz * (t_s - p.t_peak_s()));
    return v > 0.0 ? v : 0.0;
}

/// Phase-aligned half-sine inputs for one MAC, one pulse per crossbar row.
/// All pulses share f_min and peak simultaneously at t_peak = 1/(4*f_min);
/// every support lies inside [0, T_MAX/2].
struct PulseSchedule {
    std::vector<HalfSinePulse> pulses;
    double f_min_hz = 0.0;
    double t_peak_s = 0.0;

    [[nodiscard]] std::size_t rows() const noexcept { return pulses.size(); }
    [[nodiscard]] double window_s() const noexcept { return 1.0 / (2.0 * f_min_hz); }
    [[nodiscard]] double max_freq_hz() const noexcept {
        double f = f_min_hz;
        for (const auto& p : pulses) f = std::max(f, p.freq_hz);
        return f;
    }
};

/// Build the aligned schedule for a set of (amplitude, frequency) rows.
/// f_min is the slowest row frequency; each pulse gets its aligning phase.
/// Zero-amplitude rows are allowed (an undriven row); amplitudes above the
/// ceiling are rejected as a read-disturb guard.
[[nodiscard]] inline PulseSchedule build_schedule(const std::vector<std::pair<double, double>>& rows,
                                                  double amplitude_ceiling_v = kDefaultAmplitudeCeilingV) {
    if (rows.empty()) throw ScheduleError("waveform", "schedule needs at least one row");
    double f_min = rows.front().second;
    for (const auto& [v0, f] : rows) {
        if (!(f > 0.0)) throw ScheduleError("waveform", "row frequency must be positive");
        if (v0 < 0.0 || v0 > amplitude_ceiling_v)
            throw ScheduleError("waveform", "row amplitude " + std::to_string(v0) +
                                                " V outside [0, " + std::to_string(amplitude_ceiling_v) + "] V");
        f_min = std::min(f_min, f);
    }
    PulseSchedule schedule;
    schedule.f_min_hz = f_min;
    schedule.t_peak_s = 1.0 / (4.0 * f_min);
    schedule.pulses.reserve(rows.size());
    for (const auto& [v0, f] : rows)
        schedule.pulses.push_back({v0, f, phase_shift(f, f_min), f_min});
    return schedule;
}

}  // namespace freqbar
