#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "freqbar/compiler.hpp"
#include "freqbar/device.hpp"
#include "freqbar/rng.hpp"
#include "freqbar/waveform.hpp"

namespace freqbar {

/// Crossbar array configuration and nonidealities for MAC execution.
struct CrossbarConfig {
    int rows = 9;
    int timestep_divisor = 64;          // samples per fastest-pulse period
    double line_resistance_ohm = 0.0;   // per wire segment, 0 = ideal
    NoiseModel noise;
    std::size_t max_samples = 10'000'000;

    void validate() const {
        if (rows < 1) throw DimensionError("crossbar", "crossbar needs at least one row");
        if (timestep_divisor < 16)
            throw RangeError("crossbar", "timestep_divisor must be >= 16 for peak resolution", 16.0, 1e12);
        if (line_resistance_ohm < 0.0)
            throw RangeError("crossbar", "line resistance must be non-negative", 0.0, 1e12);
    }
};

struct TimePoint {
    double t_s;
    double i_ma;
};

/// Outcome of one MAC: closed-form peak, time-stepped peak, its instant, and
/// optionally the sampled output waveform.
struct SimResult {
    double i_peak_analytic_ma = 0.0;
    double i_peak_simulated_ma = 0.0;
    double t_peak_s = 0.0;
    std::optional<std::vector<TimePoint>> waveform;
};

namespace detail {

/// Wire segments in series with cell j: j row segments plus j+1 column
/// segments down to the sense node at the driven corner.
inline int wire_segments(int cell_index) noexcept { return 2 * cell_index + 1; }

}  // namespace detail

/// Per-cell effective conductances for one MAC, in mS. Applies the read-
/// variation draw (once per device, in cell order) and the lumped series
/// line-resistance correction G_eff = 1 / (1/G + n_seg * r).
[[nodiscard]] inline std::vector<double> effective_conductances_ms(const CrossbarProgram& program,
                                                                   const CrossbarConfig& config,
                                                                   SubstreamRng* noise_rng = nullptr) {
    std::optional<SubstreamRng> fallback;
    if (config.noise.relative_sigma > 0.0 && noise_rng == nullptr) {
        fallback.emplace(SubstreamRng::keyed(config.noise.seed, rng_tag::kStandaloneMac));
        noise_rng = &*fallback;
    }
    std::vector<double> g_eff;
    g_eff.reserve(program.cell_count());
    for (std::size_t j = 0; j < program.cell_count(); ++j) {
        double g_ms = program.cells[j].g_ms;
        if (config.noise.relative_sigma > 0.0)
            g_ms *= 1.0 + config.noise.relative_sigma * noise_rng->gaussian();
        if (config.line_resistance_ohm > 0.0) {
            const double g_s = g_ms * 1e-3;
            const double r_wire = detail::wire_segments(static_cast<int>(j)) * config.line_resistance_ohm;
            g_ms = 1e3 / (1.0 / g_s + r_wire);
        }
        g_eff.push_back(g_ms);
    }
    return g_eff;
}

namespace detail {

inline void check_mac_dimensions(const CrossbarProgram& program, const PulseSchedule& schedule,
                                 const CrossbarConfig& config) {
    config.validate();
    if (schedule.rows() != program.cell_count())
        throw DimensionError("crossbar", "schedule has " + std::to_string(schedule.rows()) +
                                             " rows but program has " + std::to_string(program.cell_count()) +
                                             " cells");
    if (program.cell_count() > static_cast<std::size_t>(config.rows))
        throw DimensionError("crossbar", "program needs " + std::to_string(program.cell_count()) +
                                             " rows but the crossbar has " + std::to_string(config.rows));
}

}  // namespace detail

/// Kirchhoff column current at the aligned peak: sum of G_eff_j * V0_j in mA.
/// With an ideal config this is exactly the conductance-amplitude dot product.
[[nodiscard]] inline double mac_analytic(const CrossbarProgram& program, const PulseSchedule& schedule,
                                         const CrossbarConfig& config = {}, SubstreamRng* noise_rng = nullptr) {
    detail::check_mac_dimensions(program, schedule, config);
    const std::vector<double> g_eff = effective_conductances_ms(program, config, noise_rng);
    double i_ma = 0.0;
    for (std::size_t j = 0; j < g_eff.size(); ++j) i_ma += g_eff[j] * schedule.pulses[j].amplitude_v;
    return i_ma;
}

/// Time-stepped MAC: sample i(t) = sum_j G_eff_j * V_j(t) over [0, T_MAX/2]
/// with dt = 1/(f_max * timestep_divisor) and report the peak sample. The
/// schedule aligns all pulse maxima at T_MAX/4, so the sampled peak lands
/// within one dt of it. Both peaks in the result share one noise draw.
[[nodiscard]] inline SimResult mac_simulate(const CrossbarProgram& program, const PulseSchedule& schedule,
                                            const CrossbarConfig& config = {}, SubstreamRng* noise_rng = nullptr,
                                            bool keep_waveform = false) {
    detail::check_mac_dimensions(program, schedule, config);
    const std::vector<double> g_eff = effective_conductances_ms(program, config, noise_rng);

    const double f_max = schedule.max_freq_hz();
    const double dt = 1.0 / (f_max * config.timestep_divisor);
    const double window = schedule.window_s();
    const double sample_estimate = window / dt + 1.0;
    if (sample_estimate > static_cast<double>(config.max_samples))
        throw RangeError("crossbar",
                         "frequency spread needs " + std::to_string(static_cast<long long>(sample_estimate)) +
                             " samples (cap " + std::to_string(config.max_samples) +
                             "); use analytic mode or raise the cap",
                         0.0, static_cast<double>(config.max_samples));
    const std::size_t n_samples = static_cast<std::size_t>(window / dt) + 1;

    SimResult result;
    for (std::size_t j = 0; j < g_eff.size(); ++j)
        result.i_peak_analytic_ma += g_eff[j] * schedule.pulses[j].amplitude_v;
    if (keep_waveform) result.waveform.emplace();

    double best_i = -1.0;
    double best_t = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double t = static_cast<double>(i) * dt;
        double i_ma = 0.0;
        for (std::size_t j = 0; j < g_eff.size(); ++j) i_ma += g_eff[j] * pulse_value(schedule.pulses[j], t);
        if (keep_waveform) result.waveform->push_back({t, i_ma});
        if (i_ma > best_i) {
            best_i = i_ma;
            best_t = t;
        }
    }
    result.i_peak_simulated_ma = best_i;
    result.t_peak_s = best_t;
    return result;
}

/// Invert the affine peak-current map back to the integer dot product
/// sum_j w_j * p_j. The program's amplitude law and g_unit define the map:
/// i_peak = g_unit * (v_lo * sum(w) + (v_hi - v_lo)/pixel_max * D).
[[nodiscard]] inline long decode_dot(double i_peak_ma, const CrossbarProgram& program) {
    const double per_level = (program.law.v_hi - program.law.v_lo) / program.law.pixel_max;
    const double d_real =
        (i_peak_ma / program.g_unit_ms - program.law.v_lo * static_cast<double>(program.total_weight())) / per_level;
    if (d_real < -0.5)
        throw DecodeError("crossbar", "decoded dot product " + std::to_string(d_real) +
                                          " is negative beyond rounding tolerance");
    return std::lround(d_real);
}

/// Waveform dump: `t_s,v_row0,...,v_rowN,i_out_ma` at the simulation timestep.
inline void write_waveform_csv(const PulseSchedule& schedule, const std::vector<TimePoint>& waveform,
                               std::ostream& out) {
    out << "t_s";
    for (std::size_t j = 0; j < schedule.rows(); ++j) out << ",v_row" << j;
    out << ",i_out_ma\n";
    char buf[64];
    for (const auto& pt : waveform) {
        std::snprintf(buf, sizeof(buf), "%.10g", pt.t_s);
        out << buf;
        for (const auto& pulse : schedule.pulses) {
            std::snprintf(buf, sizeof(buf), ",%.10g", pulse_value(pulse, pt.t_s));
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), ",%.10g\n", pt.i_ma);
        out << buf;
    }
}

/// SimResult CSV: `i_peak_analytic_ma,i_peak_sim_ma,t_peak_s`.
inline void write_simresult_csv(const SimResult& result, std::ostream& out) {
    char buf[128];
    out << "i_peak_analytic_ma,i_peak_sim_ma,t_peak_s\n";
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", result.i_peak_analytic_ma, result.i_peak_simulated_ma,
                  result.t_peak_s);
    out << buf;
}

}  // namespace freqbar
