#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "freqbar/compiler.hpp"
#include "freqbar/errors.hpp"

namespace freqbar {

/// Cost summary for one program against a DC-driven bit-sliced baseline that
/// realises the same conductances across n_bits columns.
struct CostReport {
    double avg_power_mw = 0.0;
    double energy_per_mac_uj = 0.0;
    double latency_s = 0.0;
    int columns_used = 1;
    double baseline_power_mw = 0.0;
    int baseline_columns = 0;
    double power_ratio = 0.0;
    double area_fraction = 0.0;
    int n_bits = 0;
};

namespace detail {

inline void check_amplitudes(const CrossbarProgram& program, const std::vector<double>& amplitudes_v,
                             const char* op) {
    if (amplitudes_v.size() != program.cell_count())
        throw DimensionError("analysis", std::string(op) + ": " + std::to_string(amplitudes_v.size()) +
                                             " amplitudes for " + std::to_string(program.cell_count()) + " cells");
}

}  // namespace detail

/// Average read power of one MAC in mW: sum_j G_j * (V0_j / sqrt(2))^2.
/// Frequency does not enter; only conductances and amplitudes do.
[[nodiscard]] inline double mac_power_mw(const CrossbarProgram& program, const std::vector<double>& amplitudes_v) {
    detail::check_amplitudes(program, amplitudes_v, "mac_power");
    double p_mw = 0.0;
    for (std::size_t j = 0; j < amplitudes_v.size(); ++j)
        p_mw += program.cells[j].g_ms * (amplitudes_v[j] * amplitudes_v[j] / 2.0);
    return p_mw;
}

/// Energy of one MAC in microjoules: sum_j G_j * (V0_j / sqrt(2))^2 * T_j / 2.
/// Slower rows hold their power for longer, so lowering a cell's frequency
/// raises its energy share.
[[nodiscard]] inline double mac_energy_uj(const CrossbarProgram& program, const std::vector<double>& amplitudes_v) {
    detail::check_amplitudes(program, amplitudes_v, "mac_energy");
    double e_j = 0.0;
    for (std::size_t j = 0; j < amplitudes_v.size(); ++j) {
        const double g_s = program.cells[j].g_ms * 1e-3;
        const double half_period_s = 1.0 / (2.0 * program.cells[j].freq_hz);
        e_j += g_s * (amplitudes_v[j] * amplitudes_v[j] / 2.0) * half_period_s;
    }
    return e_j * 1e6;
}

/// MAC latency: the slowest pulse bounds the window (T_MAX/2) plus the column
/// readout time. Reported without cross-MAC pipelining; throughput is simply
/// its reciprocal.
[[nodiscard]] inline double latency_s(const CrossbarProgram& program, double readout_s) {
    if (program.cells.empty()) throw DimensionError("analysis", "latency of an empty program");
    return 1.0 / (2.0 * program.f_min_hz) + readout_s;
}

/// Compare against the bit-sliced baseline: identical conductances replicated
/// across n_bits DC-driven columns, so baseline power is
/// n_bits * sum_j G_j * V0_j^2 and the scheme uses 1/n_bits of the columns.
/// The power ratio is identically 2 * n_bits (the AC factor times the column
/// count).
[[nodiscard]] inline CostReport compare_baseline(const CrossbarProgram& program, int n_bits,
                                                 const std::vector<double>& amplitudes_v,
                                                 double readout_s = 500e-9) {
    if (n_bits < 1) throw RangeError("analysis", "n_bits must be >= 1", 1.0, 64.0);
    detail::check_amplitudes(program, amplitudes_v, "compare_baseline");

    CostReport report;
    report.n_bits = n_bits;
    report.columns_used = 1;
    report.baseline_columns = n_bits;
    report.avg_power_mw = mac_power_mw(program, amplitudes_v);
    report.energy_per_mac_uj = mac_energy_uj(program, amplitudes_v);
    report.latency_s = latency_s(program, readout_s);
    double baseline = 0.0;
    for (std::size_t j = 0; j < amplitudes_v.size(); ++j)
        baseline += program.cells[j].g_ms * amplitudes_v[j] * amplitudes_v[j];
    report.baseline_power_mw = n_bits * baseline;
    report.power_ratio =
        report.avg_power_mw > 0.0 ? report.baseline_power_mw / report.avg_power_mw : 2.0 * n_bits;
    report.area_fraction = static_cast<double>(report.columns_used) / report.baseline_columns;
    return report;
}

/// CostReport CSV:
/// `avg_power_mw,energy_uj,latency_s,columns,baseline_power_mw,baseline_columns,power_ratio,area_fraction,n_bits`.
inline void write_cost_csv(const CostReport& report, std::ostream& out) {
    out << "avg_power_mw,energy_uj,latency_s,columns,baseline_power_mw,baseline_columns,power_ratio,area_fraction,"
           "n_bits\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d,%.17g,%d,%.17g,%.17g,%d\n", report.avg_power_mw,
                  report.energy_per_mac_uj, report.latency_s, report.columns_used, report.baseline_power_mw,
                  report.baseline_columns, report.power_ratio, report.area_fraction, report.n_bits);
    out << buf;
}

}  // namespace freqbar
