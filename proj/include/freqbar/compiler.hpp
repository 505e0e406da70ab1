#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "freqbar/device.hpp"
#include "freqbar/errors.hpp"
#include "freqbar/waveform.hpp"

namespace freqbar {

/// Integer convolution kernel. The scale denominator (e.g. 16 for the 3x3
/// Gaussian blur) is never programmed into the array; it is applied digitally
/// when decoding the output current.
struct Kernel {
    int rows = 0;
    int cols = 0;
    std::vector<int> weights;  // row-major
    int scale_den = 1;

    [[nodiscard]] std::size_t cell_count() const noexcept { return weights.size(); }

    void validate() const {
        if (rows < 1 || cols < 1) throw ParseError("compiler", "kernel dimensions must be positive");
        if (weights.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
            throw ParseError("compiler", "kernel weight count does not match dimensions");
        if (scale_den < 1) throw ParseError("compiler", "kernel scale denominator must be positive");
        for (int w : weights)
            if (w < 1)
                throw UnsupportedError("compiler",
                                       "weight " + std::to_string(w) + " unsupported in v1 (weights must be >= 1)");
    }
};

/// Affine pixel -> pulse-amplitude mapping: V0(p) = v_lo + (v_hi - v_lo) * p / pixel_max.
struct AmplitudeLaw {
    double v_lo = 0.15;
    double v_hi = 0.66;
    int pixel_max = 255;

    void validate(double ceiling_v = kDefaultAmplitudeCeilingV) const {
        if (!(0.0 < v_lo && v_lo < v_hi && v_hi <= ceiling_v))
            throw ScheduleError("compiler", "amplitude law requires 0 < v_lo < v_hi <= " + std::to_string(ceiling_v));
        if (pixel_max < 1) throw ScheduleError("compiler", "pixel_max must be positive");
    }

    [[nodiscard]] double amplitude_for(int pixel) const {
        if (pixel < 0 || pixel > pixel_max)
            throw RangeError("compiler", "pixel " + std::to_string(pixel) + " outside [0, " +
                                             std::to_string(pixel_max) + "]",
                             0.0, static_cast<double>(pixel_max));
        return v_lo + (v_hi - v_lo) * static_cast<double>(pixel) / static_cast<double>(pixel_max);
    }
};

/// Tie-break rule when several (state, frequency) pairs realise the same
/// conductance: Speed takes the highest admissible frequency, Energy the
/// lowest per-pulse read energy.
enum class Policy : std::uint8_t { Speed, Energy };

[[nodiscard]] inline std::string_view to_string(Policy p) noexcept {
    return p == Policy::Speed ? "speed" : "energy";
}

[[nodiscard]] inline Policy parse_policy(std::string_view s) {
    if (s == "speed") return Policy::Speed;
    if (s == "energy") return Policy::Energy;
    throw ParseError("compiler", "unknown policy '" + std::string(s) + "' (expected speed|energy)");
}

/// Relative tolerance between a cell's realised conductance and its ideal
/// weight * g_unit target. Also gates admission of OFF-branch grid points.
inline constexpr double kQuantizationTolerance = 5e-3;

struct ProgramCell {
    int index = 0;
    int weight = 0;
    DeviceState state = DeviceState::On;
    double freq_hz = 0.0;
    double g_ms = 0.0;
    double phase_rad = 0.0;
};

/// A kernel lowered onto one crossbar column: per-cell device state, driving
/// frequency, realised conductance and aligning phase, plus everything needed
/// to encode inputs and decode output currents. Immutable once compiled.
struct CrossbarProgram {
    std::vector<ProgramCell> cells;
    double g_unit_ms = 0.0;  // conductance per unit weight
    double f_min_hz = 0.0;
    AmplitudeLaw law;
    Policy policy = Policy::Energy;
    int kernel_rows = 0;
    int kernel_cols = 0;
    int scale_den = 1;

    [[nodiscard]] std::size_t cell_count() const noexcept { return cells.size(); }

    [[nodiscard]] long total_weight() const noexcept {
        long sum = 0;
        for (const auto& c : cells) sum += c.weight;
        return sum;
    }

    [[nodiscard]] double max_freq_hz() const noexcept {
        double f = 0.0;
        for (const auto& c : cells) f = std::max(f, c.freq_hz);
        return f;
    }
};

struct CompileOptions {
    Policy policy = Policy::Energy;
    /// Admit OFF-branch grid points (no interpolation: the OFF branch is
    /// non-monotone) as duplicative candidates within the quantization
    /// tolerance.
    bool allow_off_grid = false;
    double amplitude_ceiling_v = kDefaultAmplitudeCeilingV;
};

namespace detail {

struct Candidate {
    DeviceState state;
    double freq_hz;
    double g_ms;
};

/// Per-pulse read energy in joules: G * (V0/sqrt(2))^2 * T/2 with the law's
/// top amplitude. Only the G/f ratio matters for ranking, but the literal
/// expression keeps the units honest.
inline double candidate_energy_j(const Candidate& c, double v_hi) {
    return c.g_ms * 1e-3 * (v_hi * v_hi / 2.0) * (1.0 / (2.0 * c.freq_hz));
}

}  // namespace detail

/// Lower a kernel into a crossbar program against a conductance table.
///
/// Unit weight anchors to the table's ON conductance at its highest frequency
/// (g_unit); weight w targets w * g_unit, realised on the ON branch by inverse
/// lookup. Representable integer weights are 1..floor(max_g_on / g_unit).
[[nodiscard]] inline CrossbarProgram compile(const Kernel& kernel, const ConductanceTable& table,
                                             const AmplitudeLaw& law, const CompileOptions& options = {}) {
    kernel.validate();
    law.validate(options.amplitude_ceiling_v);

    const double g_unit = table.conductance_at(DeviceState::On, table.max_freq_hz());
    const int max_weight = static_cast<int>(std::floor(table.max_g_on_ms() / g_unit * (1.0 + 1e-12)));

    CrossbarProgram program;
    program.g_unit_ms = g_unit;
    program.law = law;
    program.policy = options.policy;
    program.kernel_rows = kernel.rows;
    program.kernel_cols = kernel.cols;
    program.scale_den = kernel.scale_den;
    program.cells.reserve(kernel.cell_count());

    for (std::size_t i = 0; i < kernel.cell_count(); ++i) {
        const int w = kernel.weights[i];
        const double target = w * g_unit;
        if (w > max_weight)
            throw RangeError("compiler",
                             "weight " + std::to_string(w) + " not representable (integer weights 1.." +
                                 std::to_string(max_weight) + " for this table)",
                             1.0, static_cast<double>(max_weight));

        std::vector<detail::Candidate> candidates;
        const double f_on = table.frequency_for(DeviceState::On, target);
        candidates.push_back({DeviceState::On, f_on, table.conductance_at(DeviceState::On, f_on)});
        if (options.allow_off_grid) {
            for (const auto& e : table.entries())
                if (std::abs(e.g_off_ms - target) <= kQuantizationTolerance * target)
                    candidates.push_back({DeviceState::Off, e.freq_hz, e.g_off_ms});
        }

        const auto best = std::min_element(
            candidates.begin(), candidates.end(),
            [&](const detail::Candidate& a, const detail::Candidate& b) {
                if (options.policy == Policy::Speed) {
                    if (a.freq_hz != b.freq_hz) return a.freq_hz > b.freq_hz;
                } else {
                    const double ea = detail::candidate_energy_j(a, law.v_hi);
                    const double eb = detail::candidate_energy_j(b, law.v_hi);
                    if (ea != eb) return ea < eb;
                    if (a.freq_hz != b.freq_hz) return a.freq_hz > b.freq_hz;
                }
                return a.state == DeviceState::On && b.state == DeviceState::Off;
            });

        program.cells.push_back({static_cast<int>(i), w, best->state, best->freq_hz, best->g_ms, 0.0});
    }

    double f_min = program.cells.front().freq_hz;
    for (const auto& c : program.cells) f_min = std::min(f_min, c.freq_hz);
    program.f_min_hz = f_min;
    for (auto& c : program.cells) c.phase_rad = phase_shift(c.freq_hz, f_min);
    return program;
}

/// Encode one pixel patch as the program's aligned pulse schedule: row j gets
/// the law's amplitude for pixel j at cell j's frequency.
[[nodiscard]] inline PulseSchedule encode_inputs(const CrossbarProgram& program, const std::vector<int>& patch) {
    if (patch.size() != program.cell_count())
        throw DimensionError("compiler", "patch length " + std::to_string(patch.size()) +
                                             " does not match program cell count " +
                                             std::to_string(program.cell_count()));
    std::vector<std::pair<double, double>> rows;
    rows.reserve(patch.size());
    for (std::size_t j = 0; j < patch.size(); ++j)
        rows.emplace_back(program.law.amplitude_for(patch[j]), program.cells[j].freq_hz);
    return build_schedule(rows, std::max(kDefaultAmplitudeCeilingV, program.law.v_hi));
}

/// Per-cell relative conductance error against the ideal weight * g_unit.
struct QuantizationReport {
    std::vector<double> per_cell_rel_error;
    double max_rel_error = 0.0;
    double rms_rel_error = 0.0;
};

[[nodiscard]] inline QuantizationReport quantization_report(const CrossbarProgram& program) {
    QuantizationReport report;
    report.per_cell_rel_error.reserve(program.cell_count());
    double sum_sq = 0.0;
    for (const auto& c : program.cells) {
        const double ideal = c.weight * program.g_unit_ms;
        const double err = std::abs(c.g_ms - ideal) / ideal;
        report.per_cell_rel_error.push_back(err);
        report.max_rel_error = std::max(report.max_rel_error, err);
        sum_sq += err * err;
    }
    if (!program.cells.empty()) report.rms_rel_error = std::sqrt(sum_sq / program.cell_count());
    return report;
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

/// Kernel file: first line `rows cols scale_den`, then `rows` lines of `cols`
/// space-separated integers.
[[nodiscard]] inline Kernel parse_kernel(std::istream& in) {
    Kernel k;
    std::string line;
    if (!std::getline(in, line)) throw ParseError("compiler", "empty kernel file", 1);
    {
        std::istringstream head(line);
        if (!(head >> k.rows >> k.cols >> k.scale_den))
            throw ParseError("compiler", "expected 'rows cols scale_den' on line 1", 1);
        std::string extra;
        if (head >> extra) throw ParseError("compiler", "trailing tokens on line 1", 1);
    }
    if (k.rows < 1 || k.cols < 1) throw ParseError("compiler", "kernel dimensions must be positive", 1);
    for (int r = 0; r < k.rows; ++r) {
        if (!std::getline(in, line))
            throw ParseError("compiler", "missing kernel row", static_cast<std::size_t>(r) + 2);
        std::istringstream row(line);
        for (int c = 0; c < k.cols; ++c) {
            int w;
            if (!(row >> w))
                throw ParseError("compiler", "malformed kernel row", static_cast<std::size_t>(r) + 2);
            k.weights.push_back(w);
        }
        std::string extra;
        if (row >> extra)
            throw ParseError("compiler", "too many entries in kernel row", static_cast<std::size_t>(r) + 2);
    }
    k.validate();
    return k;
}

[[nodiscard]] inline Kernel load_kernel(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("compiler", "cannot open kernel file: " + path);
    return parse_kernel(in);
}

inline void save_kernel(const Kernel& kernel, std::ostream& out) {
    out << kernel.rows << ' ' << kernel.cols << ' ' << kernel.scale_den << '\n';
    for (int r = 0; r < kernel.rows; ++r) {
        for (int c = 0; c < kernel.cols; ++c) {
            if (c) out << ' ';
            out << kernel.weights[static_cast<std::size_t>(r) * kernel.cols + c];
        }
        out << '\n';
    }
}

inline constexpr std::string_view kProgramMagic = "# freqbar-program v1";
inline constexpr std::string_view kProgramColumns = "index,weight,state,freq_hz,g_ms,phase_rad";

inline void save_program(const CrossbarProgram& program, std::ostream& out) {
    out << kProgramMagic << '\n' << kProgramColumns << '\n';
    char buf[256];
    for (const auto& c : program.cells) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%s,%.17g,%.17g,%.17g\n", c.index, c.weight,
                      std::string(to_string(c.state)).c_str(), c.freq_hz, c.g_ms, c.phase_rad);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "g_unit_ms=%.17g\nf_min_hz=%.17g\npolicy=%s\nv_lo=%.17g\nv_hi=%.17g\n",
                  program.g_unit_ms, program.f_min_hz, std::string(to_string(program.policy)).c_str(),
                  program.law.v_lo, program.law.v_hi);
    out << buf;
    out << "kernel_rows=" << program.kernel_rows << '\n'
        << "kernel_cols=" << program.kernel_cols << '\n'
        << "scale_den=" << program.scale_den << '\n';
}

inline void save_program(const CrossbarProgram& program, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("compiler", "cannot write program file: " + path);
    save_program(program, out);
}

[[nodiscard]] inline CrossbarProgram parse_program(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };

    if (!next_line() || line != kProgramMagic)
        throw ParseError("compiler", "missing program header '" + std::string(kProgramMagic) + "'", 1);
    if (!next_line() || line != kProgramColumns)
        throw ParseError("compiler", "missing column header '" + std::string(kProgramColumns) + "'", 2);

    CrossbarProgram program;
    bool have_g_unit = false, have_f_min = false, have_policy = false, have_v_lo = false, have_v_hi = false;
    while (next_line()) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq != std::string::npos && line.find(',') == std::string::npos) {
            const std::string key = line.substr(0, eq);
            const std::string value = line.substr(eq + 1);
            double d = 0.0;
            if (key == "policy") {
                program.policy = parse_policy(value);
                have_policy = true;
                continue;
            }
            if (key == "kernel_rows" || key == "kernel_cols" || key == "scale_den") {
                int v = 0;
                const char* b = value.data();
                auto [ptr, ec] = std::from_chars(b, b + value.size(), v);
                if (ec != std::errc{} || ptr != b + value.size())
                    throw ParseError("compiler", "malformed trailer '" + line + "'", line_no);
                (key == "kernel_rows" ? program.kernel_rows
                                      : key == "kernel_cols" ? program.kernel_cols : program.scale_den) = v;
                continue;
            }
            if (!detail::parse_double_field(value, d))
                throw ParseError("compiler", "malformed trailer '" + line + "'", line_no);
            if (key == "g_unit_ms") program.g_unit_ms = d, have_g_unit = true;
            else if (key == "f_min_hz") program.f_min_hz = d, have_f_min = true;
            else if (key == "v_lo") program.law.v_lo = d, have_v_lo = true;
            else if (key == "v_hi") program.law.v_hi = d, have_v_hi = true;
            else
                throw ParseError("compiler", "unknown trailer key '" + key + "'", line_no);
            continue;
        }

        ProgramCell cell;
        std::istringstream fields(line);
        std::string tok;
        auto take = [&]() {
            if (!std::getline(fields, tok, ','))
                throw ParseError("compiler", "malformed program row '" + line + "'", line_no);
            return tok;
        };
        try {
            cell.index = std::stoi(take());
            cell.weight = std::stoi(take());
        } catch (const std::exception&) {
            throw ParseError("compiler", "malformed program row '" + line + "'", line_no);
        }
        const std::string state = take();
        if (state == "on") cell.state = DeviceState::On;
        else if (state == "off") cell.state = DeviceState::Off;
        else
            throw ParseError("compiler", "unknown device state '" + state + "'", line_no);
        if (!detail::parse_double_field(take(), cell.freq_hz) || !detail::parse_double_field(take(), cell.g_ms))
            throw ParseError("compiler", "malformed program row '" + line + "'", line_no);
        if (!detail::parse_double_field(take(), cell.phase_rad))
            throw ParseError("compiler", "malformed program row '" + line + "'", line_no);
        program.cells.push_back(cell);
    }

    if (program.cells.empty()) throw ParseError("compiler", "program has no cells", line_no);
    if (!(have_g_unit && have_f_min && have_policy && have_v_lo && have_v_hi))
        throw ParseError("compiler", "program trailer incomplete", line_no);
    return program;
}

[[nodiscard]] inline CrossbarProgram load_program(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("compiler", "cannot open program file: " + path);
    return parse_program(in);
}

}  // namespace freqbar
