#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "freqbar/errors.hpp"
#include "freqbar/rng.hpp"

namespace freqbar {

/// Binary device state. The devices under study reliably hold two states;
/// every analog weight beyond that comes from the input frequency.
enum class DeviceState : std::uint8_t { Off = 0, On = 1 };

[[nodiscard]] inline std::string_view to_string(DeviceState s) noexcept {
    return s == DeviceState::On ? "on" : "off";
}

/// Multiplicative read-variation model. relative_sigma = 0 means bit-exact
/// determinism regardless of seed.
struct NoiseModel {
    double relative_sigma = 0.0;
    std::uint64_t seed = 0;
};

struct ConductanceEntry {
    double freq_hz;
    double g_off_ms;
    double g_on_ms;
};

namespace detail {

inline const char* skip_ws(const char* p, const char* end) {
    while (p != end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    return p;
}

inline bool parse_double_field(std::string_view field, double& out) {
    const char* b = skip_ws(field.data(), field.data() + field.size());
    const char* e = field.data() + field.size();
    while (e != b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
    if (b == e) return false;
    auto [ptr, ec] = std::from_chars(b, e, out);
    return ec == std::errc{} && ptr == e;
}

}  // namespace detail

/// Measured frequency -> conductance map of a binary memristive device, one
/// branch per state. Entries are kept sorted by ascending frequency.
///
/// Lookups between grid points interpolate linearly in log10(frequency): the
/// measured grids span several decades, and linear-in-f interpolation would be
/// dominated by the top decade. No extrapolation is performed on either side.
///
/// Immutable after construction; safe to share across concurrent readers.
class ConductanceTable {
public:
    ConductanceTable(std::vector<ConductanceEntry> entries, std::string source_label)
        : entries_(std::move(entries)), source_label_(std::move(source_label)) {
        canonicalize_and_validate();
    }

    /// Measured GeSeSn-W device data, averaged over five read trials per
    /// frequency. This is the default table used everywhere.
    static const ConductanceTable& builtin() {
        static const ConductanceTable table(
            {
                {0.5, 1.15, 11.4},
                {1.0, 1.32, 10.8},
                {10.0, 1.4, 8.4},
                {100.0, 2.26, 7.6},
                {500.0, 2.2, 5.97},
                {750.0, 1.56, 4.2},
                {1000.0, 1.49, 3.13},
                {10000.0, 1.71, 2.1},
            },
            "GeSeSn-W (built-in)");
        return table;
    }

    /// Load a table from CSV: header `freq_hz,g_off_ms,g_on_ms`, one grid
    /// point per row. Rejects malformed rows, duplicate frequencies and a
    /// non-monotone ON branch, reporting the offending row number.
    static ConductanceTable load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("device", "cannot open conductance table: " + path);
        return parse_csv(in, path);
    }

    static ConductanceTable parse_csv(std::istream& in, const std::string& label) {
        std::string line;
        std::size_t line_no = 0;
        if (!std::getline(in, line)) throw ParseError("device", "empty table file", 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line != "freq_hz,g_off_ms,g_on_ms")
            throw ParseError("device", "expected header 'freq_hz,g_off_ms,g_on_ms'", line_no);

        std::vector<ConductanceEntry> entries;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            ConductanceEntry e{};
            std::string_view sv(line);
            const auto c1 = sv.find(',');
            const auto c2 = c1 == std::string_view::npos ? c1 : sv.find(',', c1 + 1);
            if (c2 == std::string_view::npos || sv.find(',', c2 + 1) != std::string_view::npos ||
                !detail::parse_double_field(sv.substr(0, c1), e.freq_hz) ||
                !detail::parse_double_field(sv.substr(c1 + 1, c2 - c1 - 1), e.g_off_ms) ||
                !detail::parse_double_field(sv.substr(c2 + 1), e.g_on_ms))
                throw ParseError("device", "malformed row '" + line + "'", line_no);
            entries.push_back(e);
        }
        if (entries.size() < 2) throw ParseError("device", "table needs at least 2 rows", line_no);
        return ConductanceTable(std::move(entries), label);
    }

    [[nodiscard]] const std::vector<ConductanceEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] const std::string& source_label() const noexcept { return source_label_; }
    [[nodiscard]] double min_freq_hz() const noexcept { return entries_.front().freq_hz; }
    [[nodiscard]] double max_freq_hz() const noexcept { return entries_.back().freq_hz; }

    /// Smallest/largest conductance reachable on the ON branch. The branch is
    /// strictly decreasing in frequency, so these sit at the grid ends.
    [[nodiscard]] double min_g_on_ms() const noexcept { return entries_.back().g_on_ms; }
    [[nodiscard]] double max_g_on_ms() const noexcept { return entries_.front().g_on_ms; }

    /// Conductance of the requested branch at frequency f. Grid frequencies
    /// return the tabulated value bit-for-bit; in between, the value is
    /// interpolated linearly in log10(f). No extrapolation.
    [[nodiscard]] double conductance_at(DeviceState state, double freq_hz) const {
        if (!(freq_hz >= min_freq_hz() && freq_hz <= max_freq_hz()))
            throw RangeError("device",
                             "frequency " + std::to_string(freq_hz) + " Hz outside table range [" +
                                 std::to_string(min_freq_hz()) + ", " + std::to_string(max_freq_hz()) + "] Hz",
                             min_freq_hz(), max_freq_hz());
        const auto it = std::lower_bound(
            entries_.begin(), entries_.end(), freq_hz,
            [](const ConductanceEntry& e, double f) { return e.freq_hz < f; });
        if (it != entries_.end() && it->freq_hz == freq_hz) return branch(*it, state);
        const ConductanceEntry& hi = *it;
        const ConductanceEntry& lo = *(it - 1);
        const double t =
            (std::log10(freq_hz) - std::log10(lo.freq_hz)) / (std::log10(hi.freq_hz) - std::log10(lo.freq_hz));
        return branch(lo, state) + t * (branch(hi, state) - branch(lo, state));
    }

    /// Inverse lookup on the ON branch: the frequency whose ON conductance is
    /// g_ms. Exact grid conductances return exact grid frequencies; otherwise
    /// the log-linear segment is inverted, so a forward lookup round-trips to
    /// well within 0.1% relative. The OFF branch is non-monotone and is not
    /// invertible.
    [[nodiscard]] double frequency_for(DeviceState state, double g_ms) const {
        if (state != DeviceState::On)
            throw UnsupportedError("device", "inverse lookup is only defined on the ON branch");
        if (!(g_ms >= min_g_on_ms() && g_ms <= max_g_on_ms()))
            throw RangeError("device",
                             "conductance " + std::to_string(g_ms) + " mS outside representable ON range [" +
                                 std::to_string(min_g_on_ms()) + ", " + std::to_string(max_g_on_ms()) + "] mS",
                             min_g_on_ms(), max_g_on_ms());
        // g_on decreases with frequency, so walk segments from the slow end.
        for (std::size_t i = 0; i + 1 < entries_.size(); ++i) {
            const ConductanceEntry& lo = entries_[i];
            const ConductanceEntry& hi = entries_[i + 1];
            if (g_ms == lo.g_on_ms) return lo.freq_hz;
            if (g_ms == hi.g_on_ms) return hi.freq_hz;
            if (g_ms < lo.g_on_ms && g_ms > hi.g_on_ms) {
                const double t = (lo.g_on_ms - g_ms) / (lo.g_on_ms - hi.g_on_ms);
                const double logf = std::log10(lo.freq_hz) + t * (std::log10(hi.freq_hz) - std::log10(lo.freq_hz));
                // clamp: pow rounding must not escape the segment
                return std::clamp(std::pow(10.0, logf), lo.freq_hz, hi.freq_hz);
            }
        }
        return entries_.back().freq_hz;  // unreachable after the range check
    }

    /// One stochastic read: conductance_at(...) * (1 + eps), eps ~ N(0,
    /// relative_sigma). Deterministic under a fixed substream and draw order;
    /// sigma = 0 performs no draw at all.
    [[nodiscard]] double sample_conductance(DeviceState state, double freq_hz, const NoiseModel& noise,
                                            SubstreamRng& ctx) const {
        const double g = conductance_at(state, freq_hz);
        if (noise.relative_sigma == 0.0) return g;
        return g * (1.0 + noise.relative_sigma * ctx.gaussian());
    }

private:
    static double branch(const ConductanceEntry& e, DeviceState s) noexcept {
        return s == DeviceState::On ? e.g_on_ms : e.g_off_ms;
    }

    void canonicalize_and_validate() {
        std::vector<std::size_t> order(entries_.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
            return entries_[a].freq_hz < entries_[b].freq_hz;
        });
        std::vector<ConductanceEntry> sorted;
        sorted.reserve(entries_.size());
        for (std::size_t i : order) sorted.push_back(entries_[i]);

        for (std::size_t i = 0; i < sorted.size(); ++i) {
            const std::size_t row = order[i] + 2;  // 1-based CSV row, after the header
            if (!(sorted[i].freq_hz > 0.0))
                throw ParseError("device", "non-positive frequency", row);
            if (!(sorted[i].g_on_ms > sorted[i].g_off_ms))
                throw ParseError("device", "g_on must exceed g_off at every grid point", row);
            if (i > 0 && sorted[i].freq_hz == sorted[i - 1].freq_hz)
                throw ParseError("device", "duplicate frequency " + std::to_string(sorted[i].freq_hz), row);
            if (i > 0 && !(sorted[i].g_on_ms < sorted[i - 1].g_on_ms))
                throw ParseError("device", "ON branch must decrease strictly with frequency", row);
        }
        entries_ = std::move(sorted);
    }

    std::vector<ConductanceEntry> entries_;
    std::string source_label_;
};

/// Write a table back out in the canonical CSV format.
inline void save_table(const ConductanceTable& table, std::ostream& out) {
    out << "freq_hz,g_off_ms,g_on_ms\n";
    char buf[128];
    for (const auto& e : table.entries()) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", e.freq_hz, e.g_off_ms, e.g_on_ms);
        out << buf;
    }
}

}  // namespace freqbar
