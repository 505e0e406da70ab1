#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "freqbar/compiler.hpp"

using namespace freqbar;
using Catch::Approx;

namespace {

const Kernel kGaussian{3, 3, {1, 2, 1, 2, 4, 2, 1, 2, 1}, 16};

CrossbarProgram compile_gaussian(Policy policy = Policy::Energy) {
    CompileOptions options;
    options.policy = policy;
    return compile(kGaussian, ConductanceTable::builtin(), AmplitudeLaw{}, options);
}

}  // namespace

TEST_CASE("Gaussian blur kernel lowers to the measured grid exactly", "[compiler]") {
    const auto program = compile_gaussian();
    REQUIRE(program.cell_count() == 9);
    CHECK(program.g_unit_ms == 2.1);
    CHECK(program.f_min_hz == 10.0);
    CHECK(program.kernel_rows == 3);
    CHECK(program.kernel_cols == 3);
    CHECK(program.scale_den == 16);

    const double expect_f[] = {10000, 750, 10000, 750, 10, 750, 10000, 750, 10000};
    const double expect_g[] = {2.1, 4.2, 2.1, 4.2, 8.4, 4.2, 2.1, 4.2, 2.1};
    for (int i = 0; i < 9; ++i) {
        CHECK(program.cells[i].freq_hz == expect_f[i]);
        CHECK(program.cells[i].g_ms == expect_g[i]);
        CHECK(program.cells[i].state == DeviceState::On);
        CHECK(program.cells[i].phase_rad == Approx(phase_shift(expect_f[i], 10.0)).epsilon(1e-15));
    }
}

TEST_CASE("single-cell kernel compiles to the fastest grid point", "[compiler]") {
    const auto program = compile(Kernel{1, 1, {1}, 1}, ConductanceTable::builtin(), AmplitudeLaw{});
    REQUIRE(program.cell_count() == 1);
    CHECK(program.cells[0].freq_hz == 10000.0);
    CHECK(program.cells[0].g_ms == 2.1);
    CHECK(program.cells[0].phase_rad == 0.0);
    CHECK(program.f_min_hz == 10000.0);
}

TEST_CASE("interpolated weights land between grid points and round trip", "[compiler]") {
    const auto program = compile(Kernel{1, 1, {3}, 1}, ConductanceTable::builtin(), AmplitudeLaw{});
    const auto& cell = program.cells[0];
    // 3 * 2.1 mS falls between the (100 Hz, 7.60) and (500 Hz, 5.97) points.
    CHECK(cell.freq_hz == Approx(360.96138109924783).epsilon(1e-9));
    CHECK(cell.g_ms == Approx(3 * 2.1).epsilon(1e-3));
    const auto report = quantization_report(program);
    CHECK(report.max_rel_error <= 1e-3);
}

TEST_CASE("weights outside the representable range are rejected", "[compiler]") {
    const auto& table = ConductanceTable::builtin();
    CHECK_NOTHROW(compile(Kernel{1, 1, {5}, 1}, table, AmplitudeLaw{}));
    try {
        (void)compile(Kernel{1, 1, {6}, 1}, table, AmplitudeLaw{});
        FAIL("expected RangeError");
    } catch (const RangeError& e) {
        CHECK(e.lo() == 1.0);
        CHECK(e.hi() == 5.0);
        CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("1..5"));
    }
    CHECK_THROWS_AS(compile(Kernel{1, 1, {0}, 1}, table, AmplitudeLaw{}), UnsupportedError);
    CHECK_THROWS_AS(compile(Kernel{1, 2, {1, -3}, 1}, table, AmplitudeLaw{}), UnsupportedError);
}

TEST_CASE("conductance vector is the weight vector scaled by g_unit", "[compiler][property]") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> weight(1, 5);
    std::uniform_int_distribution<int> size(1, 9);
    for (int iter = 0; iter < 100; ++iter) {
        Kernel k{size(rng), 1, {}, 1};
        for (int i = 0; i < k.rows; ++i) k.weights.push_back(weight(rng));
        const auto program = compile(k, ConductanceTable::builtin(), AmplitudeLaw{});
        for (std::size_t i = 0; i < program.cell_count(); ++i)
            CHECK(program.cells[i].g_ms ==
                  Approx(k.weights[i] * program.g_unit_ms).epsilon(kQuantizationTolerance));
    }
}

TEST_CASE("amplitude law maps pixels affinely", "[compiler]") {
    const AmplitudeLaw law;
    CHECK(law.amplitude_for(255) == 0.66);
    CHECK(law.amplitude_for(0) == 0.15);
    CHECK(law.amplitude_for(127) == Approx(0.404).epsilon(1e-12));
    CHECK_THROWS_AS(law.amplitude_for(-1), RangeError);
    CHECK_THROWS_AS(law.amplitude_for(256), RangeError);
    const AmplitudeLaw inverted{0.66, 0.15};
    CHECK_THROWS_AS(inverted.validate(), ScheduleError);
    const AmplitudeLaw over_ceiling{0.15, 0.80};
    CHECK_THROWS_AS(over_ceiling.validate(), ScheduleError);
}

TEST_CASE("encode_inputs builds the program's aligned schedule", "[compiler]") {
    const auto program = compile_gaussian();
    const auto schedule = encode_inputs(program, std::vector<int>(9, 255));
    REQUIRE(schedule.rows() == 9);
    CHECK(schedule.f_min_hz == 10.0);
    for (const auto& p : schedule.pulses) CHECK(p.amplitude_v == 0.66);
    CHECK(schedule.pulses[4].freq_hz == 10.0);

    CHECK_THROWS_AS(encode_inputs(program, std::vector<int>(8, 255)), DimensionError);
    CHECK_THROWS_AS(encode_inputs(program, std::vector<int>(9, 256)), RangeError);
}

TEST_CASE("duplicative conductances resolve by policy", "[compiler]") {
    // Synthetic device: the OFF branch has a grid point at 999 Hz whose
    // conductance (2.09 mS) sits within the quantization tolerance of the
    // weight-2 target (2.1 mS), slightly below the ON solution near 999.9 Hz.
    std::istringstream csv(
        "freq_hz,g_off_ms,g_on_ms\n"
        "100,1.0,4.0\n"
        "999,2.09,2.1005\n"
        "1200,1.02,2.0\n"
        "5000,0.9,1.05\n");
    const auto table = ConductanceTable::parse_csv(csv, "synthetic");
    const Kernel k{1, 1, {2}, 1};

    CompileOptions speed{Policy::Speed, true};
    CompileOptions energy{Policy::Energy, true};
    const auto program_speed = compile(k, table, AmplitudeLaw{}, speed);
    const auto program_energy = compile(k, table, AmplitudeLaw{}, energy);

    CHECK(program_speed.cells[0].state == DeviceState::On);
    CHECK(program_speed.cells[0].freq_hz > 999.0);
    CHECK(program_energy.cells[0].state == DeviceState::Off);
    CHECK(program_energy.cells[0].freq_hz == 999.0);
    CHECK(program_energy.cells[0].g_ms == 2.09);

    // speed never picks a lower frequency than energy
    CHECK(program_speed.cells[0].freq_hz >= program_energy.cells[0].freq_hz);

    // without the opt-in, both policies stay on the ON branch
    const auto program_default = compile(k, table, AmplitudeLaw{}, CompileOptions{Policy::Energy, false});
    CHECK(program_default.cells[0].state == DeviceState::On);
}

TEST_CASE("speed never selects a lower frequency than energy", "[compiler][property]") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> weight(1, 5);
    for (int iter = 0; iter < 50; ++iter) {
        Kernel k{3, 3, {}, 16};
        for (int i = 0; i < 9; ++i) k.weights.push_back(weight(rng));
        const auto speed = compile(k, ConductanceTable::builtin(), AmplitudeLaw{}, {Policy::Speed, true});
        const auto energy = compile(k, ConductanceTable::builtin(), AmplitudeLaw{}, {Policy::Energy, true});
        for (std::size_t i = 0; i < speed.cell_count(); ++i)
            CHECK(speed.cells[i].freq_hz >= energy.cells[i].freq_hz);
    }
}

TEST_CASE("quantization report is zero on grid weights and empty on empty programs", "[compiler]") {
    const auto report = quantization_report(compile_gaussian());
    CHECK(report.max_rel_error == 0.0);
    CHECK(report.rms_rel_error == 0.0);

    const auto empty = quantization_report(CrossbarProgram{});
    CHECK(empty.per_cell_rel_error.empty());
    CHECK(empty.max_rel_error == 0.0);
}

TEST_CASE("kernel files parse and round trip", "[compiler]") {
    std::istringstream in("3 3 16\n1 2 1\n2 4 2\n1 2 1\n");
    const auto k = parse_kernel(in);
    CHECK(k.rows == 3);
    CHECK(k.scale_den == 16);
    CHECK(k.weights == kGaussian.weights);

    std::ostringstream out;
    save_kernel(k, out);
    std::istringstream back(out.str());
    CHECK(parse_kernel(back).weights == k.weights);

    std::istringstream bad_head("3 3\n1 2 1\n");
    CHECK_THROWS_AS(parse_kernel(bad_head), ParseError);
    std::istringstream short_row("2 2 4\n1 2\n3\n");
    try {
        (void)parse_kernel(short_row);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("program files round trip byte-for-byte", "[compiler]") {
    const auto program = compile_gaussian(Policy::Speed);
    std::ostringstream first;
    save_program(program, first);

    std::istringstream back(first.str());
    const auto reloaded = parse_program(back);
    REQUIRE(reloaded.cell_count() == program.cell_count());
    CHECK(reloaded.g_unit_ms == program.g_unit_ms);
    CHECK(reloaded.f_min_hz == program.f_min_hz);
    CHECK(reloaded.policy == program.policy);
    CHECK(reloaded.law.v_lo == program.law.v_lo);
    CHECK(reloaded.law.v_hi == program.law.v_hi);
    CHECK(reloaded.kernel_rows == program.kernel_rows);
    CHECK(reloaded.scale_den == program.scale_den);
    for (std::size_t i = 0; i < program.cell_count(); ++i) {
        CHECK(reloaded.cells[i].freq_hz == program.cells[i].freq_hz);
        CHECK(reloaded.cells[i].g_ms == program.cells[i].g_ms);
        CHECK(reloaded.cells[i].phase_rad == program.cells[i].phase_rad);
        CHECK(reloaded.cells[i].state == program.cells[i].state);
    }

    std::ostringstream second;
    save_program(reloaded, second);
    CHECK(first.str() == second.str());

    std::istringstream not_a_program("# something else\n");
    CHECK_THROWS_AS(parse_program(not_a_program), ParseError);
}

TEST_CASE("identical inputs compile to identical programs", "[compiler]") {
    std::ostringstream a, b;
    save_program(compile_gaussian(), a);
    save_program(compile_gaussian(), b);
    CHECK(a.str() == b.str());
}
