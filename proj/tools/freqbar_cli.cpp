// freqbar command-line front end: compile kernels to crossbar programs, blend
// test noise into images, run convolutions and single MACs, and emit cost
// reports. All randomness flows from --seed through per-purpose substreams,
// so identical flags produce byte-identical artifacts.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "freqbar/freqbar.hpp"

namespace {

freqbar::ConductanceTable load_table_or_builtin(const std::string& path) {
    if (path.empty()) return freqbar::ConductanceTable::builtin();
    return freqbar::ConductanceTable::load(path);
}

std::vector<int> parse_patch(const std::string& arg) {
    std::vector<int> patch;
    std::istringstream in(arg);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            patch.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw freqbar::ParseError("cli", "malformed patch entry '" + tok + "'");
        }
    }
    if (patch.empty()) throw freqbar::ParseError("cli", "empty patch");
    return patch;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw freqbar::IoError("cli", "cannot write output file: " + path);
    return out;
}

struct CommonArgs {
    std::string table_path;
    std::string program_path;
    std::string out_path;
    std::uint64_t seed = 0;
    double sigma = 0.0;
    double line_res = 0.0;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"freqbar: frequency-programmed binary-memristor crossbar simulator"};
    app.require_subcommand(1);
    int exit_code = 0;

    // ---- compile ----
    auto* cmd_compile = app.add_subcommand("compile", "Lower a kernel file to a crossbar program");
    std::string kernel_path, compile_table, compile_out, policy_name = "energy";
    bool off_grid = false;
    cmd_compile->add_option("--kernel", kernel_path, "kernel file (rows cols scale_den + weight rows)")->required();
    cmd_compile->add_option("--table", compile_table, "conductance table CSV (default: built-in GeSeSn-W)");
    cmd_compile->add_option("--policy", policy_name, "duplicative-frequency tie-break: speed|energy")
        ->check(CLI::IsMember({"speed", "energy"}));
    cmd_compile->add_flag("--off-grid", off_grid, "admit OFF-branch grid points as candidates");
    cmd_compile->add_option("--out", compile_out, "output program file")->required();
    cmd_compile->callback([&] {
        const auto table = load_table_or_builtin(compile_table);
        const auto kernel = freqbar::load_kernel(kernel_path);
        freqbar::CompileOptions options;
        options.policy = freqbar::parse_policy(policy_name);
        options.allow_off_grid = off_grid;
        const auto program = freqbar::compile(kernel, table, freqbar::AmplitudeLaw{}, options);
        freqbar::save_program(program, compile_out);
        const auto report = freqbar::quantization_report(program);
        std::cout << "compiled " << program.cell_count() << " cells: f_min_hz=" << program.f_min_hz
                  << " g_unit_ms=" << program.g_unit_ms << " max_rel_err=" << report.max_rel_error
                  << " rms_rel_err=" << report.rms_rel_error << '\n';
    });

    // ---- noise ----
    auto* cmd_noise = app.add_subcommand("noise", "Blend uniform 8-bit noise into an image");
    std::string noise_image, noise_out;
    double alpha = 0.5;
    std::uint64_t noise_seed = 0;
    cmd_noise->add_option("--image", noise_image, "input PGM/PPM")->required();
    cmd_noise->add_option("--alpha", alpha, "blend fraction in [0,1] (default 0.5)");
    cmd_noise->add_option("--seed", noise_seed, "noise seed");
    cmd_noise->add_option("--out", noise_out, "output image")->required();
    cmd_noise->callback([&] {
        const auto image = freqbar::load_image(noise_image);
        freqbar::save_image(freqbar::add_noise(image, alpha, noise_seed), noise_out);
    });

    // ---- convolve ----
    auto* cmd_convolve = app.add_subcommand("convolve", "Convolve an image through the crossbar engine");
    CommonArgs conv;
    std::string conv_image, mode_name = "analytic", row_csv;
    int conv_row = -1, conv_stride = 1;
    cmd_convolve->add_option("--image", conv_image, "input PGM/PPM")->required();
    cmd_convolve->add_option("--program", conv.program_path, "compiled program file")->required();
    cmd_convolve->add_option("--out", conv.out_path, "output image")->required();
    cmd_convolve->add_option("--mode", mode_name, "analytic|sim (default analytic)")
        ->check(CLI::IsMember({"analytic", "sim"}));
    cmd_convolve->add_option("--sigma", conv.sigma, "relative read-noise sigma (default 0)");
    cmd_convolve->add_option("--seed", conv.seed, "noise seed");
    cmd_convolve->add_option("--line-res", conv.line_res, "line resistance per wire segment, ohms");
    cmd_convolve->add_option("--stride", conv_stride, "convolution stride (default 1)");
    cmd_convolve->add_option("--row", conv_row, "output row for the peak-current CSV (default: none)");
    cmd_convolve->add_option("--row-csv", row_csv, "peak-current CSV path (default: <out>.row<N>.csv)");
    cmd_convolve->callback([&] {
        freqbar::ConvolutionJob job;
        job.image = freqbar::load_image(conv_image);
        job.program = freqbar::load_program(conv.program_path);
        job.stride = conv_stride;
        job.mode = mode_name == "sim" ? freqbar::ConvMode::Simulated : freqbar::ConvMode::Analytic;
        job.config.noise.relative_sigma = conv.sigma;
        job.config.noise.seed = conv.seed;
        job.config.line_resistance_ohm = conv.line_res;
        job.seed = conv.seed;
        freqbar::save_image(freqbar::convolve(job), conv.out_path);
        if (conv_row >= 0) {
            const auto samples =
                freqbar::row_peak_report(job.image, job.program, job.config, conv_row, conv.seed);
            const std::string path =
                row_csv.empty() ? conv.out_path + ".row" + std::to_string(conv_row) + ".csv" : row_csv;
            auto out = open_out(path);
            freqbar::write_row_peak_csv(samples, out);
        }
    });

    // ---- simulate ----
    auto* cmd_simulate = app.add_subcommand("simulate", "Run one MAC: analytic and time-stepped peaks");
    CommonArgs sim;
    std::string patch_arg, waveform_path;
    int divisor = 64;
    cmd_simulate->add_option("--program", sim.program_path, "compiled program file")->required();
    cmd_simulate->add_option("--patch", patch_arg, "comma-separated pixel values, one per cell")->required();
    cmd_simulate->add_option("--sigma", sim.sigma, "relative read-noise sigma (default 0)");
    cmd_simulate->add_option("--seed", sim.seed, "noise seed");
    cmd_simulate->add_option("--line-res", sim.line_res, "line resistance per wire segment, ohms");
    cmd_simulate->add_option("--divisor", divisor, "samples per fastest-pulse period (default 64)");
    cmd_simulate->add_option("--dump-waveform", waveform_path, "write the sampled waveform CSV here");
    cmd_simulate->callback([&] {
        const auto program = freqbar::load_program(sim.program_path);
        const auto schedule = freqbar::encode_inputs(program, parse_patch(patch_arg));
        freqbar::CrossbarConfig config;
        config.timestep_divisor = divisor;
        config.noise.relative_sigma = sim.sigma;
        config.noise.seed = sim.seed;
        config.line_resistance_ohm = sim.line_res;
        const auto result =
            freqbar::mac_simulate(program, schedule, config, nullptr, !waveform_path.empty());
        if (!waveform_path.empty()) {
            auto out = open_out(waveform_path);
            freqbar::write_waveform_csv(schedule, *result.waveform, out);
        }
        freqbar::write_simresult_csv(result, std::cout);
        std::cout << "decoded_dot=" << freqbar::decode_dot(result.i_peak_simulated_ma, program) << '\n';
    });

    // ---- report ----
    auto* cmd_report = app.add_subcommand("report", "Cost report against the bit-sliced baseline");
    std::string report_program, report_out;
    int n_bits = 8;
    double readout_ns = 500.0, v0_override = -1.0;
    cmd_report->add_option("--program", report_program, "compiled program file")->required();
    cmd_report->add_option("--nbits", n_bits, "baseline bit width (default 8)");
    cmd_report->add_option("--readout-ns", readout_ns, "column readout time in ns (default 500)");
    cmd_report->add_option("--v0", v0_override, "uniform amplitude override in volts (default: law v_hi)");
    cmd_report->add_option("--out", report_out, "CSV path (default: stdout)");
    cmd_report->callback([&] {
        const auto program = freqbar::load_program(report_program);
        const double v0 = v0_override >= 0.0 ? v0_override : program.law.v_hi;
        const std::vector<double> amplitudes(program.cell_count(), v0);
        const auto report = freqbar::compare_baseline(program, n_bits, amplitudes, readout_ns * 1e-9);
        if (report_out.empty()) {
            freqbar::write_cost_csv(report, std::cout);
        } else {
            auto out = open_out(report_out);
            freqbar::write_cost_csv(report, out);
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const freqbar::Error& e) {
        std::cerr << "error module=" << e.module() << ": " << e.what() << '\n';
        exit_code = 1;
    } catch (const std::exception& e) {
        std::cerr << "error module=cli: " << e.what() << '\n';
        exit_code = 1;
    }
    return exit_code;
}
