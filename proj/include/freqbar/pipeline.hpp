#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "freqbar/compiler.hpp"
#include "freqbar/crossbar.hpp"
#include "freqbar/image.hpp"
#include "freqbar/rng.hpp"

namespace freqbar {

enum class ConvMode : std::uint8_t { Analytic, Simulated };
enum class OutputScale : std::uint8_t { KernelDen, Raw };
enum class Activation : std::uint8_t { None, Sigmoid };

/// Blend uniform 8-bit noise into an image: per pixel and channel,
/// round((1 - alpha) * p + alpha * u) with u uniform on [0, 255]. Substreams
/// are keyed by (x, y, channel), so the result is independent of traversal
/// order.
[[nodiscard]] inline Image add_noise(const Image& image, double alpha, std::uint64_t seed) {
    image.validate();
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw RangeError("pipeline", "noise blend alpha must lie in [0, 1]", 0.0, 1.0);
    if (alpha == 0.0) return image;
    Image out = image;
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            for (int c = 0; c < image.channels; ++c) {
                auto rng = SubstreamRng::keyed(seed, rng_tag::kImageNoise, static_cast<std::uint64_t>(x),
                                               static_cast<std::uint64_t>(y), static_cast<std::uint64_t>(c));
                const double u = rng.next_byte();
                const double blended = (1.0 - alpha) * image.at(x, y, c) + alpha * u;
                const long rounded = std::lround(blended);
                out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(rounded, 0L, 255L));
            }
    return out;
}

/// One 2D convolution pass through the crossbar engine.
struct ConvolutionJob {
    Image image;
    CrossbarProgram program;
    int stride = 1;
    ConvMode mode = ConvMode::Analytic;
    OutputScale output_scale = OutputScale::KernelDen;
    CrossbarConfig config;
    std::uint64_t seed = 0;
};

namespace detail {

inline void check_conv_geometry(const Image& image, const CrossbarProgram& program, int stride) {
    image.validate();
    if (program.kernel_rows < 1 || program.kernel_cols < 1 ||
        static_cast<std::size_t>(program.kernel_rows) * program.kernel_cols != program.cell_count())
        throw DimensionError("pipeline", "program does not carry a consistent kernel geometry");
    if (stride < 1) throw DimensionError("pipeline", "stride must be positive");
    if (program.kernel_cols > image.width || program.kernel_rows > image.height)
        throw DimensionError("pipeline", "kernel larger than image");
}

inline std::uint8_t scale_output(long dot, int scale_den, OutputScale scale) {
    long value = dot;
    if (scale == OutputScale::KernelDen) value = (dot + scale_den / 2) / scale_den;  // round half-up
    return static_cast<std::uint8_t>(std::clamp(value, 0L, 255L));
}

}  // namespace detail

/// Valid-region convolution (no padding): output dims are
/// ((H - k_rows)/stride + 1) x ((W - k_cols)/stride + 1). Each output pixel is
/// one crossbar MAC: encode the patch, read the peak current, decode the dot
/// product and apply the kernel-denominator scaling. Channels are processed
/// independently; per-MAC noise substreams are keyed by output coordinate.
[[nodiscard]] inline Image convolve(const ConvolutionJob& job) {
    detail::check_conv_geometry(job.image, job.program, job.stride);
    const int kr = job.program.kernel_rows;
    const int kc = job.program.kernel_cols;
    const int out_w = (job.image.width - kc) / job.stride + 1;
    const int out_h = (job.image.height - kr) / job.stride + 1;
    Image out = Image::blank(out_w, out_h, job.image.channels);

    const bool noisy = job.config.noise.relative_sigma > 0.0;
    std::vector<int> patch(job.program.cell_count());
    for (int c = 0; c < job.image.channels; ++c)
        for (int oy = 0; oy < out_h; ++oy)
            for (int ox = 0; ox < out_w; ++ox) {
                for (int ky = 0; ky < kr; ++ky)
                    for (int kx = 0; kx < kc; ++kx)
                        patch[static_cast<std::size_t>(ky) * kc + kx] =
                            job.image.at(ox * job.stride + kx, oy * job.stride + ky, c);
                const PulseSchedule schedule = encode_inputs(job.program, patch);
                SubstreamRng rng = SubstreamRng::keyed(job.seed, rng_tag::kReadNoise,
                                                       static_cast<std::uint64_t>(ox),
                                                       static_cast<std::uint64_t>(oy),
                                                       static_cast<std::uint64_t>(c));
                SubstreamRng* rng_ptr = noisy ? &rng : nullptr;
                double i_peak;
                if (job.mode == ConvMode::Analytic) {
                    i_peak = mac_analytic(job.program, schedule, job.config, rng_ptr);
                } else {
                    i_peak = mac_simulate(job.program, schedule, job.config, rng_ptr).i_peak_simulated_ma;
                }
                long dot;
                try {
                    dot = decode_dot(i_peak, job.program);
                } catch (const DecodeError& e) {
                    throw DecodeError("pipeline", std::string(e.what()) + " at pixel (" + std::to_string(ox) +
                                                      ", " + std::to_string(oy) + ") channel " + std::to_string(c));
                }
                out.at(ox, oy, c) = detail::scale_output(dot, job.program.scale_den, job.output_scale);
            }
    return out;
}

/// Pure integer convolution with the same stride/padding/rounding rules as
/// convolve. Software oracle for the crossbar path: under an ideal analytic
/// configuration the two outputs are byte-identical.
[[nodiscard]] inline Image reference_convolve(const Image& image, const Kernel& kernel, int stride = 1,
                                              OutputScale output_scale = OutputScale::KernelDen) {
    image.validate();
    kernel.validate();
    if (stride < 1) throw DimensionError("pipeline", "stride must be positive");
    if (kernel.cols > image.width || kernel.rows > image.height)
        throw DimensionError("pipeline", "kernel larger than image");
    const int out_w = (image.width - kernel.cols) / stride + 1;
    const int out_h = (image.height - kernel.rows) / stride + 1;
    Image out = Image::blank(out_w, out_h, image.channels);
    for (int c = 0; c < image.channels; ++c)
        for (int oy = 0; oy < out_h; ++oy)
            for (int ox = 0; ox < out_w; ++ox) {
                long dot = 0;
                for (int ky = 0; ky < kernel.rows; ++ky)
                    for (int kx = 0; kx < kernel.cols; ++kx)
                        dot += static_cast<long>(kernel.weights[static_cast<std::size_t>(ky) * kernel.cols + kx]) *
                               image.at(ox * stride + kx, oy * stride + ky, c);
                out.at(ox, oy, c) = detail::scale_output(dot, kernel.scale_den, output_scale);
            }
    return out;
}

/// Elementwise activation; the image pipeline runs with Activation::None.
[[nodiscard]] inline std::vector<double> apply_activation(const std::vector<double>& values, Activation kind) {
    if (kind == Activation::None) return values;
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(1.0 / (1.0 + std::exp(-v)));
    return out;
}

/// Expected vs simulated peak currents across one output row, the raw
/// material for a per-row readout comparison plot.
struct RowPeakSample {
    int col = 0;
    std::vector<double> i_analytic_ma;  // one entry per channel
    std::vector<double> i_sim_ma;
    std::vector<int> byte;  // decoded output pixel per channel
};

/// Sample every output column of output row `row`: both the Kirchhoff peak
/// and the time-stepped peak per channel, plus the decoded byte (from the
/// simulated peak, which is the measured quantity). Noise substreams match
/// convolve's, so a noisy report is consistent with the noisy image.
[[nodiscard]] inline std::vector<RowPeakSample> row_peak_report(const Image& image, const CrossbarProgram& program,
                                                                const CrossbarConfig& config, int row,
                                                                std::uint64_t seed,
                                                                OutputScale output_scale = OutputScale::KernelDen) {
    detail::check_conv_geometry(image, program, 1);
    const int kr = program.kernel_rows;
    const int kc = program.kernel_cols;
    const int out_w = image.width - kc + 1;
    const int out_h = image.height - kr + 1;
    if (row < 0 || row >= out_h)
        throw RangeError("pipeline", "row " + std::to_string(row) + " outside output height " + std::to_string(out_h),
                         0.0, static_cast<double>(out_h - 1));

    const bool noisy = config.noise.relative_sigma > 0.0;
    std::vector<RowPeakSample> samples;
    samples.reserve(static_cast<std::size_t>(out_w));
    std::vector<int> patch(program.cell_count());
    for (int ox = 0; ox < out_w; ++ox) {
        RowPeakSample s;
        s.col = ox;
        for (int c = 0; c < image.channels; ++c) {
            for (int ky = 0; ky < kr; ++ky)
                for (int kx = 0; kx < kc; ++kx)
                    patch[static_cast<std::size_t>(ky) * kc + kx] = image.at(ox + kx, row + ky, c);
            const PulseSchedule schedule = encode_inputs(program, patch);
            SubstreamRng rng = SubstreamRng::keyed(seed, rng_tag::kReadNoise, static_cast<std::uint64_t>(ox),
                                                   static_cast<std::uint64_t>(row), static_cast<std::uint64_t>(c));
            const SimResult result = mac_simulate(program, schedule, config, noisy ? &rng : nullptr);
            s.i_analytic_ma.push_back(result.i_peak_analytic_ma);
            s.i_sim_ma.push_back(result.i_peak_simulated_ma);
            const long dot = decode_dot(result.i_peak_simulated_ma, program);
            s.byte.push_back(detail::scale_output(dot, program.scale_den, output_scale));
        }
        samples.push_back(std::move(s));
    }
    return samples;
}

/// Row-peak CSV: `col` then `i_analytic_ma_cK,i_sim_ma_cK,byte_cK` per channel.
inline void write_row_peak_csv(const std::vector<RowPeakSample>& samples, std::ostream& out) {
    if (samples.empty()) return;
    const std::size_t channels = samples.front().byte.size();
    out << "col";
    for (std::size_t c = 0; c < channels; ++c)
        out << ",i_analytic_ma_c" << c << ",i_sim_ma_c" << c << ",byte_c" << c;
    out << '\n';
    char buf[64];
    for (const auto& s : samples) {
        out << s.col;
        for (std::size_t c = 0; c < channels; ++c) {
            std::snprintf(buf, sizeof(buf), ",%.10g,%.10g,%d", s.i_analytic_ma[c], s.i_sim_ma[c], s.byte[c]);
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace freqbar
