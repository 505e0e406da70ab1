#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "freqbar/errors.hpp"

namespace freqbar {

/// 8-bit image, row-major with interleaved channels (1 = gray, 3 = RGB).
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;

    [[nodiscard]] static Image blank(int width, int height, int channels, std::uint8_t fill = 0) {
        Image img;
        img.width = width;
        img.height = height;
        img.channels = channels;
        img.pixels.assign(static_cast<std::size_t>(width) * height * channels, fill);
        img.validate();
        return img;
    }

    void validate() const {
        if (width < 1 || height < 1) throw DimensionError("pipeline", "image dimensions must be positive");
        if (channels != 1 && channels != 3) throw DimensionError("pipeline", "image must have 1 or 3 channels");
        if (pixels.size() != static_cast<std::size_t>(width) * height * channels)
            throw DimensionError("pipeline", "pixel count does not match image dimensions");
    }

    [[nodiscard]] std::uint8_t at(int x, int y, int c = 0) const noexcept {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    std::uint8_t& at(int x, int y, int c = 0) noexcept {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    bool operator==(const Image& other) const = default;
};

namespace detail {

inline int pnm_read_token(std::istream& in) {
    // Whitespace and '#' comments are allowed between header tokens.
    int ch = in.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = in.get();
        } else if (!std::isspace(ch)) {
            break;
        }
        ch = in.get();
    }
    if (ch == EOF) throw ParseError("pipeline", "truncated image header");
    int value = 0;
    bool any = false;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        any = true;
        ch = in.get();
    }
    if (!any) throw ParseError("pipeline", "malformed image header");
    if (ch != EOF) in.unget();
    return value;
}

}  // namespace detail

/// Read a binary PGM (P5) or PPM (P6), maxval 255.
[[nodiscard]] inline Image parse_pnm(std::istream& in) {
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
        throw ParseError("pipeline", "not a binary PGM (P5) or PPM (P6) file");
    Image img;
    img.channels = magic[1] == '5' ? 1 : 3;
    img.width = detail::pnm_read_token(in);
    img.height = detail::pnm_read_token(in);
    const int maxval = detail::pnm_read_token(in);
    if (maxval != 255) throw ParseError("pipeline", "only maxval 255 is supported");
    in.get();  // single whitespace byte before the raster
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height * img.channels);
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (static_cast<std::size_t>(in.gcount()) != img.pixels.size())
        throw ParseError("pipeline", "truncated image raster");
    img.validate();
    return img;
}

[[nodiscard]] inline Image load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("pipeline", "cannot open image: " + path);
    return parse_pnm(in);
}

/// Write the canonical binary form: `P5|P6\n<w> <h>\n255\n<raster>`.
inline void write_pnm(const Image& img, std::ostream& out) {
    img.validate();
    out << (img.channels == 1 ? "P5" : "P6") << '\n' << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

inline void save_image(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("pipeline", "cannot write image: " + path);
    write_pnm(img, out);
}

}  // namespace freqbar
