#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "seqvpr/errors.hpp"
#include "seqvpr/frame.hpp"

namespace seqvpr {

namespace detail {

// Reads one whitespace-delimited header token, skipping '#' comment lines.
inline std::string pnm_token(std::istream& in) {
    std::string token;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c) && c != '#') {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (c == '#') in.unget();
    return token;
}

inline std::uint64_t pnm_number(std::istream& in, const std::string& file, const char* what) {
    const std::string token = pnm_token(in);
    if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
        throw UnreadableImage(file + ": bad " + what + " in header");
    }
    return std::stoull(token);
}

} // namespace detail

/// Reads a binary PGM (P5) or PPM (P6) file into a grayscale frame.
/// Color samples are converted with BT.601 luma. Only 8-bit files
/// (maxval <= 255) are accepted.
inline Frame read_image(const std::filesystem::path& path) {
    const std::string name = path.string();
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UnreadableImage(name + ": cannot open");
    }

    const std::string magic = detail::pnm_token(in);
    if (magic != "P5" && magic != "P6") {
        throw UnreadableImage(name + ": not a binary PGM/PPM file");
    }
    const std::uint64_t width = detail::pnm_number(in, name, "width");
    const std::uint64_t height = detail::pnm_number(in, name, "height");
    const std::uint64_t maxval = detail::pnm_number(in, name, "maxval");
    if (width == 0 || height == 0) {
        throw UnreadableImage(name + ": zero dimension");
    }
    if (maxval == 0 || maxval > 255) {
        throw UnreadableImage(name + ": only 8-bit images are supported");
    }
    // The single whitespace byte separating the header from the raster was
    // already consumed as the maxval token's terminator.

    const std::size_t samples = (magic == "P6") ? 3 : 1;
    std::vector<std::uint8_t> raster(width * height * samples);
    in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (static_cast<std::size_t>(in.gcount()) != raster.size()) {
        throw UnreadableImage(name + ": truncated pixel data");
    }

    Frame frame;
    frame.width = width;
    frame.height = height;
    frame.pixels.resize(width * height);
    if (samples == 1) {
        frame.pixels = std::move(raster);
    } else {
        for (std::size_t i = 0; i < frame.pixels.size(); ++i) {
            frame.pixels[i] = luma601(raster[3 * i], raster[3 * i + 1], raster[3 * i + 2]);
        }
    }
    return frame;
}

inline void write_pgm(const std::filesystem::path& path, const Frame& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()),
              static_cast<std::streamsize>(frame.pixels.size()));
    if (!out) {
        throw Error("failed to write " + path.string());
    }
}

} // namespace seqvpr
