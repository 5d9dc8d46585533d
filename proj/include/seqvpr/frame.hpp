#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "seqvpr/descriptor.hpp"
#include "seqvpr/errors.hpp"

namespace seqvpr {

/// 8-bit grayscale image, row-major.
struct Frame {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
    std::uint8_t& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }

    friend bool operator==(const Frame&, const Frame&) = default;
};

/// Edge length every frame is reduced to before description.
inline constexpr std::size_t kFrameEdge = 64;

/// Cell grids used for descriptor extraction, finest first comparison order.
inline constexpr std::array<std::uint32_t, 4> kGridLevels = {2, 3, 4, 5};

constexpr std::uint32_t descriptor_bit_count() {
    std::uint32_t pairs = 0;
    for (std::uint32_t g : kGridLevels) {
        const std::uint32_t cells = g * g;
        pairs += cells * (cells - 1) / 2;
    }
    return 3 * pairs; // intensity + horizontal + vertical gradient comparison per pair
}

/// 1386 = 3 * (6 + 36 + 120 + 300) for the 2/3/4/5 grids.
inline constexpr std::uint32_t kDescriptorBits = descriptor_bit_count();

/// BT.601 luma, rounded half-up. Used when ingesting color images.
inline std::uint8_t luma601(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const std::uint32_t weighted = 299u * r + 587u * g + 114u * b;
    return static_cast<std::uint8_t>((weighted + 500u) / 1000u);
}

/// Area-averaging downscale to 64x64. Each output pixel is the mean of its
/// source box (source pixel (x, y) belongs to output (x*64/W, y*64/H)),
/// rounded half-up. Frames already at 64x64 pass through unchanged.
inline Frame preprocess(const Frame& frame) {
    if (frame.width < kFrameEdge || frame.height < kFrameEdge) {
        throw InputTooSmall("frame must be at least 64x64 pixels");
    }
    if (frame.width == kFrameEdge && frame.height == kFrameEdge) {
        return frame;
    }

    std::array<std::uint64_t, kFrameEdge * kFrameEdge> sums{};
    std::array<std::uint64_t, kFrameEdge * kFrameEdge> counts{};
    for (std::size_t y = 0; y < frame.height; ++y) {
        const std::size_t oy = y * kFrameEdge / frame.height;
        for (std::size_t x = 0; x < frame.width; ++x) {
            const std::size_t ox = x * kFrameEdge / frame.width;
            sums[oy * kFrameEdge + ox] += frame.at(x, y);
            counts[oy * kFrameEdge + ox] += 1;
        }
    }

    Frame out;
    out.width = kFrameEdge;
    out.height = kFrameEdge;
    out.pixels.resize(kFrameEdge * kFrameEdge);
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        out.pixels[i] = static_cast<std::uint8_t>((2 * sums[i] + counts[i]) / (2 * counts[i]));
    }
    return out;
}

/// Extract the global binary descriptor of a 64x64 frame.
///
/// The frame is partitioned by each grid in kGridLevels (pixel (x, y) falls in
/// cell (x*g/64, y*g/64)). Per cell we accumulate the mean intensity and the
/// mean forward differences in x and y (differences at the last column/row are
/// zero). For every cell pair (a, b) with a before b in row-major order the
/// descriptor gets three bits: mean_a > mean_b for intensity, gx and gy.
/// Ties compare as 0, so a constant frame maps to the all-zero descriptor.
/// Comparisons of means are done in exact integer arithmetic
/// (sum_a * count_b > sum_b * count_a).
inline GlobalDescriptor describe(const Frame& frame) {
    if (frame.width != kFrameEdge || frame.height != kFrameEdge) {
        throw WrongSize("descriptor extraction expects a 64x64 frame");
    }

    GlobalDescriptor descriptor(kDescriptorBits);
    std::uint32_t bit = 0;
    for (const std::uint32_t g : kGridLevels) {
        const std::uint32_t cells = g * g;
        std::array<std::int64_t, 25> isum{};
        std::array<std::int64_t, 25> gxsum{};
        std::array<std::int64_t, 25> gysum{};
        std::array<std::int64_t, 25> count{};

        for (std::size_t y = 0; y < kFrameEdge; ++y) {
            const std::uint32_t cy = static_cast<std::uint32_t>(y * g / kFrameEdge);
            for (std::size_t x = 0; x < kFrameEdge; ++x) {
                const std::uint32_t cell = cy * g + static_cast<std::uint32_t>(x * g / kFrameEdge);
                const std::int64_t value = frame.at(x, y);
                isum[cell] += value;
                if (x + 1 < kFrameEdge) {
                    gxsum[cell] += frame.at(x + 1, y) - value;
                }
                if (y + 1 < kFrameEdge) {
                    gysum[cell] += frame.at(x, y + 1) - value;
                }
                count[cell] += 1;
            }
        }

        for (std::uint32_t a = 0; a < cells; ++a) {
            for (std::uint32_t b = a + 1; b < cells; ++b) {
                descriptor.set_bit(bit++, isum[a] * count[b] > isum[b] * count[a]);
                descriptor.set_bit(bit++, gxsum[a] * count[b] > gxsum[b] * count[a]);
                descriptor.set_bit(bit++, gysum[a] * count[b] > gysum[b] * count[a]);
            }
        }
    }
    return descriptor;
}

} // namespace seqvpr
