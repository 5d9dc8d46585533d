#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "seqvpr/errors.hpp"

namespace seqvpr {

/// Fixed-width binary code summarizing one whole frame. Bits are stored
/// LSB-first inside 64-bit words; pad bits past bit_count() stay zero so
/// Hamming distances can run over whole words.
class GlobalDescriptor {
public:
    GlobalDescriptor() = default;

    explicit GlobalDescriptor(std::uint32_t bit_count)
        : bits_(bit_count), words_((bit_count + 63) / 64, 0) {}

    static GlobalDescriptor from_bytes(const std::uint8_t* data, std::size_t size,
                                       std::uint32_t bit_count) {
        if (size != (bit_count + 7) / 8) {
            throw LengthMismatch("descriptor byte size does not match bit count");
        }
        GlobalDescriptor d(bit_count);
        for (std::size_t i = 0; i < size; ++i) {
            d.words_[i / 8] |= static_cast<std::uint64_t>(data[i]) << (8 * (i % 8));
        }
        d.mask_tail();
        return d;
    }

    std::uint32_t bit_count() const { return bits_; }
    std::size_t byte_size() const { return (bits_ + 7) / 8; }

    bool bit(std::uint32_t index) const {
        return (words_[index / 64] >> (index % 64)) & 1u;
    }

    void set_bit(std::uint32_t index, bool value = true) {
        const std::uint64_t mask = std::uint64_t{1} << (index % 64);
        if (value) {
            words_[index / 64] |= mask;
        } else {
            words_[index / 64] &= ~mask;
        }
    }

    void flip_bit(std::uint32_t index) {
        words_[index / 64] ^= std::uint64_t{1} << (index % 64);
    }

    std::vector<std::uint8_t> to_bytes() const {
        std::vector<std::uint8_t> out(byte_size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8)));
        }
        return out;
    }

    const std::vector<std::uint64_t>& words() const { return words_; }

    friend bool operator==(const GlobalDescriptor&, const GlobalDescriptor&) = default;

private:
    void mask_tail() {
        const std::uint32_t rem = bits_ % 64;
        if (rem != 0 && !words_.empty()) {
            words_.back() &= (std::uint64_t{1} << rem) - 1;
        }
    }

    std::uint32_t bits_ = 0;
    std::vector<std::uint64_t> words_;
};

namespace detail {
inline thread_local std::uint64_t hamming_calls = 0;
}

/// Exact count of hamming() invocations on this thread since the last reset.
/// The benchmark harness and the complexity tests rely on this counter.
inline std::uint64_t hamming_call_count() { return detail::hamming_calls; }
inline void reset_hamming_call_count() { detail::hamming_calls = 0; }

/// popcount(a XOR b). Throws LengthMismatch when the widths differ.
inline std::uint64_t hamming(const GlobalDescriptor& a, const GlobalDescriptor& b) {
    if (a.bit_count() != b.bit_count()) {
        throw LengthMismatch("descriptor widths differ");
    }
    ++detail::hamming_calls;
    std::uint64_t distance = 0;
    const auto& wa = a.words();
    const auto& wb = b.words();
    for (std::size_t i = 0; i < wa.size(); ++i) {
        distance += static_cast<std::uint64_t>(std::popcount(wa[i] ^ wb[i]));
    }
    return distance;
}

} // namespace seqvpr
