#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "seqvpr/descriptor.hpp"
#include "seqvpr/errors.hpp"
#include "seqvpr/frame.hpp"
#include "seqvpr/pgm.hpp"

namespace seqvpr {

/// One named, ordered descriptor sequence with an optional per-segment
/// recognition threshold (normalized distance in [0, 1]).
struct TrainSegment {
    std::string name;
    std::vector<GlobalDescriptor> descriptors;
    std::optional<double> threshold;

    std::size_t size() const { return descriptors.size(); }

    friend bool operator==(const TrainSegment&, const TrainSegment&) = default;
};

struct SequenceDatabase {
    std::uint32_t descriptor_bits = kDescriptorBits;
    std::vector<TrainSegment> segments;

    const TrainSegment* find(const std::string& name) const {
        for (const auto& segment : segments) {
            if (segment.name == name) return &segment;
        }
        return nullptr;
    }

    friend bool operator==(const SequenceDatabase&, const SequenceDatabase&) = default;
};

/// Builds a segment from every regular file in a directory, processed in
/// strict lexicographic filename order. Any unreadable file aborts the whole
/// ingestion; no partial segments are produced.
inline TrainSegment ingest_directory(const std::filesystem::path& dir,
                                     const std::string& segment_name) {
    std::vector<std::filesystem::path> files;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (entry.is_regular_file()) {
            files.push_back(entry.path());
        }
    }
    if (ec) {
        throw EmptyDirectory(dir.string() + ": " + ec.message());
    }
    if (files.empty()) {
        throw EmptyDirectory(dir.string() + ": no image files");
    }
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });

    TrainSegment segment;
    segment.name = segment_name;
    segment.descriptors.reserve(files.size());
    for (const auto& file : files) {
        try {
            segment.descriptors.push_back(describe(preprocess(read_image(file))));
        } catch (const UnreadableImage&) {
            throw;
        } catch (const Error& err) {
            throw UnreadableImage(file.string() + ": " + err.what());
        }
    }
    return segment;
}

namespace detail {

inline constexpr char kDbMagic[4] = {'F', 'A', 'B', 'L'};
inline constexpr std::uint16_t kDbVersion = 1;

inline void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>(v >> 8));
}

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct Cursor {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > size) {
            throw CorruptLength("database file shorter than its declared contents");
        }
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(data[pos] | (data[pos + 1] << 8));
        pos += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
    const std::uint8_t* bytes(std::size_t n) {
        need(n);
        const std::uint8_t* p = data + pos;
        pos += n;
        return p;
    }
};

} // namespace detail

/// Serializes a database to its binary wire form.
///
/// Layout (little-endian): magic "FABL", version u16, descriptor_bits u32,
/// segment_count u32; per segment: name_len u16 + UTF-8 name, frame_count u32,
/// threshold f64 (NaN encodes unset), then frame_count * ceil(bits/8)
/// descriptor bytes with bit 0 in the least significant bit of byte 0.
inline std::string serialize(const SequenceDatabase& db) {
    std::string out;
    out.append(detail::kDbMagic, 4);
    detail::put_u16(out, detail::kDbVersion);
    detail::put_u32(out, db.descriptor_bits);
    detail::put_u32(out, static_cast<std::uint32_t>(db.segments.size()));
    for (const auto& segment : db.segments) {
        if (segment.name.size() > 0xFFFF) {
            throw Error("segment name longer than 65535 bytes: " + segment.name);
        }
        detail::put_u16(out, static_cast<std::uint16_t>(segment.name.size()));
        out.append(segment.name);
        detail::put_u32(out, static_cast<std::uint32_t>(segment.descriptors.size()));
        const double threshold = segment.threshold.value_or(std::numeric_limits<double>::quiet_NaN());
        detail::put_u64(out, std::bit_cast<std::uint64_t>(threshold));
        for (const auto& descriptor : segment.descriptors) {
            if (descriptor.bit_count() != db.descriptor_bits) {
                throw WidthMismatch("segment '" + segment.name +
                                    "' holds descriptors of a different width than the database");
            }
            const auto bytes = descriptor.to_bytes();
            out.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
        }
    }
    return out;
}

inline SequenceDatabase deserialize(const std::uint8_t* data, std::size_t size) {
    detail::Cursor cur{data, size};

    const std::uint8_t* magic = cur.bytes(4);
    if (std::memcmp(magic, detail::kDbMagic, 4) != 0) {
        throw BadMagic("not a sequence database file");
    }
    const std::uint16_t version = cur.u16();
    if (version != detail::kDbVersion) {
        throw UnsupportedVersion("unsupported database version " + std::to_string(version));
    }

    SequenceDatabase db;
    db.descriptor_bits = cur.u32();
    if (db.descriptor_bits == 0) {
        throw CorruptLength("descriptor width of zero");
    }
    const std::uint32_t segment_count = cur.u32();
    const std::size_t bytes_per_descriptor = (db.descriptor_bits + 7) / 8;

    std::unordered_set<std::string> seen_names;
    db.segments.reserve(segment_count);
    for (std::uint32_t s = 0; s < segment_count; ++s) {
        TrainSegment segment;
        const std::uint16_t name_len = cur.u16();
        if (name_len == 0) {
            throw CorruptLength("segment with empty name");
        }
        const std::uint8_t* name = cur.bytes(name_len);
        segment.name.assign(reinterpret_cast<const char*>(name), name_len);
        if (!seen_names.insert(segment.name).second) {
            throw CorruptLength("duplicate segment name '" + segment.name + "'");
        }
        const std::uint32_t frame_count = cur.u32();
        const double threshold = std::bit_cast<double>(cur.u64());
        if (!std::isnan(threshold)) {
            if (threshold < 0.0 || threshold > 1.0) {
                throw CorruptLength("threshold outside [0, 1]");
            }
            segment.threshold = threshold;
        }
        segment.descriptors.reserve(frame_count);
        for (std::uint32_t f = 0; f < frame_count; ++f) {
            const std::uint8_t* raw = cur.bytes(bytes_per_descriptor);
            segment.descriptors.push_back(
                GlobalDescriptor::from_bytes(raw, bytes_per_descriptor, db.descriptor_bits));
        }
        db.segments.push_back(std::move(segment));
    }
    if (cur.pos != size) {
        throw CorruptLength("trailing bytes after declared contents");
    }
    return db;
}

inline void save(const SequenceDatabase& db, const std::filesystem::path& path) {
    const std::string blob = serialize(db);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!out) {
        throw Error("failed to write " + path.string());
    }
}

inline SequenceDatabase load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(reinterpret_cast<const std::uint8_t*>(blob.data()), blob.size());
}

} // namespace seqvpr
