#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqvpr/descriptor.hpp"
#include "seqvpr/errors.hpp"
#include "seqvpr/sequence_store.hpp"

namespace seqvpr {

struct MatchParams {
    /// Number of consecutive frames forming one matching unit.
    std::size_t window_length = 1;
    /// Global threshold used for segments that carry none of their own.
    std::optional<double> threshold_override;
};

/// Grid of raw window distances between one training segment and a query
/// sequence. Entry (i, j) is the distance between the training window
/// starting at frame i+1 and the query window starting at frame j+1
/// (reports are 1-based). Normalization divides by the maximum possible
/// raw distance, window_length * descriptor_bits.
class DistanceMatrix {
public:
    DistanceMatrix(std::string segment_name, std::size_t rows, std::size_t cols,
                   std::size_t window_length, std::uint32_t descriptor_bits)
        : segment_name_(std::move(segment_name)),
          rows_(rows),
          cols_(cols),
          window_length_(window_length),
          descriptor_bits_(descriptor_bits),
          raw_(rows * cols, 0) {}

    const std::string& segment_name() const { return segment_name_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t window_length() const { return window_length_; }
    std::uint32_t descriptor_bits() const { return descriptor_bits_; }

    /// Largest raw distance a window pair can have.
    std::int64_t max_raw() const {
        return static_cast<std::int64_t>(window_length_) * descriptor_bits_;
    }

    std::int64_t raw_at(std::size_t row, std::size_t col) const { return raw_[row * cols_ + col]; }
    std::int64_t& raw_at(std::size_t row, std::size_t col) { return raw_[row * cols_ + col]; }

    double normalized_at(std::size_t row, std::size_t col) const {
        return static_cast<double>(raw_at(row, col)) / static_cast<double>(max_raw());
    }

    friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

private:
    std::string segment_name_;
    std::size_t rows_;
    std::size_t cols_;
    std::size_t window_length_;
    std::uint32_t descriptor_bits_;
    std::vector<std::int64_t> raw_;
};

/// One sub-threshold window pair. Indices are 1-based window starts.
struct Recognition {
    std::string segment_name;
    std::int64_t train_index = 0;
    std::int64_t query_index = 0;
    std::int64_t raw_distance = 0;
    double normalized_distance = 0.0;

    friend bool operator==(const Recognition&, const Recognition&) = default;
};

namespace detail {

inline std::uint32_t checked_width(const std::vector<GlobalDescriptor>& descriptors,
                                   const char* what) {
    if (descriptors.empty()) {
        throw WindowTooLong(std::string(what) + " sequence is empty");
    }
    const std::uint32_t width = descriptors.front().bit_count();
    for (const auto& d : descriptors) {
        if (d.bit_count() != width) {
            throw WidthMismatch(std::string(what) + " sequence mixes descriptor widths");
        }
    }
    return width;
}

inline void validate_match(const TrainSegment& segment,
                           const std::vector<GlobalDescriptor>& query,
                           std::size_t window_length) {
    if (window_length < 1) {
        throw Error("window length must be at least 1");
    }
    const std::uint32_t train_width = checked_width(segment.descriptors, "training");
    const std::uint32_t query_width = checked_width(query, "query");
    if (train_width != query_width) {
        throw WidthMismatch("query descriptor width " + std::to_string(query_width) +
                            " does not match training width " + std::to_string(train_width));
    }
    if (window_length > segment.size()) {
        throw WindowTooLong("window of " + std::to_string(window_length) +
                            " frames exceeds segment '" + segment.name + "' (" +
                            std::to_string(segment.size()) + " frames)");
    }
    if (window_length > query.size()) {
        throw WindowTooLong("window of " + std::to_string(window_length) +
                            " frames exceeds the query (" + std::to_string(query.size()) +
                            " frames)");
    }
}

/// Rolling matcher for one training segment.
///
/// Every pushed query descriptor is compared against all n training
/// descriptors exactly once; the resulting row lives in a ring buffer of the
/// last window_length + 1 frames. Finished columns are assembled purely from
/// cached rows: the first row of a column is a direct window sum, interior
/// entries follow the rolling update
///   d(i+1, j+1) = d(i, j) + h(train[i+cl], query[j+cl]) - h(train[i], query[j])
/// over the previous column. Distances are exact integers, so the output is
/// bit-identical to the exhaustive matcher while the hamming() cost per
/// segment is exactly n per push, independent of the window length.
class SegmentMatcher {
public:
    SegmentMatcher(const TrainSegment& segment, std::size_t window_length)
        : segment_(&segment),
          window_(window_length),
          rows_(segment.size() - window_length + 1),
          ring_(window_length + 1, std::vector<std::uint32_t>(segment.size())),
          prev_(rows_, 0),
          scratch_(rows_, 0) {}

    std::size_t rows() const { return rows_; }
    std::uint64_t frames_seen() const { return frame_; }
    const std::string& segment_name() const { return segment_->name; }

    /// Last finished column, valid once frames_seen() >= window_length.
    const std::vector<std::int64_t>& column() const { return prev_; }

    /// Consumes one query descriptor. Returns true when a column was
    /// finished (query window starting at frame_ - window_length + 1).
    bool push(const GlobalDescriptor& query) {
        const std::uint64_t f = ++frame_;
        const std::size_t n = segment_->size();
        const std::size_t ring_len = window_ + 1;

        std::vector<std::uint32_t>& row = ring_[f % ring_len];
        for (std::size_t r = 0; r < n; ++r) {
            row[r] = static_cast<std::uint32_t>(hamming(segment_->descriptors[r], query));
        }
        if (f < window_) {
            return false;
        }

        if (f == window_) {
            // First column: plain window sums over the cached rows.
            std::fill(prev_.begin(), prev_.end(), 0);
            for (std::size_t k = 0; k < window_; ++k) {
                const auto& hk = ring_[(k + 1) % ring_len];
                for (std::size_t i = 0; i < rows_; ++i) {
                    prev_[i] += hk[i + k];
                }
            }
            return true;
        }

        const std::uint64_t j = f - window_ + 1; // 1-based query window start
        const auto& h_new = ring_[f % ring_len];
        const auto& h_old = ring_[(j - 1) % ring_len];

        std::int64_t first = 0;
        for (std::size_t k = 0; k < window_; ++k) {
            first += ring_[(j + k) % ring_len][k];
        }
        scratch_[0] = first;
        for (std::size_t i = 1; i < rows_; ++i) {
            scratch_[i] = prev_[i - 1] + h_new[i + window_ - 1] - h_old[i - 1];
        }
        prev_.swap(scratch_);
        return true;
    }

private:
    const TrainSegment* segment_;
    std::size_t window_;
    std::size_t rows_;
    std::vector<std::vector<std::uint32_t>> ring_;
    std::vector<std::int64_t> prev_;
    std::vector<std::int64_t> scratch_;
    std::uint64_t frame_ = 0;
};

} // namespace detail

/// Closed-form hamming() call counts of the two matchers; asserted exactly
/// by the test suite and reported by the benchmark harness.
inline std::uint64_t baseline_hamming_calls(std::uint64_t n, std::uint64_t m, std::uint64_t cl) {
    return (n - cl + 1) * (m - cl + 1) * cl;
}

inline std::uint64_t fast_hamming_calls(std::uint64_t n, std::uint64_t m, std::uint64_t /*cl*/) {
    return n * m;
}

/// Exhaustive reference matcher: every entry is an independent sum of
/// window_length descriptor distances, (n-cl+1)(m-cl+1)*cl hamming calls.
inline DistanceMatrix match_baseline(const TrainSegment& segment,
                                     const std::vector<GlobalDescriptor>& query,
                                     const MatchParams& params) {
    detail::validate_match(segment, query, params.window_length);
    const std::size_t cl = params.window_length;
    const std::size_t rows = segment.size() - cl + 1;
    const std::size_t cols = query.size() - cl + 1;

    DistanceMatrix matrix(segment.name, rows, cols, cl, segment.descriptors.front().bit_count());
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            std::int64_t sum = 0;
            for (std::size_t k = 0; k < cl; ++k) {
                sum += static_cast<std::int64_t>(
                    hamming(segment.descriptors[i + k], query[j + k]));
            }
            matrix.raw_at(i, j) = sum;
        }
    }
    return matrix;
}

/// Incremental matcher; output is bit-identical to match_baseline at a
/// hamming() cost of exactly n * m calls, independent of the window length.
inline DistanceMatrix match_fast(const TrainSegment& segment,
                                 const std::vector<GlobalDescriptor>& query,
                                 const MatchParams& params) {
    detail::validate_match(segment, query, params.window_length);
    const std::size_t cl = params.window_length;
    const std::size_t rows = segment.size() - cl + 1;
    const std::size_t cols = query.size() - cl + 1;

    DistanceMatrix matrix(segment.name, rows, cols, cl, segment.descriptors.front().bit_count());
    detail::SegmentMatcher matcher(segment, cl);
    for (std::size_t f = 0; f < query.size(); ++f) {
        if (matcher.push(query[f])) {
            const std::size_t j = f + 1 - cl; // 0-based column
            const auto& column = matcher.column();
            for (std::size_t i = 0; i < rows; ++i) {
                matrix.raw_at(i, j) = column[i];
            }
        }
    }
    return matrix;
}

/// Resolves the threshold that applies to a segment: the override wins,
/// otherwise the segment's own tuned value.
inline double resolve_threshold(const TrainSegment& segment,
                                const std::optional<double>& override_value) {
    if (override_value) {
        return *override_value;
    }
    if (segment.threshold) {
        return *segment.threshold;
    }
    throw NoThreshold("segment '" + segment.name +
                      "' has no tuned threshold and no override was given");
}

/// Streaming matcher over a whole database. Pushes are strictly sequential;
/// the database must outlive the state and stay unchanged.
class MatchState {
public:
    MatchState(const SequenceDatabase& db, const MatchParams& params)
        : window_(params.window_length), descriptor_bits_(db.descriptor_bits) {
        if (db.segments.empty()) {
            throw Error("database has no segments");
        }
        segments_.reserve(db.segments.size());
        thresholds_.reserve(db.segments.size());
        for (const auto& segment : db.segments) {
            if (params.window_length < 1) {
                throw Error("window length must be at least 1");
            }
            if (params.window_length > segment.size()) {
                throw WindowTooLong("window of " + std::to_string(params.window_length) +
                                    " frames exceeds segment '" + segment.name + "' (" +
                                    std::to_string(segment.size()) + " frames)");
            }
            for (const auto& d : segment.descriptors) {
                if (d.bit_count() != db.descriptor_bits) {
                    throw WidthMismatch("segment '" + segment.name +
                                        "' disagrees with the database descriptor width");
                }
            }
            thresholds_.push_back(resolve_threshold(segment, params.threshold_override));
            segments_.emplace_back(segment, params.window_length);
        }
    }

    std::uint64_t frames_seen() const { return frames_seen_; }
    std::size_t window_length() const { return window_; }

    /// Raw distances of the newest finished column for one segment.
    const std::vector<std::int64_t>& previous_column(std::size_t segment_index) const {
        return segments_[segment_index].column();
    }

    /// Consumes one query descriptor and returns every recognition of the
    /// newest query window: empty until window_length frames arrived, then
    /// per segment (in database order) every training window whose
    /// normalized distance falls strictly below the applicable threshold.
    std::vector<Recognition> push(const GlobalDescriptor& query) {
        if (query.bit_count() != descriptor_bits_) {
            throw WidthMismatch("query descriptor width " + std::to_string(query.bit_count()) +
                                " does not match the database width " +
                                std::to_string(descriptor_bits_));
        }
        ++frames_seen_;
        std::vector<Recognition> hits;
        const std::int64_t max_raw = static_cast<std::int64_t>(window_) * descriptor_bits_;
        for (std::size_t s = 0; s < segments_.size(); ++s) {
            auto& matcher = segments_[s];
            if (!matcher.push(query)) {
                continue;
            }
            const std::int64_t j = static_cast<std::int64_t>(frames_seen_ - window_ + 1);
            const auto& column = matcher.column();
            for (std::size_t i = 0; i < column.size(); ++i) {
                const double normalized =
                    static_cast<double>(column[i]) / static_cast<double>(max_raw);
                if (normalized < thresholds_[s]) {
                    hits.push_back(Recognition{matcher.segment_name(),
                                               static_cast<std::int64_t>(i + 1), j, column[i],
                                               normalized});
                }
            }
        }
        return hits;
    }

private:
    std::size_t window_;
    std::uint32_t descriptor_bits_;
    std::vector<detail::SegmentMatcher> segments_;
    std::vector<double> thresholds_;
    std::uint64_t frames_seen_ = 0;
};

inline MatchState stream_open(const SequenceDatabase& db, const MatchParams& params) {
    return MatchState(db, params);
}

inline std::vector<Recognition> stream_push(MatchState& state, const GlobalDescriptor& query) {
    return state.push(query);
}

/// Batch equivalent of streaming the whole query: matches every segment,
/// thresholds, and orders recognitions exactly as consecutive stream_push
/// calls would emit them (query window, then segment order, then training
/// window). With use_baseline the exhaustive matcher feeds the same pipeline.
inline std::vector<Recognition> batch_recognitions(const SequenceDatabase& db,
                                                   const std::vector<GlobalDescriptor>& query,
                                                   const MatchParams& params,
                                                   bool use_baseline = false) {
    std::vector<DistanceMatrix> matrices;
    std::vector<double> thresholds;
    matrices.reserve(db.segments.size());
    for (const auto& segment : db.segments) {
        thresholds.push_back(resolve_threshold(segment, params.threshold_override));
        matrices.push_back(use_baseline ? match_baseline(segment, query, params)
                                        : match_fast(segment, query, params));
    }

    std::vector<Recognition> hits;
    const std::size_t cols = query.size() - params.window_length + 1;
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t s = 0; s < matrices.size(); ++s) {
            const auto& matrix = matrices[s];
            for (std::size_t i = 0; i < matrix.rows(); ++i) {
                const double normalized = matrix.normalized_at(i, j);
                if (normalized < thresholds[s]) {
                    hits.push_back(Recognition{matrix.segment_name(),
                                               static_cast<std::int64_t>(i + 1),
                                               static_cast<std::int64_t>(j + 1),
                                               matrix.raw_at(i, j), normalized});
                }
            }
        }
    }
    return hits;
}

} // namespace seqvpr
