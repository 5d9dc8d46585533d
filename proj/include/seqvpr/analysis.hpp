#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "seqvpr/errors.hpp"
#include "seqvpr/matcher.hpp"
#include "seqvpr/sequence_store.hpp"

namespace seqvpr {

struct ClusterParams {
    /// Euclidean neighborhood radius in matrix index units.
    double eps = 2.0;
    /// Minimum neighborhood size (the point itself counts) to seed a cluster.
    std::size_t min_pts = 1;
};

struct RecognitionCluster {
    std::string segment_name;
    double mean_train_index = 0.0;
    double mean_query_index = 0.0;
    std::size_t member_count = 0;
    std::vector<Recognition> members;
};

namespace detail {

inline bool within_eps(const Recognition& a, const Recognition& b, double eps) {
    const double di = static_cast<double>(a.train_index - b.train_index);
    const double dj = static_cast<double>(a.query_index - b.query_index);
    return di * di + dj * dj <= eps * eps;
}

// Density-based clustering of one segment's recognitions over their
// (train_index, query_index) coordinates. With min_pts = 1 every point is a
// core point and the result is exactly the connected components of the
// eps-neighborhood graph; with larger min_pts non-core, non-border points
// are dropped as noise.
inline std::vector<std::vector<Recognition>> dbscan(const std::vector<Recognition>& points,
                                                    const ClusterParams& params) {
    const std::size_t n = points.size();
    std::vector<std::vector<std::size_t>> neighbors(n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (within_eps(points[a], points[b], params.eps)) {
                neighbors[a].push_back(b);
            }
        }
    }

    constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);
    std::vector<std::size_t> label(n, kUnassigned);
    std::vector<std::vector<Recognition>> clusters;

    for (std::size_t seed = 0; seed < n; ++seed) {
        if (label[seed] != kUnassigned || neighbors[seed].size() < params.min_pts) {
            continue;
        }
        const std::size_t cluster_id = clusters.size();
        clusters.emplace_back();
        label[seed] = cluster_id;
        std::deque<std::size_t> queue{seed};
        while (!queue.empty()) {
            const std::size_t p = queue.front();
            queue.pop_front();
            clusters[cluster_id].push_back(points[p]);
            if (neighbors[p].size() < params.min_pts) {
                continue; // border point, do not expand
            }
            for (const std::size_t q : neighbors[p]) {
                if (label[q] == kUnassigned) {
                    label[q] = cluster_id;
                    queue.push_back(q);
                }
            }
        }
    }
    return clusters;
}

} // namespace detail

/// Groups recognitions of each segment by DBScan over their distance-matrix
/// indices. Clusters never span segments. Output order is canonical
/// (segment name, then smallest member), independent of the input order.
inline std::vector<RecognitionCluster> cluster(const std::vector<Recognition>& recognitions,
                                               const ClusterParams& params) {
    if (params.eps <= 0.0) {
        throw Error("cluster eps must be positive");
    }
    if (params.min_pts < 1) {
        throw Error("cluster min_pts must be at least 1");
    }

    std::map<std::string, std::vector<Recognition>> per_segment;
    for (const auto& r : recognitions) {
        per_segment[r.segment_name].push_back(r);
    }

    const auto member_order = [](const Recognition& a, const Recognition& b) {
        return std::pair(a.query_index, a.train_index) < std::pair(b.query_index, b.train_index);
    };

    std::vector<RecognitionCluster> result;
    for (auto& [name, points] : per_segment) {
        auto clusters = detail::dbscan(points, params);
        for (auto& members : clusters) {
            std::sort(members.begin(), members.end(), member_order);
            RecognitionCluster c;
            c.segment_name = name;
            c.member_count = members.size();
            double train_sum = 0.0;
            double query_sum = 0.0;
            for (const auto& r : members) {
                train_sum += static_cast<double>(r.train_index);
                query_sum += static_cast<double>(r.query_index);
            }
            c.mean_train_index = train_sum / static_cast<double>(members.size());
            c.mean_query_index = query_sum / static_cast<double>(members.size());
            c.members = std::move(members);
            result.push_back(std::move(c));
        }
    }
    std::sort(result.begin(), result.end(), [&](const RecognitionCluster& a, const RecognitionCluster& b) {
        if (a.segment_name != b.segment_name) return a.segment_name < b.segment_name;
        return member_order(a.members.front(), b.members.front());
    });
    return result;
}

struct ConsistencyParams {
    /// Frames that must consecutively exceed the score threshold.
    std::size_t window = 1;
    /// Score threshold (strict comparison).
    double score_threshold = 0.0;
};

/// Windowed consistency check over a per-frame score stream: the output at
/// frame k is true iff the last `window` scores (including frame k) all
/// strictly exceed the threshold. O(1) state: the current run length.
class ConsistencyFilter {
public:
    explicit ConsistencyFilter(const ConsistencyParams& params) : params_(params) {
        if (params.window < 1) {
            throw Error("consistency window must be at least 1");
        }
    }

    bool push(double score) {
        run_ = (score > params_.score_threshold) ? run_ + 1 : 0;
        return run_ >= params_.window;
    }

private:
    ConsistencyParams params_;
    std::size_t run_ = 0;
};

inline std::vector<bool> consistency_filter(std::span<const double> scores,
                                            const ConsistencyParams& params) {
    ConsistencyFilter filter(params);
    std::vector<bool> out;
    out.reserve(scores.size());
    for (const double s : scores) {
        out.push_back(filter.push(s));
    }
    return out;
}

/// Smallest raw cross-segment window distance for every segment: entry a is
/// min over b != a and over all window placements of the distance between a
/// window of segment a and a window of segment b.
inline std::vector<std::int64_t> cross_segment_raw_minima(const SequenceDatabase& db,
                                                          std::size_t window_length) {
    if (db.segments.size() < 2) {
        throw SinglePartition("threshold tuning needs at least two segments");
    }
    MatchParams params;
    params.window_length = window_length;

    std::vector<std::int64_t> minima(db.segments.size(),
                                     std::numeric_limits<std::int64_t>::max());
    for (std::size_t a = 0; a < db.segments.size(); ++a) {
        for (std::size_t b = 0; b < db.segments.size(); ++b) {
            if (a == b) continue;
            const DistanceMatrix matrix =
                match_fast(db.segments[a], db.segments[b].descriptors, params);
            for (std::size_t i = 0; i < matrix.rows(); ++i) {
                for (std::size_t j = 0; j < matrix.cols(); ++j) {
                    minima[a] = std::min(minima[a], matrix.raw_at(i, j));
                }
            }
        }
    }
    return minima;
}

/// Per-segment automatic threshold tuning. Segments are assumed to cover
/// non-overlapping paths, so the smallest normalized distance to any other
/// segment is the tightest threshold that still yields zero recognitions on
/// the training cross-matches (thresholds compare strictly, the minimum
/// itself is excluded). Returns a copy of the database with every segment's
/// threshold populated.
inline SequenceDatabase auto_tune(const SequenceDatabase& db, std::size_t window_length) {
    const std::vector<std::int64_t> minima = cross_segment_raw_minima(db, window_length);
    const double max_raw =
        static_cast<double>(window_length) * static_cast<double>(db.descriptor_bits);

    SequenceDatabase tuned = db;
    for (std::size_t a = 0; a < tuned.segments.size(); ++a) {
        tuned.segments[a].threshold = static_cast<double>(minima[a]) / max_raw;
    }
    return tuned;
}

/// One permitted correspondence: query windows in [query_start, query_end]
/// may match training windows of `segment_name` in [train_start, train_end]
/// (inclusive, 1-based).
struct TruthEntry {
    std::int64_t query_start = 0;
    std::int64_t query_end = 0;
    std::string segment_name;
    std::int64_t train_start = 0;
    std::int64_t train_end = 0;
};

struct ScoreCounts {
    std::size_t correct = 0;
    std::size_t incorrect = 0;
    std::size_t distinct = 0;

    friend bool operator==(const ScoreCounts&, const ScoreCounts&) = default;
};

/// Scores clusters against a ground-truth table: a cluster is correct iff its
/// mean indices fall inside any permitted entry; distinct counts the truth
/// entries hit at least once. Entries with inverted ranges, or two entries of
/// the same segment whose query and train ranges both intersect, are rejected.
inline ScoreCounts score_against_ground_truth(const std::vector<RecognitionCluster>& clusters,
                                              const std::vector<TruthEntry>& truth) {
    for (const auto& entry : truth) {
        if (entry.query_start > entry.query_end || entry.train_start > entry.train_end) {
            throw MalformedTruth("inverted range for segment '" + entry.segment_name + "'");
        }
    }
    const auto overlaps = [](std::int64_t lo1, std::int64_t hi1, std::int64_t lo2, std::int64_t hi2) {
        return lo1 <= hi2 && lo2 <= hi1;
    };
    for (std::size_t a = 0; a < truth.size(); ++a) {
        for (std::size_t b = a + 1; b < truth.size(); ++b) {
            if (truth[a].segment_name == truth[b].segment_name &&
                overlaps(truth[a].query_start, truth[a].query_end, truth[b].query_start,
                         truth[b].query_end) &&
                overlaps(truth[a].train_start, truth[a].train_end, truth[b].train_start,
                         truth[b].train_end)) {
                throw MalformedTruth("overlapping entries for segment '" + truth[a].segment_name +
                                     "'");
            }
        }
    }

    ScoreCounts counts;
    std::vector<bool> hit(truth.size(), false);
    for (const auto& c : clusters) {
        bool correct = false;
        for (std::size_t t = 0; t < truth.size(); ++t) {
            const auto& entry = truth[t];
            if (entry.segment_name == c.segment_name &&
                c.mean_query_index >= static_cast<double>(entry.query_start) &&
                c.mean_query_index <= static_cast<double>(entry.query_end) &&
                c.mean_train_index >= static_cast<double>(entry.train_start) &&
                c.mean_train_index <= static_cast<double>(entry.train_end)) {
                correct = true;
                hit[t] = true;
            }
        }
        if (correct) {
            ++counts.correct;
        } else {
            ++counts.incorrect;
        }
    }
    counts.distinct = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), true));
    return counts;
}

} // namespace seqvpr
