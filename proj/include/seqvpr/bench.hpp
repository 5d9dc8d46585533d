#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "seqvpr/csv.hpp"
#include "seqvpr/errors.hpp"
#include "seqvpr/frame.hpp"
#include "seqvpr/matcher.hpp"

namespace seqvpr {

/// Parameters of one synthetic matching workload. The generated frames form
/// a random walk in descriptor space: each frame flips round(flip_prob * B)
/// bits of its predecessor, imitating the temporal correlation of a moving
/// camera. Everything is deterministic given the seed.
struct SyntheticSpec {
    std::size_t db_length = 0;     // n
    std::size_t query_length = 0;  // m
    std::size_t window_length = 1; // c_l
    double flip_prob = 0.02;
    std::uint64_t seed = 0;
};

/// Generates a training segment of n frames and a query of m frames as one
/// continuous walk (the query continues where the database ends). With
/// flip_prob = 0 every frame is identical.
inline std::pair<TrainSegment, std::vector<GlobalDescriptor>> generate(
    const SyntheticSpec& spec, std::uint32_t bits = kDescriptorBits) {
    if (spec.flip_prob < 0.0 || spec.flip_prob > 1.0) {
        throw Error("flip_prob must lie in [0, 1]");
    }
    if (spec.window_length < 1 || spec.window_length > std::min(spec.db_length, spec.query_length)) {
        throw WindowTooLong("window length must lie in [1, min(n, m)]");
    }

    std::mt19937_64 rng(spec.seed);

    GlobalDescriptor current(bits);
    for (std::uint32_t i = 0; i < bits; ++i) {
        if (rng() & 1u) {
            current.set_bit(i);
        }
    }

    const std::uint32_t flips =
        static_cast<std::uint32_t>(std::llround(spec.flip_prob * static_cast<double>(bits)));
    std::vector<std::uint32_t> indices(bits);
    const auto step = [&](GlobalDescriptor& d) {
        if (flips == 0) return;
        std::iota(indices.begin(), indices.end(), 0u);
        for (std::uint32_t t = 0; t < flips; ++t) {
            const std::uint32_t pick =
                t + static_cast<std::uint32_t>(rng() % static_cast<std::uint64_t>(bits - t));
            std::swap(indices[t], indices[pick]);
            d.flip_bit(indices[t]);
        }
    };

    TrainSegment segment;
    segment.name = "synthetic";
    segment.descriptors.reserve(spec.db_length);
    segment.descriptors.push_back(current);
    for (std::size_t i = 1; i < spec.db_length; ++i) {
        step(current);
        segment.descriptors.push_back(current);
    }

    std::vector<GlobalDescriptor> query;
    query.reserve(spec.query_length);
    for (std::size_t i = 0; i < spec.query_length; ++i) {
        step(current);
        query.push_back(current);
    }
    return {std::move(segment), std::move(query)};
}

struct BenchRow {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t window_length = 0;
    double baseline_seconds = 0.0;
    double fast_seconds = 0.0;
    double speedup = 0.0;
    std::uint64_t hamming_calls_baseline = 0;
    std::uint64_t hamming_calls_fast = 0;
};

struct BenchReport {
    std::size_t repetitions = 0;
    std::vector<BenchRow> rows;
};

namespace detail {

// Threshold applied inside the timed region so both matchers pay for the
// recognition scan they would perform in production.
inline constexpr double kBenchThreshold = 0.25;

inline std::size_t count_hits(const DistanceMatrix& matrix, double threshold) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        for (std::size_t j = 0; j < matrix.cols(); ++j) {
            if (matrix.normalized_at(i, j) < threshold) {
                ++hits;
            }
        }
    }
    return hits;
}

inline double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) {
        return values[mid];
    }
    return 0.5 * (values[mid - 1] + values[mid]);
}

} // namespace detail

/// Times both matchers on identical synthetic data. Each spec gets one
/// discarded warm-up run and `repetitions` timed runs per matcher; the
/// recorded times are medians of the full match call including the
/// recognition threshold scan. Every run's output is checked against the
/// baseline matrix; any disagreement aborts with OutputMismatch instead of
/// recording a timing. Hamming call counts are measured exactly. Timed
/// sections run strictly sequentially on the calling thread.
inline BenchReport run_grid(const std::vector<SyntheticSpec>& specs, std::size_t repetitions) {
    if (repetitions < 3) {
        throw Error("benchmark needs at least 3 repetitions");
    }

    using clock = std::chrono::steady_clock;
    BenchReport report;
    report.repetitions = repetitions;

    for (const auto& spec : specs) {
        const auto [segment, query] = generate(spec);
        MatchParams params;
        params.window_length = spec.window_length;

        BenchRow row;
        row.n = spec.db_length;
        row.m = spec.query_length;
        row.window_length = spec.window_length;

        // Warm-up: establishes the reference output and the exact call counts.
        reset_hamming_call_count();
        const DistanceMatrix reference = match_baseline(segment, query, params);
        row.hamming_calls_baseline = hamming_call_count();

        reset_hamming_call_count();
        const DistanceMatrix warm_fast = match_fast(segment, query, params);
        row.hamming_calls_fast = hamming_call_count();
        if (!(warm_fast == reference)) {
            throw OutputMismatch("fast matcher disagrees with the baseline");
        }

        std::vector<double> baseline_times;
        std::vector<double> fast_times;
        for (std::size_t rep = 0; rep < repetitions; ++rep) {
            const auto t0 = clock::now();
            const DistanceMatrix base = match_baseline(segment, query, params);
            const std::size_t base_hits = detail::count_hits(base, detail::kBenchThreshold);
            const auto t1 = clock::now();

            const auto t2 = clock::now();
            const DistanceMatrix fast = match_fast(segment, query, params);
            const std::size_t fast_hits = detail::count_hits(fast, detail::kBenchThreshold);
            const auto t3 = clock::now();

            if (!(fast == base) || fast_hits != base_hits) {
                throw OutputMismatch("fast matcher disagrees with the baseline");
            }
            baseline_times.push_back(std::chrono::duration<double>(t1 - t0).count());
            fast_times.push_back(std::chrono::duration<double>(t3 - t2).count());
        }

        row.baseline_seconds = detail::median(std::move(baseline_times));
        row.fast_seconds = detail::median(std::move(fast_times));
        row.speedup = row.baseline_seconds / row.fast_seconds;
        report.rows.push_back(row);
    }
    return report;
}

inline constexpr std::string_view kBenchCsvHeader =
    "n,m,window_length,repetitions,baseline_median_seconds,fast_median_seconds,speedup,"
    "hamming_calls_baseline,hamming_calls_fast";

inline void write_bench_csv(std::ostream& out, const BenchReport& report) {
    out << kBenchCsvHeader << "\n";
    for (const auto& row : report.rows) {
        out << row.n << ',' << row.m << ',' << row.window_length << ',' << report.repetitions
            << ',' << detail::format_double(row.baseline_seconds) << ','
            << detail::format_double(row.fast_seconds) << ','
            << detail::format_double(row.speedup, 3) << ',' << row.hamming_calls_baseline << ','
            << row.hamming_calls_fast << "\n";
    }
}

inline void print_bench_table(std::ostream& out, const BenchReport& report) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%8s %8s %6s %14s %14s %9s %16s %14s", "n", "m", "c_l",
                  "baseline [s]", "fast [s]", "speedup", "calls_baseline", "calls_fast");
    out << buf << "\n";
    for (const auto& row : report.rows) {
        std::snprintf(buf, sizeof(buf), "%8zu %8zu %6zu %14.6f %14.6f %8.1fx %16llu %14llu",
                      row.n, row.m, row.window_length, row.baseline_seconds, row.fast_seconds,
                      row.speedup,
                      static_cast<unsigned long long>(row.hamming_calls_baseline),
                      static_cast<unsigned long long>(row.hamming_calls_fast));
        out << buf << "\n";
    }
    out << "(median of " << report.repetitions << " repetitions, one warm-up run discarded)\n";
}

} // namespace seqvpr
