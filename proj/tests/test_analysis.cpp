#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "seqvpr/seqvpr.hpp"
#include "test_util.hpp"

using namespace seqvpr;

namespace {

Recognition point(std::int64_t train_index, std::int64_t query_index,
                  const std::string& segment = "seg") {
    Recognition r;
    r.segment_name = segment;
    r.train_index = train_index;
    r.query_index = query_index;
    return r;
}

// Canonical form for comparing partitions regardless of cluster order.
std::set<std::set<std::pair<std::int64_t, std::int64_t>>> partition_of(
    const std::vector<std::vector<Recognition>>& groups) {
    std::set<std::set<std::pair<std::int64_t, std::int64_t>>> canon;
    for (const auto& group : groups) {
        std::set<std::pair<std::int64_t, std::int64_t>> members;
        for (const auto& r : group) {
            members.insert({r.train_index, r.query_index});
        }
        canon.insert(std::move(members));
    }
    return canon;
}

std::vector<std::vector<Recognition>> members_of(const std::vector<RecognitionCluster>& clusters) {
    std::vector<std::vector<Recognition>> groups;
    for (const auto& c : clusters) {
        groups.push_back(c.members);
    }
    return groups;
}

} // namespace

TEST_CASE("cluster of a singleton") {
    const auto clusters = cluster({point(5, 5)}, ClusterParams{});
    REQUIRE(clusters.size() == 1);
    REQUIRE(clusters[0].mean_train_index == 5.0);
    REQUIRE(clusters[0].mean_query_index == 5.0);
    REQUIRE(clusters[0].member_count == 1);
}

TEST_CASE("cluster separates points beyond eps") {
    // (1,1)-(2,2) are sqrt(2) apart and link; (10,10) is sqrt(128) away.
    const auto clusters = cluster({point(1, 1), point(2, 2), point(10, 10)}, ClusterParams{});
    REQUIRE(clusters.size() == 2);
    REQUIRE(clusters[0].member_count == 2);
    REQUIRE(clusters[0].mean_train_index == 1.5);
    REQUIRE(clusters[0].mean_query_index == 1.5);
    REQUIRE(clusters[1].member_count == 1);
    REQUIRE(clusters[1].mean_train_index == 10.0);
}

TEST_CASE("cluster handles empty input") {
    REQUIRE(cluster({}, ClusterParams{}).empty());
}

TEST_CASE("clusters never span segments") {
    const auto clusters =
        cluster({point(1, 1, "a"), point(1, 2, "b"), point(2, 1, "a")}, ClusterParams{});
    REQUIRE(clusters.size() == 2);
    REQUIRE(clusters[0].segment_name == "a");
    REQUIRE(clusters[0].member_count == 2);
    REQUIRE(clusters[1].segment_name == "b");
    REQUIRE(clusters[1].member_count == 1);
}

TEST_CASE("cluster with min_pts = 1 equals connected components on random sets") {
    std::mt19937_64 rng(21);
    for (int round = 0; round < 40; ++round) {
        std::set<std::pair<std::int64_t, std::int64_t>> unique;
        const std::size_t count = 1 + rng() % 40;
        while (unique.size() < count) {
            unique.insert({static_cast<std::int64_t>(1 + rng() % 25),
                           static_cast<std::int64_t>(1 + rng() % 25)});
        }
        std::vector<Recognition> points;
        for (const auto& [i, j] : unique) {
            points.push_back(point(i, j));
        }

        const auto clusters = cluster(points, ClusterParams{});
        REQUIRE(partition_of(members_of(clusters)) ==
                partition_of(testutil::components_oracle(points, 2.0)));

        // Every input appears in exactly one cluster.
        std::size_t total = 0;
        for (const auto& c : clusters) {
            total += c.member_count;
            double train_sum = 0;
            double query_sum = 0;
            for (const auto& r : c.members) {
                train_sum += static_cast<double>(r.train_index);
                query_sum += static_cast<double>(r.query_index);
            }
            REQUIRE(c.mean_train_index ==
                    Catch::Approx(train_sum / static_cast<double>(c.member_count)).epsilon(1e-12));
            REQUIRE(c.mean_query_index ==
                    Catch::Approx(query_sum / static_cast<double>(c.member_count)).epsilon(1e-12));
        }
        REQUIRE(total == points.size());
    }
}

TEST_CASE("cluster output is invariant under input permutation") {
    std::mt19937_64 rng(22);
    std::vector<Recognition> points;
    for (int i = 0; i < 25; ++i) {
        points.push_back(point(static_cast<std::int64_t>(1 + rng() % 12),
                               static_cast<std::int64_t>(1 + rng() % 12)));
    }
    const auto reference = cluster(points, ClusterParams{});
    for (int round = 0; round < 5; ++round) {
        std::shuffle(points.begin(), points.end(), rng);
        const auto shuffled = cluster(points, ClusterParams{});
        REQUIRE(shuffled.size() == reference.size());
        for (std::size_t c = 0; c < shuffled.size(); ++c) {
            REQUIRE(shuffled[c].members == reference[c].members);
        }
    }
}

TEST_CASE("cluster with min_pts = 2 drops isolated noise points") {
    const auto clusters =
        cluster({point(1, 1), point(2, 2), point(30, 30)}, ClusterParams{2.0, 2});
    REQUIRE(clusters.size() == 1);
    REQUIRE(clusters[0].member_count == 2);
}

TEST_CASE("cluster rejects bad parameters") {
    REQUIRE_THROWS_AS(cluster({}, ClusterParams{0.0, 1}), Error);
    REQUIRE_THROWS_AS(cluster({}, ClusterParams{2.0, 0}), Error);
}

TEST_CASE("consistency filter with window 1 is plain thresholding") {
    const std::vector<double> scores = {0.1, 0.9, 0.5, 0.7};
    const auto out = consistency_filter(scores, ConsistencyParams{1, 0.6});
    REQUIRE(out == std::vector<bool>{false, true, false, true});
}

TEST_CASE("consistency filter example stream") {
    const std::vector<double> scores = {0.7, 0.7, 0.5, 0.7, 0.7, 0.7};
    const auto out = consistency_filter(scores, ConsistencyParams{3, 0.6});
    REQUIRE(out == std::vector<bool>{false, false, false, false, false, true});
}

TEST_CASE("consistency filter turns on after the warm-up when all scores pass") {
    const std::vector<double> scores(10, 0.9);
    for (const std::size_t cw : {1ul, 2ul, 5ul, 10ul}) {
        const auto out = consistency_filter(scores, ConsistencyParams{cw, 0.5});
        for (std::size_t k = 0; k < out.size(); ++k) {
            REQUIRE(out[k] == (k + 1 >= cw));
        }
    }
}

TEST_CASE("consistency filter properties on random streams") {
    std::mt19937_64 rng(23);
    for (int round = 0; round < 200; ++round) {
        const std::size_t length = 1 + rng() % 40;
        const std::size_t cw = 1 + rng() % 8;
        const double tp = static_cast<double>(rng() % 100) / 100.0;
        std::vector<double> scores;
        for (std::size_t i = 0; i < length; ++i) {
            scores.push_back(static_cast<double>(rng() % 100) / 100.0);
        }

        const auto out = consistency_filter(scores, ConsistencyParams{cw, tp});
        const auto wider = consistency_filter(scores, ConsistencyParams{cw + 1, tp});
        for (std::size_t k = 0; k < length; ++k) {
            bool expected = k + 1 >= cw;
            for (std::size_t b = 0; expected && b < cw; ++b) {
                expected = scores[k - b] > tp;
            }
            REQUIRE(out[k] == expected);
            // Larger windows only restrict the accepted set.
            if (wider[k]) {
                REQUIRE(out[k]);
            }
        }
    }
}

TEST_CASE("auto tune on two identical segments gives zero thresholds") {
    std::mt19937_64 rng(24);
    SequenceDatabase db;
    db.descriptor_bits = 64;
    db.segments.push_back(testutil::random_segment(rng, "a", 6, 64));
    db.segments.push_back(db.segments[0]);
    db.segments[1].name = "b";

    const SequenceDatabase tuned = auto_tune(db, 3);
    REQUIRE(*tuned.segments[0].threshold == 0.0);
    REQUIRE(*tuned.segments[1].threshold == 0.0);
}

TEST_CASE("auto tune on complementary constant segments gives threshold one") {
    SequenceDatabase db;
    db.descriptor_bits = 64;
    TrainSegment zeros;
    zeros.name = "zeros";
    zeros.descriptors.assign(4, GlobalDescriptor(64));
    TrainSegment ones;
    ones.name = "ones";
    GlobalDescriptor all_ones(64);
    for (std::uint32_t i = 0; i < 64; ++i) {
        all_ones.set_bit(i);
    }
    ones.descriptors.assign(4, all_ones);
    db.segments = {zeros, ones};

    const SequenceDatabase tuned = auto_tune(db, 2);
    REQUIRE(*tuned.segments[0].threshold == 1.0);
    REQUIRE(*tuned.segments[1].threshold == 1.0);
}

TEST_CASE("auto tune equals the exhaustive minimum on random databases") {
    std::mt19937_64 rng(25);
    for (int round = 0; round < 10; ++round) {
        const std::size_t cl = 1 + rng() % 3;
        SequenceDatabase db = testutil::random_database(rng, 3, cl + 1, cl + 6, 64);

        const auto minima = cross_segment_raw_minima(db, cl);
        for (std::size_t a = 0; a < db.segments.size(); ++a) {
            std::int64_t expected = std::numeric_limits<std::int64_t>::max();
            for (std::size_t b = 0; b < db.segments.size(); ++b) {
                if (a == b) continue;
                const auto matrix = testutil::naive_match(db.segments[a].descriptors,
                                                          db.segments[b].descriptors, cl);
                for (const auto& row : matrix) {
                    for (const auto value : row) {
                        expected = std::min(expected, value);
                    }
                }
            }
            REQUIRE(minima[a] == expected);
        }

        const SequenceDatabase tuned = auto_tune(db, cl);
        for (std::size_t a = 0; a < db.segments.size(); ++a) {
            REQUIRE(*tuned.segments[a].threshold ==
                    static_cast<double>(minima[a]) /
                        (static_cast<double>(cl) * static_cast<double>(db.descriptor_bits)));
        }
    }
}

TEST_CASE("auto tune requires at least two segments") {
    std::mt19937_64 rng(26);
    SequenceDatabase db;
    db.descriptor_bits = 64;
    db.segments.push_back(testutil::random_segment(rng, "only", 5, 64));
    REQUIRE_THROWS_AS(auto_tune(db, 2), SinglePartition);
}

TEST_CASE("tuned thresholds yield zero recognitions on the training data itself") {
    std::mt19937_64 rng(27);
    SequenceDatabase db = testutil::random_database(rng, 3, 6, 10, 128);
    const std::size_t cl = 3;
    const SequenceDatabase tuned = auto_tune(db, cl);

    for (std::size_t a = 0; a < tuned.segments.size(); ++a) {
        SequenceDatabase rest;
        rest.descriptor_bits = tuned.descriptor_bits;
        for (std::size_t b = 0; b < tuned.segments.size(); ++b) {
            if (b != a) rest.segments.push_back(tuned.segments[b]);
        }
        MatchParams params;
        params.window_length = cl;
        params.threshold_override = *tuned.segments[a].threshold;

        const auto hits = batch_recognitions(rest, tuned.segments[a].descriptors, params);
        REQUIRE(hits.empty());

        // Strictly above the tuned threshold the minimum pair resurfaces.
        params.threshold_override = std::nextafter(*tuned.segments[a].threshold, 2.0);
        const auto above = batch_recognitions(rest, tuned.segments[a].descriptors, params);
        REQUIRE_FALSE(above.empty());
    }
}

TEST_CASE("score counts empty clusters as all-zero") {
    REQUIRE(score_against_ground_truth({}, {}) == ScoreCounts{0, 0, 0});
    const std::vector<TruthEntry> truth = {{1, 10, "a", 1, 10}};
    REQUIRE(score_against_ground_truth({}, truth) == ScoreCounts{0, 0, 0});
}

TEST_CASE("score classifies clusters against permitted ranges") {
    const std::vector<TruthEntry> truth = {{1, 10, "a", 5, 20}, {11, 30, "b", 1, 4}};

    RecognitionCluster inside;
    inside.segment_name = "a";
    inside.mean_train_index = 12.5;
    inside.mean_query_index = 3.0;
    inside.member_count = 2;

    REQUIRE(score_against_ground_truth({inside}, truth) == ScoreCounts{1, 0, 1});

    RecognitionCluster wrong_segment = inside;
    wrong_segment.segment_name = "b";
    RecognitionCluster outside = inside;
    outside.mean_query_index = 11.0;

    const auto counts = score_against_ground_truth({inside, wrong_segment, outside}, truth);
    REQUIRE(counts == ScoreCounts{1, 2, 1});
}

TEST_CASE("score counts each truth entry once for distinct") {
    const std::vector<TruthEntry> truth = {{1, 100, "a", 1, 100}};
    RecognitionCluster c1;
    c1.segment_name = "a";
    c1.mean_train_index = 10;
    c1.mean_query_index = 10;
    RecognitionCluster c2 = c1;
    c2.mean_train_index = 50;
    REQUIRE(score_against_ground_truth({c1, c2}, truth) == ScoreCounts{2, 0, 1});
}

TEST_CASE("score rejects malformed truth tables") {
    REQUIRE_THROWS_AS(score_against_ground_truth({}, {{10, 1, "a", 1, 5}}), MalformedTruth);
    REQUIRE_THROWS_AS(score_against_ground_truth({}, {{1, 5, "a", 10, 2}}), MalformedTruth);
    // Same segment, intersecting query and train ranges: ambiguous coverage.
    REQUIRE_THROWS_AS(
        score_against_ground_truth({}, {{1, 10, "a", 1, 10}, {5, 15, "a", 8, 12}}),
        MalformedTruth);
    // Distinct segments may overlap freely.
    REQUIRE_NOTHROW(score_against_ground_truth({}, {{1, 10, "a", 1, 10}, {5, 15, "b", 8, 12}}));
}

TEST_CASE("a spliced query scores fully correct") {
    std::mt19937_64 rng(28);
    SequenceDatabase db = testutil::random_database(rng, 3, 12, 16, kDescriptorBits);
    const std::size_t cl = 4;
    const SequenceDatabase tuned = auto_tune(db, cl);

    // Query replays frames 1..12 of segment 1 ("seg0" is index 0).
    const auto& donor = tuned.segments[1].descriptors;
    const std::vector<GlobalDescriptor> query(donor.begin(), donor.begin() + 12);

    MatchParams params;
    params.window_length = cl;
    const auto hits = batch_recognitions(tuned, query, params);
    REQUIRE_FALSE(hits.empty());

    const auto clusters = cluster(hits, ClusterParams{});
    const std::vector<TruthEntry> truth = {
        {1, static_cast<std::int64_t>(query.size()), "seg1", 1,
         static_cast<std::int64_t>(donor.size())}};
    const auto counts = score_against_ground_truth(clusters, truth);
    REQUIRE(counts.correct == clusters.size());
    REQUIRE(counts.incorrect == 0);
    REQUIRE(counts.distinct == 1);
}
