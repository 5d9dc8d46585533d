// Command-line surface for the sequence place-recognition engine: builds
// descriptor databases from image directories, tunes per-segment thresholds,
// matches query sequences, clusters and scores recognitions, and benchmarks
// the two matchers.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "seqvpr/seqvpr.hpp"

namespace fs = std::filesystem;

namespace {

std::string format6(double value) { return seqvpr::detail::format_double(value); }

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw seqvpr::Error("cannot open " + path.string() + " for writing");
    }
    return out;
}

int cmd_describe(const fs::path& images, const std::string& name, const fs::path& db_path) {
    std::cout << "config: command=describe images=" << images.string() << " name=" << name
              << " db=" << db_path.string() << "\n";

    seqvpr::SequenceDatabase db;
    if (fs::exists(db_path)) {
        db = seqvpr::load(db_path);
    }
    if (db.find(name) != nullptr) {
        throw seqvpr::Error("segment '" + name + "' already exists in " + db_path.string());
    }

    seqvpr::TrainSegment segment = seqvpr::ingest_directory(images, name);
    if (!db.segments.empty() &&
        segment.descriptors.front().bit_count() != db.descriptor_bits) {
        throw seqvpr::WidthMismatch("descriptor width does not match the existing database");
    }
    db.descriptor_bits = segment.descriptors.front().bit_count();

    std::cout << "segment '" << name << "': " << segment.size() << " frames, descriptor width "
              << db.descriptor_bits << " bits\n";
    db.segments.push_back(std::move(segment));
    seqvpr::save(db, db_path);
    std::cout << "database " << db_path.string() << ": " << db.segments.size() << " segment(s)\n";
    return 0;
}

int cmd_tune(const fs::path& db_path, std::size_t window_length) {
    std::cout << "config: command=tune db=" << db_path.string() << " cl=" << window_length
              << "\n";

    seqvpr::SequenceDatabase db = seqvpr::load(db_path);
    db = seqvpr::auto_tune(db, window_length);
    seqvpr::save(db, db_path);
    for (const auto& segment : db.segments) {
        std::cout << "t_r[" << segment.name << "] = " << format6(*segment.threshold) << "\n";
    }
    return 0;
}

int cmd_match(const fs::path& db_path, const fs::path& query_dir, std::size_t window_length,
              const fs::path& out_path, const std::string& matcher,
              const std::optional<double>& threshold) {
    std::cout << "config: command=match db=" << db_path.string()
              << " query=" << query_dir.string() << " cl=" << window_length
              << " matcher=" << matcher << " threshold="
              << (threshold ? format6(*threshold) : std::string("per-segment"))
              << " out=" << out_path.string() << "\n";

    const seqvpr::SequenceDatabase db = seqvpr::load(db_path);
    const std::vector<seqvpr::GlobalDescriptor> query =
        seqvpr::ingest_directory(query_dir, "query").descriptors;

    seqvpr::MatchParams params;
    params.window_length = window_length;
    params.threshold_override = threshold;

    std::ofstream out = open_output(out_path);
    std::size_t rows = 0;
    if (matcher == "baseline") {
        const auto hits = seqvpr::batch_recognitions(db, query, params, /*use_baseline=*/true);
        seqvpr::write_recognitions_csv(out, hits);
        rows = hits.size();
    } else {
        seqvpr::MatchState state = seqvpr::stream_open(db, params);
        seqvpr::write_recognition_csv_header(out);
        for (const auto& descriptor : query) {
            for (const auto& hit : seqvpr::stream_push(state, descriptor)) {
                seqvpr::write_recognition_csv_row(out, hit);
                ++rows;
            }
        }
    }
    out.flush();
    if (!out) {
        throw seqvpr::Error("failed to write " + out_path.string());
    }
    std::cout << rows << " recognition(s) written to " << out_path.string() << "\n";
    return 0;
}

int cmd_cluster(const fs::path& in_path, double eps, std::size_t min_pts,
                const fs::path& out_path) {
    std::cout << "config: command=cluster in=" << in_path.string() << " eps=" << format6(eps)
              << " min_pts=" << min_pts << " out=" << out_path.string() << "\n";

    const auto recognitions = seqvpr::read_recognitions_csv(in_path);
    seqvpr::ClusterParams params;
    params.eps = eps;
    params.min_pts = min_pts;
    const auto clusters = seqvpr::cluster(recognitions, params);

    std::ofstream out = open_output(out_path);
    seqvpr::write_clusters_csv(out, clusters);
    out.flush();
    if (!out) {
        throw seqvpr::Error("failed to write " + out_path.string());
    }
    std::cout << clusters.size() << " cluster(s) written to " << out_path.string() << "\n";
    return 0;
}

int cmd_score(const fs::path& clusters_path, const fs::path& truth_path) {
    std::cout << "config: command=score clusters=" << clusters_path.string()
              << " truth=" << truth_path.string() << "\n";

    const auto clusters = seqvpr::read_clusters_csv(clusters_path);
    const auto truth = seqvpr::read_truth_csv(truth_path);
    const seqvpr::ScoreCounts counts = seqvpr::score_against_ground_truth(clusters, truth);
    std::cout << "correct=" << counts.correct << " incorrect=" << counts.incorrect
              << " distinct=" << counts.distinct << "\n";
    return 0;
}

int cmd_bench(const std::vector<std::size_t>& n_values, std::size_t m,
              const std::vector<std::size_t>& cl_values, double flip_prob, std::uint64_t seed,
              std::size_t repetitions, const fs::path& out_path) {
    std::ostringstream ns, cls;
    for (std::size_t v : n_values) ns << (ns.tellp() > 0 ? "," : "") << v;
    for (std::size_t v : cl_values) cls << (cls.tellp() > 0 ? "," : "") << v;
    std::cout << "config: command=bench n=" << ns.str() << " m=" << m << " cl=" << cls.str()
              << " flip_prob=" << format6(flip_prob) << " seed=" << seed
              << " reps=" << repetitions << " out=" << out_path.string() << "\n";

    std::vector<seqvpr::SyntheticSpec> specs;
    std::uint64_t row = 0;
    for (const std::size_t n : n_values) {
        for (const std::size_t cl : cl_values) {
            seqvpr::SyntheticSpec spec;
            spec.db_length = n;
            spec.query_length = m;
            spec.window_length = cl;
            spec.flip_prob = flip_prob;
            spec.seed = seed + row; // one independent walk per grid row
            specs.push_back(spec);
            ++row;
        }
    }

    const seqvpr::BenchReport report = seqvpr::run_grid(specs, repetitions);
    seqvpr::print_bench_table(std::cout, report);

    std::ofstream out = open_output(out_path);
    seqvpr::write_bench_csv(out, report);
    out.flush();
    if (!out) {
        throw seqvpr::Error("failed to write " + out_path.string());
    }
    std::cout << report.rows.size() << " row(s) written to " << out_path.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sequence-based visual place recognition engine"};
    app.require_subcommand(1);

    // describe
    auto* describe = app.add_subcommand("describe", "ingest an image directory as one segment");
    fs::path describe_images, describe_db;
    std::string describe_name;
    describe->add_option("--images", describe_images, "directory of PGM/PPM frames")->required();
    describe->add_option("--name", describe_name, "unique segment name")->required();
    describe->add_option("--db", describe_db, "database file to create or extend")->required();

    // tune
    auto* tune = app.add_subcommand("tune", "auto-tune per-segment recognition thresholds");
    fs::path tune_db;
    std::size_t tune_cl = 0;
    tune->add_option("--db", tune_db, "database file")->required();
    tune->add_option("--cl", tune_cl, "comparison window length in frames")->required();

    // match
    auto* match = app.add_subcommand("match", "match a query image directory against a database");
    fs::path match_db, match_query, match_out;
    std::size_t match_cl = 0;
    std::string match_matcher = "fast";
    std::optional<double> match_threshold;
    match->add_option("--db", match_db, "database file")->required();
    match->add_option("--query", match_query, "directory of query frames")->required();
    match->add_option("--cl", match_cl, "comparison window length in frames")->required();
    match->add_option("--out", match_out, "recognition CSV to write")->required();
    match->add_option("--matcher", match_matcher, "matcher implementation (default fast)")
        ->check(CLI::IsMember({"fast", "baseline"}));
    match->add_option("--threshold", match_threshold,
                      "global threshold override in [0, 1] (default: per-segment)");

    // cluster
    auto* cluster = app.add_subcommand("cluster", "cluster a recognition CSV");
    fs::path cluster_in, cluster_out;
    double cluster_eps = 2.0;
    std::size_t cluster_min_pts = 1;
    cluster->add_option("--in", cluster_in, "recognition CSV")->required();
    cluster->add_option("--out", cluster_out, "cluster CSV to write")->required();
    cluster->add_option("--eps", cluster_eps, "neighborhood radius (default 2)");
    cluster->add_option("--min-pts", cluster_min_pts, "minimum cluster size (default 1)");

    // score
    auto* score = app.add_subcommand("score", "score clusters against a ground-truth table");
    fs::path score_clusters, score_truth;
    score->add_option("--clusters", score_clusters, "cluster CSV")->required();
    score->add_option("--truth", score_truth, "ground-truth CSV")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "benchmark both matchers on synthetic sequences");
    std::vector<std::size_t> bench_n{1000};
    std::vector<std::size_t> bench_cl{20};
    std::size_t bench_m = 1000;
    double bench_flip = 0.02;
    std::uint64_t bench_seed = 1;
    std::size_t bench_reps = 5;
    fs::path bench_out;
    bench->add_option("--n", bench_n, "database lengths")->delimiter(',');
    bench->add_option("--m", bench_m, "query length (default 1000)");
    bench->add_option("--cl", bench_cl, "window lengths")->delimiter(',');
    bench->add_option("--flip-prob", bench_flip, "per-frame bit flip fraction (default 0.02)");
    bench->add_option("--seed", bench_seed, "base seed (row k uses seed+k)");
    bench->add_option("--reps", bench_reps, "timed repetitions per row (default 5, min 3)");
    bench->add_option("--out", bench_out, "report CSV to write")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*describe) return cmd_describe(describe_images, describe_name, describe_db);
        if (*tune) return cmd_tune(tune_db, tune_cl);
        if (*match)
            return cmd_match(match_db, match_query, match_cl, match_out, match_matcher,
                             match_threshold);
        if (*cluster) return cmd_cluster(cluster_in, cluster_eps, cluster_min_pts, cluster_out);
        if (*score) return cmd_score(score_clusters, score_truth);
        if (*bench)
            return cmd_bench(bench_n, bench_m, bench_cl, bench_flip, bench_seed, bench_reps,
                             bench_out);
    } catch (const seqvpr::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
