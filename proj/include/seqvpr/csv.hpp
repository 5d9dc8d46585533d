#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "seqvpr/analysis.hpp"
#include "seqvpr/errors.hpp"
#include "seqvpr/matcher.hpp"

namespace seqvpr {

namespace detail {

// All numeric CSV output goes through snprintf with the "C" numeric
// conventions; the process never installs another locale.
inline std::string format_double(double value, int decimals = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

inline std::string csv_context(const std::string& file, std::size_t line_number) {
    return file + ":" + std::to_string(line_number);
}

inline std::int64_t parse_int(std::string_view field, const std::string& file,
                              std::size_t line_number, const char* what) {
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw CsvError(csv_context(file, line_number) + ": bad " + what + " '" +
                       std::string(field) + "'");
    }
    return value;
}

inline double parse_double(std::string_view field, const std::string& file,
                           std::size_t line_number, const char* what) {
    const std::string copy(field);
    char* end = nullptr;
    const double value = std::strtod(copy.c_str(), &end);
    if (end != copy.c_str() + copy.size() || copy.empty()) {
        throw CsvError(csv_context(file, line_number) + ": bad " + what + " '" + copy + "'");
    }
    return value;
}

inline void check_name(const std::string& name) {
    if (name.find_first_of(",\r\n") != std::string::npos) {
        throw CsvError("segment name contains a comma or newline: '" + name + "'");
    }
}

struct CsvReader {
    std::ifstream stream;
    std::string file;
    std::size_t line_number = 0;

    CsvReader(const std::filesystem::path& path, std::string_view expected_header)
        : stream(path), file(path.string()) {
        if (!stream) {
            throw CsvError(file + ": cannot open");
        }
        std::string header;
        if (!std::getline(stream, header)) {
            throw CsvError(file + ":1: missing header");
        }
        ++line_number;
        if (!header.empty() && header.back() == '\r') header.pop_back();
        if (header != expected_header) {
            throw CsvError(file + ":1: expected header '" + std::string(expected_header) + "'");
        }
    }

    bool next(std::string& line) {
        while (std::getline(stream, line)) {
            ++line_number;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) {
                return true;
            }
        }
        return false;
    }
};

} // namespace detail

inline constexpr std::string_view kRecognitionCsvHeader =
    "query_index,segment_name,train_index,raw_distance,normalized_distance";

inline void write_recognition_csv_header(std::ostream& out) {
    out << kRecognitionCsvHeader << "\n";
}

inline void write_recognition_csv_row(std::ostream& out, const Recognition& r) {
    detail::check_name(r.segment_name);
    out << r.query_index << ',' << r.segment_name << ',' << r.train_index << ','
        << r.raw_distance << ',' << detail::format_double(r.normalized_distance) << "\n";
}

inline void write_recognitions_csv(std::ostream& out, const std::vector<Recognition>& rows) {
    write_recognition_csv_header(out);
    for (const auto& r : rows) {
        write_recognition_csv_row(out, r);
    }
}

inline std::vector<Recognition> read_recognitions_csv(const std::filesystem::path& path) {
    detail::CsvReader reader(path, kRecognitionCsvHeader);
    std::vector<Recognition> rows;
    std::string line;
    while (reader.next(line)) {
        const auto fields = detail::split_fields(line);
        if (fields.size() != 5) {
            throw CsvError(detail::csv_context(reader.file, reader.line_number) +
                           ": expected 5 fields, got " + std::to_string(fields.size()));
        }
        Recognition r;
        r.query_index = detail::parse_int(fields[0], reader.file, reader.line_number, "query_index");
        r.segment_name = std::string(fields[1]);
        r.train_index = detail::parse_int(fields[2], reader.file, reader.line_number, "train_index");
        r.raw_distance =
            detail::parse_int(fields[3], reader.file, reader.line_number, "raw_distance");
        r.normalized_distance = detail::parse_double(fields[4], reader.file, reader.line_number,
                                                     "normalized_distance");
        rows.push_back(std::move(r));
    }
    return rows;
}

inline constexpr std::string_view kClusterCsvHeader =
    "segment_name,mean_train_index,mean_query_index,member_count";

inline void write_clusters_csv(std::ostream& out, const std::vector<RecognitionCluster>& clusters) {
    out << kClusterCsvHeader << "\n";
    for (const auto& c : clusters) {
        detail::check_name(c.segment_name);
        out << c.segment_name << ',' << detail::format_double(c.mean_train_index) << ','
            << detail::format_double(c.mean_query_index) << ',' << c.member_count << "\n";
    }
}

inline std::vector<RecognitionCluster> read_clusters_csv(const std::filesystem::path& path) {
    detail::CsvReader reader(path, kClusterCsvHeader);
    std::vector<RecognitionCluster> clusters;
    std::string line;
    while (reader.next(line)) {
        const auto fields = detail::split_fields(line);
        if (fields.size() != 4) {
            throw CsvError(detail::csv_context(reader.file, reader.line_number) +
                           ": expected 4 fields, got " + std::to_string(fields.size()));
        }
        RecognitionCluster c;
        c.segment_name = std::string(fields[0]);
        c.mean_train_index =
            detail::parse_double(fields[1], reader.file, reader.line_number, "mean_train_index");
        c.mean_query_index =
            detail::parse_double(fields[2], reader.file, reader.line_number, "mean_query_index");
        c.member_count = static_cast<std::size_t>(
            detail::parse_int(fields[3], reader.file, reader.line_number, "member_count"));
        clusters.push_back(std::move(c));
    }
    return clusters;
}

inline constexpr std::string_view kTruthCsvHeader =
    "query_start,query_end,segment_name,train_start,train_end";

inline void write_truth_csv(std::ostream& out, const std::vector<TruthEntry>& truth) {
    out << kTruthCsvHeader << "\n";
    for (const auto& t : truth) {
        detail::check_name(t.segment_name);
        out << t.query_start << ',' << t.query_end << ',' << t.segment_name << ','
            << t.train_start << ',' << t.train_end << "\n";
    }
}

inline std::vector<TruthEntry> read_truth_csv(const std::filesystem::path& path) {
    detail::CsvReader reader(path, kTruthCsvHeader);
    std::vector<TruthEntry> truth;
    std::string line;
    while (reader.next(line)) {
        const auto fields = detail::split_fields(line);
        if (fields.size() != 5) {
            throw CsvError(detail::csv_context(reader.file, reader.line_number) +
                           ": expected 5 fields, got " + std::to_string(fields.size()));
        }
        TruthEntry t;
        t.query_start = detail::parse_int(fields[0], reader.file, reader.line_number, "query_start");
        t.query_end = detail::parse_int(fields[1], reader.file, reader.line_number, "query_end");
        t.segment_name = std::string(fields[2]);
        t.train_start = detail::parse_int(fields[3], reader.file, reader.line_number, "train_start");
        t.train_end = detail::parse_int(fields[4], reader.file, reader.line_number, "train_end");
        truth.push_back(std::move(t));
    }
    return truth;
}

} // namespace seqvpr
