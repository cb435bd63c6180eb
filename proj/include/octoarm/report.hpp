#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

namespace octoarm {

/// Git-style content hash of an input document: SHA-1 over "blob <len>\0" +
/// bytes, matching `git hash-object`.
inline std::string content_hash(const std::string& content) {
    std::string blob = "blob " + std::to_string(content.size());
    blob.push_back('\0');
    blob += content;
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr))
        throw std::runtime_error("content_hash: digest failed");
    std::ostringstream hex;
    hex << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i) hex << std::setw(2) << static_cast<int>(digest[i]);
    return hex.str();
}

/// Fixed float formatting for all emitted tables: 9 significant digits.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

/// CSV emitter: UTF-8, comma-separated, '.' decimal, LF endings, one comment
/// line carrying the input content hash, then the header row.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& input_hash,
              const std::vector<std::string>& columns)
        : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open output file " + path.string());
        out_ << "# input_hash: " << input_hash << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << columns[i] << (i + 1 < columns.size() ? "," : "");
        out_ << "\n";
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << format_number(values[i]) << (i + 1 < values.size() ? "," : "");
        out_ << "\n";
        ++rows_;
    }

    std::size_t rows() const { return rows_; }
    std::string filename() const { return path_.filename().string(); }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t rows_ = 0;
};

struct OutputEntry {
    std::string file;
    std::size_t rows = 0;
};

/// Per-run metadata and the emitted-file manifest.
struct RunReport {
    std::string command;
    std::string timestamp;
    int schema_version = 1;
    std::string input_path;
    std::string input_hash;
    nlohmann::json resolved_parameters;
    std::vector<OutputEntry> outputs;
    nlohmann::json extra;

    static std::string now_iso8601() {
        const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&t, &tm);
        std::ostringstream ss;
        ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
        return ss.str();
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["command"] = command;
        j["timestamp"] = timestamp;
        j["schema_version"] = schema_version;
        j["input_path"] = input_path;
        j["input_hash"] = input_hash;
        j["resolved_parameters"] = resolved_parameters;
        j["outputs"] = nlohmann::json::array();
        for (const auto& o : outputs) j["outputs"].push_back({{"file", o.file}, {"rows", o.rows}});
        if (!extra.is_null()) j["notes"] = extra;
        return j;
    }
};

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + path.string());
    out << j.dump(2) << "\n";
}

}  // namespace octoarm
