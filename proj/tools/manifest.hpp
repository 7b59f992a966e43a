#pragma once

#include <chrono>
#include <filesystem>
#include <string>

#include <json.hpp>

namespace hodge::cli {

inline constexpr const char* kVersion = HODGE_VERSION;

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

/// Run record written next to every primary output as `<output>.manifest.json`.
class Manifest {
public:
    explicit Manifest(std::string command);

    void input(const std::filesystem::path& path);
    nlohmann::json& parameters() { return doc_["parameters"]; }
    nlohmann::json& tolerances() { return doc_["tolerances"]; }
    void output(const std::filesystem::path& path);

    /// Stamps the duration and writes atomically.
    void write(const std::filesystem::path& primary_output);

    static std::filesystem::path path_for(const std::filesystem::path& primary_output);

private:
    nlohmann::json doc_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace hodge::cli
