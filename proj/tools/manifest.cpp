#include "manifest.hpp"

#include <array>
#include <memory>

#include <openssl/evp.h>

#include "hodge/errors.hpp"
#include "hodge/io.hpp"

namespace hodge::cli {

std::string sha256_hex(const std::string& bytes)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text(path)); }

Manifest::Manifest(std::string command) : start_(std::chrono::steady_clock::now())
{
    doc_["command"] = std::move(command);
    doc_["version"] = kVersion;
    doc_["input"] = nullptr;
    doc_["parameters"] = nlohmann::json::object();
    doc_["tolerances"] = nlohmann::json::object();
    doc_["outputs"] = nlohmann::json::array();
}

void Manifest::input(const std::filesystem::path& path)
{
    doc_["input"] = {{"path", path.string()}, {"sha256", sha256_file(path)}};
}

void Manifest::output(const std::filesystem::path& path) { doc_["outputs"].push_back(path.string()); }

std::filesystem::path Manifest::path_for(const std::filesystem::path& primary_output)
{
    return std::filesystem::path(primary_output.string() + ".manifest.json");
}

void Manifest::write(const std::filesystem::path& primary_output)
{
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    doc_["duration_seconds"] = std::chrono::duration<double>(elapsed).count();
    write_text_atomic(path_for(primary_output), doc_.dump(2) + "\n");
}

}  // namespace hodge::cli
