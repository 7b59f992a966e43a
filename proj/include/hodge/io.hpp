#pragma once

#include <filesystem>
#include <string>

namespace hodge {

std::string read_text(const std::filesystem::path& path);

/// Write through a temporary sibling file and rename it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& contents);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Strict decimal parse of a whole field; throws InputError naming `context` on failure.
double parse_double(const std::string& field, const std::string& context);

}  // namespace hodge
