#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

namespace uptake::cli {

using json = nlohmann::ordered_json;

// FNV-1a 64 of the file bytes, lowercase hex.
std::string file_checksum(const std::filesystem::path& path);

// {"path": ..., "fnv1a64": ...} per input, in argument order.
json checksum_inputs(const std::vector<std::filesystem::path>& paths);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace uptake::cli
