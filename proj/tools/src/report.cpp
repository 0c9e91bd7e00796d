#include "report.hpp"

#include <cstdio>
#include <fstream>

#include "uptake/errors.hpp"

namespace uptake::cli {

std::string file_checksum(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::uint64_t hash = 1469598103934665603ULL;
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 1099511628211ULL;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
    return hex;
}

json checksum_inputs(const std::vector<std::filesystem::path>& paths) {
    json arr = json::array();
    for (const auto& p : paths)
        arr.push_back({{"path", p.string()}, {"fnv1a64", file_checksum(p)}});
    return arr;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path.string());
    out << text;
    if (!out) throw ParseError("write failed: " + path.string());
}

}  // namespace uptake::cli
