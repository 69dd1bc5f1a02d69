#include "sbren_tools/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include <openssl/evp.h>

namespace sbren::tools {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
    rows_.push_back(std::move(header));
}

CsvTable& CsvTable::row() {
    rows_.emplace_back();
    return *this;
}

CsvTable& CsvTable::add(double v) {
    rows_.back().push_back(format_double(v));
    return *this;
}

CsvTable& CsvTable::add(std::int64_t v) {
    rows_.back().push_back(std::to_string(v));
    return *this;
}

CsvTable& CsvTable::add(bool v) {
    rows_.back().push_back(v ? "true" : "false");
    return *this;
}

CsvTable& CsvTable::add(std::string_view text) {
    if (text.find_first_of(",\"\n") == std::string_view::npos) {
        rows_.back().emplace_back(text);
        return *this;
    }
    std::string q = "\"";
    for (char c : text) {
        if (c == '"') q += '"';
        q += c;
    }
    q += '"';
    rows_.back().push_back(std::move(q));
    return *this;
}

std::string CsvTable::str() const {
    std::string out;
    for (const auto& r : rows_) {
        if (r.size() != columns_) throw std::logic_error("csv row has " + std::to_string(r.size()) + " fields");
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ',';
            out += r[i];
        }
        out += '\n';
    }
    return out;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json to_json(const SolveReport& report) {
    return {{"method", report.method},
            {"dimension", report.dimension},
            {"iterations", report.iterations},
            {"residual", report.residual},
            {"success", report.success}};
}

std::filesystem::path write_artifacts(const std::filesystem::path& dir, const std::vector<Artifact>& artifacts,
                                      const ManifestInfo& info) {
    std::filesystem::create_directories(dir);
    nlohmann::json files = nlohmann::json::array();
    std::set<std::string> names;
    for (const auto& a : artifacts) {
        if (a.name == "manifest.json" || !names.insert(a.name).second)
            throw std::logic_error("duplicate artifact name " + a.name);
        std::ofstream out(dir / a.name, std::ios::binary | std::ios::trunc);
        out.write(a.content.data(), static_cast<std::streamsize>(a.content.size()));
        if (!out) throw std::runtime_error("cannot write " + (dir / a.name).string());
        files.push_back({{"name", a.name}, {"sha256", sha256_hex(a.content)}, {"bytes", a.content.size()}});
    }
    const nlohmann::json manifest{{"schema_version", 1},
                                  {"experiment", info.experiment},
                                  {"seed", info.seed},
                                  {"config_sha256", info.config_sha256},
                                  {"files", files}};
    const auto path = dir / "manifest.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << json_text(manifest);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return path;
}

} // namespace sbren::tools
