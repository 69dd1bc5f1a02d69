// output.hpp - CSV text, content hashes and the artifact writer

#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sbren/errors.hpp"

namespace sbren::tools {

/// Shortest form that keeps 17 significant digits; locale independent.
/// NaN and infinities print as nan, inf, -inf.
std::string format_double(double v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    CsvTable& row();
    CsvTable& add(double v);
    CsvTable& add(std::int64_t v);
    CsvTable& add(std::size_t v) { return add(static_cast<std::int64_t>(v)); }
    CsvTable& add(int v) { return add(static_cast<std::int64_t>(v)); }
    CsvTable& add(bool v);
    CsvTable& add(std::string_view text); // quoted when it holds , " or newline
    CsvTable& add(const char* text) { return add(std::string_view(text)); }

    std::string str() const; // throws std::logic_error on a ragged row

private:
    std::size_t columns_;
    std::vector<std::vector<std::string>> rows_;
};

struct Artifact {
    std::string name; // file name relative to the output directory
    std::string content;
};

std::string sha256_hex(std::string_view data);

/// Stable JSON text: two-space indent, trailing newline.
std::string json_text(const nlohmann::json& j);

nlohmann::json to_json(const SolveReport& report);

struct ManifestInfo {
    std::string experiment;
    std::uint64_t seed{0};
    std::string config_sha256;
};

/// Writes every artifact, then manifest.json listing each with its SHA-256
/// and size. Returns the manifest path.
std::filesystem::path write_artifacts(const std::filesystem::path& dir, const std::vector<Artifact>& artifacts,
                                      const ManifestInfo& info);

} // namespace sbren::tools
