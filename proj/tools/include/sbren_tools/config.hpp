// config.hpp - experiment config files (JSON, schema_version 1)

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sbren/linalg.hpp"
#include "sbren/modegrid.hpp"
#include "sbren/sbmodel.hpp"

namespace sbren::tools {

using json = nlohmann::json;

inline constexpr int config_schema_version = 1;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads the members of one JSON object and rejects any member it was
/// never asked about (finish()).
class ObjectReader {
public:
    ObjectReader(const json& object, std::string path);

    bool has(const std::string& key) const;
    const json& raw(const std::string& key);
    double number(const std::string& key);
    double number(const std::string& key, double fallback);
    std::int64_t integer(const std::string& key);
    std::int64_t integer(const std::string& key, std::int64_t fallback);
    bool boolean(const std::string& key, bool fallback);
    std::string string(const std::string& key);
    std::string string(const std::string& key, const std::string& fallback);
    std::vector<double> numbers(const std::string& key);
    ObjectReader object(const std::string& key);
    std::vector<ObjectReader> objects(const std::string& key);
    std::string child_path(const std::string& key) const { return path_ + "." + key; }
    const std::string& path() const noexcept { return path_; }

    void finish() const;

private:
    const json& require(const std::string& key);

    const json* object_;
    std::string path_;
    std::set<std::string> seen_;
};

struct CommonConfig {
    int schema_version{config_schema_version};
    std::string experiment;
    std::uint64_t seed{1};
    std::size_t threads{1};
    std::string output_dir;
};

/// Parses the file as JSON; syntax errors become ConfigError.
json read_json_file(const std::filesystem::path& path);

// typed readers for shared sections
GridSpec read_grid(ObjectReader r);
FormFactorRule read_form_factor(ObjectReader r);
CMatrix read_complex_matrix(ObjectReader& parent, const std::string& key);
std::vector<Complex> read_z_list(ObjectReader& parent, const std::string& key);
Complex read_z(ObjectReader& parent, const std::string& key, Complex fallback);
/// Integer in [lo, hi]; required unless a fallback is given.
std::size_t read_count(ObjectReader& r, const std::string& key, std::size_t lo, std::size_t hi);
std::size_t read_count(ObjectReader& r, const std::string& key, std::size_t lo, std::size_t hi,
                       std::optional<std::size_t> fallback);

} // namespace sbren::tools
