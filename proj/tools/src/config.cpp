#include "sbren_tools/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace sbren::tools {

ObjectReader::ObjectReader(const json& object, std::string path) : object_(&object), path_(std::move(path)) {
    if (!object.is_object()) throw ConfigError(path_ + ": expected an object");
}

bool ObjectReader::has(const std::string& key) const { return object_->contains(key); }

const json& ObjectReader::require(const std::string& key) {
    seen_.insert(key);
    if (!object_->contains(key)) throw ConfigError(child_path(key) + ": missing required key");
    return object_->at(key);
}

const json& ObjectReader::raw(const std::string& key) { return require(key); }

double ObjectReader::number(const std::string& key) {
    const auto& v = require(key);
    if (!v.is_number()) throw ConfigError(child_path(key) + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(child_path(key) + ": must be finite");
    return d;
}

double ObjectReader::number(const std::string& key, double fallback) {
    seen_.insert(key);
    return has(key) ? number(key) : fallback;
}

std::int64_t ObjectReader::integer(const std::string& key) {
    const auto& v = require(key);
    if (!v.is_number_integer()) throw ConfigError(child_path(key) + ": expected an integer");
    return v.get<std::int64_t>();
}

std::int64_t ObjectReader::integer(const std::string& key, std::int64_t fallback) {
    seen_.insert(key);
    return has(key) ? integer(key) : fallback;
}

bool ObjectReader::boolean(const std::string& key, bool fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const auto& v = object_->at(key);
    if (!v.is_boolean()) throw ConfigError(child_path(key) + ": expected true or false");
    return v.get<bool>();
}

std::string ObjectReader::string(const std::string& key) {
    const auto& v = require(key);
    if (!v.is_string()) throw ConfigError(child_path(key) + ": expected a string");
    return v.get<std::string>();
}

std::string ObjectReader::string(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    return has(key) ? string(key) : fallback;
}

std::vector<double> ObjectReader::numbers(const std::string& key) {
    const auto& v = require(key);
    if (!v.is_array()) throw ConfigError(child_path(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number() || !std::isfinite(x.get<double>()))
            throw ConfigError(child_path(key) + ": expected finite numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

ObjectReader ObjectReader::object(const std::string& key) { return ObjectReader(require(key), child_path(key)); }

std::vector<ObjectReader> ObjectReader::objects(const std::string& key) {
    const auto& v = require(key);
    if (!v.is_array()) throw ConfigError(child_path(key) + ": expected an array of objects");
    std::vector<ObjectReader> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(v[i], child_path(key) + "[" + std::to_string(i) + "]");
    return out;
}

void ObjectReader::finish() const {
    for (const auto& [key, value] : object_->items())
        if (!seen_.count(key)) throw ConfigError(child_path(key) + ": unknown key");
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": invalid JSON: " + e.what());
    }
}

GridSpec read_grid(ObjectReader r) {
    GridSpec g;
    g.k_min = r.number("k_min");
    g.k_max = r.number("k_max");
    const auto count = r.integer("count");
    if (count < 1) throw ConfigError(r.child_path("count") + ": must be >= 1");
    g.count = static_cast<std::size_t>(count);
    try {
        g.dispersion = parse_dispersion(r.string("dispersion", "linear"));
        g.quadrature = parse_quadrature(r.string("quadrature", "midpoint"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(r.path() + ": " + e.what());
    }
    g.mass = r.number("mass", 1.0);
    r.finish();
    if (!(g.k_min < g.k_max)) throw ConfigError(r.path() + ": need k_min < k_max");
    return g;
}

FormFactorRule read_form_factor(ObjectReader r) {
    FormFactorRule f;
    f.coefficient = r.number("coefficient", 1.0);
    f.exponent = r.number("exponent", 0.0);
    r.finish();
    return f;
}

CMatrix read_complex_matrix(ObjectReader& parent, const std::string& key) {
    ObjectReader r = parent.object(key);
    auto rows_of = [&](const std::string& part) {
        const auto& v = r.raw(part);
        if (!v.is_array() || v.empty()) throw ConfigError(r.child_path(part) + ": expected a nonempty array of rows");
        std::vector<std::vector<double>> rows;
        for (const auto& row : v) {
            if (!row.is_array() || row.empty()) throw ConfigError(r.child_path(part) + ": rows must be nonempty arrays");
            std::vector<double> vals;
            for (const auto& x : row) {
                if (!x.is_number()) throw ConfigError(r.child_path(part) + ": entries must be numbers");
                vals.push_back(x.get<double>());
            }
            if (!rows.empty() && vals.size() != rows.front().size())
                throw ConfigError(r.child_path(part) + ": ragged rows");
            rows.push_back(std::move(vals));
        }
        return rows;
    };
    const auto re = rows_of("re");
    CMatrix m(static_cast<Eigen::Index>(re.size()), static_cast<Eigen::Index>(re.front().size()));
    for (std::size_t i = 0; i < re.size(); ++i)
        for (std::size_t j = 0; j < re[i].size(); ++j) m(i, j) = re[i][j];
    if (r.has("im")) {
        const auto im = rows_of("im");
        if (im.size() != re.size() || im.front().size() != re.front().size())
            throw ConfigError(r.child_path("im") + ": shape differs from re");
        for (std::size_t i = 0; i < im.size(); ++i)
            for (std::size_t j = 0; j < im[i].size(); ++j) m(i, j) += Complex{0.0, im[i][j]};
    }
    r.finish();
    return m;
}

namespace {

Complex to_complex(const json& v, const std::string& path) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError(path + ": expected a number or a [re, im] pair");
}

} // namespace

std::vector<Complex> read_z_list(ObjectReader& parent, const std::string& key) {
    const auto& v = parent.raw(key);
    if (!v.is_array() || v.empty()) throw ConfigError(parent.child_path(key) + ": expected a nonempty array");
    std::vector<Complex> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(to_complex(v[i], parent.child_path(key) + "[" + std::to_string(i) + "]"));
    return out;
}

Complex read_z(ObjectReader& parent, const std::string& key, Complex fallback) {
    if (!parent.has(key)) return fallback;
    return to_complex(parent.raw(key), parent.child_path(key));
}

std::size_t read_count(ObjectReader& r, const std::string& key, std::size_t lo, std::size_t hi) {
    return read_count(r, key, lo, hi, std::nullopt);
}

std::size_t read_count(ObjectReader& r, const std::string& key, std::size_t lo, std::size_t hi,
                       std::optional<std::size_t> fallback) {
    if (fallback && !r.has(key)) return *fallback;
    const auto v = r.integer(key);
    if (v < static_cast<std::int64_t>(lo) || v > static_cast<std::int64_t>(hi))
        throw ConfigError(r.child_path(key) + ": must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<std::size_t>(v);
}

} // namespace sbren::tools
