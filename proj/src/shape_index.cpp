#include "pickmix/shape_index.hpp"

#include <algorithm>
#include <sstream>

#include "pickmix/errors.hpp"

namespace pickmix {

void IndexConfig::validate() const {
    if (resolution < 8) throw ConfigError("resolution must be at least 8");
    if (label_set.empty()) throw ConfigError("label_set must not be empty");
    for (std::size_t i = 0; i < label_set.size(); ++i)
        for (std::size_t j = i + 1; j < label_set.size(); ++j)
            if (label_set[i] == label_set[j])
                throw ConfigError("duplicate label '" + label_set[i] + "'");
    sammon.validate();
    const auto hog = hog_config();
    for (const auto& level : hog.levels)
        if (level.cols > resolution || level.rows > resolution)
            throw ConfigError("HoG grid larger than the render resolution");
}

ConfigFingerprint ConfigFingerprint::of(const IndexConfig& cfg) {
    const auto hog = cfg.hog_config();
    ConfigFingerprint f;
    f.hog_variant = to_string(cfg.hog);
    f.orientation_bins = hog.orientation_bins;
    f.levels = hog.levels;
    f.resolution = cfg.resolution;
    f.dim = cfg.sammon.dim;
    return f;
}

nlohmann::json ConfigFingerprint::to_json() const {
    nlohmann::json levels_json = nlohmann::json::array();
    for (const auto& g : levels) levels_json.push_back({g.cols, g.rows});
    return {{"version", version},       {"hog_variant", hog_variant},
            {"orientation_bins", orientation_bins}, {"levels", levels_json},
            {"resolution", resolution}, {"dim", dim}};
}

std::string ConfigFingerprint::describe() const { return to_json().dump(); }

const PartTable& ShapeIndex::part(const std::string& label) const {
    if (auto p = part_position(label)) return parts[*p];
    throw UnknownPartError("unknown part '" + label + "'");
}

std::optional<std::size_t> ShapeIndex::part_position(const std::string& label) const {
    for (std::size_t i = 0; i < parts.size(); ++i)
        if (parts[i].label == label) return i;
    return std::nullopt;
}

std::optional<std::size_t> ShapeIndex::find_row(std::uint32_t id) const {
    for (std::size_t i = 0; i < shapes.size(); ++i)
        if (shapes[i].id == id) return i;
    return std::nullopt;
}

std::size_t ShapeIndex::row_of(std::uint32_t id) const {
    if (auto r = find_row(id)) return *r;
    throw UnknownSourceError("no indexed shape with id " + std::to_string(id));
}

const ExternalEmbedding* ExternalTable::find(const std::string& id) const {
    auto it = records_.find(id);
    return it == records_.end() ? nullptr : &it->second;
}

void ExternalTable::add(ExternalEmbedding e) {
    if (records_.count(e.id)) throw DuplicateIdError("external embedding '" + e.id + "' exists");
    auto id = e.id;
    records_.emplace(std::move(id), std::move(e));
}

ExternalEmbedding parse_external_record(const nlohmann::json& j, const ShapeIndex& index) {
    ExternalEmbedding e;
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string())
        throw QueryError("external embedding needs a string 'id'");
    e.id = j["id"].get<std::string>();
    if (e.id.empty()) throw QueryError("external embedding id must not be empty");
    if (j.contains("note") && j["note"].is_string()) e.note = j["note"].get<std::string>();
    if (!j.contains("parts") || !j["parts"].is_object())
        throw QueryError("external embedding '" + e.id + "' needs a 'parts' object");
    for (const auto& [label, coords] : j["parts"].items()) {
        index.part(label);  // UnknownPartError
        if (!coords.is_array()) throw QueryError("coordinates for '" + label + "' must be an array");
        Eigen::VectorXd v(Eigen::Index(coords.size()));
        for (std::size_t k = 0; k < coords.size(); ++k) {
            if (!coords[k].is_number())
                throw QueryError("coordinates for '" + label + "' must be numbers");
            v(Eigen::Index(k)) = coords[k].get<double>();
        }
        if (v.size() != index.dim())
            throw DimensionError("part '" + label + "' expects " + std::to_string(index.dim()) +
                                 " coordinates, got " + std::to_string(v.size()));
        e.parts.emplace(label, std::move(v));
    }
    return e;
}

nlohmann::json external_to_json(const ExternalEmbedding& e) {
    nlohmann::json parts = nlohmann::json::object();
    for (const auto& [label, v] : e.parts)
        parts[label] = std::vector<double>(v.data(), v.data() + v.size());
    return {{"id", e.id}, {"parts", parts}, {"note", e.note}};
}

}  // namespace pickmix
