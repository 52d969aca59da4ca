#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "pickmix/descriptor.hpp"
#include "pickmix/geometry.hpp"
#include "pickmix/manifold.hpp"

namespace pickmix {

inline constexpr std::uint32_t kIndexFormatVersion = 1;

struct IndexConfig {
    int resolution = kDefaultResolution;
    HogVariant hog = HogVariant::TwoLevel;
    SammonConfig sammon{};
    std::vector<std::string> label_set = default_chair_labels();

    HogConfig hog_config() const { return HogConfig::for_variant(hog); }
    void validate() const;
};

/// Everything a descriptor or coordinate depends on. Two indexes are
/// comparable only when their fingerprints match.
struct ConfigFingerprint {
    std::uint32_t version = kIndexFormatVersion;
    std::string hog_variant;
    int orientation_bins = 0;
    std::vector<GridSize> levels;
    int resolution = 0;
    int dim = 0;

    static ConfigFingerprint of(const IndexConfig& cfg);
    nlohmann::json to_json() const;
    std::string describe() const;
    bool operator==(const ConfigFingerprint&) const = default;
};

struct ShapeRecord {
    std::uint32_t id = 0;
    std::string name;
    std::string source;
    bool operator==(const ShapeRecord&) const = default;
};

/// Descriptors and manifold of one part; rows follow ShapeIndex::shapes.
struct PartTable {
    std::string label;
    std::vector<LightFieldDescriptor> descriptors;
    PartManifold manifold;
    /// Where the empty (zero-descriptor) part sits on this manifold.
    Eigen::VectorXd absent_coords;
};

/// Immutable query target built by build_index or load_index.
struct ShapeIndex {
    ConfigFingerprint fingerprint;
    std::vector<std::string> label_set;
    std::vector<ShapeRecord> shapes;
    /// Normalized meshes, kept for thumbnails.
    std::vector<PartLabeledMesh> meshes;
    std::vector<PartTable> parts;

    std::size_t size() const { return shapes.size(); }
    int dim() const { return fingerprint.dim; }
    /// Throws UnknownPartError.
    const PartTable& part(const std::string& label) const;
    std::optional<std::size_t> part_position(const std::string& label) const;
    /// Row of a shape id; throws UnknownSourceError.
    std::size_t row_of(std::uint32_t id) const;
    std::optional<std::size_t> find_row(std::uint32_t id) const;
};

/// Coordinates regressed elsewhere (e.g. from an image) for any subset of parts.
struct ExternalEmbedding {
    std::string id;
    std::map<std::string, Eigen::VectorXd> parts;
    std::string note;
};

/// Session-level table of ingested embeddings, addressable as `ext:<id>`.
class ExternalTable {
public:
    const ExternalEmbedding* find(const std::string& id) const;
    std::size_t size() const { return records_.size(); }
    /// Throws DuplicateIdError.
    void add(ExternalEmbedding e);
    const std::map<std::string, ExternalEmbedding>& records() const { return records_; }

private:
    std::map<std::string, ExternalEmbedding> records_;
};

/// Validates one record against the index: known parts, matching dimension.
ExternalEmbedding parse_external_record(const nlohmann::json& j, const ShapeIndex& index);
nlohmann::json external_to_json(const ExternalEmbedding& e);

}  // namespace pickmix
