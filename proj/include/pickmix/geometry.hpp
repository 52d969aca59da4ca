#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace pickmix {

using Vec3 = Eigen::Vector3d;
using Triangle = std::array<std::uint32_t, 3>;

/// Triangle soup in model units. Watertightness is not required.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;

    bool empty() const { return triangles.empty(); }

    /// Throws ParseError when an index is out of range or a triangle repeats a vertex.
    void validate() const;
};

/// Mesh whose faces each carry an index into `label_set`.
struct PartLabeledMesh {
    Mesh mesh;
    std::vector<std::uint32_t> face_labels;
    std::vector<std::string> label_set;

    void validate() const;
};

/// p' = (p + translation) * scale
struct NormalizationTransform {
    Vec3 translation = Vec3::Zero();
    double scale = 1.0;

    Vec3 apply(const Vec3& p) const { return (p + translation) * scale; }
};

/// The chair taxonomy used throughout: backrest, seat, armrests, legs.
const std::vector<std::string>& default_chair_labels();

enum class MeshFormat { Obj, Json };

/// Loads a part-labeled mesh. When `configured_labels` is non-empty the
/// result's label_set is exactly that list (labels absent from the file are
/// kept as empty parts); otherwise labels appear in order of first use.
PartLabeledMesh load_mesh(const std::filesystem::path& path, MeshFormat format,
                          const std::vector<std::string>& configured_labels = {});
PartLabeledMesh parse_obj(const std::string& text,
                          const std::vector<std::string>& configured_labels = {});
PartLabeledMesh parse_mesh_json(const std::string& text,
                                const std::vector<std::string>& configured_labels = {});
std::string to_mesh_json(const PartLabeledMesh& m);
void save_mesh_json(const PartLabeledMesh& m, const std::filesystem::path& path);

/// Bounding sphere used for normalization: the circumsphere of the
/// axis-aligned bounding box. Depends only on the box, so meshes sharing a
/// box share the transform exactly.
struct BoundingSphere {
    Vec3 center;
    double radius;
};
BoundingSphere bounding_sphere(const Mesh& m);

/// Maps the whole-object bounding sphere onto the unit sphere at the origin.
/// Output coordinates are snapped to a 2^-32 grid so that inputs differing
/// only by a similarity transform normalize to bit-identical vertices.
std::pair<PartLabeledMesh, NormalizationTransform> normalize(const PartLabeledMesh& m);

/// One entry per label in label_set, in label_set order. Labels without faces
/// map to an empty mesh. Vertices are re-indexed compactly per part.
std::vector<std::pair<std::string, Mesh>> split_parts(const PartLabeledMesh& m);

}  // namespace pickmix
