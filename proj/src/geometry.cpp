#include "pickmix/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "pickmix/errors.hpp"

namespace pickmix {

namespace {

// 2^32: normalized coordinates live on multiples of 2^-32.
constexpr double kSnapGrid = 4294967296.0;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open mesh file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Builds the final label_set and a remap from file-local label ids.
std::vector<std::uint32_t> remap_labels(const std::vector<std::string>& file_labels,
                                        const std::vector<std::string>& configured,
                                        std::vector<std::string>& out_label_set) {
    if (configured.empty()) {
        out_label_set = file_labels;
        std::vector<std::uint32_t> identity(file_labels.size());
        for (std::uint32_t i = 0; i < identity.size(); ++i) identity[i] = i;
        return identity;
    }
    out_label_set = configured;
    std::vector<std::uint32_t> remap;
    remap.reserve(file_labels.size());
    for (const auto& name : file_labels) {
        auto it = std::find(configured.begin(), configured.end(), name);
        if (it == configured.end()) throw LabelError("unknown part label '" + name + "'");
        remap.push_back(static_cast<std::uint32_t>(it - configured.begin()));
    }
    return remap;
}

std::int64_t parse_obj_index(const std::string& token, std::size_t vertex_count,
                             std::size_t line_no) {
    // "a", "a/b", "a//c", "a/b/c": only the position index matters.
    std::string head = token.substr(0, token.find('/'));
    std::int64_t idx = 0;
    try {
        std::size_t used = 0;
        idx = std::stoll(head, &used);
        if (used != head.size()) throw std::invalid_argument(head);
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad face index '" + token + "'");
    }
    if (idx < 0) idx = static_cast<std::int64_t>(vertex_count) + idx;
    else idx -= 1;
    if (idx < 0 || idx >= static_cast<std::int64_t>(vertex_count))
        throw ParseError("line " + std::to_string(line_no) + ": face index out of range");
    return idx;
}

}  // namespace

void Mesh::validate() const {
    const auto n = vertices.size();
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        const auto& tri = triangles[t];
        for (auto idx : tri) {
            if (idx >= n)
                throw ParseError("triangle " + std::to_string(t) + " references vertex " +
                                 std::to_string(idx) + " of " + std::to_string(n));
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw ParseError("triangle " + std::to_string(t) + " repeats a vertex index");
    }
    for (const auto& v : vertices) {
        if (!v.allFinite()) throw ParseError("non-finite vertex coordinate");
    }
}

void PartLabeledMesh::validate() const {
    mesh.validate();
    if (face_labels.size() != mesh.triangles.size())
        throw LabelError("face_labels has " + std::to_string(face_labels.size()) +
                         " entries for " + std::to_string(mesh.triangles.size()) + " triangles");
    for (auto l : face_labels) {
        if (l >= label_set.size())
            throw LabelError("face label " + std::to_string(l) + " not in label_set");
    }
}

const std::vector<std::string>& default_chair_labels() {
    static const std::vector<std::string> labels{"backrest", "seat", "armrests", "legs"};
    return labels;
}

PartLabeledMesh parse_obj(const std::string& text,
                          const std::vector<std::string>& configured_labels) {
    PartLabeledMesh out;
    std::vector<std::string> file_labels;
    std::vector<std::uint32_t> local_labels;
    std::optional<std::uint32_t> current;

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z))
                throw ParseError("line " + std::to_string(line_no) + ": malformed vertex");
            out.mesh.vertices.emplace_back(x, y, z);
        } else if (tag == "g") {
            std::string name;
            if (!(ls >> name) || name == "default") {
                current.reset();
                continue;
            }
            auto it = std::find(file_labels.begin(), file_labels.end(), name);
            if (it == file_labels.end()) {
                file_labels.push_back(name);
                current = static_cast<std::uint32_t>(file_labels.size() - 1);
            } else {
                current = static_cast<std::uint32_t>(it - file_labels.begin());
            }
        } else if (tag == "f") {
            std::vector<std::uint32_t> poly;
            std::string tok;
            while (ls >> tok)
                poly.push_back(static_cast<std::uint32_t>(
                    parse_obj_index(tok, out.mesh.vertices.size(), line_no)));
            if (poly.size() < 3)
                throw ParseError("line " + std::to_string(line_no) + ": face with < 3 vertices");
            if (!current)
                throw LabelError("line " + std::to_string(line_no) + ": face outside any group");
            // Fan from the first vertex.
            for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
                out.mesh.triangles.push_back({poly[0], poly[k], poly[k + 1]});
                local_labels.push_back(*current);
            }
        }
        // Every other record (vt, vn, o, s, usemtl, ...) is ignored.
    }
    if (out.mesh.triangles.empty()) throw EmptyMeshError("mesh has no faces");

    auto remap = remap_labels(file_labels, configured_labels, out.label_set);
    out.face_labels.reserve(local_labels.size());
    for (auto l : local_labels) out.face_labels.push_back(remap[l]);
    out.validate();
    return out;
}

PartLabeledMesh parse_mesh_json(const std::string& text,
                                const std::vector<std::string>& configured_labels) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("mesh JSON: ") + e.what());
    }
    PartLabeledMesh out;
    std::vector<std::string> file_labels;
    std::vector<std::uint32_t> local_labels;
    try {
        for (const auto& v : j.at("vertices")) {
            if (v.size() != 3) throw ParseError("mesh JSON: vertex needs 3 coordinates");
            out.mesh.vertices.emplace_back(v[0].get<double>(), v[1].get<double>(),
                                           v[2].get<double>());
        }
        for (const auto& t : j.at("triangles")) {
            if (t.size() != 3) throw ParseError("mesh JSON: triangle needs 3 indices");
            out.mesh.triangles.push_back(
                {t[0].get<std::uint32_t>(), t[1].get<std::uint32_t>(), t[2].get<std::uint32_t>()});
        }
        local_labels = j.at("face_labels").get<std::vector<std::uint32_t>>();
        file_labels = j.at("label_set").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("mesh JSON: ") + e.what());
    }
    if (out.mesh.triangles.empty()) throw EmptyMeshError("mesh has no faces");
    if (local_labels.size() != out.mesh.triangles.size())
        throw LabelError("face_labels length does not match triangle count");
    for (auto l : local_labels) {
        if (l >= file_labels.size()) throw LabelError("face label outside label_set");
    }
    auto remap = remap_labels(file_labels, configured_labels, out.label_set);
    out.face_labels.reserve(local_labels.size());
    for (auto l : local_labels) out.face_labels.push_back(remap[l]);
    out.validate();
    return out;
}

PartLabeledMesh load_mesh(const std::filesystem::path& path, MeshFormat format,
                          const std::vector<std::string>& configured_labels) {
    const auto text = read_file(path);
    return format == MeshFormat::Obj ? parse_obj(text, configured_labels)
                                     : parse_mesh_json(text, configured_labels);
}

std::string to_mesh_json(const PartLabeledMesh& m) {
    nlohmann::json j;
    auto& verts = j["vertices"] = nlohmann::json::array();
    for (const auto& v : m.mesh.vertices) verts.push_back({v.x(), v.y(), v.z()});
    auto& tris = j["triangles"] = nlohmann::json::array();
    for (const auto& t : m.mesh.triangles) tris.push_back({t[0], t[1], t[2]});
    j["face_labels"] = m.face_labels;
    j["label_set"] = m.label_set;
    return j.dump();
}

void save_mesh_json(const PartLabeledMesh& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot write " + path.string());
    out << to_mesh_json(m);
    if (!out) throw IOError("write failed: " + path.string());
}

BoundingSphere bounding_sphere(const Mesh& m) {
    if (m.vertices.empty()) throw EmptyMeshError("bounding sphere of an empty mesh");
    Vec3 lo = m.vertices.front();
    Vec3 hi = lo;
    for (const auto& v : m.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    return {0.5 * (lo + hi), 0.5 * (hi - lo).norm()};
}

std::pair<PartLabeledMesh, NormalizationTransform> normalize(const PartLabeledMesh& m) {
    if (m.mesh.empty()) throw EmptyMeshError("cannot normalize a mesh without faces");
    // Only vertices referenced by faces define the object.
    Mesh used;
    std::vector<bool> referenced(m.mesh.vertices.size(), false);
    for (const auto& t : m.mesh.triangles)
        for (auto i : t) referenced[i] = true;
    for (std::size_t i = 0; i < referenced.size(); ++i)
        if (referenced[i]) used.vertices.push_back(m.mesh.vertices[i]);

    const auto sphere = bounding_sphere(used);
    if (!(sphere.radius > 0.0)) throw DegenerateError("all vertices coincide");

    NormalizationTransform xf;
    xf.translation = -sphere.center;
    xf.scale = 1.0 / sphere.radius;

    PartLabeledMesh out = m;
    for (auto& v : out.mesh.vertices) {
        v = xf.apply(v);
        for (int k = 0; k < 3; ++k) v[k] = std::nearbyint(v[k] * kSnapGrid) / kSnapGrid;
    }
    return {std::move(out), xf};
}

std::vector<std::pair<std::string, Mesh>> split_parts(const PartLabeledMesh& m) {
    std::vector<std::pair<std::string, Mesh>> parts;
    parts.reserve(m.label_set.size());
    for (const auto& label : m.label_set) parts.emplace_back(label, Mesh{});

    std::vector<std::unordered_map<std::uint32_t, std::uint32_t>> remap(m.label_set.size());
    for (std::size_t t = 0; t < m.mesh.triangles.size(); ++t) {
        const auto label = m.face_labels[t];
        auto& part = parts[label].second;
        auto& local = remap[label];
        Triangle tri{};
        for (int k = 0; k < 3; ++k) {
            const auto g = m.mesh.triangles[t][k];
            auto [it, inserted] =
                local.try_emplace(g, static_cast<std::uint32_t>(part.vertices.size()));
            if (inserted) part.vertices.push_back(m.mesh.vertices[g]);
            tri[k] = it->second;
        }
        part.triangles.push_back(tri);
    }
    return parts;
}

}  // namespace pickmix
