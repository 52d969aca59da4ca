#include "pickmix/index_store.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <zlib.h>

#include "pickmix/binary_io.hpp"
#include "pickmix/errors.hpp"
#include "pickmix/parallel.hpp"

namespace pickmix {

namespace {

constexpr std::string_view kMagic = "PMIX";

std::uint32_t crc32_of(std::string_view payload) {
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed large payloads in chunks.
    std::size_t off = 0;
    while (off < payload.size()) {
        const auto chunk = std::min<std::size_t>(payload.size() - off, 1u << 30);
        crc = crc32(crc, reinterpret_cast<const Bytef*>(payload.data() + off),
                    static_cast<uInt>(chunk));
        off += chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

void put_block(io::Writer& out, std::string_view tag, const std::string& payload) {
    out.bytes(tag);
    out.u64(payload.size());
    out.bytes(payload);
    out.u32(crc32_of(payload));
}

std::string_view take_block(io::Reader& in, std::string_view expected_tag) {
    const auto tag = in.bytes(4);
    if (tag != expected_tag)
        throw CorruptionError("expected block " + std::string(expected_tag) + ", found " +
                              std::string(tag));
    const auto len = in.u64();
    if (len > in.remaining()) throw CorruptionError("block " + std::string(tag) + " truncated");
    const auto payload = in.bytes(static_cast<std::size_t>(len));
    if (in.u32() != crc32_of(payload))
        throw CorruptionError("checksum mismatch in block " + std::string(tag));
    return payload;
}

std::string encode_conf(const ShapeIndex& index) {
    io::Writer w;
    const auto& f = index.fingerprint;
    w.u32(f.version);
    w.str(f.hog_variant);
    w.u32(static_cast<std::uint32_t>(f.orientation_bins));
    w.u32(static_cast<std::uint32_t>(f.levels.size()));
    for (const auto& g : f.levels) {
        w.u32(static_cast<std::uint32_t>(g.cols));
        w.u32(static_cast<std::uint32_t>(g.rows));
    }
    w.u32(static_cast<std::uint32_t>(f.resolution));
    w.u32(static_cast<std::uint32_t>(f.dim));
    w.u32(static_cast<std::uint32_t>(index.label_set.size()));
    for (const auto& l : index.label_set) w.str(l);
    return w.take();
}

void decode_conf(std::string_view payload, ShapeIndex& index) {
    io::Reader r(payload);
    auto& f = index.fingerprint;
    f.version = r.u32();
    f.hog_variant = r.str();
    f.orientation_bins = static_cast<int>(r.u32());
    const auto levels = r.u32();
    if (levels > 16) throw CorruptionError("implausible HoG level count");
    for (std::uint32_t i = 0; i < levels; ++i) {
        const int cols = static_cast<int>(r.u32());
        const int rows = static_cast<int>(r.u32());
        f.levels.push_back({cols, rows});
    }
    f.resolution = static_cast<int>(r.u32());
    f.dim = static_cast<int>(r.u32());
    const auto labels = r.u32();
    for (std::uint32_t i = 0; i < labels; ++i) index.label_set.push_back(r.str());
    if (!r.done()) throw CorruptionError("trailing bytes in CONF");
}

std::string encode_shapes(const ShapeIndex& index) {
    io::Writer w;
    w.u32(static_cast<std::uint32_t>(index.shapes.size()));
    for (const auto& s : index.shapes) {
        w.u32(s.id);
        w.str(s.name);
        w.str(s.source);
    }
    return w.take();
}

void decode_shapes(std::string_view payload, ShapeIndex& index) {
    io::Reader r(payload);
    const auto n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        ShapeRecord s;
        s.id = r.u32();
        s.name = r.str();
        s.source = r.str();
        index.shapes.push_back(std::move(s));
    }
    if (!r.done()) throw CorruptionError("trailing bytes in SHPS");
}

std::string encode_meshes(const ShapeIndex& index) {
    io::Writer w;
    w.u32(static_cast<std::uint32_t>(index.meshes.size()));
    for (const auto& m : index.meshes) {
        w.u32(static_cast<std::uint32_t>(m.mesh.vertices.size()));
        for (const auto& v : m.mesh.vertices) {
            w.f64(v.x());
            w.f64(v.y());
            w.f64(v.z());
        }
        w.u32(static_cast<std::uint32_t>(m.mesh.triangles.size()));
        for (std::size_t t = 0; t < m.mesh.triangles.size(); ++t) {
            for (auto i : m.mesh.triangles[t]) w.u32(i);
            w.u32(m.face_labels[t]);
        }
    }
    return w.take();
}

void decode_meshes(std::string_view payload, ShapeIndex& index) {
    io::Reader r(payload);
    const auto n = r.u32();
    for (std::uint32_t s = 0; s < n; ++s) {
        PartLabeledMesh m;
        m.label_set = index.label_set;
        const auto nv = r.u32();
        if (std::size_t(nv) * 24 > r.remaining()) throw CorruptionError("mesh truncated");
        m.mesh.vertices.reserve(nv);
        for (std::uint32_t i = 0; i < nv; ++i) {
            const double x = r.f64();
            const double y = r.f64();
            const double z = r.f64();
            m.mesh.vertices.emplace_back(x, y, z);
        }
        const auto nt = r.u32();
        if (std::size_t(nt) * 16 > r.remaining()) throw CorruptionError("mesh truncated");
        for (std::uint32_t t = 0; t < nt; ++t) {
            Triangle tri{r.u32(), r.u32(), r.u32()};
            m.mesh.triangles.push_back(tri);
            m.face_labels.push_back(r.u32());
        }
        try {
            m.validate();
        } catch (const Error& e) {
            throw CorruptionError(std::string("stored mesh invalid: ") + e.what());
        }
        index.meshes.push_back(std::move(m));
    }
    if (!r.done()) throw CorruptionError("trailing bytes in MESH");
}

std::string encode_part(const PartTable& p) {
    io::Writer w;
    w.str(p.label);
    w.u32(static_cast<std::uint32_t>(p.descriptors.size()));
    const std::uint32_t len = p.descriptors.empty() ? 0 : p.descriptors.front().values.size();
    w.u32(len);
    for (const auto& d : p.descriptors)
        for (float v : d.values) w.f32(v);

    const auto& m = p.manifold;
    w.u32(static_cast<std::uint32_t>(m.coords.rows()));
    w.u32(static_cast<std::uint32_t>(m.coords.cols()));
    w.f64(m.scale);
    w.f64(m.stress);
    for (Eigen::Index i = 0; i < m.coords.rows(); ++i)
        for (Eigen::Index k = 0; k < m.coords.cols(); ++k) w.f64(m.coords(i, k));
    for (std::size_t i = 0; i < m.duplicate_map.size(); ++i) {
        w.u32(static_cast<std::uint32_t>(i));
        w.u32(m.duplicate_map[i]);
    }
    w.u32(static_cast<std::uint32_t>(m.iterations));
    w.u8(m.converged ? 1 : 0);
    w.u32(static_cast<std::uint32_t>(m.stress_trace.size()));
    for (double s : m.stress_trace) w.f64(s);
    w.u32(static_cast<std::uint32_t>(p.absent_coords.size()));
    for (Eigen::Index k = 0; k < p.absent_coords.size(); ++k) w.f64(p.absent_coords(k));
    return w.take();
}

PartTable decode_part(std::string_view payload) {
    io::Reader r(payload);
    PartTable p;
    p.label = r.str();
    const auto n = r.u32();
    const auto len = r.u32();
    if (std::size_t(n) * len * 4 > r.remaining()) throw CorruptionError("descriptors truncated");
    p.descriptors.resize(n);
    for (auto& d : p.descriptors) {
        d.values.resize(len);
        for (auto& v : d.values) v = r.f32();
    }
    auto& m = p.manifold;
    m.part = p.label;
    const auto rows = r.u32();
    const auto cols = r.u32();
    if (std::size_t(rows) * cols * 8 > r.remaining()) throw CorruptionError("coords truncated");
    m.dim = static_cast<int>(cols);
    m.scale = r.f64();
    m.stress = r.f64();
    m.coords.resize(rows, cols);
    for (std::uint32_t i = 0; i < rows; ++i)
        for (std::uint32_t k = 0; k < cols; ++k) m.coords(i, k) = r.f64();
    m.duplicate_map.resize(rows);
    for (std::uint32_t i = 0; i < rows; ++i) {
        const auto shape = r.u32();
        const auto rep = r.u32();
        if (shape != i || rep >= rows) throw CorruptionError("bad duplicate map");
        m.duplicate_map[i] = rep;
    }
    m.iterations = static_cast<int>(r.u32());
    m.converged = r.u8() != 0;
    const auto trace = r.u32();
    if (std::size_t(trace) * 8 > r.remaining()) throw CorruptionError("stress trace truncated");
    m.stress_trace.resize(trace);
    for (auto& s : m.stress_trace) s = r.f64();
    const auto absent = r.u32();
    if (std::size_t(absent) * 8 > r.remaining()) throw CorruptionError("absent coords truncated");
    p.absent_coords.resize(absent);
    for (std::uint32_t k = 0; k < absent; ++k) p.absent_coords(k) = r.f64();
    if (!r.done()) throw CorruptionError("trailing bytes in PART " + p.label);
    return p;
}

void check_invariants(const ShapeIndex& index) {
    const auto n = index.shapes.size();
    std::set<std::uint32_t> ids;
    for (const auto& s : index.shapes)
        if (!ids.insert(s.id).second) throw CorruptionError("duplicate shape id");
    if (index.meshes.size() != n) throw CorruptionError("mesh count mismatch");
    if (index.parts.size() != index.label_set.size()) throw CorruptionError("part count mismatch");
    HogConfig hog;
    hog.orientation_bins = index.fingerprint.orientation_bins;
    hog.levels = index.fingerprint.levels;
    const auto len = std::size_t(hog.part_length());
    for (std::size_t p = 0; p < index.parts.size(); ++p) {
        const auto& part = index.parts[p];
        if (part.label != index.label_set[p]) throw CorruptionError("part order mismatch");
        if (part.descriptors.size() != n) throw CorruptionError("descriptor count mismatch");
        for (const auto& d : part.descriptors)
            if (d.values.size() != len) throw CorruptionError("descriptor length mismatch");
        const auto& m = part.manifold;
        if (std::size_t(m.coords.rows()) != n || m.dim != index.fingerprint.dim)
            throw CorruptionError("manifold shape mismatch for part " + part.label);
        if (part.absent_coords.size() != m.dim) throw CorruptionError("absent coords mismatch");
        if (!(m.scale > 0.0)) throw CorruptionError("non-positive manifold scale");
        for (std::size_t i = 0; i < n; ++i) {
            const auto rep = m.duplicate_map[i];
            if (m.coords.row(Eigen::Index(i)) != m.coords.row(Eigen::Index(rep)))
                throw CorruptionError("duplicate group coordinates differ");
        }
    }
}

std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IOError("read failed: " + path.string());
    return ss.str();
}

}  // namespace

ShapeIndex build_index(std::span<const CorpusEntry> corpus, const IndexConfig& cfg) {
    cfg.validate();
    if (corpus.empty()) throw SizeError("corpus is empty");
    std::set<std::uint32_t> ids;
    for (const auto& e : corpus) {
        if (!ids.insert(e.record.id).second)
            throw DuplicateIdError("shape id " + std::to_string(e.record.id) + " repeated");
        if (e.mesh.label_set != cfg.label_set)
            throw ConfigError("shape '" + e.record.name + "' has a different label set");
    }

    const auto n = corpus.size();
    const auto parts = cfg.label_set.size();
    const auto hog = cfg.hog_config();

    ShapeIndex index;
    index.fingerprint = ConfigFingerprint::of(cfg);
    index.label_set = cfg.label_set;
    index.meshes.resize(n);
    std::vector<std::vector<LightFieldDescriptor>> table(
        parts, std::vector<LightFieldDescriptor>(n));

    parallel_for(n, [&](std::size_t s) {
        auto [normalized, xf] = normalize(corpus[s].mesh);
        const auto split = split_parts(normalized);
        const auto views = dodecahedron_viewpoints();
        for (std::size_t p = 0; p < parts; ++p) {
            std::vector<SilhouetteImage> images;
            images.reserve(views.size());
            for (const auto& vp : views)
                images.push_back(render_silhouette(split[p].second, vp, cfg.resolution));
            table[p][s] = part_descriptor(images, hog);
        }
        index.meshes[s] = std::move(normalized);
    });

    for (const auto& e : corpus) index.shapes.push_back(e.record);

    for (std::size_t p = 0; p < parts; ++p) {
        PartTable part;
        part.label = cfg.label_set[p];
        part.descriptors = std::move(table[p]);
        const auto D = build_distance_matrix(part.descriptors);
        part.manifold = build_manifold(D, cfg.sammon, part.label);

        std::optional<std::size_t> empty_row;
        for (std::size_t s = 0; s < n && !empty_row; ++s)
            if (part.descriptors[s].is_zero()) empty_row = s;
        if (empty_row) {
            part.absent_coords = part.manifold.coords.row(Eigen::Index(*empty_row)).transpose();
        } else {
            std::vector<double> norms(n);
            for (std::size_t s = 0; s < n; ++s) norms[s] = descriptor_norm(part.descriptors[s]);
            part.absent_coords = out_of_sample_embed(part.manifold, norms, cfg.sammon);
        }
        index.parts.push_back(std::move(part));
    }
    return index;
}

std::string encode_index(const ShapeIndex& index) {
    io::Writer w;
    w.bytes(kMagic);
    w.u32(index.fingerprint.version);
    put_block(w, "CONF", encode_conf(index));
    put_block(w, "SHPS", encode_shapes(index));
    put_block(w, "MESH", encode_meshes(index));
    for (const auto& p : index.parts) put_block(w, "PART", encode_part(p));
    return w.take();
}

ShapeIndex decode_index(std::string_view bytes, const ConfigFingerprint* expected) {
    io::Reader r(bytes);
    if (r.remaining() < 8 || r.bytes(4) != kMagic) throw CorruptionError("not a PMIX index file");
    const auto version = r.u32();
    if (version != kIndexFormatVersion)
        throw VersionError("index format version " + std::to_string(version) +
                           " is not supported (expected " + std::to_string(kIndexFormatVersion) +
                           ")");
    ShapeIndex index;
    decode_conf(take_block(r, "CONF"), index);
    if (index.fingerprint.version != version) throw CorruptionError("version fields disagree");
    if (expected && !(*expected == index.fingerprint))
        throw ConfigError("index fingerprint " + index.fingerprint.describe() +
                          " does not match session " + expected->describe());
    decode_shapes(take_block(r, "SHPS"), index);
    decode_meshes(take_block(r, "MESH"), index);
    for (std::size_t p = 0; p < index.label_set.size(); ++p)
        index.parts.push_back(decode_part(take_block(r, "PART")));
    if (!r.done()) throw CorruptionError("trailing bytes after index");
    check_invariants(index);
    return index;
}

void save_index(const ShapeIndex& index, const std::filesystem::path& path) {
    const auto bytes = encode_index(index);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IOError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IOError("write failed: " + path.string());
}

ShapeIndex load_index(const std::filesystem::path& path, const ConfigFingerprint* expected) {
    return decode_index(read_all(path), expected);
}

ExternalTable ingest_external(const ShapeIndex& index, const nlohmann::json& records,
                              const ExternalTable& base) {
    if (!records.is_array()) throw QueryError("external embeddings must be a JSON array");
    ExternalTable table = base;
    for (const auto& rec : records) table.add(parse_external_record(rec, index));
    return table;
}

ExternalTable ingest_external(const ShapeIndex& index, const std::filesystem::path& path,
                              const ExternalTable& base) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_all(path));
    } catch (const nlohmann::json::exception& e) {
        throw QueryError(std::string("external embeddings: ") + e.what());
    }
    return ingest_external(index, j, base);
}

}  // namespace pickmix
