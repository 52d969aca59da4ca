#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "pickmix/shape_index.hpp"

namespace pickmix {

struct CorpusEntry {
    ShapeRecord record;
    PartLabeledMesh mesh;
};

/// normalize -> split_parts -> render_all -> part_descriptor ->
/// build_distance_matrix -> build_manifold, per part. Deterministic for a
/// fixed corpus order and config regardless of thread count.
ShapeIndex build_index(std::span<const CorpusEntry> corpus, const IndexConfig& cfg);

/// Index file layout (all little-endian):
///   "PMIX" u32 version
///   blocks: 4-byte tag, u64 payload length, payload, u32 CRC32(payload)
///   CONF (fingerprint, label set), SHPS, MESH, then one PART per label.
std::string encode_index(const ShapeIndex& index);

/// Verifies magic, version, checksums and invariants. When `expected` is
/// given, a different fingerprint is refused with ConfigError.
ShapeIndex decode_index(std::string_view bytes, const ConfigFingerprint* expected = nullptr);

void save_index(const ShapeIndex& index, const std::filesystem::path& path);
ShapeIndex load_index(const std::filesystem::path& path,
                      const ConfigFingerprint* expected = nullptr);

/// Adds every record of a JSON array to a copy of `base`; the index is untouched.
ExternalTable ingest_external(const ShapeIndex& index, const nlohmann::json& records,
                              const ExternalTable& base = {});
ExternalTable ingest_external(const ShapeIndex& index, const std::filesystem::path& path,
                              const ExternalTable& base = {});

}  // namespace pickmix
