#include <catch_amalgamated.hpp>

#include <fstream>

#include "fixtures.hpp"
#include "pickmix/errors.hpp"
#include "pickmix/index_store.hpp"

using namespace pickmix;

namespace {

void put_u32(std::string& s, std::size_t at, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s[at + std::size_t(i)] = char((v >> (8 * i)) & 0xFF);
}

}  // namespace

TEST_CASE("index holds one table per label with full-length descriptors", "[index]") {
    const auto& index = fixtures::small_index();
    REQUIRE(index.size() == 10);
    REQUIRE(index.label_set == default_chair_labels());
    REQUIRE(index.parts.size() == 4);
    CHECK(index.dim() == 4);
    CHECK(index.fingerprint.resolution == 64);
    CHECK(index.fingerprint.hog_variant == "two-level");
    CHECK(index.meshes.size() == 10);
    for (std::size_t p = 0; p < 4; ++p) {
        const auto& t = index.parts[p];
        CHECK(t.label == index.label_set[p]);
        CHECK(t.descriptors.size() == 10);
        for (const auto& d : t.descriptors) CHECK(d.values.size() == 52200);
        CHECK(t.manifold.coords.rows() == 10);
        CHECK(t.manifold.coords.cols() == 4);
        CHECK(t.absent_coords.size() == 4);
    }
}

TEST_CASE("absent parts get zero descriptors and share the absent point", "[index]") {
    const auto& index = fixtures::small_index();
    const auto& arms = index.part("armrests");
    for (std::size_t r = 0; r < index.size(); ++r) {
        const bool armless = r % 2 == 0;
        CHECK(arms.descriptors[r].is_zero() == armless);
        if (armless) CHECK(arms.manifold.coords.row(Eigen::Index(r)).transpose() == arms.absent_coords);
    }
    // Seats are never absent: the absent point comes from out-of-sample placement.
    const auto& seat = index.part("seat");
    CHECK(seat.absent_coords.allFinite());
    for (std::size_t r = 0; r < index.size(); ++r) CHECK_FALSE(seat.descriptors[r].is_zero());
}

TEST_CASE("lookups", "[index]") {
    const auto& index = fixtures::small_index();
    CHECK_THROWS_AS(index.part("wings"), UnknownPartError);
    CHECK_THROWS_AS(index.row_of(999), UnknownSourceError);
    CHECK(index.row_of(index.shapes[3].id) == 3);
    CHECK_FALSE(index.find_row(999).has_value());
}

TEST_CASE("build_index preconditions", "[index]") {
    auto corpus = to_corpus(fixtures::mixed_shapes(3));
    CHECK_THROWS_AS(build_index(std::span<const CorpusEntry>{}, fixtures::small_config()), SizeError);
    auto dup = corpus;
    dup[2].record.id = dup[0].record.id;
    CHECK_THROWS_AS(build_index(dup, fixtures::small_config()), DuplicateIdError);
    auto other = corpus;
    other[1].mesh.label_set = {"a", "b", "c", "d"};
    CHECK_THROWS_AS(build_index(other, fixtures::small_config()), ConfigError);
    auto bad = fixtures::small_config();
    bad.resolution = 4;
    CHECK_THROWS_AS(build_index(corpus, bad), ConfigError);
}

TEST_CASE("encode decode encode is byte identical", "[index]") {
    const auto& index = fixtures::small_index();
    const auto bytes = encode_index(index);
    const auto back = decode_index(bytes);
    CHECK(encode_index(back) == bytes);
    CHECK(back.shapes == index.shapes);
    CHECK(back.fingerprint == index.fingerprint);
    for (std::size_t p = 0; p < 4; ++p) {
        CHECK(back.parts[p].manifold.coords == index.parts[p].manifold.coords);
        CHECK(back.parts[p].manifold.stress_trace == index.parts[p].manifold.stress_trace);
        CHECK(back.parts[p].manifold.duplicate_map == index.parts[p].manifold.duplicate_map);
        CHECK(back.parts[p].absent_coords == index.parts[p].absent_coords);
        CHECK(back.parts[p].descriptors == index.parts[p].descriptors);
    }
    CHECK(back.meshes[4].mesh.vertices == index.meshes[4].mesh.vertices);
}

TEST_CASE("corrupted and mismatched files are rejected", "[index]") {
    const auto bytes = encode_index(fixtures::small_index());
    CHECK_THROWS_AS(decode_index("XMIX" + bytes.substr(4)), CorruptionError);
    auto future = bytes;
    put_u32(future, 4, kIndexFormatVersion + 1);
    CHECK_THROWS_AS(decode_index(future), VersionError);
    CHECK_THROWS_AS(decode_index(bytes.substr(0, bytes.size() - 1)), CorruptionError);
    CHECK_THROWS_AS(decode_index(bytes.substr(0, 6)), CorruptionError);
    auto flipped = bytes;
    flipped[bytes.size() / 2] ^= 0x10;
    CHECK_THROWS_AS(decode_index(flipped), CorruptionError);

    auto cfg = fixtures::small_config();
    cfg.sammon.dim = 8;
    const auto other = ConfigFingerprint::of(cfg);
    CHECK_THROWS_AS(decode_index(bytes, &other), ConfigError);
    const auto same = ConfigFingerprint::of(fixtures::small_config());
    CHECK_NOTHROW(decode_index(bytes, &same));
}

TEST_CASE("save and load through files", "[index]") {
    const auto path = fixtures::temp_path("store.pmix");
    save_index(fixtures::small_index(), path);
    const auto loaded = load_index(path);
    CHECK(encode_index(loaded) == encode_index(fixtures::small_index()));
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_index(path), IOError);
}

TEST_CASE("builds do not depend on the worker count", "[index]") {
    const auto corpus = to_corpus(fixtures::mixed_shapes(6, 21));
    setenv("PMIX_THREADS", "1", 1);
    const auto one = encode_index(build_index(corpus, fixtures::small_config()));
    setenv("PMIX_THREADS", "3", 1);
    const auto three = encode_index(build_index(corpus, fixtures::small_config()));
    unsetenv("PMIX_THREADS");
    CHECK(one == three);
}

TEST_CASE("config fingerprint", "[index]") {
    auto cfg = fixtures::small_config();
    const auto a = ConfigFingerprint::of(cfg);
    CHECK(a.levels == std::vector<GridSize>{{17, 17}, {1, 1}});
    CHECK(a.orientation_bins == 9);
    cfg.hog = HogVariant::ThreeLevel;
    const auto b = ConfigFingerprint::of(cfg);
    CHECK_FALSE(a == b);
    CHECK(b.hog_variant == "original");
    CHECK(a.to_json()["dim"] == 4);
    CHECK_FALSE(a.describe().empty());
}

TEST_CASE("external embeddings are validated against the index", "[index]") {
    const auto& index = fixtures::small_index();
    const nlohmann::json good = {{"id", "img7"}, {"parts", {{"legs", {0.1, 0.2, 0.3, 0.4}}}}, {"note", "photo"}};
    const auto rec = parse_external_record(good, index);
    CHECK(rec.id == "img7");
    CHECK(rec.parts.at("legs").size() == 4);
    CHECK(external_to_json(rec)["parts"]["legs"].size() == 4);

    CHECK_THROWS_AS(parse_external_record({{"id", "x"}, {"parts", {{"legs", {0.1, 0.2}}}}}, index), DimensionError);
    CHECK_THROWS_AS(parse_external_record({{"id", "x"}, {"parts", {{"wings", {1, 2, 3, 4}}}}}, index),
                    UnknownPartError);
    CHECK_THROWS_AS(parse_external_record({{"parts", nlohmann::json::object()}}, index), QueryError);
    CHECK_THROWS_AS(parse_external_record({{"id", "x"}, {"parts", {{"legs", {"a", 2, 3, 4}}}}}, index),
                    QueryError);

    ExternalTable base;
    const auto table = ingest_external(index, nlohmann::json::array({good}), base);
    CHECK(table.size() == 1);
    CHECK(base.size() == 0);
    CHECK_THROWS_AS(ingest_external(index, nlohmann::json::array({good}), table), DuplicateIdError);
    CHECK_THROWS_AS(ingest_external(index, good, base), QueryError);

    const auto path = fixtures::temp_path("ext.json");
    std::ofstream(path) << nlohmann::json::array({good}).dump();
    CHECK(ingest_external(index, path).find("img7") != nullptr);
    std::filesystem::remove(path);
}
