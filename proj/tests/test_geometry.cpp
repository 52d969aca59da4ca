#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "pickmix/errors.hpp"
#include "pickmix/geometry.hpp"

using namespace pickmix;
using Catch::Matchers::WithinAbs;

namespace {

const char* kTwoPartObj = R"(# two labeled quads
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
g seat
f 1 2 3 4
g legs
f 5/1 6/2/3 7//1
f -3 -2 -1
)";

PartLabeledMesh unit_box(const std::vector<std::string>& labels = {"seat"}) {
    PartLabeledMesh m;
    m.label_set = labels;
    for (int x : {0, 1})
        for (int y : {0, 1})
            for (int z : {0, 1}) m.mesh.vertices.emplace_back(x, y, z);
    m.mesh.triangles = {{0, 1, 3}, {0, 3, 2}, {4, 5, 7}, {4, 7, 6}};
    m.face_labels.assign(4, 0);
    return m;
}

}  // namespace

TEST_CASE("obj groups become part labels", "[geometry]") {
    const auto m = parse_obj(kTwoPartObj);
    REQUIRE(m.label_set == std::vector<std::string>{"seat", "legs"});
    REQUIRE(m.mesh.triangles.size() == 4);  // quad fans into two
    CHECK(m.face_labels == std::vector<std::uint32_t>{0, 0, 1, 1});
    CHECK(m.mesh.triangles[2] == Triangle{4, 5, 6});
    CHECK(m.mesh.triangles[3] == Triangle{4, 5, 6});  // negative indices
}

TEST_CASE("configured labels fix the label set", "[geometry]") {
    const auto m = parse_obj(kTwoPartObj, default_chair_labels());
    REQUIRE(m.label_set == default_chair_labels());
    CHECK(m.face_labels == std::vector<std::uint32_t>{1, 1, 3, 3});
    CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\ng wings\nf 1 2 3\n", default_chair_labels()),
                    LabelError);
}

TEST_CASE("obj error cases", "[geometry]") {
    CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n"), LabelError);
    CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\ng seat\nf 1 2 3\ng\nf 1 2 3\n"), LabelError);
    CHECK_THROWS_AS(parse_obj("v 0 0 0\n"), EmptyMeshError);
    CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\ng seat\nf 1 2 9\n"), ParseError);
    CHECK_THROWS_AS(parse_obj("v 0 0 zero\n"), ParseError);
    CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\ng seat\nf 1 2\n"), ParseError);
}

TEST_CASE("mesh json round trip is exact", "[geometry]") {
    auto m = unit_box(default_chair_labels());
    m.mesh.vertices[3] = Vec3(0.1, 1.0 / 3.0, -2.5e-7);
    m.face_labels = {0, 1, 3, 3};
    const auto back = parse_mesh_json(to_mesh_json(m));
    CHECK(back.mesh.vertices == m.mesh.vertices);
    CHECK(back.mesh.triangles == m.mesh.triangles);
    CHECK(back.face_labels == m.face_labels);
    CHECK(back.label_set == m.label_set);

    const auto path = std::filesystem::temp_directory_path() / "pickmix_geometry_test.json";
    save_mesh_json(m, path);
    const auto loaded = load_mesh(path, MeshFormat::Json);
    std::filesystem::remove(path);
    CHECK(loaded.mesh.vertices == m.mesh.vertices);
    CHECK_THROWS_AS(load_mesh("/nonexistent/mesh.obj", MeshFormat::Obj), ParseError);
}

TEST_CASE("bounding sphere is the box circumsphere", "[geometry]") {
    Mesh m;
    m.vertices = {Vec3(-1, 2, 0), Vec3(3, 4, 5), Vec3(0, 3, 1)};
    const auto s = bounding_sphere(m);
    CHECK(s.center.isApprox(Vec3(1, 3, 2.5)));
    CHECK_THAT(s.radius, WithinAbs(0.5 * std::sqrt(16.0 + 4.0 + 25.0), 1e-15));
    for (const auto& v : m.vertices) CHECK((v - s.center).norm() <= s.radius + 1e-12);
}

TEST_CASE("normalize maps onto the unit sphere", "[geometry]") {
    auto m = unit_box();
    for (auto& v : m.mesh.vertices) v = v * 7.0 + Vec3(-3, 10, 2);
    const auto [n, t] = normalize(m);
    const auto s = bounding_sphere(n.mesh);
    CHECK(s.center.norm() < 1e-9);
    CHECK_THAT(s.radius, WithinAbs(1.0, 1e-9));
    CHECK_THAT(t.scale, WithinAbs(1.0 / (7.0 * std::sqrt(3.0) / 2.0), 1e-12));
    CHECK((t.apply(m.mesh.vertices[5]) - n.mesh.vertices[5]).norm() < 1e-9);
}

TEST_CASE("normalize ignores unreferenced vertices and rejects points", "[geometry]") {
    auto m = unit_box();
    m.mesh.vertices.emplace_back(100, 100, 100);
    const auto [n, t] = normalize(m);
    CHECK_THAT(bounding_sphere(split_parts(n)[0].second).radius, WithinAbs(1.0, 1e-9));
    CHECK_THAT(t.scale, WithinAbs(2.0 / std::sqrt(3.0), 1e-12));

    PartLabeledMesh point;
    point.label_set = {"seat"};
    point.mesh.vertices = {Vec3(1, 1, 1), Vec3(1, 1, 1), Vec3(1, 1, 1)};
    point.mesh.triangles = {{0, 1, 2}};
    point.face_labels = {0};
    CHECK_THROWS_AS(normalize(point), DegenerateError);
}

TEST_CASE("normalize is bit-exact under similarity transforms", "[geometry]") {
    auto m = unit_box();
    m.mesh.vertices[7] = Vec3(0.3, 1.7, 0.9);
    const auto base = normalize(m).first;
    for (double scale : {0.25, 3.0, 5.0, 11.0}) {
        auto moved = m;
        for (auto& v : moved.mesh.vertices) v = v * scale + Vec3(1.5, -2.0, 0.25);
        CHECK(normalize(moved).first.mesh.vertices == base.mesh.vertices);
    }
}

TEST_CASE("split_parts keeps label order and compacts vertices", "[geometry]") {
    auto m = unit_box(default_chair_labels());
    m.face_labels = {3, 3, 1, 1};
    const auto parts = split_parts(m);
    REQUIRE(parts.size() == 4);
    CHECK(parts[0].first == "backrest");
    CHECK(parts[0].second.empty());
    CHECK(parts[2].second.empty());
    CHECK(parts[1].second.triangles.size() == 2);
    CHECK(parts[1].second.vertices.size() == 4);
    CHECK(parts[3].second.vertices.size() == 4);
    for (const auto& [label, part] : parts) CHECK_NOTHROW(part.validate());
    // Faces map to the same positions.
    CHECK(parts[3].second.vertices[parts[3].second.triangles[0][1]] == m.mesh.vertices[1]);
}

TEST_CASE("validate rejects bad indices and labels", "[geometry]") {
    auto m = unit_box();
    m.mesh.triangles.push_back({0, 0, 1});
    m.face_labels.push_back(0);
    CHECK_THROWS_AS(m.validate(), ParseError);
    auto n = unit_box();
    n.face_labels[0] = 5;
    CHECK_THROWS_AS(n.validate(), LabelError);
}
