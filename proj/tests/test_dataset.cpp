#include <catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "pickmix/dataset.hpp"
#include "pickmix/errors.hpp"
#include "pickmix/rasterizer.hpp"

using namespace pickmix;

namespace {

struct Box {
    Vec3 lo = Vec3::Constant(1e300), hi = Vec3::Constant(-1e300);
    void add(const Vec3& v) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
};

Box box_of(const Mesh& m) {
    Box b;
    for (const auto& v : m.vertices) b.add(v);
    return b;
}

std::vector<ChairParams> style_sweep() {
    std::vector<ChairParams> out;
    for (int leg = 0; leg < 4; ++leg)
        for (int back = 0; back < 3; ++back)
            for (int arm = 0; arm < 3; ++arm) {
                ChairParams p;
                p.leg_style = LegStyle(leg);
                p.back_style = BackStyle(back);
                p.armrests = ArmStyle(arm);
                p.seat_shape = SeatShape((leg + back + arm) % 2);
                p.back_bars = 2 + (leg + arm) % 5;
                out.push_back(p);
            }
    return out;
}

// Descriptors of every part plus the whole object, in label order then whole.
std::vector<LightFieldDescriptor> descriptors_of(const PartLabeledMesh& chair, int resolution = 128) {
    const auto normalized = normalize(chair).first;
    auto parts = split_parts(normalized);
    parts.emplace_back("whole", normalized.mesh);
    std::vector<LightFieldDescriptor> out;
    for (const auto& [label, views] : render_all(parts, resolution)) out.push_back(part_descriptor(views));
    return out;
}

}  // namespace

TEST_CASE("every style combination yields a valid labeled chair", "[dataset]") {
    for (const auto& p : style_sweep()) {
        const auto chair = generate_chair(p);
        REQUIRE_NOTHROW(chair.validate());
        CHECK(chair.label_set == default_chair_labels());
        const auto parts = split_parts(chair);
        REQUIRE(parts.size() == 4);
        CHECK_FALSE(parts[0].second.empty());
        CHECK_FALSE(parts[1].second.empty());
        CHECK(parts[2].second.empty() == (p.armrests == ArmStyle::None));
        CHECK_FALSE(parts[3].second.empty());

        const auto all = box_of(chair.mesh);
        const auto legs = box_of(parts[3].second);
        const auto back = box_of(parts[0].second);
        CHECK(legs.lo.y() == 0.0);
        CHECK(all.lo.y() == 0.0);
        CHECK(back.hi.y() == all.hi.y());
        CHECK(all.hi.y() == Catch::Approx(0.45 + p.seat_thickness + p.back_height).margin(1e-12));
        CHECK(all.lo.x() >= -0.25 - 1e-12);
        CHECK(all.hi.x() <= 0.25 + 1e-12);
        CHECK(all.lo.z() >= -0.25 - 1e-12);
        CHECK(all.hi.z() <= 0.25 + 1e-12);
    }
}

TEST_CASE("bar count shows up in the backrest", "[dataset]") {
    ChairParams p;
    p.back_style = BackStyle::Bars;
    p.back_bars = 2;
    const auto two = split_parts(generate_chair(p))[0].second.triangles.size();
    p.back_bars = 5;
    const auto five = split_parts(generate_chair(p))[0].second.triangles.size();
    CHECK(five > two);
}

TEST_CASE("parameter ranges are enforced", "[dataset]") {
    ChairParams p;
    CHECK_NOTHROW(p.validate());
    auto bad = [](auto mutate) {
        ChairParams q;
        mutate(q);
        CHECK_THROWS_AS(q.validate(), ParamError);
        CHECK_THROWS_AS(generate_chair(q), ParamError);
    };
    bad([](ChairParams& q) { q.leg_thickness = 0.01; });
    bad([](ChairParams& q) { q.leg_thickness = 0.09; });
    bad([](ChairParams& q) { q.back_height = 0.7; });
    bad([](ChairParams& q) { q.back_thickness = 0.0; });
    bad([](ChairParams& q) { q.seat_thickness = 0.1; });
    bad([](ChairParams& q) {
        q.back_style = BackStyle::Bars;
        q.back_bars = 7;
    });
    ChairParams unused;
    unused.back_bars = 9;  // ignored unless the back has bars
    CHECK_NOTHROW(unused.validate());
}

TEST_CASE("params JSON round trips", "[dataset]") {
    for (const auto& p : style_sweep()) CHECK(chair_params_from_json(to_json(p)) == p);
    const auto p = random_chair_params(77);
    CHECK(chair_params_from_json(to_json(p)) == p);
    CHECK_THROWS_AS(chair_params_from_json({{"leg_style", "tripod"}}), ParamError);
}

TEST_CASE("random corpus is a pure function of the seed", "[dataset]") {
    CHECK(random_chair_params(5) == random_chair_params(5));
    CHECK_FALSE(random_chair_params(5) == random_chair_params(6));
    for (std::uint64_t s = 0; s < 50; ++s) CHECK_NOTHROW(random_chair_params(s).validate());
    const auto a = generate_random_corpus(6, 42);
    const auto b = generate_random_corpus(6, 42);
    REQUIRE(a.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(a[i].record.id == i);
        CHECK(a[i].record.name == b[i].record.name);
        CHECK(a[i].params == b[i].params);
        CHECK(a[i].mesh.mesh.vertices == b[i].mesh.mesh.vertices);
    }
    CHECK(a[0].record.name == "chair_000");
}

TEST_CASE("grid ids, names and a shared bounding box", "[dataset]") {
    const auto grid = generate_grid(default_leg_variants(3), default_back_variants(4));
    REQUIRE(grid.size() == 12);
    const auto ref = box_of(grid[0].mesh.mesh);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) {
            const auto& g = grid[std::size_t(i * 4 + j)];
            CHECK(g.record.id == grid_id(i, j, 4));
            CHECK(g.record.name == "grid_" + std::to_string(i) + "_" + std::to_string(j));
            const auto b = box_of(g.mesh.mesh);
            CHECK(b.lo == ref.lo);
            CHECK(b.hi == ref.hi);
        }
    // Same leg variant means the same leg geometry, whatever the backrest.
    CHECK(split_parts(grid[1].mesh)[3].second.vertices == split_parts(grid[3].mesh)[3].second.vertices);
    CHECK_THROWS_AS(generate_grid(default_leg_variants(1), default_back_variants(5)), ParamError);
    CHECK_THROWS_AS(generate_grid(default_leg_variants(5), default_back_variants(1)), ParamError);
}

TEST_CASE("default variants are distinct", "[dataset]") {
    const auto legs = default_leg_variants(10);
    const auto backs = default_back_variants(10);
    for (std::size_t a = 0; a < 10; ++a)
        for (std::size_t b = a + 1; b < 10; ++b) {
            CHECK_FALSE(legs[a] == legs[b]);
            CHECK_FALSE(backs[a] == backs[b]);
        }
}

TEST_CASE("cross cases and their JSON form", "[dataset]") {
    const auto cases = grid_cross_cases(3, 4);
    REQUIRE(cases.size() == 12);
    const auto& c = cases[grid_id(2, 1, 4)];
    CHECK(c.ground_truth == grid_id(2, 1, 4));
    REQUIRE(c.query.picks.size() == 2);
    CHECK(c.query.picks[0].part == "legs");
    CHECK(c.query.picks[0].source.shape_id == grid_id(2, 2, 4));
    CHECK(c.query.picks[1].part == "backrest");
    CHECK(c.query.picks[1].source.shape_id == grid_id(1, 1, 4));

    const auto back = cases_from_json(cases_to_json(cases));
    REQUIRE(back.size() == cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i) {
        CHECK(back[i].ground_truth == cases[i].ground_truth);
        CHECK(blend_query_to_json(back[i].query) == blend_query_to_json(cases[i].query));
    }
    CHECK_THROWS(cases_from_json(nlohmann::json::object()));

    const auto shuffled = shuffle_ground_truth(cases, 3);
    CHECK(shuffle_ground_truth(cases, 3)[5].ground_truth == shuffled[5].ground_truth);
    std::vector<std::uint32_t> a, b;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        a.push_back(cases[i].ground_truth);
        b.push_back(shuffled[i].ground_truth);
    }
    CHECK(std::is_permutation(a.begin(), a.end(), b.begin()));
    CHECK(a != b);
}

TEST_CASE("blend evaluation on a small grid", "[dataset]") {
    const auto grid = generate_grid(default_leg_variants(3), default_back_variants(3));
    const auto index = build_index(to_corpus(grid), fixtures::small_config());
    const auto report = run_blend_eval(index, grid_cross_cases(3, 3), 5);
    CHECK(report.cases == 9);
    CHECK(report.top1 == 1.0);
    CHECK(report.top5 == 1.0);
    CHECK(report.mean_rank == 1.0);
    REQUIRE(report.accuracy_at.size() == 5);
    CHECK(report.ranks == std::vector<std::size_t>(9, 1));

    const auto selfr = run_blend_eval(index, self_cases(index), 3);
    CHECK(selfr.top1 == 1.0);
    CHECK(selfr.accuracy_at.size() == 5);

    const auto shuffled = run_blend_eval(index, shuffle_ground_truth(grid_cross_cases(3, 3), 1), 9);
    CHECK(shuffled.top1 < 1.0);
    CHECK(shuffled.accuracy_at.size() == 9);
    CHECK(shuffled.accuracy_at.back() == 1.0);
    for (std::size_t r = 1; r < shuffled.accuracy_at.size(); ++r)
        CHECK(shuffled.accuracy_at[r] >= shuffled.accuracy_at[r - 1]);

    auto missing = grid_cross_cases(3, 3);
    missing[0].ground_truth = 99;
    CHECK_THROWS_AS(run_blend_eval(index, missing), MissingGroundTruthError);

    const auto j = report_to_json(report);
    CHECK(j["top1"] == 1.0);
    CHECK(j["cases"] == 9);
    const auto table = report_table(report);
    CHECK(table.find("100") != std::string::npos);
}

TEST_CASE("leg style changes outweigh small thickness changes", "[dataset]") {
    ChairParams straight;
    straight.leg_thickness = 0.05;
    ChairParams thicker = straight;
    thicker.leg_thickness = 0.055;
    ChairParams swivel = straight;
    swivel.leg_style = LegStyle::Swivel5;
    const auto a = descriptors_of(generate_chair(straight))[3];
    const auto b = descriptors_of(generate_chair(thicker))[3];
    const auto c = descriptors_of(generate_chair(swivel))[3];
    CHECK(shape_distance(a, c) > shape_distance(a, b));
    CHECK(shape_distance(a, b) > 0.0);
}

TEST_CASE("generation is bit-identical for fixed params", "[dataset]") {
    const auto p = random_chair_params(31);
    const auto a = generate_chair(p), b = generate_chair(p);
    CHECK(a.mesh.vertices == b.mesh.vertices);
    CHECK(a.mesh.triangles == b.mesh.triangles);
    CHECK(a.face_labels == b.face_labels);
}

TEST_CASE("grid parts share descriptors exactly", "[dataset]") {
    const auto grid = generate_grid(default_leg_variants(2), default_back_variants(3));
    std::vector<std::vector<LightFieldDescriptor>> d;
    for (const auto& g : grid) d.push_back(descriptors_of(g.mesh, 64));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(d[grid_id(i, j, 3)][3] == d[grid_id(i, i, 3)][3]);
            CHECK(d[grid_id(i, j, 3)][0] == d[grid_id(j % 2, j, 3)][0]);
            CHECK(d[grid_id(i, j, 3)][1] == d[0][1]);
        }
    CHECK_FALSE(d[grid_id(0, 0, 3)][3] == d[grid_id(1, 0, 3)][3]);
}

TEST_CASE("a 2x2 grid has four distinct whole-object descriptors", "[dataset]") {
    const auto grid = generate_grid(default_leg_variants(2), default_back_variants(2));
    REQUIRE(grid.size() == 4);
    std::vector<LightFieldDescriptor> whole;
    for (const auto& g : grid) whole.push_back(descriptors_of(g.mesh, 64)[4]);
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a + 1; b < 4; ++b) CHECK(shape_distance(whole[a], whole[b]) > 0.0);
}

TEST_CASE("evaluation is deterministic", "[dataset]") {
    const auto corpus = to_corpus(generate_random_corpus(8, 12));
    const auto one = build_index(corpus, fixtures::small_config());
    const auto two = build_index(corpus, fixtures::small_config());
    const auto cases = shuffle_ground_truth(self_cases(one), 2);
    auto a = report_to_json(run_blend_eval(one, cases, 5));
    auto b = report_to_json(run_blend_eval(two, cases, 5));
    a.erase("runtime_seconds");
    b.erase("runtime_seconds");
    CHECK(a == b);
    const auto r = run_blend_eval(one, cases, 5);
    CHECK(r.top1 <= r.top5);
}
