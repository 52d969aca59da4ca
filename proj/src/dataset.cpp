#include "pickmix/dataset.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "pickmix/errors.hpp"

namespace pickmix {

namespace {

constexpr double kHalfWidth = 0.25;  // seat footprint is [-0.25, 0.25]^2 in x and z
constexpr double kSeatBottom = 0.45;

enum Label : std::uint32_t { kBackrest = 0, kSeat = 1, kArmrests = 2, kLegs = 3 };

class MeshBuilder {
public:
    MeshBuilder() { mesh_.label_set = default_chair_labels(); }

    // Hexahedron from a bottom and a top quad, each listed in the same winding.
    void hexahedron(const std::array<Vec3, 4>& bottom, const std::array<Vec3, 4>& top,
                    Label label) {
        const auto base = vertex_count();
        for (const auto& v : bottom) mesh_.mesh.vertices.push_back(v);
        for (const auto& v : top) mesh_.mesh.vertices.push_back(v);
        quad(base + 0, base + 1, base + 2, base + 3, label);
        quad(base + 4, base + 5, base + 6, base + 7, label);
        for (std::uint32_t k = 0; k < 4; ++k) {
            const auto k1 = (k + 1) % 4;
            quad(base + k, base + k1, base + 4 + k1, base + 4 + k, label);
        }
    }

    void box(const Vec3& lo, const Vec3& hi, Label label) {
        hexahedron({Vec3(lo.x(), lo.y(), lo.z()), Vec3(hi.x(), lo.y(), lo.z()),
                    Vec3(hi.x(), lo.y(), hi.z()), Vec3(lo.x(), lo.y(), hi.z())},
                   {Vec3(lo.x(), hi.y(), lo.z()), Vec3(hi.x(), hi.y(), lo.z()),
                    Vec3(hi.x(), hi.y(), hi.z()), Vec3(lo.x(), hi.y(), hi.z())},
                   label);
    }

    // Leg between two horizontal squares of side `side` centered at (x, z).
    void sheared_post(double foot_x, double foot_z, double y0, double top_x, double top_z,
                      double y1, double side, Label label) {
        const double h = side / 2;
        auto square = [&](double cx, double cz, double y) {
            return std::array<Vec3, 4>{Vec3(cx - h, y, cz - h), Vec3(cx + h, y, cz - h),
                                       Vec3(cx + h, y, cz + h), Vec3(cx - h, y, cz + h)};
        };
        hexahedron(square(foot_x, foot_z, y0), square(top_x, top_z, y1), label);
    }

    // Horizontal bar in the xz plane from (ax, az) to (bx, bz).
    void flat_beam(double ax, double az, double bx, double bz, double y0, double y1,
                   double width, Label label) {
        const double dx = bx - ax;
        const double dz = bz - az;
        const double len = std::hypot(dx, dz);
        const double nx = -dz / len * width / 2;
        const double nz = dx / len * width / 2;
        auto quad_at = [&](double y) {
            return std::array<Vec3, 4>{Vec3(ax + nx, y, az + nz), Vec3(bx + nx, y, bz + nz),
                                       Vec3(bx - nx, y, bz - nz), Vec3(ax - nx, y, az - nz)};
        };
        hexahedron(quad_at(y0), quad_at(y1), label);
    }

    void cylinder_y(double cx, double cz, double radius, double y0, double y1, int segments,
                    Label label) {
        const auto base = vertex_count();
        mesh_.mesh.vertices.emplace_back(cx, y0, cz);
        mesh_.mesh.vertices.emplace_back(cx, y1, cz);
        for (int k = 0; k < segments; ++k) {
            const double a = 2.0 * std::numbers::pi * k / segments;
            const double x = cx + radius * std::cos(a);
            const double z = cz + radius * std::sin(a);
            mesh_.mesh.vertices.emplace_back(x, y0, z);
            mesh_.mesh.vertices.emplace_back(x, y1, z);
        }
        for (int k = 0; k < segments; ++k) {
            const auto k1 = (k + 1) % segments;
            const auto b0 = base + 2 + 2 * std::uint32_t(k);
            const auto b1 = base + 2 + 2 * std::uint32_t(k1);
            tri(base, b0, b1, label);
            tri(base + 1, b1 + 1, b0 + 1, label);
            quad(b0, b1, b1 + 1, b0 + 1, label);
        }
    }

    // Convex polygon in the xy plane extruded over [z0, z1].
    void extrude_xy(const std::vector<std::pair<double, double>>& poly, double z0, double z1,
                    Label label) {
        const auto base = vertex_count();
        const auto n = std::uint32_t(poly.size());
        for (const auto& [x, y] : poly) mesh_.mesh.vertices.emplace_back(x, y, z0);
        for (const auto& [x, y] : poly) mesh_.mesh.vertices.emplace_back(x, y, z1);
        for (std::uint32_t k = 1; k + 1 < n; ++k) {
            tri(base, base + k, base + k + 1, label);
            tri(base + n, base + n + k + 1, base + n + k, label);
        }
        for (std::uint32_t k = 0; k < n; ++k) {
            const auto k1 = (k + 1) % n;
            quad(base + k, base + k1, base + n + k1, base + n + k, label);
        }
    }

    PartLabeledMesh take() { return std::move(mesh_); }

private:
    std::uint32_t vertex_count() const { return std::uint32_t(mesh_.mesh.vertices.size()); }
    void tri(std::uint32_t a, std::uint32_t b, std::uint32_t c, Label label) {
        mesh_.mesh.triangles.push_back({a, b, c});
        mesh_.face_labels.push_back(label);
    }
    void quad(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d, Label label) {
        tri(a, b, c, label);
        tri(a, c, d, label);
    }

    PartLabeledMesh mesh_;
};

void add_legs(MeshBuilder& b, const ChairParams& p) {
    const double t = p.leg_thickness;
    const double signs[2] = {-1.0, 1.0};
    switch (p.leg_style) {
        case LegStyle::FourStraight:
            for (double sx : signs)
                for (double sz : signs) {
                    const double x = sx * (kHalfWidth - t / 2);
                    const double z = sz * (kHalfWidth - t / 2);
                    b.box(Vec3(x - t / 2, 0.0, z - t / 2), Vec3(x + t / 2, kSeatBottom, z + t / 2),
                          kLegs);
                }
            break;
        case LegStyle::FourSplayed:
            for (double sx : signs)
                for (double sz : signs) {
                    const double inset = kHalfWidth - 0.1;
                    b.sheared_post(sx * (kHalfWidth - t / 2), sz * (kHalfWidth - t / 2), 0.0,
                                   sx * inset, sz * inset, kSeatBottom, t, kLegs);
                }
            break;
        case LegStyle::Sled:
            for (double sx : signs) {
                const double outer = sx * kHalfWidth;
                const double inner = sx * (kHalfWidth - t);
                const double x0 = std::min(outer, inner);
                const double x1 = std::max(outer, inner);
                b.box(Vec3(x0, 0.0, -kHalfWidth), Vec3(x1, t, kHalfWidth), kLegs);
                for (double sz : signs) {
                    const double zc = sz * (kHalfWidth - 0.06);
                    b.box(Vec3(x0, t, zc - t / 2), Vec3(x1, kSeatBottom, zc + t / 2), kLegs);
                }
            }
            break;
        case LegStyle::Swivel5: {
            const double foot_h = 0.04;
            const double arm_h = 0.5 * t + 0.01;
            const double reach = kHalfWidth - t / 2 - 0.005;
            b.cylinder_y(0.0, 0.0, 0.5 * t + 0.01, foot_h, kSeatBottom, 16, kLegs);
            for (int k = 0; k < 5; ++k) {
                const double a = std::numbers::pi / 2 + 2.0 * std::numbers::pi * k / 5;
                const double ex = reach * std::cos(a);
                const double ez = reach * std::sin(a);
                b.flat_beam(0.0, 0.0, ex, ez, foot_h, foot_h + arm_h, t, kLegs);
                b.box(Vec3(ex - t / 2, 0.0, ez - t / 2), Vec3(ex + t / 2, foot_h, ez + t / 2), kLegs);
            }
            break;
        }
    }
}

void add_seat(MeshBuilder& b, const ChairParams& p) {
    const double top = kSeatBottom + p.seat_thickness;
    if (p.seat_shape == SeatShape::Square)
        b.box(Vec3(-kHalfWidth, kSeatBottom, -kHalfWidth), Vec3(kHalfWidth, top, kHalfWidth), kSeat);
    else
        b.cylinder_y(0.0, 0.0, kHalfWidth, kSeatBottom, top, 32, kSeat);
}

void add_back(MeshBuilder& b, const ChairParams& p) {
    const double bottom = kSeatBottom + p.seat_thickness;
    const double top = bottom + p.back_height;
    const double z0 = -kHalfWidth;
    const double z1 = -kHalfWidth + p.back_thickness;
    switch (p.back_style) {
        case BackStyle::SolidPanel:
            b.box(Vec3(-kHalfWidth, bottom, z0), Vec3(kHalfWidth, top, z1), kBackrest);
            break;
        case BackStyle::Bars: {
            const double rail = 0.06;
            const double bar = 0.03;
            b.box(Vec3(-kHalfWidth, top - rail, z0), Vec3(kHalfWidth, top, z1), kBackrest);
            for (int i = 0; i < p.back_bars; ++i) {
                const double xc = -kHalfWidth + bar / 2 +
                                  i * (2 * kHalfWidth - bar) / double(p.back_bars - 1);
                b.box(Vec3(xc - bar / 2, bottom, z0), Vec3(xc + bar / 2, top - rail, z1), kBackrest);
            }
            break;
        }
        case BackStyle::RoundTopPanel: {
            const double arc_h = 0.15;
            const double shoulder = top - arc_h;
            constexpr int kArc = 16;
            std::vector<std::pair<double, double>> poly{{-kHalfWidth, bottom}, {kHalfWidth, bottom}};
            for (int k = 0; k <= kArc; ++k) {
                const double a = std::numbers::pi * k / kArc;
                double x = kHalfWidth * std::cos(a);
                double y = shoulder + arc_h * std::sin(a);
                if (k == 0) x = kHalfWidth, y = shoulder;
                if (k == kArc / 2) x = 0.0, y = top;
                if (k == kArc) x = -kHalfWidth, y = shoulder;
                poly.emplace_back(x, y);
            }
            b.extrude_xy(poly, z0, z1, kBackrest);
            break;
        }
    }
}

void add_armrests(MeshBuilder& b, const ChairParams& p) {
    if (p.armrests == ArmStyle::None) return;
    const double seat_top = kSeatBottom + p.seat_thickness;
    const double arm_top = seat_top + 0.22;
    const double bar = 0.04;
    const double rear = -kHalfWidth + p.back_thickness;
    for (double sx : {-1.0, 1.0}) {
        const double x0 = std::min(sx * kHalfWidth, sx * (kHalfWidth - bar));
        const double x1 = std::max(sx * kHalfWidth, sx * (kHalfWidth - bar));
        if (p.armrests == ArmStyle::Box) {
            b.box(Vec3(x0, seat_top, rear), Vec3(x1, arm_top, 0.2), kArmrests);
        } else {
            b.box(Vec3(x0, arm_top - bar, rear), Vec3(x1, arm_top, 0.22), kArmrests);
            b.box(Vec3(x0, seat_top, 0.17), Vec3(x1, arm_top - bar, 0.21), kArmrests);
            b.box(Vec3(x0, seat_top, rear), Vec3(x1, arm_top - bar, rear + bar), kArmrests);
        }
    }
}

void check_range(const char* name, double v, double lo, double hi) {
    if (!(v >= lo && v <= hi)) {
        std::ostringstream msg;
        msg << name << " = " << v << " outside [" << lo << ", " << hi << "]";
        throw ParamError(msg.str());
    }
}

double unit_interval(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

template <typename E>
E pick_enum(std::mt19937_64& rng, int count) {
    return static_cast<E>(std::min(int(unit_interval(rng) * count), count - 1));
}

const char* leg_name(LegStyle s) {
    switch (s) {
        case LegStyle::FourStraight: return "four_straight";
        case LegStyle::FourSplayed: return "four_splayed";
        case LegStyle::Sled: return "sled";
        case LegStyle::Swivel5: return "swivel5";
    }
    return "";
}
const char* back_name(BackStyle s) {
    switch (s) {
        case BackStyle::SolidPanel: return "solid_panel";
        case BackStyle::Bars: return "n_bars";
        case BackStyle::RoundTopPanel: return "round_top_panel";
    }
    return "";
}
const char* arm_name(ArmStyle s) {
    switch (s) {
        case ArmStyle::None: return "none";
        case ArmStyle::Box: return "box";
        case ArmStyle::Loop: return "loop";
    }
    return "";
}

template <typename E>
E enum_from(const std::string& s, std::initializer_list<std::pair<const char*, E>> table) {
    for (const auto& [name, value] : table)
        if (s == name) return value;
    throw ParamError("unknown style '" + s + "'");
}

}  // namespace

void ChairParams::validate() const {
    check_range("leg_thickness", leg_thickness, 0.02, 0.08);
    check_range("back_height", back_height, 0.3, 0.6);
    check_range("back_thickness", back_thickness, 0.02, 0.08);
    check_range("seat_thickness", seat_thickness, 0.03, 0.08);
    if (back_style == BackStyle::Bars && (back_bars < 2 || back_bars > 6))
        throw ParamError("back_bars must be in [2, 6]");
}

nlohmann::json to_json(const ChairParams& p) {
    return {{"leg_style", leg_name(p.leg_style)},
            {"leg_thickness", p.leg_thickness},
            {"back_style", back_name(p.back_style)},
            {"back_bars", p.back_bars},
            {"back_height", p.back_height},
            {"back_thickness", p.back_thickness},
            {"seat_shape", p.seat_shape == SeatShape::Square ? "square" : "round"},
            {"seat_thickness", p.seat_thickness},
            {"armrests", arm_name(p.armrests)},
            {"seed", p.seed}};
}

ChairParams chair_params_from_json(const nlohmann::json& j) {
    ChairParams p;
    try {
        p.leg_style = enum_from<LegStyle>(j.at("leg_style").get<std::string>(),
                                          {{"four_straight", LegStyle::FourStraight},
                                           {"four_splayed", LegStyle::FourSplayed},
                                           {"sled", LegStyle::Sled},
                                           {"swivel5", LegStyle::Swivel5}});
        p.leg_thickness = j.at("leg_thickness").get<double>();
        p.back_style = enum_from<BackStyle>(j.at("back_style").get<std::string>(),
                                            {{"solid_panel", BackStyle::SolidPanel},
                                             {"n_bars", BackStyle::Bars},
                                             {"round_top_panel", BackStyle::RoundTopPanel}});
        p.back_bars = j.at("back_bars").get<int>();
        p.back_height = j.at("back_height").get<double>();
        p.back_thickness = j.at("back_thickness").get<double>();
        p.seat_shape = enum_from<SeatShape>(j.at("seat_shape").get<std::string>(),
                                            {{"square", SeatShape::Square}, {"round", SeatShape::Round}});
        p.seat_thickness = j.at("seat_thickness").get<double>();
        p.armrests = enum_from<ArmStyle>(j.at("armrests").get<std::string>(),
                                         {{"none", ArmStyle::None},
                                          {"box", ArmStyle::Box},
                                          {"loop", ArmStyle::Loop}});
        p.seed = j.value("seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw ParamError(std::string("chair params: ") + e.what());
    }
    p.validate();
    return p;
}

PartLabeledMesh generate_chair(const ChairParams& p) {
    p.validate();
    MeshBuilder b;
    add_legs(b, p);
    add_seat(b, p);
    add_back(b, p);
    add_armrests(b, p);
    auto mesh = b.take();
    mesh.validate();
    return mesh;
}

ChairParams random_chair_params(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ChairParams p;
    p.leg_style = pick_enum<LegStyle>(rng, 4);
    p.leg_thickness = 0.02 + 0.06 * unit_interval(rng);
    p.back_style = pick_enum<BackStyle>(rng, 3);
    p.back_bars = 2 + std::min(int(unit_interval(rng) * 5), 4);
    p.back_height = 0.3 + 0.3 * unit_interval(rng);
    p.back_thickness = 0.02 + 0.06 * unit_interval(rng);
    p.seat_shape = pick_enum<SeatShape>(rng, 2);
    p.seat_thickness = 0.03 + 0.05 * unit_interval(rng);
    p.armrests = pick_enum<ArmStyle>(rng, 3);
    p.seed = seed;
    return p;
}

std::uint32_t grid_id(int i, int j, int back_count) {
    return static_cast<std::uint32_t>(i * back_count + j);
}

std::vector<ChairParams> default_leg_variants(int count) {
    if (count < 1) throw ParamError("leg variant count must be positive");
    const LegStyle styles[4] = {LegStyle::FourStraight, LegStyle::FourSplayed, LegStyle::Sled,
                                LegStyle::Swivel5};
    const int levels = (count + 3) / 4;
    std::vector<ChairParams> out;
    for (int k = 0; k < count; ++k) {
        ChairParams p;
        p.leg_style = styles[k % 4];
        p.leg_thickness = 0.02 + 0.06 * ((k / 4) + 0.5) / levels;
        out.push_back(p);
    }
    return out;
}

std::vector<ChairParams> default_back_variants(int count) {
    if (count < 1) throw ParamError("back variant count must be positive");
    struct Style {
        BackStyle style;
        int bars;
    };
    const Style styles[7] = {{BackStyle::SolidPanel, 3}, {BackStyle::Bars, 2}, {BackStyle::Bars, 3},
                             {BackStyle::Bars, 4},       {BackStyle::Bars, 5}, {BackStyle::Bars, 6},
                             {BackStyle::RoundTopPanel, 3}};
    const int levels = (count + 6) / 7;
    std::vector<ChairParams> out;
    for (int k = 0; k < count; ++k) {
        ChairParams p;
        p.back_style = styles[k % 7].style;
        p.back_bars = styles[k % 7].bars;
        p.back_thickness = 0.02 + 0.06 * ((k / 7) + 0.5) / levels;
        out.push_back(p);
    }
    return out;
}

std::vector<GeneratedShape> generate_grid(const std::vector<ChairParams>& leg_variants,
                                          const std::vector<ChairParams>& back_variants,
                                          const ChairParams& base) {
    const int L = int(leg_variants.size());
    const int B = int(back_variants.size());
    if (L < 2 || B < 2)
        throw ParamError("grid needs at least 2 leg and 2 back variants, got " +
                         std::to_string(L) + "x" + std::to_string(B));
    base.validate();
    std::vector<GeneratedShape> out;
    out.reserve(std::size_t(L) * std::size_t(B));
    for (int i = 0; i < L; ++i) {
        for (int j = 0; j < B; ++j) {
            ChairParams p = base;
            p.leg_style = leg_variants[i].leg_style;
            p.leg_thickness = leg_variants[i].leg_thickness;
            p.back_style = back_variants[j].back_style;
            p.back_bars = back_variants[j].back_bars;
            p.back_thickness = back_variants[j].back_thickness;
            GeneratedShape s;
            s.record.id = grid_id(i, j, B);
            char name[48];
            std::snprintf(name, sizeof(name), "grid_%d_%d", i, j);
            s.record.name = name;
            s.params = p;
            s.mesh = generate_chair(p);
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<GeneratedShape> generate_random_corpus(int count, std::uint64_t seed) {
    if (count < 1) throw ParamError("corpus size must be positive");
    std::mt19937_64 seeds(seed);
    std::vector<GeneratedShape> out;
    out.reserve(std::size_t(count));
    for (int k = 0; k < count; ++k) {
        GeneratedShape s;
        s.params = random_chair_params(seeds());
        s.record.id = std::uint32_t(k);
        char name[32];
        std::snprintf(name, sizeof(name), "chair_%03d", k);
        s.record.name = name;
        s.mesh = generate_chair(s.params);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<CorpusEntry> to_corpus(const std::vector<GeneratedShape>& shapes) {
    std::vector<CorpusEntry> out;
    out.reserve(shapes.size());
    for (const auto& s : shapes) out.push_back({s.record, s.mesh});
    return out;
}

std::vector<EvalCase> grid_cross_cases(int leg_count, int back_count) {
    if (leg_count < 2 || back_count < 2) throw ParamError("grid needs L, B >= 2");
    std::vector<EvalCase> cases;
    for (int i = 0; i < leg_count; ++i) {
        for (int j = 0; j < back_count; ++j) {
            EvalCase c;
            c.query.picks.push_back(
                {PickSource::shape(grid_id(i, i % back_count, back_count)), "legs", 1.0});
            c.query.picks.push_back(
                {PickSource::shape(grid_id(j % leg_count, j, back_count)), "backrest", 1.0});
            c.ground_truth = grid_id(i, j, back_count);
            cases.push_back(std::move(c));
        }
    }
    return cases;
}

std::vector<EvalCase> self_cases(const ShapeIndex& index) {
    std::vector<EvalCase> cases;
    for (const auto& s : index.shapes) {
        EvalCase c;
        for (const auto& label : index.label_set)
            c.query.picks.push_back({PickSource::shape(s.id), label, 1.0});
        c.ground_truth = s.id;
        cases.push_back(std::move(c));
    }
    return cases;
}

std::vector<EvalCase> shuffle_ground_truth(std::vector<EvalCase> cases, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    // Fisher-Yates with an explicit bounded draw so the permutation is portable.
    for (std::size_t i = cases.size(); i > 1; --i) {
        const auto j = std::size_t(unit_interval(rng) * double(i));
        std::swap(cases[i - 1].ground_truth, cases[std::min(j, i - 1)].ground_truth);
    }
    return cases;
}

nlohmann::json cases_to_json(const std::vector<EvalCase>& cases) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : cases) {
        auto q = blend_query_to_json(c.query);
        out.push_back({{"picks", q["picks"]}, {"ground_truth", c.ground_truth}});
    }
    return out;
}

std::vector<EvalCase> cases_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw QueryError("cases must be a JSON array");
    std::vector<EvalCase> cases;
    for (const auto& cj : j) {
        if (!cj.is_object() || !cj.contains("ground_truth") || !cj["ground_truth"].is_number_unsigned())
            throw QueryError("each case needs an unsigned 'ground_truth'");
        EvalCase c;
        c.query = parse_blend_query(nlohmann::json{{"picks", cj.value("picks", nlohmann::json())}});
        c.ground_truth = cj["ground_truth"].get<std::uint32_t>();
        cases.push_back(std::move(c));
    }
    return cases;
}

EvalReport run_blend_eval(const ShapeIndex& index, const std::vector<EvalCase>& cases,
                          std::size_t k, const ExternalTable* external) {
    const auto start = std::chrono::steady_clock::now();
    EvalReport r;
    r.cases = cases.size();
    r.k = std::max<std::size_t>(k, 1);
    const std::size_t curve = std::max<std::size_t>(r.k, 5);
    r.accuracy_at.assign(curve, 0.0);
    for (const auto& c : cases) {
        if (!index.find_row(c.ground_truth))
            throw MissingGroundTruthError("ground truth " + std::to_string(c.ground_truth) +
                                          " is not in the index");
        BlendQuery q = c.query;
        q.k = index.size();
        const auto ranked = blend_retrieve(index, q, external);
        std::size_t rank = 0;
        for (std::size_t i = 0; i < ranked.size(); ++i)
            if (ranked[i].shape_id == c.ground_truth) {
                rank = i + 1;
                break;
            }
        r.ranks.push_back(rank);
        for (std::size_t t = rank; t <= curve; ++t) r.accuracy_at[t - 1] += 1.0;
    }
    if (!cases.empty()) {
        for (auto& a : r.accuracy_at) a /= double(cases.size());
        double sum = 0.0;
        for (auto rank : r.ranks) sum += double(rank);
        r.mean_rank = sum / double(cases.size());
    }
    r.top1 = r.accuracy_at[0];
    r.top5 = r.accuracy_at[4];
    r.topk = r.accuracy_at[r.k - 1];
    r.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

nlohmann::json report_to_json(const EvalReport& r) {
    return {{"cases", r.cases},      {"k", r.k},
            {"top1", r.top1},        {"top5", r.top5},
            {"topk", r.topk},        {"accuracy_at", r.accuracy_at},
            {"mean_rank", r.mean_rank}, {"ranks", r.ranks},
            {"runtime_seconds", r.runtime_seconds}};
}

std::string report_table(const EvalReport& r) {
    std::ostringstream out;
    char line[64];
    out << "  k  | top-k accuracy\n";
    out << "-----+---------------\n";
    for (std::size_t t = 0; t < r.accuracy_at.size(); ++t) {
        std::snprintf(line, sizeof(line), " %3zu | %6.2f%%\n", t + 1, 100.0 * r.accuracy_at[t]);
        out << line;
    }
    std::snprintf(line, sizeof(line), "cases %zu, mean rank %.2f, %.3f s\n", r.cases, r.mean_rank,
                  r.runtime_seconds);
    out << line;
    return out.str();
}

}  // namespace pickmix
