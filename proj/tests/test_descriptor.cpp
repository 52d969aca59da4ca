#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "pickmix/descriptor.hpp"
#include "pickmix/errors.hpp"

using namespace pickmix;

namespace {

// Reference HoG, cell by cell: centered differences with replicated borders,
// unsigned orientation, linear vote between the two nearest bin centers
// (centers at b * 180 / bins, wrapping), L2 normalize, clip, renormalize.
std::vector<double> reference_hog(const SilhouetteImage& img, int cols, int rows, int bins,
                                  double clip = 0.2, double eps = 1e-6) {
    auto px = [&](int x, int y) {
        x = std::clamp(x, 0, img.width - 1);
        y = std::clamp(y, 0, img.height - 1);
        return double(img.at(x, y));
    };
    const int cw = img.width / cols, ch = img.height / rows;
    std::vector<double> out;
    for (int cy = 0; cy < rows; ++cy)
        for (int cx = 0; cx < cols; ++cx) {
            std::vector<double> h(std::size_t(bins), 0.0);
            const int x_end = cx == cols - 1 ? img.width : (cx + 1) * cw;
            const int y_end = cy == rows - 1 ? img.height : (cy + 1) * ch;
            for (int y = cy * ch; y < y_end; ++y)
                for (int x = cx * cw; x < x_end; ++x) {
                    const double gx = px(x + 1, y) - px(x - 1, y);
                    const double gy = px(x, y + 1) - px(x, y - 1);
                    const double mag = std::hypot(gx, gy);
                    if (mag == 0.0) continue;
                    double theta = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
                    theta = std::fmod(theta + 360.0, 180.0);
                    const double pos = theta * bins / 180.0;
                    const int b0 = int(std::floor(pos)) % bins;
                    const double f = pos - std::floor(pos);
                    h[std::size_t(b0)] += mag * (1.0 - f);
                    h[std::size_t((b0 + 1) % bins)] += mag * f;
                }
            auto norm = [&] {
                double s = eps * eps;
                for (double v : h) s += v * v;
                for (double& v : h) v /= std::sqrt(s);
            };
            norm();
            for (double& v : h) v = std::min(v, clip);
            norm();
            out.insert(out.end(), h.begin(), h.end());
        }
    return out;
}

SilhouetteImage random_image(std::mt19937_64& rng, int w, int h) {
    SilhouetteImage img(w, h);
    std::bernoulli_distribution coin(0.4);
    for (auto& b : img.bits) b = coin(rng) ? 1 : 0;
    return img;
}

SilhouetteImage disc(int res, double cx, double cy, double r) {
    SilhouetteImage img(res, res);
    for (int y = 0; y < res; ++y)
        for (int x = 0; x < res; ++x)
            img.at(x, y) = std::hypot(x + 0.5 - cx, y + 0.5 - cy) <= r ? 1 : 0;
    return img;
}

}  // namespace

TEST_CASE("vertical edge votes into the zero-degree bin", "[descriptor]") {
    SilhouetteImage img(4, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 2; x < 4; ++x) img.at(x, y) = 1;
    const auto h = hog_cells(img, {1, 1}, 9);
    REQUIRE(h.size() == 9);
    CHECK(std::abs(h[0] - 1.0) < 1e-9);
    for (int b = 1; b < 9; ++b) CHECK(h[std::size_t(b)] == 0.0);
}

TEST_CASE("horizontal edge splits evenly between the bins around 90 degrees", "[descriptor]") {
    SilhouetteImage img(4, 4);
    for (int y = 2; y < 4; ++y)
        for (int x = 0; x < 4; ++x) img.at(x, y) = 1;
    const auto h = hog_cells(img, {1, 1}, 9);
    CHECK(std::abs(h[4] - std::sqrt(0.5)) < 1e-9);
    CHECK(std::abs(h[5] - std::sqrt(0.5)) < 1e-9);
    for (int b : {0, 1, 2, 3, 6, 7, 8}) CHECK(h[std::size_t(b)] == 0.0);
}

TEST_CASE("hog matches the reference implementation", "[descriptor]") {
    std::mt19937_64 rng(17);
    struct Case {
        int w, h, cols, rows, bins;
    };
    for (const auto c : {Case{13, 11, 3, 2, 9}, Case{32, 32, 4, 4, 9}, Case{20, 9, 1, 1, 7},
                         Case{40, 40, 17, 17, 9}, Case{35, 35, 34, 34, 9}}) {
        for (int t = 0; t < 5; ++t) {
            const auto img = random_image(rng, c.w, c.h);
            const auto got = hog_cells(img, {c.cols, c.rows}, c.bins);
            const auto want = reference_hog(img, c.cols, c.rows, c.bins);
            REQUIRE(got.size() == want.size());
            double worst = 0.0;
            for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
            CHECK(worst < 1e-12);
        }
    }
}

TEST_CASE("every cell is unit length or zero and clipped", "[descriptor]") {
    std::mt19937_64 rng(5);
    const auto img = random_image(rng, 64, 64);
    const auto h = hog_cells(img, {17, 17}, 9);
    for (std::size_t c = 0; c < 17 * 17; ++c) {
        double ss = 0.0;
        for (std::size_t b = 0; b < 9; ++b) {
            ss += h[c * 9 + b] * h[c * 9 + b];
            CHECK(h[c * 9 + b] >= 0.0);
        }
        CHECK((ss == 0.0 || std::abs(std::sqrt(ss) - 1.0) < 1e-6));
    }
}

TEST_CASE("descriptor lengths", "[descriptor]") {
    const HogConfig two;
    CHECK(two.view_length() == 2610);
    CHECK(two.part_length() == 52200);
    const auto three = HogConfig::for_variant(HogVariant::ThreeLevel);
    CHECK(three.view_length() == 9 * (34 * 34 + 17 * 17 + 1));
    const auto img = disc(256, 128, 128, 60);
    CHECK(view_descriptor(img).values.size() == 2610);
    std::vector<SilhouetteImage> views(20, img);
    CHECK(part_descriptor(views).values.size() == 52200);
    CHECK(part_descriptor(views, three).values.size() == std::size_t(20 * three.view_length()));
}

TEST_CASE("blank silhouettes give the zero descriptor", "[descriptor]") {
    std::vector<SilhouetteImage> views(20, SilhouetteImage(256, 256));
    const auto d = part_descriptor(views);
    CHECK(d.values.size() == 52200);
    CHECK(d.is_zero());
    CHECK(descriptor_norm(d) == 0.0);
}

TEST_CASE("descriptor errors", "[descriptor]") {
    std::vector<SilhouetteImage> views(19, SilhouetteImage(64, 64));
    CHECK_THROWS_AS(part_descriptor(views), ArityError);
    CHECK_THROWS_AS(hog_cells(SilhouetteImage(10, 10), {17, 17}, 9), GridError);
    CHECK_THROWS_AS(view_descriptor(SilhouetteImage(16, 16)), GridError);
    LightFieldDescriptor a{{1.0f, 2.0f}}, b{{1.0f}};
    CHECK_THROWS_AS(shape_distance(a, b), DimensionError);
    CHECK_THROWS_AS(parse_hog_variant("four-level"), ConfigError);
    CHECK(parse_hog_variant("original") == HogVariant::ThreeLevel);
    CHECK(parse_hog_variant("three-level") == HogVariant::ThreeLevel);
    CHECK(parse_hog_variant(to_string(HogVariant::TwoLevel)) == HogVariant::TwoLevel);
}

TEST_CASE("shape distance is Euclidean", "[descriptor]") {
    LightFieldDescriptor a{{0.0f, 3.0f, 1.0f}}, b{{4.0f, 0.0f, 1.0f}};
    CHECK(shape_distance(a, b) == 5.0);
    CHECK(shape_distance(b, a) == 5.0);
    CHECK(shape_distance(a, a) == 0.0);
    CHECK(descriptor_norm(a) == std::sqrt(10.0));
}

TEST_CASE("mirrored silhouette mirrors cells and orientations", "[descriptor]") {
    // 255 = 15 * 17 so every 17x17 cell has the same width and mirroring is exact.
    SilhouetteImage img(255, 255);
    for (int y = 40; y < 200; ++y)
        for (int x = 30 + y / 3; x < 150 + (y % 37); ++x) img.at(x, y) = 1;
    SilhouetteImage mirror(255, 255);
    for (int y = 0; y < 255; ++y)
        for (int x = 0; x < 255; ++x) mirror.at(254 - x, y) = img.at(x, y);
    const auto h = hog_cells(img, {17, 17}, 9);
    const auto m = hog_cells(mirror, {17, 17}, 9);
    double worst = 0.0;
    for (int cy = 0; cy < 17; ++cy)
        for (int cx = 0; cx < 17; ++cx)
            for (int b = 0; b < 9; ++b) {
                const double a = h[std::size_t((cy * 17 + cx) * 9 + b)];
                const double r = m[std::size_t((cy * 17 + (16 - cx)) * 9 + (9 - b) % 9)];
                worst = std::max(worst, std::abs(a - r));
            }
    CHECK(worst < 1e-9);
}

TEST_CASE("translated disc keeps its low-frequency histogram", "[descriptor]") {
    // The 1x1 level pools the whole image, so moving the shape changes nothing there.
    const auto a = view_descriptor(disc(256, 100, 110, 40));
    const auto b = view_descriptor(disc(256, 140, 150, 40));
    for (std::size_t i = 2601; i < 2610; ++i) CHECK(std::abs(a.values[i] - b.values[i]) < 1e-6);
}

TEST_CASE("descriptor serialization round trips", "[descriptor]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    std::vector<LightFieldDescriptor> parts(3);
    for (auto& p : parts) {
        p.values.resize(100);
        for (auto& v : p.values) v = u(rng);
    }
    parts[1].values.assign(100, 0.0f);
    const auto bytes = encode_descriptors(parts);
    const auto back = decode_descriptors(bytes);
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(back[i] == parts[i]);
    CHECK_THROWS_AS(decode_descriptors(bytes.substr(0, bytes.size() - 3)), CorruptionError);
    CHECK_THROWS_AS(decode_descriptors("LFD2" + bytes.substr(4)), CorruptionError);
    CHECK(nlohmann::json::parse(descriptors_to_json(parts))["parts"].size() == 3);
}
