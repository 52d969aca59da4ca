#include "pickmix/rasterizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pickmix/errors.hpp"

namespace pickmix {

namespace {

constexpr int kSubpixelBits = 8;
constexpr std::int64_t kSubpixel = std::int64_t{1} << kSubpixelBits;
constexpr std::int64_t kHalfPixel = kSubpixel / 2;

struct FixedPoint {
    std::int64_t x;
    std::int64_t y;
};

std::int64_t edge(const FixedPoint& a, const FixedPoint& b, std::int64_t px, std::int64_t py) {
    return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

// Image y grows downward; the interior lies on the positive side of each edge.
bool is_top_left(const FixedPoint& a, const FixedPoint& b) {
    const auto dx = b.x - a.x;
    const auto dy = b.y - a.y;
    return (dy == 0 && dx > 0) || dy < 0;
}

Vec3 up_for(const Vec3& dir) {
    Vec3 ref(0.0, 0.0, 1.0);
    if (std::abs(dir.dot(ref)) > 0.999) ref = Vec3(0.0, 1.0, 0.0);
    const Vec3 side = ref.cross(dir).normalized();
    // Rotating `side` by 90 degrees about `dir`.
    return dir.cross(side).normalized();
}

}  // namespace

std::size_t SilhouetteImage::count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::vector<Viewpoint> dodecahedron_viewpoints() {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const double inv = 1.0 / phi;
    const double signs[2] = {-1.0, 1.0};

    std::vector<Vec3> raw;
    raw.reserve(kViewCount);
    for (double sx : signs)
        for (double sy : signs)
            for (double sz : signs) raw.emplace_back(sx, sy, sz);
    for (double a : signs)
        for (double b : signs) raw.emplace_back(0.0, a * inv, b * phi);
    for (double a : signs)
        for (double b : signs) raw.emplace_back(a * inv, b * phi, 0.0);
    for (double a : signs)
        for (double b : signs) raw.emplace_back(a * phi, 0.0, b * inv);

    std::vector<Viewpoint> views;
    views.reserve(kViewCount);
    for (int i = 0; i < kViewCount; ++i) {
        Viewpoint vp;
        vp.view_direction = raw[i].normalized();
        vp.up = up_for(vp.view_direction);
        vp.index = i;
        views.push_back(vp);
    }
    return views;
}

SilhouetteImage render_silhouette(const Mesh& part, const Viewpoint& vp, int resolution) {
    if (resolution < 8)
        throw ResolutionError("resolution must be at least 8, got " + std::to_string(resolution));
    SilhouetteImage img(resolution, resolution);
    if (part.empty()) return img;

    const Vec3 right = vp.right();
    const double to_pixels = resolution / (2.0 * kFrustumHalfWidth);

    std::vector<FixedPoint> projected;
    projected.reserve(part.vertices.size());
    for (const auto& v : part.vertices) {
        const double cx = v.dot(right);
        const double cy = v.dot(vp.up);
        const double px = (cx + kFrustumHalfWidth) * to_pixels;
        const double py = (kFrustumHalfWidth - cy) * to_pixels;
        projected.push_back({std::llround(px * kSubpixel), std::llround(py * kSubpixel)});
    }

    const std::int64_t last = resolution - 1;
    for (const auto& tri : part.triangles) {
        FixedPoint a = projected[tri[0]];
        FixedPoint b = projected[tri[1]];
        FixedPoint c = projected[tri[2]];
        std::int64_t area = edge(a, b, c.x, c.y);
        if (area == 0) continue;
        if (area < 0) std::swap(b, c);

        const std::int64_t bias0 = is_top_left(b, c) ? 0 : -1;
        const std::int64_t bias1 = is_top_left(c, a) ? 0 : -1;
        const std::int64_t bias2 = is_top_left(a, b) ? 0 : -1;

        const std::int64_t min_x = std::min({a.x, b.x, c.x});
        const std::int64_t max_x = std::max({a.x, b.x, c.x});
        const std::int64_t min_y = std::min({a.y, b.y, c.y});
        const std::int64_t max_y = std::max({a.y, b.y, c.y});

        // Pixel centers sit at k * kSubpixel + kHalfPixel.
        auto first_center = [](std::int64_t lo) {
            const std::int64_t t = lo - kHalfPixel;
            return t <= 0 ? -((-t) / kSubpixel) : (t + kSubpixel - 1) / kSubpixel;
        };
        auto last_center = [](std::int64_t hi) {
            const std::int64_t t = hi - kHalfPixel;
            return t >= 0 ? t / kSubpixel : -((-t + kSubpixel - 1) / kSubpixel);
        };
        const std::int64_t col0 = std::max<std::int64_t>(0, first_center(min_x));
        const std::int64_t col1 = std::min<std::int64_t>(last, last_center(max_x));
        const std::int64_t row0 = std::max<std::int64_t>(0, first_center(min_y));
        const std::int64_t row1 = std::min<std::int64_t>(last, last_center(max_y));

        for (std::int64_t row = row0; row <= row1; ++row) {
            const std::int64_t py = row * kSubpixel + kHalfPixel;
            for (std::int64_t col = col0; col <= col1; ++col) {
                const std::int64_t px = col * kSubpixel + kHalfPixel;
                if (edge(b, c, px, py) + bias0 < 0) continue;
                if (edge(c, a, px, py) + bias1 < 0) continue;
                if (edge(a, b, px, py) + bias2 < 0) continue;
                img.at(static_cast<int>(col), static_cast<int>(row)) = 1;
            }
        }
    }
    return img;
}

std::vector<std::pair<std::string, std::vector<SilhouetteImage>>> render_all(
    const std::vector<std::pair<std::string, Mesh>>& parts, int resolution) {
    const auto views = dodecahedron_viewpoints();
    std::vector<std::pair<std::string, std::vector<SilhouetteImage>>> out;
    out.reserve(parts.size());
    for (const auto& [label, mesh] : parts) {
        std::vector<SilhouetteImage> images;
        images.reserve(views.size());
        for (const auto& vp : views) images.push_back(render_silhouette(mesh, vp, resolution));
        out.emplace_back(label, std::move(images));
    }
    return out;
}

std::string to_pgm(const SilhouetteImage& img) {
    std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                      "\n255\n";
    out.reserve(out.size() + img.bits.size());
    for (auto b : img.bits) out.push_back(static_cast<char>(b ? 255 : 0));
    return out;
}

}  // namespace pickmix
