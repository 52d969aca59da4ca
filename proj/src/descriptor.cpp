#include "pickmix/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "pickmix/binary_io.hpp"
#include "pickmix/errors.hpp"

namespace pickmix {

namespace {

struct Gradient {
    int x;
    int y;
    double magnitude;
    double orientation_deg;  // [0, 180)
};

// Only pixels with a non-zero gradient are returned; binary images are mostly flat.
std::vector<Gradient> gradients(const SilhouetteImage& img) {
    std::vector<Gradient> out;
    const int w = img.width;
    const int h = img.height;
    for (int y = 0; y < h; ++y) {
        const int ym = std::max(y - 1, 0);
        const int yp = std::min(y + 1, h - 1);
        for (int x = 0; x < w; ++x) {
            const int xm = std::max(x - 1, 0);
            const int xp = std::min(x + 1, w - 1);
            const int gx = int(img.at(xp, y)) - int(img.at(xm, y));
            const int gy = int(img.at(x, yp)) - int(img.at(x, ym));
            if (gx == 0 && gy == 0) continue;
            double deg = std::atan2(double(gy), double(gx)) * (180.0 / std::numbers::pi);
            if (deg < 0.0) deg += 180.0;
            if (deg >= 180.0) deg -= 180.0;
            out.push_back({x, y, std::sqrt(double(gx * gx + gy * gy)), deg});
        }
    }
    return out;
}

void check_grid(const SilhouetteImage& img, GridSize grid, int bins) {
    if (grid.cols < 1 || grid.rows < 1 || grid.cols > img.width || grid.rows > img.height)
        throw GridError("grid " + std::to_string(grid.cols) + "x" + std::to_string(grid.rows) +
                        " does not fit a " + std::to_string(img.width) + "x" +
                        std::to_string(img.height) + " image");
    if (bins < 1) throw GridError("orientation bin count must be positive");
}

std::vector<double> bin_cells(const std::vector<Gradient>& grads, int width, int height,
                              GridSize grid, int bins, double clip, double eps) {
    std::vector<double> hist(static_cast<std::size_t>(grid.cells()) * bins, 0.0);
    const int cell_w = width / grid.cols;
    const int cell_h = height / grid.rows;
    const double bin_width = 180.0 / bins;
    for (const auto& g : grads) {
        const int cx = std::min(g.x / cell_w, grid.cols - 1);
        const int cy = std::min(g.y / cell_h, grid.rows - 1);
        double* cell = hist.data() + static_cast<std::size_t>(cy * grid.cols + cx) * bins;
        const double pos = g.orientation_deg / bin_width;
        const double lo = std::floor(pos);
        const double frac = pos - lo;
        const int b0 = static_cast<int>(lo) % bins;
        const int b1 = (b0 + 1) % bins;
        cell[b0] += g.magnitude * (1.0 - frac);
        cell[b1] += g.magnitude * frac;
    }

    for (int c = 0; c < grid.cells(); ++c) {
        double* cell = hist.data() + static_cast<std::size_t>(c) * bins;
        auto renormalize = [&] {
            double ss = 0.0;
            for (int b = 0; b < bins; ++b) ss += cell[b] * cell[b];
            const double norm = std::sqrt(ss + eps * eps);
            for (int b = 0; b < bins; ++b) cell[b] /= norm;
        };
        renormalize();
        for (int b = 0; b < bins; ++b) cell[b] = std::min(cell[b], clip);
        renormalize();
    }
    return hist;
}

}  // namespace

HogConfig HogConfig::for_variant(HogVariant v) {
    HogConfig cfg;
    if (v == HogVariant::ThreeLevel) cfg.levels = {{34, 34}, {17, 17}, {1, 1}};
    return cfg;
}

int HogConfig::view_length() const {
    int cells = 0;
    for (const auto& g : levels) cells += g.cells();
    return cells * orientation_bins;
}

std::string to_string(HogVariant v) {
    return v == HogVariant::TwoLevel ? "two-level" : "original";
}

HogVariant parse_hog_variant(const std::string& s) {
    if (s == "two-level") return HogVariant::TwoLevel;
    if (s == "original" || s == "three-level") return HogVariant::ThreeLevel;
    throw ConfigError("unknown HoG variant '" + s + "' (expected two-level or original)");
}

bool LightFieldDescriptor::is_zero() const {
    return std::all_of(values.begin(), values.end(), [](float v) { return v == 0.0f; });
}

std::vector<double> hog_cells(const SilhouetteImage& img, GridSize grid, int bins, double clip,
                              double epsilon) {
    check_grid(img, grid, bins);
    return bin_cells(gradients(img), img.width, img.height, grid, bins, clip, epsilon);
}

ViewDescriptor view_descriptor(const SilhouetteImage& img, const HogConfig& cfg) {
    for (const auto& level : cfg.levels) check_grid(img, level, cfg.orientation_bins);
    ViewDescriptor out;
    out.values.assign(static_cast<std::size_t>(cfg.view_length()), 0.0f);
    const auto grads = gradients(img);
    if (grads.empty()) return out;

    std::size_t offset = 0;
    for (const auto& level : cfg.levels) {
        const auto h = bin_cells(grads, img.width, img.height, level, cfg.orientation_bins,
                                 cfg.clip, cfg.epsilon);
        for (double v : h) out.values[offset++] = static_cast<float>(v);
    }
    return out;
}

LightFieldDescriptor part_descriptor(std::span<const SilhouetteImage> silhouettes,
                                     const HogConfig& cfg) {
    if (silhouettes.size() != static_cast<std::size_t>(kViewCount))
        throw ArityError("expected " + std::to_string(kViewCount) + " silhouettes, got " +
                         std::to_string(silhouettes.size()));
    LightFieldDescriptor out;
    const auto view_len = static_cast<std::size_t>(cfg.view_length());
    out.values.reserve(view_len * kViewCount);
    for (const auto& img : silhouettes) {
        auto view = view_descriptor(img, cfg);
        out.values.insert(out.values.end(), view.values.begin(), view.values.end());
    }
    return out;
}

double shape_distance(const LightFieldDescriptor& a, const LightFieldDescriptor& b) {
    if (a.values.size() != b.values.size())
        throw DimensionError("descriptor lengths differ: " + std::to_string(a.values.size()) +
                             " vs " + std::to_string(b.values.size()));
    double ss = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = double(a.values[i]) - double(b.values[i]);
        ss += d * d;
    }
    return std::sqrt(ss);
}

double descriptor_norm(const LightFieldDescriptor& a) {
    double ss = 0.0;
    for (float v : a.values) ss += double(v) * double(v);
    return std::sqrt(ss);
}

std::string encode_descriptors(std::span<const LightFieldDescriptor> parts) {
    io::Writer w;
    w.bytes("LFD1");
    w.u32(static_cast<std::uint32_t>(parts.size()));
    for (const auto& p : parts) {
        w.u32(static_cast<std::uint32_t>(p.values.size()));
        for (float v : p.values) w.f32(v);
    }
    return w.take();
}

std::vector<LightFieldDescriptor> decode_descriptors(std::string_view bytes) {
    io::Reader r(bytes);
    if (r.remaining() < 4 || r.bytes(4) != "LFD1")
        throw CorruptionError("not an LFD1 descriptor file");
    const auto count = r.u32();
    std::vector<LightFieldDescriptor> parts;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto len = r.u32();
        if (std::size_t(len) * 4 > r.remaining()) throw CorruptionError("descriptor truncated");
        LightFieldDescriptor d;
        d.values.resize(len);
        for (auto& v : d.values) v = r.f32();
        parts.push_back(std::move(d));
    }
    if (!r.done()) throw CorruptionError("trailing bytes after descriptors");
    return parts;
}

std::string descriptors_to_json(std::span<const LightFieldDescriptor> parts) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& p : parts) j.push_back(p.values);
    return nlohmann::json{{"format", "LFD1"}, {"parts", j}}.dump();
}

}  // namespace pickmix
