#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pickmix/geometry.hpp"

namespace pickmix {

inline constexpr int kViewCount = 20;
inline constexpr int kDefaultResolution = 256;
/// Half-width of the square orthographic frustum in camera units.
inline constexpr double kFrustumHalfWidth = 1.05;

struct Viewpoint {
    Vec3 view_direction;
    Vec3 up;
    int index = 0;

    Vec3 right() const { return up.cross(view_direction); }
};

/// Binary silhouette, row-major from the top row, one byte (0 or 1) per pixel.
struct SilhouetteImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    SilhouetteImage() = default;
    SilhouetteImage(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

    std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return bits[static_cast<std::size_t>(y) * width + x]; }
    std::size_t count() const;
    bool operator==(const SilhouetteImage&) const = default;
};

/// The 20 vertices of a regular dodecahedron as unit view directions.
///
/// Order: the 8 cube vertices (±1,±1,±1) with x slowest and minus before plus,
/// then (0,±1/φ,±φ), (±1/φ,±φ,0), (±φ,0,±1/φ) each with the same sign order.
/// `up` is world +z projected onto the image plane (world +y when the view is
/// within ~2.6° of the z axis).
std::vector<Viewpoint> dodecahedron_viewpoints();

/// Orthographic silhouette of `part` on the fixed [-1.05, 1.05]^2 frustum.
/// A pixel is set when its center is covered by any triangle; ties on an edge
/// follow the top-left rule. Throws ResolutionError for resolution < 8.
SilhouetteImage render_silhouette(const Mesh& part, const Viewpoint& vp,
                                  int resolution = kDefaultResolution);

/// Renders every part from every viewpoint; result[i] belongs to parts[i].
std::vector<std::pair<std::string, std::vector<SilhouetteImage>>> render_all(
    const std::vector<std::pair<std::string, Mesh>>& parts, int resolution = kDefaultResolution);

/// Binary PGM (P5, maxval 255), set pixels written as 255.
std::string to_pgm(const SilhouetteImage& img);

}  // namespace pickmix
