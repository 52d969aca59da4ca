#pragma once

#include <span>
#include <string>
#include <vector>

#include "pickmix/rasterizer.hpp"

namespace pickmix {

struct GridSize {
    int cols;
    int rows;

    int cells() const { return cols * rows; }
    bool operator==(const GridSize&) const = default;
};

enum class HogVariant {
    TwoLevel,    // mid 17x17 + low 1x1
    ThreeLevel,  // adds the high-frequency 34x34 level
};

struct HogConfig {
    int orientation_bins = 9;
    std::vector<GridSize> levels{{17, 17}, {1, 1}};
    double clip = 0.2;
    double epsilon = 1e-6;

    static HogConfig for_variant(HogVariant v);

    /// bins * total cells over all levels; 2610 for the default config.
    int view_length() const;
    int part_length() const { return kViewCount * view_length(); }
    bool operator==(const HogConfig&) const = default;
};

std::string to_string(HogVariant v);
HogVariant parse_hog_variant(const std::string& s);

/// Per-view HoG vector, levels concatenated in config order.
struct ViewDescriptor {
    std::vector<float> values;
};

/// Concatenation of the per-view vectors in viewpoint order.
struct LightFieldDescriptor {
    std::vector<float> values;

    bool is_zero() const;
    bool operator==(const LightFieldDescriptor&) const = default;
};

/// Cell histograms of unsigned gradient orientation over a grid.
///
/// Gradients are centered differences with replicated borders. Each gradient
/// votes its magnitude into the two nearest orientation bins (bin b centered
/// at b*180/bins degrees, wrapping at 180). Cells use floor(size/grid) pixels,
/// the last row/column of cells absorbing the remainder. Each cell is
/// L2-normalized, clipped at `clip`, then renormalized. Output is row-major
/// over cells, `bins` values per cell.
std::vector<double> hog_cells(const SilhouetteImage& img, GridSize grid, int bins,
                              double clip = 0.2, double epsilon = 1e-6);

ViewDescriptor view_descriptor(const SilhouetteImage& img, const HogConfig& cfg = {});

/// Throws ArityError unless exactly 20 silhouettes are given.
LightFieldDescriptor part_descriptor(std::span<const SilhouetteImage> silhouettes,
                                     const HogConfig& cfg = {});

/// Euclidean distance; throws DimensionError on length mismatch.
double shape_distance(const LightFieldDescriptor& a, const LightFieldDescriptor& b);
double descriptor_norm(const LightFieldDescriptor& a);

/// "LFD1" container: u32 part_count, then per part u32 length + f32 values.
std::string encode_descriptors(std::span<const LightFieldDescriptor> parts);
std::vector<LightFieldDescriptor> decode_descriptors(std::string_view bytes);
std::string descriptors_to_json(std::span<const LightFieldDescriptor> parts);

}  // namespace pickmix
