#pragma once

#include <cstdlib>
#include <string>

#include "pickmix/dataset.hpp"
#include "pickmix/index_store.hpp"

namespace fixtures {

// Small mixed corpus: armed and armless chairs, every leg style.
inline std::vector<pickmix::GeneratedShape> mixed_shapes(int count = 10, std::uint64_t seed = 11) {
    using namespace pickmix;
    auto shapes = generate_random_corpus(count, seed);
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        auto& p = shapes[i].params;
        p.armrests = i % 2 == 0 ? ArmStyle::None : (i % 4 == 1 ? ArmStyle::Box : ArmStyle::Loop);
        p.leg_style = static_cast<LegStyle>(i % 4);
        shapes[i].mesh = generate_chair(p);
    }
    return shapes;
}

inline pickmix::IndexConfig small_config(int dim = 4, int resolution = 64) {
    pickmix::IndexConfig cfg;
    cfg.sammon.dim = dim;
    cfg.resolution = resolution;
    return cfg;
}

inline const pickmix::ShapeIndex& small_index() {
    static const pickmix::ShapeIndex index =
        pickmix::build_index(pickmix::to_corpus(mixed_shapes()), small_config());
    return index;
}

inline std::filesystem::path temp_path(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "pickmix_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace fixtures
