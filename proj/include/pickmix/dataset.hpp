#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pickmix/geometry.hpp"
#include "pickmix/index_store.hpp"
#include "pickmix/retrieval.hpp"

namespace pickmix {

enum class LegStyle { FourStraight, FourSplayed, Sled, Swivel5 };
enum class BackStyle { SolidPanel, Bars, RoundTopPanel };
enum class SeatShape { Square, Round };
enum class ArmStyle { None, Box, Loop };

/// Procedural chair. Model units: seat footprint 0.5 x 0.5, seat bottom at
/// height 0.45, y up, backrest at -z.
struct ChairParams {
    LegStyle leg_style = LegStyle::FourStraight;
    double leg_thickness = 0.04;  // [0.02, 0.08]
    BackStyle back_style = BackStyle::SolidPanel;
    int back_bars = 3;            // [2, 6], used by BackStyle::Bars
    double back_height = 0.45;    // [0.3, 0.6], above the seat top
    double back_thickness = 0.04; // [0.02, 0.08]
    SeatShape seat_shape = SeatShape::Square;
    double seat_thickness = 0.05; // [0.03, 0.08]
    ArmStyle armrests = ArmStyle::None;
    std::uint64_t seed = 0;

    /// Throws ParamError when a field is outside its range.
    void validate() const;
    bool operator==(const ChairParams&) const = default;
};

nlohmann::json to_json(const ChairParams& p);
ChairParams chair_params_from_json(const nlohmann::json& j);

/// Every face labeled backrest, seat, armrests or legs. All parts stay inside
/// the seat footprint, the legs touch y = 0 and the backrest tops out the
/// object, so chairs sharing seat and back height share a bounding box.
PartLabeledMesh generate_chair(const ChairParams& p);

/// Uniformly sampled parameters; a pure function of `seed`.
ChairParams random_chair_params(std::uint64_t seed);

struct GeneratedShape {
    ShapeRecord record;
    ChairParams params;
    PartLabeledMesh mesh;
};

/// L x B chairs: shape (i, j) takes legs from leg_variants[i] and the
/// backrest from back_variants[j] (its height forced to base.back_height so
/// the whole grid shares one bounding box); everything else from base.
/// Ids are i * B + j.
std::vector<GeneratedShape> generate_grid(const std::vector<ChairParams>& leg_variants,
                                          const std::vector<ChairParams>& back_variants,
                                          const ChairParams& base = {});
/// Distinct leg / backrest variants cycling through styles and thicknesses.
std::vector<ChairParams> default_leg_variants(int count);
std::vector<ChairParams> default_back_variants(int count);
std::uint32_t grid_id(int i, int j, int back_count);

std::vector<GeneratedShape> generate_random_corpus(int count, std::uint64_t seed);
std::vector<CorpusEntry> to_corpus(const std::vector<GeneratedShape>& shapes);

struct EvalCase {
    BlendQuery query;
    std::uint32_t ground_truth = 0;
};

struct EvalReport {
    std::size_t cases = 0;
    std::size_t k = 5;
    double top1 = 0.0;
    double top5 = 0.0;
    double topk = 0.0;
    /// accuracy_at[r-1] = fraction of cases whose ground truth ranks <= r.
    std::vector<double> accuracy_at;
    std::vector<std::size_t> ranks;
    double mean_rank = 0.0;
    double runtime_seconds = 0.0;
};

/// Legs from (i, i), backrest from (j, j), ground truth (i, j) for every cell.
std::vector<EvalCase> grid_cross_cases(int leg_count, int back_count);
/// Every part picked from the ground-truth shape itself.
std::vector<EvalCase> self_cases(const ShapeIndex& index);
/// Deterministic permutation of the ground truths (chance baseline).
std::vector<EvalCase> shuffle_ground_truth(std::vector<EvalCase> cases, std::uint64_t seed);

nlohmann::json cases_to_json(const std::vector<EvalCase>& cases);
std::vector<EvalCase> cases_from_json(const nlohmann::json& j);

/// Ranks each case's ground truth among all shapes. Throws
/// MissingGroundTruthError when a ground truth is not indexed.
EvalReport run_blend_eval(const ShapeIndex& index, const std::vector<EvalCase>& cases,
                          std::size_t k = 5, const ExternalTable* external = nullptr);

nlohmann::json report_to_json(const EvalReport& r);
/// Plain-text top-k accuracy table.
std::string report_table(const EvalReport& r);

}  // namespace pickmix
