#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "pickmix/shape_index.hpp"

namespace pickmix {

/// Where a pick's coordinates come from.
struct PickSource {
    enum class Kind { Shape, External, Absent, Literal };

    Kind kind = Kind::Shape;
    std::uint32_t shape_id = 0;
    std::string external_id;
    std::vector<double> literal;

    static PickSource shape(std::uint32_t id) { return {Kind::Shape, id, {}, {}}; }
    static PickSource external(std::string id) { return {Kind::External, 0, std::move(id), {}}; }
    static PickSource absent() { return {Kind::Absent, 0, {}, {}}; }
    static PickSource coordinates(std::vector<double> v) {
        return {Kind::Literal, 0, {}, std::move(v)};
    }
};

struct PartPick {
    PickSource source;
    std::string part;
    double weight = 1.0;
};

struct BlendQuery {
    std::vector<PartPick> picks;
    std::size_t k = 5;

    /// Non-empty, distinct parts, positive weights, k >= 1. Throws QueryError.
    void validate() const;
};

struct RankedResult {
    std::uint32_t shape_id = 0;
    double total_cost = 0.0;
    std::map<std::string, double> per_part_costs;
};

/// Parses {"picks":[{"source":"shape:42"|"ext:img7"|"absent"|[floats],
/// "part":"legs","weight":1.0}],"k":5}. Throws QueryError.
BlendQuery parse_blend_query(const nlohmann::json& j);
BlendQuery parse_blend_query(const std::string& text);
nlohmann::json blend_query_to_json(const BlendQuery& q);

/// Coordinates of a pick on its part's normalized manifold.
Eigen::VectorXd resolve_pick(const ShapeIndex& index, const PartPick& pick,
                             const ExternalTable* external = nullptr);

/// Exhaustive scan: cost(a) = sum over picks of weight * ||a^part - b^part||.
/// Ascending by total cost, ties by ascending shape id; at most q.k results.
std::vector<RankedResult> blend_retrieve(const ShapeIndex& index, const BlendQuery& q,
                                         const ExternalTable* external = nullptr);

/// k nearest shapes on one part manifold.
std::vector<RankedResult> knn_part(const ShapeIndex& index, const std::string& part,
                                   const Eigen::VectorXd& coords, std::size_t k);

/// JSON used by both the CLI and the HTTP service. Per-part costs are
/// included when `explain` is set.
nlohmann::json results_to_json(const ShapeIndex& index, const std::vector<RankedResult>& results,
                               bool explain);

}  // namespace pickmix
