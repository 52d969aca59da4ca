#include "pickmix/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pickmix/errors.hpp"

namespace pickmix {

namespace {

PickSource parse_source(const nlohmann::json& j) {
    if (j.is_array()) {
        std::vector<double> v;
        v.reserve(j.size());
        for (const auto& x : j) {
            if (!x.is_number()) throw QueryError("literal coordinates must be numbers");
            v.push_back(x.get<double>());
        }
        return PickSource::coordinates(std::move(v));
    }
    if (!j.is_string()) throw QueryError("pick source must be a string or an array");
    const auto s = j.get<std::string>();
    if (s == "absent") return PickSource::absent();
    if (s.rfind("shape:", 0) == 0) {
        const auto digits = s.substr(6);
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
            throw QueryError("bad shape reference '" + s + "'");
        unsigned long long id = 0;
        try {
            id = std::stoull(digits);
        } catch (const std::exception&) {
            throw QueryError("bad shape reference '" + s + "'");
        }
        if (id > 0xFFFFFFFFull) throw QueryError("shape id out of range in '" + s + "'");
        return PickSource::shape(static_cast<std::uint32_t>(id));
    }
    if (s.rfind("ext:", 0) == 0 && s.size() > 4) return PickSource::external(s.substr(4));
    throw QueryError("unrecognized pick source '" + s + "'");
}

nlohmann::json source_to_json(const PickSource& s) {
    switch (s.kind) {
        case PickSource::Kind::Shape: return "shape:" + std::to_string(s.shape_id);
        case PickSource::Kind::External: return "ext:" + s.external_id;
        case PickSource::Kind::Absent: return "absent";
        case PickSource::Kind::Literal: return s.literal;
    }
    return nullptr;
}

// Sequential sum so every caller sees the same rounding.
double euclidean(const Eigen::MatrixXd& coords, Eigen::Index row, const Eigen::VectorXd& target) {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < target.size(); ++c) {
        const double diff = coords(row, c) - target(c);
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

bool ranks_before(const RankedResult& a, const RankedResult& b) {
    if (a.total_cost != b.total_cost) return a.total_cost < b.total_cost;
    return a.shape_id < b.shape_id;
}

}  // namespace

void BlendQuery::validate() const {
    if (picks.empty()) throw QueryError("a blend query needs at least one pick");
    if (k < 1) throw QueryError("k must be at least 1");
    std::set<std::string> parts;
    for (const auto& p : picks) {
        if (!parts.insert(p.part).second) throw QueryError("part '" + p.part + "' picked twice");
        if (!(p.weight > 0.0) || !std::isfinite(p.weight))
            throw QueryError("weight for '" + p.part + "' must be positive");
    }
}

BlendQuery parse_blend_query(const nlohmann::json& j) {
    if (!j.is_object()) throw QueryError("query must be a JSON object");
    if (!j.contains("picks") || !j["picks"].is_array()) throw QueryError("query needs 'picks'");
    BlendQuery q;
    for (const auto& pj : j["picks"]) {
        if (!pj.is_object()) throw QueryError("each pick must be an object");
        if (!pj.contains("source")) throw QueryError("pick needs a 'source'");
        if (!pj.contains("part") || !pj["part"].is_string())
            throw QueryError("pick needs a string 'part'");
        PartPick pick;
        pick.source = parse_source(pj["source"]);
        pick.part = pj["part"].get<std::string>();
        if (pj.contains("weight")) {
            if (!pj["weight"].is_number()) throw QueryError("pick weight must be a number");
            pick.weight = pj["weight"].get<double>();
        }
        q.picks.push_back(std::move(pick));
    }
    if (j.contains("k")) {
        if (!j["k"].is_number_integer() || j["k"].get<long long>() < 1)
            throw QueryError("k must be a positive integer");
        q.k = j["k"].get<std::size_t>();
    }
    q.validate();
    return q;
}

BlendQuery parse_blend_query(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw QueryError(std::string("malformed query JSON: ") + e.what());
    }
    return parse_blend_query(j);
}

nlohmann::json blend_query_to_json(const BlendQuery& q) {
    nlohmann::json picks = nlohmann::json::array();
    for (const auto& p : q.picks)
        picks.push_back({{"source", source_to_json(p.source)}, {"part", p.part}, {"weight", p.weight}});
    return {{"picks", picks}, {"k", q.k}};
}

Eigen::VectorXd resolve_pick(const ShapeIndex& index, const PartPick& pick,
                             const ExternalTable* external) {
    const auto& table = index.part(pick.part);
    switch (pick.source.kind) {
        case PickSource::Kind::Shape:
            return table.manifold.coords.row(Eigen::Index(index.row_of(pick.source.shape_id)))
                .transpose();
        case PickSource::Kind::External: {
            const ExternalEmbedding* rec = external ? external->find(pick.source.external_id) : nullptr;
            if (!rec) throw UnknownSourceError("no external embedding 'ext:" + pick.source.external_id + "'");
            auto it = rec->parts.find(pick.part);
            if (it == rec->parts.end())
                throw UnknownSourceError("external embedding '" + rec->id + "' has no '" +
                                         pick.part + "' coordinates");
            return it->second;
        }
        case PickSource::Kind::Absent:
            return table.absent_coords;
        case PickSource::Kind::Literal: {
            const auto& v = pick.source.literal;
            if (Eigen::Index(v.size()) != table.manifold.coords.cols())
                throw DimensionError("literal for '" + pick.part + "' has " +
                                     std::to_string(v.size()) + " coordinates, manifold has " +
                                     std::to_string(table.manifold.coords.cols()));
            return Eigen::Map<const Eigen::VectorXd>(v.data(), Eigen::Index(v.size()));
        }
    }
    throw UnknownSourceError("unhandled pick source");
}

std::vector<RankedResult> blend_retrieve(const ShapeIndex& index, const BlendQuery& q,
                                         const ExternalTable* external) {
    q.validate();
    if (index.size() == 0) throw EmptyIndexError("index holds no shapes");

    struct Resolved {
        const PartTable* table;
        Eigen::VectorXd target;
        double weight;
        const std::string* label;
    };
    std::vector<Resolved> picks;
    picks.reserve(q.picks.size());
    for (const auto& p : q.picks)
        picks.push_back({&index.part(p.part), resolve_pick(index, p, external), p.weight, &p.part});

    std::vector<RankedResult> results(index.size());
    for (std::size_t row = 0; row < index.size(); ++row) {
        auto& r = results[row];
        r.shape_id = index.shapes[row].id;
        for (const auto& p : picks) {
            const double d = euclidean(p.table->manifold.coords, Eigen::Index(row), p.target);
            r.per_part_costs[*p.label] = d;
            r.total_cost += p.weight * d;
        }
    }
    const auto k = std::min(q.k, results.size());
    std::partial_sort(results.begin(), results.begin() + std::ptrdiff_t(k), results.end(),
                      ranks_before);
    results.resize(k);
    return results;
}

std::vector<RankedResult> knn_part(const ShapeIndex& index, const std::string& part,
                                   const Eigen::VectorXd& coords, std::size_t k) {
    BlendQuery q;
    std::vector<double> v(coords.data(), coords.data() + coords.size());
    q.picks.push_back({PickSource::coordinates(std::move(v)), part, 1.0});
    q.k = std::max<std::size_t>(k, 1);
    return blend_retrieve(index, q);
}

nlohmann::json results_to_json(const ShapeIndex& index, const std::vector<RankedResult>& results,
                               bool explain) {
    nlohmann::json out = nlohmann::json::array();
    std::size_t rank = 1;
    for (const auto& r : results) {
        nlohmann::json item{{"rank", rank++},
                            {"id", r.shape_id},
                            {"name", index.shapes[index.row_of(r.shape_id)].name},
                            {"total_cost", r.total_cost}};
        if (explain) item["per_part_costs"] = r.per_part_costs;
        out.push_back(std::move(item));
    }
    return out;
}

}  // namespace pickmix
