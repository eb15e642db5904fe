#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vistrace/errors.hpp"
#include "vistrace/pipeline.hpp"
#include "vistrace/rubric.hpp"

namespace vistrace {

/// Per-node indices, kept at full double precision:
///   vis_quantity = j_q
///   vis_quality  = sqrt(j_a * j_f)
///   vis          = sqrt(vis_quantity * vis_quality)
struct NodeScore {
    std::string node_id;
    double vis_quantity = 0.0;
    double vis_quality = 0.0;
    double vis = 0.0;
};

/// Leaf-id -> weight. Valid when it covers exactly the leaf set, every
/// weight is non-negative, and the weights sum to 1 within 1e-9.
using WeightMap = std::map<std::string, double>;

enum class ScoreMode { full_precision, paper_compat };

constexpr std::string_view score_mode_name(ScoreMode m) noexcept {
    return m == ScoreMode::paper_compat ? "paper-compat" : "full-precision";
}

struct ChainScore {
    std::string subject_id;
    std::vector<NodeScore> node_scores;  // leaf declaration order
    WeightMap weights;
    double vis = 0.0;
    ScoreMode mode = ScoreMode::full_precision;
    std::size_t node_count = 0;  // number of contributing (leaf) nodes
};

// Display rounding used for every rendered score. The last kept digit is
// rounded up only when the dropped remainder reaches 5/8 of its place:
// at two decimals 1.31607 -> 1.31 and 2.44949 -> 2.45. The bundled
// fixture tables (fixtures/table3.json .. table8.json) pin this
// convention; tests/test_metrics.cpp carries the fixed points.
inline double display_round(double value, int decimals = 2) {
    const double scale = std::pow(10.0, decimals);
    return std::floor(value * scale + 0.375) / scale;
}

/// display_round + fixed-point formatting, e.g. format_score(3.4641) == "3.46".
inline std::string format_score(double value, int decimals = 2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, display_round(value, decimals));
    return buf;
}

inline double vis_quantity(const JudgementTriple& t) {
    return static_cast<double>(t.quantity.value());
}

inline double vis_quality(const JudgementTriple& t) {
    return std::sqrt(static_cast<double>(t.accuracy.value()) * t.freshness.value());
}

inline NodeScore node_visibility(const JudgementTriple& t, std::string node_id = {}) {
    NodeScore s;
    s.node_id = std::move(node_id);
    s.vis_quantity = vis_quantity(t);
    s.vis_quality = vis_quality(t);
    s.vis = std::sqrt(s.vis_quantity * s.vis_quality);
    return s;
}

/// Equal weighting 1/M over the chain's M leaves.
inline WeightMap equal_weights(const SupplyChain& chain) {
    const auto leaves = chain.leaves();
    if (leaves.empty())
        throw Error(Code::E_NO_LEAVES, chain.subject_id(),
                    "chain has no contributing leaf nodes to weight");
    WeightMap w;
    for (const Node* leaf : leaves) w[leaf->id] = 1.0 / static_cast<double>(leaves.size());
    return w;
}

namespace detail {
inline void check_weights(const WeightMap& weights, const std::vector<const Node*>& leaves) {
    if (weights.size() != leaves.size())
        throw Error(Code::E_BAD_WEIGHTS, "weights",
                    "weight map has " + std::to_string(weights.size()) + " entries for " +
                        std::to_string(leaves.size()) + " leaves");
    double sum = 0.0;
    for (const Node* leaf : leaves) {
        auto it = weights.find(leaf->id);
        if (it == weights.end())
            throw Error(Code::E_BAD_WEIGHTS, leaf->id,
                        "no weight for leaf '" + leaf->id + "'");
        if (it->second < 0.0)
            throw Error(Code::E_BAD_WEIGHTS, leaf->id,
                        "negative weight for leaf '" + leaf->id + "'");
        sum += it->second;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw Error(Code::E_BAD_WEIGHTS, "weights",
                    "weights sum to " + std::to_string(sum) + ", expected 1");
}
}  // namespace detail

/// Scores a chain: every leaf must carry a judgement triple. Defaults to
/// equal weights. paper_compat aggregates from per-node scores rounded to
/// two decimals; full_precision aggregates the exact values. Node scores
/// in the result are always full precision.
inline ChainScore chain_visibility(const SupplyChain& chain,
                                   const std::optional<WeightMap>& weights = std::nullopt,
                                   ScoreMode mode = ScoreMode::full_precision) {
    const auto leaves = chain.leaves();
    if (leaves.empty())
        throw Error(Code::E_NO_LEAVES, chain.subject_id(),
                    "chain has no contributing leaf nodes to score");
    for (const Node* leaf : leaves)
        if (!leaf->judgements)
            throw Error(Code::E_MISSING_JUDGEMENT, leaf->id,
                        "leaf '" + leaf->id + "' has no judgements");
    WeightMap w = weights ? *weights : equal_weights(chain);
    if (weights) detail::check_weights(w, leaves);

    ChainScore score;
    score.subject_id = chain.subject_id();
    score.weights = std::move(w);
    score.mode = mode;
    score.node_count = leaves.size();
    double total = 0.0;
    for (const Node* leaf : leaves) {
        NodeScore ns = node_visibility(*leaf->judgements, leaf->id);
        const double weight = score.weights.at(leaf->id);
        total += weight * (mode == ScoreMode::paper_compat ? display_round(ns.vis) : ns.vis);
        score.node_scores.push_back(std::move(ns));
    }
    score.vis = total;
    return score;
}

}  // namespace vistrace
