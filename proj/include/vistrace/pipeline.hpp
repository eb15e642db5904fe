#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vistrace/errors.hpp"
#include "vistrace/rubric.hpp"

namespace vistrace {

// The five roles a contribution can play in a production pipeline.
enum class NodeKind {
    data_source,
    human_contributor,
    derived_asset,
    external_model,
    output_model,
};

constexpr std::string_view node_kind_name(NodeKind k) noexcept {
    switch (k) {
        case NodeKind::data_source: return "data-source";
        case NodeKind::human_contributor: return "human-contributor";
        case NodeKind::derived_asset: return "derived-asset";
        case NodeKind::external_model: return "external-model";
        case NodeKind::output_model: return "output-model";
    }
    return "unknown";
}

constexpr std::optional<NodeKind> parse_node_kind(std::string_view s) noexcept {
    if (s == "data-source") return NodeKind::data_source;
    if (s == "human-contributor") return NodeKind::human_contributor;
    if (s == "derived-asset") return NodeKind::derived_asset;
    if (s == "external-model") return NodeKind::external_model;
    if (s == "output-model") return NodeKind::output_model;
    return std::nullopt;
}

/// A pointer to supporting documentation for a contribution (a dataset
/// README, a model card, a source repository, ...). `live_validation`
/// declares a real-time query capability rather than a timestamp.
struct EvidenceRef {
    std::string description;
    std::string uri;
    std::optional<Date> last_updated;
    bool live_validation = false;

    bool operator==(const EvidenceRef&) const = default;
};

/// One contribution in the supply chain.
struct Node {
    std::string id;
    NodeKind kind = NodeKind::data_source;
    std::string name;
    std::string role;
    std::string description;
    std::vector<EvidenceRef> evidence;
    std::optional<JudgementTriple> judgements;
    std::string sub_manifest;  // external-model only

    bool operator==(const Node&) const = default;
};

struct Edge {
    std::string from;
    std::string to;

    bool operator==(const Edge&) const = default;
};

inline bool valid_id_token(std::string_view id) noexcept {
    if (id.empty()) return false;
    return std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '.' || c == '-';
    });
}

namespace detail {

// Every node Kahn's algorithm could not remove kept a live in-edge, so
// inside the residual set each node has a residual predecessor. Walking
// predecessors must therefore revisit a node, and the walk between the
// two visits is a concrete cycle (collected backwards, returned in edge
// direction, closed for display).
inline std::vector<std::size_t> find_cycle(const std::vector<std::vector<std::size_t>>& prev,
                                           const std::vector<bool>& residual) {
    std::size_t start = 0;
    for (std::size_t i = 0; i < residual.size(); ++i)
        if (residual[i]) start = i;
    std::vector<std::size_t> path;
    std::vector<int> visited_at(residual.size(), -1);
    std::size_t cur = start;
    while (visited_at[cur] < 0) {
        visited_at[cur] = static_cast<int>(path.size());
        path.push_back(cur);
        for (std::size_t p : prev[cur])
            if (residual[p]) {
                cur = p;
                break;
            }
    }
    std::vector<std::size_t> cycle(path.begin() + visited_at[cur], path.end());
    std::reverse(cycle.begin(), cycle.end());
    cycle.push_back(cycle.front());
    return cycle;
}

}  // namespace detail

/// A validated bill-of-materials DAG: every node contributes, directly or
/// through derived assets, to the unique output-model sink. Immutable
/// once built; safe for concurrent reads.
class SupplyChain {
public:
    /// Validates and builds a chain. Throws Error with exactly one
    /// diagnosed code on invalid input: E_DUP_ID, E_SCHEMA (malformed id
    /// or misplaced sub_manifest), E_NO_SUBJECT, E_MULTI_SUBJECT,
    /// E_DANGLING_EDGE, E_CYCLE, E_ORPHAN.
    ///
    /// Parallel edges collapse to one; a self-edge is a cycle. A chain
    /// consisting of only the subject builds fine — it simply has no
    /// scoreable leaves.
    static SupplyChain build(std::string subject_id, std::vector<Node> nodes,
                             std::vector<Edge> edges) {
        SupplyChain chain;
        chain.subject_id_ = std::move(subject_id);
        chain.nodes_ = std::move(nodes);

        // ids: unique, well-formed
        for (std::size_t i = 0; i < chain.nodes_.size(); ++i) {
            const Node& n = chain.nodes_[i];
            if (!valid_id_token(n.id))
                throw Error(Code::E_SCHEMA, n.id,
                            "node id '" + n.id + "' is not a [A-Za-z0-9_.-]+ token");
            if (!chain.index_.emplace(n.id, i).second)
                throw Error(Code::E_DUP_ID, n.id, "duplicate node id '" + n.id + "'");
            if (!n.sub_manifest.empty() && n.kind != NodeKind::external_model)
                throw Error(Code::E_SCHEMA, n.id,
                            "sub_manifest is only allowed on external-model nodes");
        }

        // exactly one output-model node, and it is the declared subject
        std::vector<std::string> outputs;
        for (const Node& n : chain.nodes_)
            if (n.kind == NodeKind::output_model) outputs.push_back(n.id);
        if (outputs.size() > 1)
            throw Error(Code::E_MULTI_SUBJECT, chain.subject_id_,
                        "found " + std::to_string(outputs.size()) + " output-model nodes");
        if (outputs.empty() || !chain.index_.count(chain.subject_id_) ||
            outputs.front() != chain.subject_id_)
            throw Error(Code::E_NO_SUBJECT, chain.subject_id_,
                        "subject '" + chain.subject_id_ +
                            "' is not present as the output-model node");

        // edges: known endpoints, deduplicated, no self-loops
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (const Edge& e : edges) {
            auto from = chain.index_.find(e.from);
            auto to = chain.index_.find(e.to);
            if (from == chain.index_.end() || to == chain.index_.end())
                throw Error(Code::E_DANGLING_EDGE, e.from + "->" + e.to,
                            "edge references unknown node id");
            if (from->second == to->second)
                throw Error(Code::E_CYCLE, e.from, "self-edge on '" + e.from + "'");
            if (seen.emplace(from->second, to->second).second)
                chain.edges_.push_back({from->second, to->second});
        }

        chain.check_acyclic();
        chain.check_connected();
        chain.compute_leaves();
        return chain;
    }

    const std::string& subject_id() const noexcept { return subject_id_; }
    const Node& subject() const { return nodes_[index_.at(subject_id_)]; }

    std::span<const Node> nodes() const noexcept { return nodes_; }

    const Node* find(std::string_view id) const {
        auto it = index_.find(std::string(id));
        return it == index_.end() ? nullptr : &nodes_[it->second];
    }

    /// Edges as (from-id, to-id) pairs, deduplicated, in input order.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(edges_.size());
        for (auto [f, t] : edges_) out.push_back({nodes_[f].id, nodes_[t].id});
        return out;
    }

    /// Nodes with no incoming contribution, in declaration order. The
    /// subject never counts as a leaf.
    std::vector<const Node*> leaves() const {
        std::vector<const Node*> out;
        out.reserve(leaf_indices_.size());
        for (std::size_t i : leaf_indices_) out.push_back(&nodes_[i]);
        return out;
    }

    std::size_t leaf_count() const noexcept { return leaf_indices_.size(); }

    bool is_leaf(std::string_view id) const {
        for (std::size_t i : leaf_indices_)
            if (nodes_[i].id == id) return true;
        return false;
    }

    /// Re-runs every construction invariant. Idempotent on a built chain.
    void validate() const {
        SupplyChain::build(subject_id_, {nodes_.begin(), nodes_.end()}, edges());
    }

private:
    SupplyChain() = default;

    // Kahn's algorithm; on leftovers, walks the residual graph to name one cycle.
    void check_acyclic() const {
        std::vector<std::size_t> in_degree(nodes_.size(), 0);
        std::vector<std::vector<std::size_t>> next(nodes_.size());
        std::vector<std::vector<std::size_t>> prev(nodes_.size());
        for (auto [f, t] : edges_) {
            ++in_degree[t];
            next[f].push_back(t);
            prev[t].push_back(f);
        }
        std::vector<std::size_t> stack;
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (in_degree[i] == 0) stack.push_back(i);
        std::size_t removed = 0;
        while (!stack.empty()) {
            std::size_t n = stack.back();
            stack.pop_back();
            ++removed;
            for (std::size_t m : next[n])
                if (--in_degree[m] == 0) stack.push_back(m);
        }
        if (removed == nodes_.size()) return;

        std::vector<bool> residual(nodes_.size(), false);
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (in_degree[i] > 0) residual[i] = true;
        const auto cycle = detail::find_cycle(prev, residual);
        std::string msg = "cycle:";
        for (std::size_t i = 0; i < cycle.size(); ++i)
            msg += (i ? " -> " : " ") + nodes_[cycle[i]].id;
        throw Error(Code::E_CYCLE, nodes_[cycle.front()].id, msg);
    }

    // every non-subject node must reach the subject along edge direction
    void check_connected() const {
        std::vector<std::vector<std::size_t>> prev(nodes_.size());
        for (auto [f, t] : edges_) prev[t].push_back(f);
        std::vector<bool> reaches(nodes_.size(), false);
        std::vector<std::size_t> stack{index_.at(subject_id_)};
        reaches[stack.front()] = true;
        while (!stack.empty()) {
            std::size_t n = stack.back();
            stack.pop_back();
            for (std::size_t p : prev[n])
                if (!reaches[p]) {
                    reaches[p] = true;
                    stack.push_back(p);
                }
        }
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (!reaches[i])
                throw Error(Code::E_ORPHAN, nodes_[i].id,
                            "node '" + nodes_[i].id + "' has no path to subject '" +
                                subject_id_ + "'");
    }

    void compute_leaves() {
        std::vector<bool> has_incoming(nodes_.size(), false);
        for (auto [f, t] : edges_) has_incoming[t] = true;
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (!has_incoming[i] && nodes_[i].id != subject_id_) leaf_indices_.push_back(i);
    }

    std::string subject_id_;
    std::vector<Node> nodes_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::pair<std::size_t, std::size_t>> edges_;
    std::vector<std::size_t> leaf_indices_;
};

inline SupplyChain build_chain(std::string subject_id, std::vector<Node> nodes,
                               std::vector<Edge> edges) {
    return SupplyChain::build(std::move(subject_id), std::move(nodes), std::move(edges));
}

/// The scoreable contributions of a chain, in declaration order.
inline std::vector<const Node*> leaf_nodes(const SupplyChain& chain) { return chain.leaves(); }

}  // namespace vistrace
