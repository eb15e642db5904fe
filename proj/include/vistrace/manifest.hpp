#pragma once

// Transparency-manifest file format: the bill-of-materials document that
// names a model's contributions, their documentation evidence, and the
// assessor judgements. JSON, UTF-8, schema_version "1".
//
// Canonical serialization: keys in schema order, node order preserved,
// 2-space indentation, trailing newline, optional fields omitted when at
// their defaults. Byte-identical across runs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "vistrace/date.hpp"
#include "vistrace/errors.hpp"
#include "vistrace/metrics.hpp"
#include "vistrace/pipeline.hpp"
#include "vistrace/rubric.hpp"

namespace vistrace {

struct SubjectInfo {
    std::string id;
    std::string name;
    std::string description;

    bool operator==(const SubjectInfo&) const = default;
};

/// Judgement values exactly as they appeared in the document. Range and
/// integrality are checked by validate_manifest, not by the parser, so a
/// quantity of 2.5 or 7 survives into the report with a precise locus.
struct RawJudgements {
    std::optional<double> quantity;
    std::optional<double> freshness;
    std::optional<double> accuracy;
    std::map<Criterion, std::string> rationale;
    std::string assessed_by;
    std::optional<Date> assessed_on;

    bool operator==(const RawJudgements&) const = default;
};

struct ManifestNode {
    std::string id;
    NodeKind kind = NodeKind::data_source;
    std::string name;
    std::string role;
    std::string description;
    std::vector<EvidenceRef> evidence;
    std::optional<RawJudgements> judgements;
    std::string sub_manifest;

    bool operator==(const ManifestNode&) const = default;
};

struct Manifest {
    std::string schema_version = "1";
    SubjectInfo subject;
    std::vector<ManifestNode> nodes;
    std::vector<Edge> edges;
    std::optional<WeightMap> weights;

    // loci of keys the schema does not define; reported as
    // W_UNKNOWN_FIELD and never serialized, so excluded from equality
    std::vector<std::string> unknown_fields;

    bool operator==(const Manifest& o) const {
        return schema_version == o.schema_version && subject == o.subject && nodes == o.nodes &&
               edges == o.edges && weights == o.weights;
    }
};

struct ValidationReport {
    std::vector<Finding> errors;
    std::vector<Finding> warnings;

    bool ok() const noexcept { return errors.empty(); }
};

namespace detail {

using Json = nlohmann::json;

[[noreturn]] inline void schema_error(const std::string& locus, const std::string& what) {
    throw Error(Code::E_SCHEMA, locus, locus + ": " + what);
}

inline const Json& require_key(const Json& obj, const char* key, const std::string& locus) {
    if (!obj.contains(key)) schema_error(locus, std::string("missing required key '") + key + "'");
    return obj.at(key);
}

inline std::string require_string(const Json& obj, const char* key, const std::string& locus) {
    const Json& v = require_key(obj, key, locus);
    if (!v.is_string()) schema_error(locus + "." + key, "expected a string");
    return v.get<std::string>();
}

inline std::string optional_string(const Json& obj, const char* key, const std::string& locus) {
    if (!obj.contains(key)) return {};
    const Json& v = obj.at(key);
    if (!v.is_string()) schema_error(locus + "." + key, "expected a string");
    return v.get<std::string>();
}

inline std::optional<Date> optional_date(const Json& obj, const char* key,
                                         const std::string& locus) {
    if (!obj.contains(key)) return std::nullopt;
    const Json& v = obj.at(key);
    if (!v.is_string()) schema_error(locus + "." + key, "expected a YYYY-MM-DD string");
    auto d = parse_iso_date(v.get<std::string>());
    if (!d)
        schema_error(locus + "." + key,
                     "'" + v.get<std::string>() + "' is not a valid YYYY-MM-DD date");
    return d;
}

inline void collect_unknown(const Json& obj, std::initializer_list<std::string_view> allowed,
                            const std::string& locus, std::vector<std::string>& out) {
    for (const auto& item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            out.push_back(locus + "." + item.key());
    }
}

inline EvidenceRef parse_evidence(const Json& j, const std::string& locus,
                                  std::vector<std::string>& unknown) {
    if (!j.is_object()) schema_error(locus, "expected an evidence object");
    collect_unknown(j, {"description", "uri", "last_updated", "live_validation"}, locus, unknown);
    EvidenceRef e;
    e.description = require_string(j, "description", locus);
    e.uri = optional_string(j, "uri", locus);
    e.last_updated = optional_date(j, "last_updated", locus);
    if (j.contains("live_validation")) {
        const Json& lv = j.at("live_validation");
        if (!lv.is_boolean()) schema_error(locus + ".live_validation", "expected a boolean");
        e.live_validation = lv.get<bool>();
    }
    return e;
}

inline RawJudgements parse_judgements(const Json& j, const std::string& locus,
                                      std::vector<std::string>& unknown) {
    if (!j.is_object()) schema_error(locus, "expected a judgements object");
    collect_unknown(
        j, {"quantity", "freshness", "accuracy", "rationale", "assessed_by", "assessed_on"}, locus,
        unknown);
    RawJudgements r;
    auto raw_score = [&](const char* key) -> std::optional<double> {
        if (!j.contains(key)) return std::nullopt;
        const Json& v = j.at(key);
        if (!v.is_number()) schema_error(locus + "." + key, "expected a number");
        return v.get<double>();
    };
    r.quantity = raw_score("quantity");
    r.freshness = raw_score("freshness");
    r.accuracy = raw_score("accuracy");
    if (j.contains("rationale")) {
        const Json& rat = j.at("rationale");
        if (!rat.is_object()) schema_error(locus + ".rationale", "expected an object");
        for (const auto& item : rat.items()) {
            auto criterion = parse_criterion(item.key());
            if (!criterion) {
                unknown.push_back(locus + ".rationale." + item.key());
                continue;
            }
            if (!item.value().is_string())
                schema_error(locus + ".rationale." + item.key(), "expected a string");
            r.rationale[*criterion] = item.value().get<std::string>();
        }
    }
    r.assessed_by = optional_string(j, "assessed_by", locus);
    r.assessed_on = optional_date(j, "assessed_on", locus);
    return r;
}

inline ManifestNode parse_node(const Json& j, const std::string& locus,
                               std::vector<std::string>& unknown) {
    if (!j.is_object()) schema_error(locus, "expected a node object");
    collect_unknown(j,
                    {"id", "kind", "name", "role", "description", "evidence", "judgements",
                     "sub_manifest"},
                    locus, unknown);
    ManifestNode n;
    n.id = require_string(j, "id", locus);
    if (!valid_id_token(n.id))
        schema_error(locus + ".id", "'" + n.id + "' is not a [A-Za-z0-9_.-]+ token");
    const std::string kind = require_string(j, "kind", locus);
    auto parsed_kind = parse_node_kind(kind);
    if (!parsed_kind) schema_error(locus + ".kind", "unknown node kind '" + kind + "'");
    n.kind = *parsed_kind;
    n.name = require_string(j, "name", locus);
    n.role = optional_string(j, "role", locus);
    n.description = optional_string(j, "description", locus);
    if (j.contains("evidence")) {
        const Json& ev = j.at("evidence");
        if (!ev.is_array()) schema_error(locus + ".evidence", "expected an array");
        for (std::size_t i = 0; i < ev.size(); ++i)
            n.evidence.push_back(
                parse_evidence(ev[i], locus + ".evidence[" + std::to_string(i) + "]", unknown));
    }
    if (j.contains("judgements"))
        n.judgements = parse_judgements(j.at("judgements"), locus + ".judgements", unknown);
    n.sub_manifest = optional_string(j, "sub_manifest", locus);
    if (!n.sub_manifest.empty() && n.kind != NodeKind::external_model)
        schema_error(locus + ".sub_manifest", "only external-model nodes may carry a sub_manifest");
    return n;
}

}  // namespace detail

/// Parses manifest bytes into the structural model. Throws Error with
/// E_SYNTAX (malformed JSON), E_SCHEMA (missing/false-typed field,
/// malformed id, bad date, misplaced sub_manifest) or E_VERSION (unknown
/// schema_version). Semantic rules live in validate_manifest.
inline Manifest parse_manifest(std::string_view bytes) {
    using detail::Json;
    Json j;
    try {
        j = Json::parse(bytes);
    } catch (const Json::parse_error& e) {
        throw Error(Code::E_SYNTAX, "byte " + std::to_string(e.byte), e.what());
    }
    if (!j.is_object()) detail::schema_error("document", "top level must be a JSON object");

    Manifest m;
    detail::collect_unknown(j, {"schema_version", "subject", "nodes", "edges", "weights"},
                            "document", m.unknown_fields);

    m.schema_version = detail::require_string(j, "schema_version", "document");
    if (m.schema_version != "1")
        throw Error(Code::E_VERSION, "document.schema_version",
                    "unknown schema_version '" + m.schema_version + "', expected \"1\"");

    const Json& subject = detail::require_key(j, "subject", "document");
    if (!subject.is_object()) detail::schema_error("document.subject", "expected an object");
    detail::collect_unknown(subject, {"id", "name", "description"}, "subject", m.unknown_fields);
    m.subject.id = detail::require_string(subject, "id", "subject");
    m.subject.name = detail::require_string(subject, "name", "subject");
    m.subject.description = detail::require_string(subject, "description", "subject");

    const Json& nodes = detail::require_key(j, "nodes", "document");
    if (!nodes.is_array()) detail::schema_error("document.nodes", "expected an array");
    for (std::size_t i = 0; i < nodes.size(); ++i)
        m.nodes.push_back(
            detail::parse_node(nodes[i], "nodes[" + std::to_string(i) + "]", m.unknown_fields));

    const Json& edges = detail::require_key(j, "edges", "document");
    if (!edges.is_array()) detail::schema_error("document.edges", "expected an array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string locus = "edges[" + std::to_string(i) + "]";
        const Json& e = edges[i];
        if (!e.is_object()) detail::schema_error(locus, "expected an edge object");
        detail::collect_unknown(e, {"from", "to"}, locus, m.unknown_fields);
        Edge edge{detail::require_string(e, "from", locus), detail::require_string(e, "to", locus)};
        if (edge.from.empty() || edge.to.empty()) detail::schema_error(locus, "empty endpoint id");
        m.edges.push_back(std::move(edge));
    }

    if (j.contains("weights")) {
        const Json& w = j.at("weights");
        if (!w.is_object()) detail::schema_error("document.weights", "expected an object");
        WeightMap weights;
        for (const auto& item : w.items()) {
            if (!item.value().is_number())
                detail::schema_error("weights." + item.key(), "expected a number");
            weights[item.key()] = item.value().get<double>();
        }
        if (!weights.empty()) m.weights = std::move(weights);
    }
    return m;
}

/// Canonical serialization; see the file header for the rules.
inline std::string serialize_manifest(const Manifest& m) {
    using OJson = nlohmann::ordered_json;
    auto number = [](double v) -> OJson {
        if (v == std::floor(v) && std::abs(v) < 9.0e15) return static_cast<std::int64_t>(v);
        return v;
    };

    OJson j;
    j["schema_version"] = m.schema_version;
    j["subject"] = {{"id", m.subject.id},
                    {"name", m.subject.name},
                    {"description", m.subject.description}};
    j["nodes"] = OJson::array();
    for (const ManifestNode& n : m.nodes) {
        OJson nj;
        nj["id"] = n.id;
        nj["kind"] = node_kind_name(n.kind);
        nj["name"] = n.name;
        if (!n.role.empty()) nj["role"] = n.role;
        if (!n.description.empty()) nj["description"] = n.description;
        if (!n.evidence.empty()) {
            nj["evidence"] = OJson::array();
            for (const EvidenceRef& e : n.evidence) {
                OJson ej;
                ej["description"] = e.description;
                if (!e.uri.empty()) ej["uri"] = e.uri;
                if (e.last_updated) ej["last_updated"] = format_iso_date(*e.last_updated);
                if (e.live_validation) ej["live_validation"] = true;
                nj["evidence"].push_back(std::move(ej));
            }
        }
        if (n.judgements) {
            const RawJudgements& r = *n.judgements;
            OJson rj = OJson::object();
            if (r.quantity) rj["quantity"] = number(*r.quantity);
            if (r.freshness) rj["freshness"] = number(*r.freshness);
            if (r.accuracy) rj["accuracy"] = number(*r.accuracy);
            if (!r.rationale.empty()) {
                OJson rat = OJson::object();
                for (Criterion c :
                     {Criterion::quantity, Criterion::freshness, Criterion::accuracy}) {
                    auto it = r.rationale.find(c);
                    if (it != r.rationale.end())
                        rat[std::string(criterion_name(c))] = it->second;
                }
                rj["rationale"] = std::move(rat);
            }
            if (!r.assessed_by.empty()) rj["assessed_by"] = r.assessed_by;
            if (r.assessed_on) rj["assessed_on"] = format_iso_date(*r.assessed_on);
            nj["judgements"] = std::move(rj);
        }
        if (!n.sub_manifest.empty()) nj["sub_manifest"] = n.sub_manifest;
        j["nodes"].push_back(std::move(nj));
    }
    j["edges"] = OJson::array();
    for (const Edge& e : m.edges) j["edges"].push_back({{"from", e.from}, {"to", e.to}});
    if (m.weights && !m.weights->empty()) {
        OJson wj = OJson::object();
        // node declaration order first, then any leftover ids in map order
        std::set<std::string> emitted;
        for (const ManifestNode& n : m.nodes) {
            auto it = m.weights->find(n.id);
            if (it != m.weights->end() && emitted.insert(n.id).second) wj[n.id] = it->second;
        }
        for (const auto& [id, w] : *m.weights)
            if (!emitted.count(id)) wj[id] = w;
        j["weights"] = std::move(wj);
    }
    return j.dump(2) + "\n";
}

namespace detail {

struct GraphView {
    std::map<std::string, std::size_t> index;        // first occurrence wins
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // valid + deduplicated
    std::vector<std::size_t> leaves;                 // declaration order, subject excluded
};

}  // namespace detail

/// Semantic validation. Aggregates every finding instead of stopping at
/// the first; strict mode moves W_INTERNAL_JUDGEMENT, W_NO_RATIONALE and
/// W_UNKNOWN_FIELD into the error bucket (codes unchanged).
inline ValidationReport validate_manifest(const Manifest& m, bool strict = false) {
    ValidationReport report;
    auto error = [&](Code c, std::string locus, std::string msg) {
        report.errors.push_back({c, std::move(locus), std::move(msg)});
    };
    auto warn = [&](Code c, std::string locus, std::string msg) {
        Finding f{c, std::move(locus), std::move(msg)};
        bool promote = strict && (c == Code::W_INTERNAL_JUDGEMENT || c == Code::W_NO_RATIONALE ||
                                  c == Code::W_UNKNOWN_FIELD);
        (promote ? report.errors : report.warnings).push_back(std::move(f));
    };

    // duplicate ids; later duplicates are ignored by the graph checks
    detail::GraphView g;
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        const auto& id = m.nodes[i].id;
        if (!g.index.emplace(id, i).second)
            error(Code::E_DUP_ID, id, "duplicate node id '" + id + "'");
    }

    // the subject must appear in nodes as the unique output-model node
    std::vector<std::string> outputs;
    for (const ManifestNode& n : m.nodes)
        if (n.kind == NodeKind::output_model) outputs.push_back(n.id);
    auto subject_it = g.index.find(m.subject.id);
    if (subject_it == g.index.end())
        error(Code::E_NO_SUBJECT, m.subject.id,
              "subject '" + m.subject.id + "' does not appear in nodes");
    else if (m.nodes[subject_it->second].kind != NodeKind::output_model)
        error(Code::E_NO_SUBJECT, m.subject.id,
              "subject '" + m.subject.id + "' has kind " +
                  std::string(node_kind_name(m.nodes[subject_it->second].kind)) +
                  ", expected output-model");
    else if (outputs.empty())
        error(Code::E_NO_SUBJECT, m.subject.id, "no output-model node present");
    if (outputs.size() > 1) {
        std::string ids;
        for (const auto& id : outputs) ids += (ids.empty() ? "" : ", ") + id;
        error(Code::E_MULTI_SUBJECT, m.subject.id,
              "expected one output-model node, found " + std::to_string(outputs.size()) + ": " +
                  ids);
    }

    // edges: drop dangling and parallel ones for the structural checks
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const Edge& e : m.edges) {
        auto f = g.index.find(e.from);
        auto t = g.index.find(e.to);
        if (f == g.index.end() || t == g.index.end()) {
            error(Code::E_DANGLING_EDGE, e.from + "->" + e.to,
                  "edge '" + e.from + " -> " + e.to + "' references an unknown node id");
            continue;
        }
        if (f->second == t->second) {
            error(Code::E_CYCLE, e.from, "self-edge on '" + e.from + "'");
            continue;
        }
        if (seen.emplace(f->second, t->second).second) g.edges.push_back({f->second, t->second});
    }

    // cycle detection over the surviving edges (Kahn)
    {
        std::vector<std::size_t> in_degree(m.nodes.size(), 0);
        std::vector<std::vector<std::size_t>> next(m.nodes.size());
        std::vector<std::vector<std::size_t>> prev(m.nodes.size());
        for (auto [f, t] : g.edges) {
            ++in_degree[t];
            next[f].push_back(t);
            prev[t].push_back(f);
        }
        std::vector<std::size_t> stack;
        for (std::size_t i = 0; i < m.nodes.size(); ++i)
            if (in_degree[i] == 0) stack.push_back(i);
        std::size_t removed = 0;
        while (!stack.empty()) {
            std::size_t n = stack.back();
            stack.pop_back();
            ++removed;
            for (std::size_t t : next[n])
                if (--in_degree[t] == 0) stack.push_back(t);
        }
        if (removed != m.nodes.size()) {
            std::vector<bool> residual(m.nodes.size(), false);
            for (std::size_t i = 0; i < m.nodes.size(); ++i)
                if (in_degree[i] > 0) residual[i] = true;
            const auto cycle = detail::find_cycle(prev, residual);
            std::string msg = "cycle:";
            for (std::size_t i = 0; i < cycle.size(); ++i)
                msg += (i ? " -> " : " ") + m.nodes[cycle[i]].id;
            error(Code::E_CYCLE, m.nodes[cycle.front()].id, msg);
        }
    }

    // orphans: every non-subject node must reach the subject
    if (subject_it != g.index.end()) {
        std::vector<std::vector<std::size_t>> prev(m.nodes.size());
        for (auto [f, t] : g.edges) prev[t].push_back(f);
        std::vector<bool> reaches(m.nodes.size(), false);
        std::vector<std::size_t> stack{subject_it->second};
        reaches[subject_it->second] = true;
        while (!stack.empty()) {
            std::size_t n = stack.back();
            stack.pop_back();
            for (std::size_t p : prev[n])
                if (!reaches[p]) {
                    reaches[p] = true;
                    stack.push_back(p);
                }
        }
        for (std::size_t i = 0; i < m.nodes.size(); ++i)
            if (!reaches[i] && g.index.at(m.nodes[i].id) == i)
                error(Code::E_ORPHAN, m.nodes[i].id,
                      "node '" + m.nodes[i].id + "' has no path to subject '" + m.subject.id +
                          "'");
    }

    // leaves: no incoming contribution, subject excluded
    {
        std::vector<bool> has_incoming(m.nodes.size(), false);
        for (auto [f, t] : g.edges) has_incoming[t] = true;
        for (std::size_t i = 0; i < m.nodes.size(); ++i)
            if (!has_incoming[i] && m.nodes[i].id != m.subject.id &&
                g.index.at(m.nodes[i].id) == i)
                g.leaves.push_back(i);
        if (g.leaves.empty())
            error(Code::E_NO_LEAVES, m.subject.id,
                  "manifest has no contributing leaf nodes to score");
    }

    // judgement placement and values
    std::set<std::size_t> leaf_set(g.leaves.begin(), g.leaves.end());
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        const ManifestNode& n = m.nodes[i];
        if (leaf_set.count(i)) {
            if (!n.judgements) {
                error(Code::E_MISSING_JUDGEMENT, n.id,
                      "leaf '" + n.id + "' carries no judgements");
            } else {
                const RawJudgements& r = *n.judgements;
                const std::array<std::pair<Criterion, std::optional<double>>, 3> raw{{
                    {Criterion::quantity, r.quantity},
                    {Criterion::freshness, r.freshness},
                    {Criterion::accuracy, r.accuracy},
                }};
                for (const auto& [criterion, value] : raw) {
                    const std::string locus = n.id + "." + std::string(criterion_name(criterion));
                    if (!value) {
                        error(Code::E_MISSING_CRITERION, locus,
                              locus + ": judgement is missing");
                    } else if (auto problem = score_problem(*value)) {
                        if (*problem == Code::E_NOT_INTEGER)
                            error(*problem, locus,
                                  locus + ": judgement must be an integer (1..4)");
                        else
                            error(*problem, locus, locus + ": judgement outside 1..4");
                    }
                }
                if (r.rationale.empty())
                    warn(Code::W_NO_RATIONALE, n.id,
                         "judgements on '" + n.id + "' carry no rationale");
            }
            if (n.evidence.empty())
                warn(Code::W_NO_EVIDENCE, n.id, "leaf '" + n.id + "' lists no evidence");
        } else if (n.judgements) {
            warn(Code::W_INTERNAL_JUDGEMENT, n.id,
                 "judgements on non-leaf '" + n.id + "' are ignored for scoring");
        }
    }

    // declared weights must cover exactly the leaf set and sum to 1
    if (m.weights && !g.leaves.empty()) {
        std::set<std::string> leaf_ids;
        for (std::size_t i : g.leaves) leaf_ids.insert(m.nodes[i].id);
        double sum = 0.0;
        bool shape_ok = true;
        for (const auto& [id, w] : *m.weights) {
            if (!leaf_ids.count(id)) {
                error(Code::E_BAD_WEIGHTS, id, "weight for '" + id + "', which is not a leaf");
                shape_ok = false;
            }
            if (w < 0.0) {
                error(Code::E_BAD_WEIGHTS, id, "negative weight for '" + id + "'");
                shape_ok = false;
            }
            sum += w;
        }
        for (const auto& id : leaf_ids)
            if (!m.weights->count(id)) {
                error(Code::E_BAD_WEIGHTS, id, "no weight declared for leaf '" + id + "'");
                shape_ok = false;
            }
        if (shape_ok && std::abs(sum - 1.0) > 1e-9)
            error(Code::E_BAD_WEIGHTS, "weights",
                  "weights sum to " + std::to_string(sum) + ", expected 1");
    }

    for (const std::string& locus : m.unknown_fields)
        warn(Code::W_UNKNOWN_FIELD, locus, "unknown field '" + locus + "'");

    return report;
}

/// Builds the typed supply chain from a manifest, validating judgement
/// triples along the way. Intended to run after validate_manifest has
/// come back clean; throws Error otherwise.
inline SupplyChain to_chain(const Manifest& m) {
    std::vector<Node> nodes;
    nodes.reserve(m.nodes.size());
    for (const ManifestNode& mn : m.nodes) {
        Node n;
        n.id = mn.id;
        n.kind = mn.kind;
        n.name = mn.name;
        n.role = mn.role;
        n.description = mn.description;
        n.evidence = mn.evidence;
        n.sub_manifest = mn.sub_manifest;
        if (mn.judgements) {
            const RawJudgements& r = *mn.judgements;
            try {
                JudgementTriple triple = validate_triple(r.quantity, r.freshness, r.accuracy);
                triple.rationale = r.rationale;
                triple.assessed_by = r.assessed_by;
                triple.assessed_on = r.assessed_on;
                n.judgements = std::move(triple);
            } catch (const Error& e) {
                throw Error(e.code(), mn.id + "." + e.locus(),
                            "node '" + mn.id + "': " + e.what());
            }
        }
        nodes.push_back(std::move(n));
    }
    return build_chain(m.subject.id, std::move(nodes), m.edges);
}

}  // namespace vistrace
