#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "vistrace/errors.hpp"
#include "vistrace/freshness.hpp"
#include "vistrace/manifest.hpp"
#include "vistrace/metrics.hpp"
#include "vistrace/pipeline.hpp"

namespace vistrace {

enum class ReportFormat { text, json, markdown };

inline std::optional<ReportFormat> parse_report_format(std::string_view s) noexcept {
    if (s == "text") return ReportFormat::text;
    if (s == "json") return ReportFormat::json;
    if (s == "markdown") return ReportFormat::markdown;
    return std::nullopt;
}

namespace detail {

// Fixed-width column rendering: two spaces between columns, no trailing
// whitespace at end of line.
struct TextTable {
    std::vector<std::string> headers;
    std::vector<bool> right_align;  // per column
    std::vector<std::vector<std::string>> rows;

    std::string str() const {
        std::vector<std::size_t> width(headers.size());
        for (std::size_t c = 0; c < headers.size(); ++c) width[c] = headers[c].size();
        for (const auto& row : rows)
            for (std::size_t c = 0; c < row.size(); ++c)
                width[c] = std::max(width[c], row[c].size());
        std::string out;
        auto emit = [&](const std::vector<std::string>& cells) {
            std::string line;
            for (std::size_t c = 0; c < cells.size(); ++c) {
                std::string cell = cells[c];
                if (cell.size() < width[c]) {
                    std::string pad(width[c] - cell.size(), ' ');
                    cell = right_align[c] ? pad + cell : cell + pad;
                }
                if (c) line += "  ";
                line += cell;
            }
            while (!line.empty() && line.back() == ' ') line.pop_back();
            out += line + "\n";
        };
        emit(headers);
        for (const auto& row : rows) emit(row);
        return out;
    }

    std::string markdown() const {
        std::string out = "|";
        for (const auto& h : headers) out += " " + h + " |";
        out += "\n|";
        for (std::size_t c = 0; c < headers.size(); ++c)
            out += right_align[c] ? " --: |" : " :-- |";
        out += "\n";
        for (const auto& row : rows) {
            out += "|";
            for (const auto& cell : row) out += " " + cell + " |";
            out += "\n";
        }
        return out;
    }
};

inline TextTable score_table(const SupplyChain& chain, const ChainScore& score, int precision) {
    TextTable t;
    t.headers = {"Node", "Quantity", "Freshness", "Accuracy", "VISQual", "VIS"};
    t.right_align = {false, true, true, true, true, true};
    for (const NodeScore& ns : score.node_scores) {
        const Node* node = chain.find(ns.node_id);
        const JudgementTriple& j = *node->judgements;
        t.rows.push_back({ns.node_id, std::to_string(j.quantity.value()),
                          std::to_string(j.freshness.value()),
                          std::to_string(j.accuracy.value()), format_score(ns.vis_quality, precision),
                          format_score(ns.vis, precision)});
    }
    return t;
}

inline std::string sub_manifest_notes(const SupplyChain& chain) {
    std::string out;
    for (const Node* leaf : chain.leaves())
        if (!leaf->sub_manifest.empty())
            out += "note: external model '" + leaf->id + "' carries sub-manifest " +
                   leaf->sub_manifest + " (reviewed separately, never merged into this score)\n";
    return out;
}

}  // namespace detail

/// Score table in the requested format. Text and markdown apply display
/// rounding at `precision` decimals; JSON always carries full-precision
/// numbers and re-parses to exactly the library's ChainScore.
inline std::string render_score_report(const SupplyChain& chain, const ChainScore& score,
                                       ReportFormat format, int precision = 2) {
    if (format == ReportFormat::json) {
        nlohmann::ordered_json j;
        j["subject"] = score.subject_id;
        j["mode"] = std::string(score_mode_name(score.mode));
        j["nodes"] = nlohmann::ordered_json::array();
        for (const NodeScore& ns : score.node_scores) {
            const Node* node = chain.find(ns.node_id);
            const JudgementTriple& t = *node->judgements;
            j["nodes"].push_back({{"id", ns.node_id},
                                  {"quantity", t.quantity.value()},
                                  {"freshness", t.freshness.value()},
                                  {"accuracy", t.accuracy.value()},
                                  {"vis_quality", ns.vis_quality},
                                  {"vis", ns.vis}});
        }
        j["overall_vis"] = score.vis;
        nlohmann::ordered_json w = nlohmann::ordered_json::object();
        for (const NodeScore& ns : score.node_scores) w[ns.node_id] = score.weights.at(ns.node_id);
        j["weights"] = std::move(w);
        return j.dump(2) + "\n";
    }
    detail::TextTable t = detail::score_table(chain, score, precision);
    const std::string footer = "Overall VIS for model " + format_score(score.vis, precision);
    if (format == ReportFormat::markdown)
        return t.markdown() + "\n" + footer + "\n" + detail::sub_manifest_notes(chain);
    return t.str() + footer + "\n" + detail::sub_manifest_notes(chain);
}

/// One line per finding, then a one-line verdict.
inline std::string render_validation_report(const ValidationReport& report) {
    std::string out;
    for (const Finding& f : report.errors)
        out += "error " + std::string(code_name(f.code)) + " at " + f.locus + ": " + f.message +
               "\n";
    for (const Finding& f : report.warnings)
        out += "warning " + std::string(code_name(f.code)) + " at " + f.locus + ": " + f.message +
               "\n";
    auto count = [](std::size_t n, const char* noun) {
        return std::to_string(n) + " " + noun + (n == 1 ? "" : "s");
    };
    out += (report.ok() ? "OK (" : "FAILED (") + count(report.errors.size(), "error") + ", " +
           count(report.warnings.size(), "warning") + ")\n";
    return out;
}

/// One manifest's standing in a ranking.
struct RankEntry {
    std::string path;
    std::string subject_name;
    double vis = 0.0;
    int rank = 0;
    bool failed = false;
    Code code = Code::E_IO;   // when failed
    std::string message;      // when failed
};

inline std::string render_ranking(const std::vector<RankEntry>& entries, ReportFormat format,
                                  int precision = 2) {
    if (format == ReportFormat::json) {
        nlohmann::ordered_json j;
        j["entries"] = nlohmann::ordered_json::array();
        j["failures"] = nlohmann::ordered_json::array();
        for (const RankEntry& e : entries) {
            if (e.failed)
                j["failures"].push_back({{"manifest", e.path},
                                         {"code", std::string(code_name(e.code))},
                                         {"message", e.message}});
            else
                j["entries"].push_back({{"rank", e.rank},
                                        {"vis", e.vis},
                                        {"manifest", e.path},
                                        {"subject", e.subject_name}});
        }
        return j.dump(2) + "\n";
    }
    detail::TextTable t;
    t.headers = {"rank", "VIS", "manifest", "subject"};
    t.right_align = {true, true, false, false};
    for (const RankEntry& e : entries) {
        if (e.failed)
            t.rows.push_back({"-", "error", e.path,
                              std::string(code_name(e.code)) + ": " + e.message});
        else
            t.rows.push_back({std::to_string(e.rank), format_score(e.vis, precision), e.path,
                              e.subject_name});
    }
    return format == ReportFormat::markdown ? t.markdown() : t.str();
}

/// Narrative for one scored leaf: each judgement with its scale anchor
/// and rationale, the evidence list, and the index derivation.
inline std::string render_explain(const Node& node, const NodeScore& ns, int precision = 2) {
    std::string out = node.id + ": " + node.name + " (" +
                      std::string(node_kind_name(node.kind)) + ")\n";
    if (!node.role.empty()) out += "role: " + node.role + "\n";
    if (!node.description.empty()) out += node.description + "\n";
    const JudgementTriple& t = *node.judgements;
    out += "\njudgements:\n";
    for (Criterion c : {Criterion::quantity, Criterion::freshness, Criterion::accuracy}) {
        const JudgementScore s = t.score(c);
        std::string line = "  " + std::string(criterion_name(c));
        line.resize(2 + 9 + 1, ' ');  // widest criterion is "freshness"
        out += line + "= " + std::to_string(s.value()) + "  \"" +
               std::string(scale_text(c, s)) + "\"\n";
        auto r = t.rationale.find(c);
        if (r != t.rationale.end()) out += "               " + r->second + "\n";
    }
    if (!t.assessed_by.empty() || t.assessed_on) {
        out += "  assessed";
        if (!t.assessed_by.empty()) out += " by " + t.assessed_by;
        if (t.assessed_on) out += " on " + format_iso_date(*t.assessed_on);
        out += "\n";
    }
    out += "\nevidence:\n";
    if (node.evidence.empty()) out += "  (none)\n";
    for (const EvidenceRef& e : node.evidence) {
        out += "  - " + e.description;
        if (!e.uri.empty()) out += " (" + e.uri + ")";
        if (e.last_updated) out += " last updated " + format_iso_date(*e.last_updated);
        if (e.live_validation) out += " [live validation]";
        out += "\n";
    }
    if (!node.sub_manifest.empty())
        out += "\nsub-manifest: " + node.sub_manifest + " (reviewed separately)\n";
    out += "\nderivation:\n";
    out += "  VISQual = sqrt(accuracy * freshness) = " + format_score(ns.vis_quality, precision) +
           "\n";
    out += "  VIS     = sqrt(quantity * VISQual)   = " + format_score(ns.vis, precision) + "\n";
    return out;
}

/// One advisory row per leaf; either a suggestion or the per-node error.
struct FreshnessRow {
    std::string node_id;
    std::optional<int> declared;
    std::optional<FreshnessSuggestion> suggestion;
    std::string error;  // set when the advisor rejected the node
};

inline std::string render_freshness(const std::vector<FreshnessRow>& rows, Date as_of,
                                    const FreshnessPolicy& policy) {
    std::string out = "freshness suggestions as of " + format_iso_date(as_of) + " (fresh <= " +
                      std::to_string(policy.fresh_window_days) + "d, stale <= " +
                      std::to_string(policy.stale_window_days) + "d)\n";
    for (const FreshnessRow& r : rows) {
        out += r.node_id + ": ";
        if (!r.error.empty()) {
            out += r.error + "\n";
            continue;
        }
        out += "declared " + (r.declared ? std::to_string(*r.declared) : std::string("-"));
        out += ", suggested " + std::to_string(r.suggestion->suggested.value());
        out += r.suggestion->conflicts_with_declared ? " CONFLICT" : " ok";
        out += ": " + r.suggestion->rationale + "\n";
    }
    return out;
}

}  // namespace vistrace
