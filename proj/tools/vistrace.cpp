// vistrace: score, validate, rank, explain, gate and advise on
// transparency manifests.
//
// Exit codes: 0 success / gate pass, 1 gate fail, 2 validation or usage
// error, 3 parse or IO error.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "vistrace/errors.hpp"
#include "vistrace/freshness.hpp"
#include "vistrace/manifest.hpp"
#include "vistrace/metrics.hpp"
#include "vistrace/pipeline.hpp"
#include "vistrace/report.hpp"

namespace {

using namespace vistrace;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Code::E_IO, path, "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int exit_for(const Error& e) { return is_parse_code(e.code()) ? 3 : 2; }

void print_error(const Error& e) {
    std::cerr << "error " << code_name(e.code()) << " at " << e.locus() << ": " << e.what()
              << "\n";
}

// Parse + semantic validation. On errors prints the report to `diag` and
// returns nullopt; warnings are printed but do not fail the load.
std::optional<Manifest> load_validated(const std::string& path, std::ostream& diag,
                                       bool strict = false) {
    Manifest m = parse_manifest(read_file(path));
    ValidationReport report = validate_manifest(m, strict);
    if (!report.ok()) {
        diag << render_validation_report(report);
        return std::nullopt;
    }
    for (const Finding& f : report.warnings)
        std::cerr << "warning " << code_name(f.code) << " at " << f.locus << ": " << f.message
                  << "\n";
    return m;
}

WeightMap read_weight_file(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Code::E_SYNTAX, path, e.what());
    }
    if (!j.is_object()) throw Error(Code::E_SCHEMA, path, "weight file must be a JSON object");
    WeightMap w;
    for (const auto& item : j.items()) {
        if (!item.value().is_number())
            throw Error(Code::E_SCHEMA, path + "." + item.key(), "expected a number");
        w[item.key()] = item.value().get<double>();
    }
    return w;
}

struct ScoreArgs {
    std::string path;
    std::string format = "text";
    bool paper_compat = false;
    int precision = 2;
    std::string weights_path;
};

int cmd_score(const ScoreArgs& args) {
    auto manifest = load_validated(args.path, std::cerr);
    if (!manifest) return 2;
    SupplyChain chain = to_chain(*manifest);
    std::optional<WeightMap> weights;
    if (!args.weights_path.empty())
        weights = read_weight_file(args.weights_path);
    else if (manifest->weights)
        weights = manifest->weights;
    ChainScore score = chain_visibility(
        chain, weights, args.paper_compat ? ScoreMode::paper_compat : ScoreMode::full_precision);
    std::cout << render_score_report(chain, score, *parse_report_format(args.format),
                                     args.precision);
    return 0;
}

int cmd_validate(const std::string& path, bool strict) {
    Manifest m = parse_manifest(read_file(path));
    ValidationReport report = validate_manifest(m, strict);
    std::cout << render_validation_report(report);
    return report.ok() ? 0 : 2;
}

int cmd_rank(const std::vector<std::string>& paths, const std::string& format) {
    std::vector<RankEntry> ok_entries;
    std::vector<RankEntry> failed;
    int severity = 0;
    for (const std::string& path : paths) {
        RankEntry entry;
        entry.path = path;
        try {
            Manifest m = parse_manifest(read_file(path));
            ValidationReport report = validate_manifest(m, false);
            if (!report.ok()) {
                const Finding& first = report.errors.front();
                entry.failed = true;
                entry.code = first.code;
                entry.message = first.message;
                if (report.errors.size() > 1)
                    entry.message +=
                        " (+" + std::to_string(report.errors.size() - 1) + " more errors)";
                failed.push_back(entry);
                severity = std::max(severity, 2);
                continue;
            }
            SupplyChain chain = to_chain(m);
            ChainScore score = chain_visibility(chain, m.weights ? m.weights : std::optional<WeightMap>{});
            entry.subject_name = m.subject.name;
            entry.vis = score.vis;
            ok_entries.push_back(entry);
        } catch (const Error& e) {
            entry.failed = true;
            entry.code = e.code();
            entry.message = e.what();
            failed.push_back(entry);
            severity = std::max(severity, exit_for(e));
        }
    }
    std::stable_sort(ok_entries.begin(), ok_entries.end(), [](const RankEntry& a, const RankEntry& b) {
        if (a.vis != b.vis) return a.vis > b.vis;
        return a.path < b.path;
    });
    for (std::size_t i = 0; i < ok_entries.size(); ++i) ok_entries[i].rank = static_cast<int>(i) + 1;
    ok_entries.insert(ok_entries.end(), failed.begin(), failed.end());
    std::cout << render_ranking(ok_entries, *parse_report_format(format));
    return severity;
}

int cmd_explain(const std::string& path, const std::string& node_id) {
    auto manifest = load_validated(path, std::cerr);
    if (!manifest) return 2;
    SupplyChain chain = to_chain(*manifest);
    const Node* node = chain.find(node_id);
    if (!node)
        throw Error(Code::E_UNKNOWN_NODE, node_id, "no node '" + node_id + "' in manifest");
    if (!chain.is_leaf(node_id))
        throw Error(Code::E_NOT_LEAF, node_id,
                    "node '" + node_id + "' is not a scored leaf contribution");
    std::cout << render_explain(*node, node_visibility(*node->judgements, node_id));
    return 0;
}

int cmd_gate(const std::string& path, double min, bool paper_compat) {
    auto manifest = load_validated(path, std::cerr);
    if (!manifest) return 2;
    SupplyChain chain = to_chain(*manifest);
    ChainScore score = chain_visibility(
        chain, manifest->weights ? manifest->weights : std::optional<WeightMap>{},
        paper_compat ? ScoreMode::paper_compat : ScoreMode::full_precision);
    const bool pass = score.vis >= min;
    std::cout << "VIS " << format_score(score.vis) << " (threshold " << format_score(min)
              << "): " << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? 0 : 1;
}

int cmd_suggest_freshness(const std::string& path, const std::string& as_of_str,
                          const std::string& policy_path) {
    auto manifest = load_validated(path, std::cerr);
    if (!manifest) return 2;
    SupplyChain chain = to_chain(*manifest);
    FreshnessPolicy policy;
    if (!policy_path.empty()) policy = parse_policy(read_file(policy_path));
    Date as_of = today_utc();
    if (!as_of_str.empty()) as_of = *parse_iso_date(as_of_str);  // format enforced by CLI11
    std::vector<FreshnessRow> rows;
    for (const Node* leaf : chain.leaves()) {
        FreshnessRow row;
        row.node_id = leaf->id;
        if (leaf->judgements) row.declared = leaf->judgements->freshness.value();
        try {
            row.suggestion = suggest_freshness(*leaf, policy, as_of);
        } catch (const Error& e) {
            row.error = "error " + std::string(code_name(e.code())) + ": " + e.what();
        }
        rows.push_back(std::move(row));
    }
    std::cout << render_freshness(rows, as_of, policy);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"transparency scoring for ML supply-chain manifests"};
    app.require_subcommand(1);

    const auto format_check = CLI::IsMember({"text", "json", "markdown"});
    const auto date_check = CLI::Validator(
        [](std::string& s) {
            return parse_iso_date(s) ? std::string{} : "expected a YYYY-MM-DD date";
        },
        "DATE");

    ScoreArgs score_args;
    auto* score = app.add_subcommand("score", "score a manifest and print the node table");
    score->add_option("manifest", score_args.path, "manifest file")->required();
    score->add_option("--format", score_args.format, "text, json or markdown")
        ->check(format_check);
    score->add_flag("--paper-compat", score_args.paper_compat,
                    "aggregate from per-node scores rounded to 2 decimals");
    score->add_option("--precision", score_args.precision, "display decimals (default 2)")
        ->check(CLI::Range(0, 12));
    score->add_option("--weights", score_args.weights_path,
                      "JSON file mapping leaf id to weight (overrides equal weights)");

    std::string validate_path;
    bool strict = false;
    auto* validate = app.add_subcommand("validate", "check a manifest and print all findings");
    validate->add_option("manifest", validate_path, "manifest file")->required();
    validate->add_flag("--strict", strict, "promote documentation warnings to errors");

    std::vector<std::string> rank_paths;
    std::string rank_format = "text";
    auto* rank = app.add_subcommand("rank", "order manifests by overall VIS, best first");
    rank->add_option("manifests", rank_paths, "manifest files")->required()->expected(-1);
    rank->add_option("--format", rank_format, "text, json or markdown")->check(format_check);

    std::string explain_path, explain_node;
    auto* explain = app.add_subcommand("explain", "show one leaf's judgements with scale anchors");
    explain->add_option("manifest", explain_path, "manifest file")->required();
    explain->add_option("--node", explain_node, "leaf node id")->required();

    std::string gate_path;
    double gate_min = 0.0;
    bool gate_compat = false;
    auto* gate = app.add_subcommand("gate", "exit 0 iff overall VIS meets a threshold");
    gate->add_option("manifest", gate_path, "manifest file")->required();
    gate->add_option("--min", gate_min, "required overall VIS, 1..4")
        ->required()
        ->check(CLI::Range(1.0, 4.0));
    gate->add_flag("--paper-compat", gate_compat,
                   "gate on the 2-decimal-aggregated overall score");

    std::string fresh_path, fresh_as_of, fresh_policy;
    auto* fresh = app.add_subcommand("suggest-freshness",
                                     "suggest freshness judgements from evidence timestamps");
    fresh->add_option("manifest", fresh_path, "manifest file")->required();
    fresh->add_option("--as-of", fresh_as_of, "evaluation date, YYYY-MM-DD (default: today)")
        ->check(date_check);
    fresh->add_option("--policy", fresh_policy,
                      "JSON policy file with fresh_window_days / stale_window_days");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage errors share the validation exit code
    }

    try {
        if (score->parsed()) return cmd_score(score_args);
        if (validate->parsed()) return cmd_validate(validate_path, strict);
        if (rank->parsed()) return cmd_rank(rank_paths, rank_format);
        if (explain->parsed()) return cmd_explain(explain_path, explain_node);
        if (gate->parsed()) return cmd_gate(gate_path, gate_min, gate_compat);
        if (fresh->parsed()) return cmd_suggest_freshness(fresh_path, fresh_as_of, fresh_policy);
    } catch (const Error& e) {
        print_error(e);
        return exit_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
