#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "vistrace/date.hpp"
#include "vistrace/errors.hpp"
#include "vistrace/pipeline.hpp"
#include "vistrace/rubric.hpp"

namespace vistrace {

/// Age windows for mapping evidence timestamps to a freshness suggestion.
/// These are toolkit policy, configurable per run; the defaults treat
/// evidence within a year as maintained and beyond three years as stale.
struct FreshnessPolicy {
    long fresh_window_days = 365;
    long stale_window_days = 1095;

    void check() const {
        if (fresh_window_days <= 0 || stale_window_days <= 0 ||
            fresh_window_days >= stale_window_days)
            throw Error(Code::E_SCHEMA, "policy",
                        "policy requires 0 < fresh_window_days < stale_window_days");
    }
};

/// Loads `{"fresh_window_days": N, "stale_window_days": M}`.
inline FreshnessPolicy parse_policy(std::string_view bytes) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Code::E_SYNTAX, "policy", e.what());
    }
    if (!j.is_object()) throw Error(Code::E_SCHEMA, "policy", "policy must be a JSON object");
    FreshnessPolicy p;
    auto read = [&](const char* key, long& out) {
        if (!j.contains(key)) throw Error(Code::E_SCHEMA, key, std::string("missing ") + key);
        if (!j.at(key).is_number_integer())
            throw Error(Code::E_SCHEMA, key, std::string(key) + " must be an integer day count");
        out = j.at(key).get<long>();
    };
    read("fresh_window_days", p.fresh_window_days);
    read("stale_window_days", p.stale_window_days);
    p.check();
    return p;
}

/// Advisory freshness judgement derived from a node's evidence. Never
/// overrides the assessor; a disagreement is only flagged.
struct FreshnessSuggestion {
    std::string node_id;
    JudgementScore suggested;
    std::string rationale;
    bool conflicts_with_declared = false;
};

/// Deterministic policy-table mapping:
///   any live_validation evidence          -> 4
///   newest timestamp within fresh window  -> 3
///   newest timestamp within stale window  -> 2
///   older, or no dated evidence           -> 1
/// Window boundaries are inclusive. A score of 4 is only reachable via a
/// declared live_validation capability, never from timestamps alone.
/// Throws E_FUTURE_EVIDENCE when any timestamp postdates `as_of`.
inline FreshnessSuggestion suggest_freshness(const Node& node, const FreshnessPolicy& policy,
                                             Date as_of) {
    policy.check();
    std::optional<Date> newest;
    bool live = false;
    for (const EvidenceRef& e : node.evidence) {
        if (e.last_updated) {
            if (days_between(*e.last_updated, as_of) < 0)
                throw Error(Code::E_FUTURE_EVIDENCE, node.id,
                            "evidence dated " + format_iso_date(*e.last_updated) + " on '" +
                                node.id + "' is after " + format_iso_date(as_of));
            if (!newest || to_sys_days(*e.last_updated) > to_sys_days(*newest))
                newest = e.last_updated;
        }
        live = live || e.live_validation;
    }

    int suggested;
    std::string rationale;
    if (live) {
        suggested = 4;
        rationale = "evidence declares a live_validation capability (real-time validation)";
    } else if (!newest) {
        suggested = 1;
        rationale = "no dated evidence; treated as never updated";
    } else {
        const long age = days_between(*newest, as_of);
        if (age <= policy.fresh_window_days) {
            suggested = 3;
            rationale = "newest evidence " + format_iso_date(*newest) + " is " +
                        std::to_string(age) + " days old, within the fresh window (" +
                        std::to_string(policy.fresh_window_days) + " days)";
        } else if (age <= policy.stale_window_days) {
            suggested = 2;
            rationale = "newest evidence " + format_iso_date(*newest) + " is " +
                        std::to_string(age) + " days old, within the stale window (" +
                        std::to_string(policy.stale_window_days) + " days)";
        } else {
            suggested = 1;
            rationale = "newest evidence " + format_iso_date(*newest) + " is " +
                        std::to_string(age) + " days old, beyond the stale window (" +
                        std::to_string(policy.stale_window_days) + " days)";
        }
    }

    FreshnessSuggestion s{node.id, JudgementScore(suggested), std::move(rationale), false};
    if (node.judgements && node.judgements->freshness.value() != suggested)
        s.conflicts_with_declared = true;
    return s;
}

}  // namespace vistrace
