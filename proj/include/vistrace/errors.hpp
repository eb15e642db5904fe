#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace vistrace {

// Diagnostic codes surfaced in validation reports and CLI output.
// E_* codes are errors, W_* codes are warnings; strict validation promotes
// some W_* findings to the error bucket without changing their code.
enum class Code {
    // graph / chain construction
    E_CYCLE,
    E_NO_SUBJECT,
    E_MULTI_SUBJECT,
    E_DANGLING_EDGE,
    E_ORPHAN,
    E_DUP_ID,
    E_NO_LEAVES,
    // judgements
    E_RANGE,
    E_NOT_INTEGER,
    E_MISSING_CRITERION,
    E_MISSING_JUDGEMENT,
    // scoring
    E_BAD_WEIGHTS,
    // document parsing (exit code 3 in the CLI)
    E_SYNTAX,
    E_SCHEMA,
    E_VERSION,
    E_IO,
    // freshness advisor
    E_FUTURE_EVIDENCE,
    // CLI lookups
    E_UNKNOWN_NODE,
    E_NOT_LEAF,
    // warnings
    W_INTERNAL_JUDGEMENT,
    W_NO_RATIONALE,
    W_NO_EVIDENCE,
    W_UNKNOWN_FIELD,
};

constexpr std::string_view code_name(Code c) noexcept {
    switch (c) {
        case Code::E_CYCLE: return "E_CYCLE";
        case Code::E_NO_SUBJECT: return "E_NO_SUBJECT";
        case Code::E_MULTI_SUBJECT: return "E_MULTI_SUBJECT";
        case Code::E_DANGLING_EDGE: return "E_DANGLING_EDGE";
        case Code::E_ORPHAN: return "E_ORPHAN";
        case Code::E_DUP_ID: return "E_DUP_ID";
        case Code::E_NO_LEAVES: return "E_NO_LEAVES";
        case Code::E_RANGE: return "E_RANGE";
        case Code::E_NOT_INTEGER: return "E_NOT_INTEGER";
        case Code::E_MISSING_CRITERION: return "E_MISSING_CRITERION";
        case Code::E_MISSING_JUDGEMENT: return "E_MISSING_JUDGEMENT";
        case Code::E_BAD_WEIGHTS: return "E_BAD_WEIGHTS";
        case Code::E_SYNTAX: return "E_SYNTAX";
        case Code::E_SCHEMA: return "E_SCHEMA";
        case Code::E_VERSION: return "E_VERSION";
        case Code::E_IO: return "E_IO";
        case Code::E_FUTURE_EVIDENCE: return "E_FUTURE_EVIDENCE";
        case Code::E_UNKNOWN_NODE: return "E_UNKNOWN_NODE";
        case Code::E_NOT_LEAF: return "E_NOT_LEAF";
        case Code::W_INTERNAL_JUDGEMENT: return "W_INTERNAL_JUDGEMENT";
        case Code::W_NO_RATIONALE: return "W_NO_RATIONALE";
        case Code::W_NO_EVIDENCE: return "W_NO_EVIDENCE";
        case Code::W_UNKNOWN_FIELD: return "W_UNKNOWN_FIELD";
    }
    return "E_UNKNOWN";
}

constexpr bool is_warning_code(Code c) noexcept {
    return c == Code::W_INTERNAL_JUDGEMENT || c == Code::W_NO_RATIONALE ||
           c == Code::W_NO_EVIDENCE || c == Code::W_UNKNOWN_FIELD;
}

// Codes raised while turning bytes into a structural model; the CLI maps
// these to exit 3, everything else to exit 2.
constexpr bool is_parse_code(Code c) noexcept {
    return c == Code::E_SYNTAX || c == Code::E_SCHEMA || c == Code::E_VERSION ||
           c == Code::E_IO;
}

/// Exception carrying a diagnostic code and the locus (node id, edge, file
/// position) it applies to.
class Error : public std::runtime_error {
public:
    Error(Code code, std::string locus, const std::string& message)
        : std::runtime_error(message), code_(code), locus_(std::move(locus)) {}

    Code code() const noexcept { return code_; }
    const std::string& locus() const noexcept { return locus_; }

private:
    Code code_;
    std::string locus_;
};

/// One validation finding; severity is carried by the report bucket it
/// lands in, not by the finding itself.
struct Finding {
    Code code;
    std::string locus;
    std::string message;

    bool operator==(const Finding&) const = default;
};

}  // namespace vistrace
