#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "vistrace/date.hpp"
#include "vistrace/errors.hpp"

namespace vistrace {

// The three criteria a contribution's documentation is judged against.
enum class Criterion { quantity, freshness, accuracy };

constexpr std::string_view criterion_name(Criterion c) noexcept {
    switch (c) {
        case Criterion::quantity: return "quantity";
        case Criterion::freshness: return "freshness";
        case Criterion::accuracy: return "accuracy";
    }
    return "unknown";
}

constexpr std::optional<Criterion> parse_criterion(std::string_view s) noexcept {
    if (s == "quantity") return Criterion::quantity;
    if (s == "freshness") return Criterion::freshness;
    if (s == "accuracy") return Criterion::accuracy;
    return std::nullopt;
}

/// A single judgement on the 1 (lowest) to 4 (highest) scale.
class JudgementScore {
public:
    static constexpr int min_value = 1;
    static constexpr int max_value = 4;

    explicit JudgementScore(int value) : value_(value) {
        if (value < min_value || value > max_value)
            throw Error(Code::E_RANGE, "score",
                        "judgement score " + std::to_string(value) + " outside 1..4");
    }

    int value() const noexcept { return value_; }

    auto operator<=>(const JudgementScore&) const = default;

private:
    int value_;
};

/// Reports what disqualifies a raw numeric value from being a judgement
/// score: E_NOT_INTEGER for fractional values, E_RANGE for integers
/// outside 1..4, nullopt for the 4 admissible values.
inline std::optional<Code> score_problem(double raw) noexcept {
    if (!(raw == std::floor(raw))) return Code::E_NOT_INTEGER;  // also catches NaN
    if (raw < JudgementScore::min_value || raw > JudgementScore::max_value) return Code::E_RANGE;
    return std::nullopt;
}

/// The three judgements an assessor assigns to one contribution, plus
/// optional assessment metadata.
struct JudgementTriple {
    JudgementScore quantity;
    JudgementScore freshness;
    JudgementScore accuracy;
    std::map<Criterion, std::string> rationale;
    std::string assessed_by;
    std::optional<Date> assessed_on;

    JudgementScore score(Criterion c) const noexcept {
        switch (c) {
            case Criterion::quantity: return quantity;
            case Criterion::freshness: return freshness;
            case Criterion::accuracy: return accuracy;
        }
        return quantity;
    }

    bool operator==(const JudgementTriple&) const = default;
};

/// Checks three raw values and assembles a JudgementTriple. Criteria are
/// examined in quantity, freshness, accuracy order and the first
/// violation is thrown: E_MISSING_CRITERION, then E_NOT_INTEGER, then
/// E_RANGE per criterion.
inline JudgementTriple validate_triple(std::optional<double> quantity,
                                       std::optional<double> freshness,
                                       std::optional<double> accuracy) {
    const std::array<std::pair<Criterion, std::optional<double>>, 3> raw{{
        {Criterion::quantity, quantity},
        {Criterion::freshness, freshness},
        {Criterion::accuracy, accuracy},
    }};
    for (const auto& [criterion, value] : raw) {
        const std::string locus{criterion_name(criterion)};
        if (!value)
            throw Error(Code::E_MISSING_CRITERION, locus, locus + " judgement is missing");
        if (auto problem = score_problem(*value)) {
            if (*problem == Code::E_NOT_INTEGER)
                throw Error(*problem, locus,
                            locus + " judgement must be an integer, got " + std::to_string(*value));
            throw Error(*problem, locus,
                        locus + " judgement " + std::to_string(static_cast<int>(*value)) +
                            " outside 1..4");
        }
    }
    return JudgementTriple{JudgementScore(static_cast<int>(*quantity)),
                           JudgementScore(static_cast<int>(*freshness)),
                           JudgementScore(static_cast<int>(*accuracy)),
                           {},
                           {},
                           std::nullopt};
}

/// One cell of the built-in judgement scale: the anchor text an assessor
/// matches a contribution's documentation against.
struct ScaleDescriptor {
    Criterion criterion;
    int score;
    std::string_view text;
};

namespace detail {
inline constexpr std::array<ScaleDescriptor, 12> scale_cells{{
    {Criterion::quantity, 1, "Sparse or insufficient information"},
    {Criterion::quantity, 2, "Some information missing"},
    {Criterion::quantity, 3, "Sufficient to gain confidence"},
    {Criterion::quantity, 4, "Sufficient to validate"},
    {Criterion::freshness, 1, "Never updated"},
    {Criterion::freshness, 2, "Out-of-date"},
    {Criterion::freshness, 3, "Updated when changed"},
    {Criterion::freshness, 4, "Real-time validation"},
    {Criterion::accuracy, 1, "Demonstrably inaccurate"},
    {Criterion::accuracy, 2, "Believed to be inaccurate"},
    {Criterion::accuracy, 3, "Believed to be accurate"},
    {Criterion::accuracy, 4, "Evidenced and verifiable"},
}};
}  // namespace detail

/// All 12 scale cells (3 criteria x 4 scores).
inline std::span<const ScaleDescriptor> judgement_scale() noexcept { return detail::scale_cells; }

/// Anchor text for one criterion/score cell. Total on its domain.
inline std::string_view scale_text(Criterion c, JudgementScore s) noexcept {
    for (const auto& cell : detail::scale_cells)
        if (cell.criterion == c && cell.score == s.value()) return cell.text;
    return {};  // unreachable: JudgementScore is range-checked
}

}  // namespace vistrace
