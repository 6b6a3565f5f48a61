#pragma once

// Uniform (equal-probability) audit sampling: how many units an adversary
// must corrupt, and how many units to sample so at least one of them is
// drawn with probability P.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rla/bounds.hpp"
#include "rla/election.hpp"

namespace rla {

struct CumulativeRow {
    std::string unit_id;
    double scaled_bound = 0;  // k * u_i
    double cumulative = 0;
};

struct CorruptUnitCount {
    std::int64_t corrupt_units = 0;  // C
    /// False when even corrupting every unit at rate k cannot exceed M;
    /// C is then N and only a full hand count is risk-limiting.
    bool reversible = true;
    /// Every unit, descending by pair bound (ties by unit_id); the cumulative
    /// column runs over all N rows.
    std::vector<CumulativeRow> rows;
};

/// Greedy count of the fewest units whose k-scaled pair bounds sum to
/// strictly more than the margin.
CorruptUnitCount min_corrupt_units(const BoundSet& bounds);

/// C_0 <= C ~ C_avg from contest totals alone, and the sample sizes those
/// imply. The real-valued ratios are rounded up to whole units (C_0 <= 1
/// gives 1) before sizing the sample.
struct EstimateBracket {
    double c_zero = 0;  // assuming every unit is as large as the largest (b_0)
    double c_avg = 0;   // assuming every unit has the average bound
    std::int64_t c_lower = 0;
    std::int64_t c_upper = 0;
    std::int64_t s_avg = 0;   // from c_upper
    std::int64_t s_zero = 0;  // from c_lower; the conservative end
    Count largest_unit = 0;   // b_0
};

EstimateBracket estimate_c_bracket(const Contest& contest, double k,
                                   std::optional<Count> largest_unit = std::nullopt);

/// Fills s_avg / s_zero from the whole-unit C values already in `bracket`,
/// using S ~ N(1 - (1-P)^(1/C)) rounded up.
EstimateBracket estimate_s_bracket(std::int64_t units, EstimateBracket bracket, double probability);

enum class UniformMethod { detailed, estimate };

struct UniformPlan {
    UniformMethod method = UniformMethod::detailed;
    std::string contest;
    double probability = 0.99;
    double undetectability = 0.4;
    MarginPair margin;
    std::int64_t units_total = 0;     // N
    std::int64_t corrupt_units = 0;   // C used for sizing
    std::int64_t sample_size = 0;     // S
    std::int64_t closed_form_size = 0;  // (N-(C-1)/2)(1-(1-P)^(1/C)), for reference
    double achieved_probability = 0;
    bool full_count = false;
    std::optional<EstimateBracket> estimate;
    std::vector<CumulativeRow> cumulative;
    std::vector<UnitBounds> units;
};

/// Detailed mode sizes S exactly from the greedy C; estimate mode uses the
/// conservative end of the totals-only bracket.
UniformPlan plan_uniform(const Contest& contest, double probability, double k, UniformMethod method,
                         std::optional<Count> largest_unit = std::nullopt);

}  // namespace rla
