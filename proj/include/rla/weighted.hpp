#pragma once

// Sampling with probability proportional to margin error bound.
//
// PPMEB selects each unit independently with p_i = 1 - (1-P)^(1/c_i), where
// c_i = M / (k * u_i) is how many units shaped like unit i would have to be
// corrupted to reverse the margin. PPMEBWR makes t draws with replacement
// using weights u_i / E_a, with t = ln(1-P) / ln(1 - M/E_wr). Both use the
// all-pairs bound u_i as the per-unit weight so no losing candidate is
// favoured; the margin and E_wr come from the just-winning/just-losing pair.

#include <cstdint>
#include <string>
#include <vector>

#include "rla/bounds.hpp"
#include "rla/election.hpp"

namespace rla {

enum class WeightedMethod { ppmeb, ppmebwr };

struct WeightedUnit {
    UnitBounds bounds;
    double units_to_flip = 0;   // c_i (PPMEB only; +inf for zero-bound units)
    double probability = 0;     // p_i: inclusion (PPMEB) or per-draw weight (PPMEBWR)
    double inclusion = 0;       // chance the unit is audited at least once
    bool always_audit = false;  // c_i <= 1, or a full count is required
};

struct WeightedPlan {
    WeightedMethod method = WeightedMethod::ppmeb;
    std::string contest;
    double probability = 0.99;
    double undetectability = 0.4;
    MarginPair margin;
    double scaled_pair_total = 0;  // E_wr = k * sum(b_i + w_i - r_i)
    Count allpairs_total = 0;      // E_a
    std::int64_t draws = 0;        // t (PPMEBWR)
    double expected_sample_size = 0;
    bool full_count = false;
    std::vector<WeightedUnit> units;

    /// Expected size rounded up to whole units.
    std::int64_t expected_sample_size_rounded() const;
};

WeightedPlan ppmeb_plan(const Contest& contest, double probability, double k);
WeightedPlan ppmebwr_plan(const Contest& contest, double probability, double k);

/// ceil(ln(1-P) / ln(1 - M/E_wr)); requires 0 < M < E_wr.
std::int64_t ppmebwr_draws(Count margin, double scaled_pair_total, double probability);

}  // namespace rla
