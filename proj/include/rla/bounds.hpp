#pragma once

// Upper margin error bounds: the most margin error (in ballots) a single
// audit unit can contribute toward reversing a reported outcome.

#include <string>
#include <string_view>
#include <vector>

#include "rla/election.hpp"

namespace rla {

/// b_i + w_i - r_i for one winner/loser pair.
Count pair_bound(const Contest& contest, const AuditUnit& unit,
                 std::string_view winner_id, std::string_view loser_id);

/// Bound valid for every winner/loser pair at once: b_i + sum of winner
/// votes, capped at 2*b_i. A single-ballot unit gets the exact per-ballot
/// value (2, 1 or 0).
Count allpairs_bound(const Contest& contest, const AuditUnit& unit);

/// Legacy 2*s*v_i approximation (v_i = votes cast, excluding under/over
/// votes). Kept only for comparison output.
double legacy_2sv_bound(const AuditUnit& unit, double s);

struct UnitBounds {
    std::string unit_id;
    std::string jurisdiction;  // empty when the unit has none
    Count ballots = 0;
    Count pair = 0;
    Count allpairs = 0;
};

struct BoundSet {
    MarginPair margin;
    double k = 0.4;
    std::vector<UnitBounds> units;  // contest order
    Count pair_total = 0;           // E
    Count allpairs_total = 0;       // E_a

    /// k * E, the total error an adversary can plant without suspicion.
    double scaled_pair_total() const { return k * static_cast<double>(pair_total); }
};

BoundSet bound_set(const Contest& contest, double k);

struct Figure3Row {
    std::string unit_id;
    double loser_share = 0;     // r_i / b_i
    double scaled_pair = 0;     // 2s * (b_i + w_i - r_i)
    double scaled_allpairs = 0; // 2s * allpairs bound
    double legacy_2sv = 0;      // 2s * v_i
};

/// Comparison of the legacy 2sv bound with the real bounds, per unit.
std::vector<Figure3Row> figure3_rows(const Contest& contest, double s);

}  // namespace rla
