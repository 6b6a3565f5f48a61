#pragma once

// Monte Carlo checks of the detection guarantee, fixed-rate comparison
// curves, and an exhaustive search for how much all-pairs margin error a
// small contest can actually carry.

#include <cstdint>
#include <string>
#include <vector>

#include "rla/bounds.hpp"
#include "rla/election.hpp"
#include "rla/selection.hpp"

namespace rla {

struct AttackScenario {
    std::string strategy;  // "greedy" or "random"
    std::string winner_id;
    std::string loser_id;
    Count margin = 0;
    double undetectability = 0;
    std::vector<std::string> corrupted_units;
    std::vector<double> planted_error;  // aligned with corrupted_units; each <= k * pair bound
    double total_planted_error = 0;
};

/// Corrupts units in descending pair-bound order (ties by unit_id) at
/// k * bound each until the planted total exceeds M. Throws an infeasible
/// AuditError when even every unit together cannot.
AttackScenario minimal_attack(const BoundSet& bounds);

/// Same cap per unit, but units are taken in a seeded random order.
AttackScenario random_subset_attack(const BoundSet& bounds, std::uint64_t seed);

/// Reassembles the bound set a plan was built from.
BoundSet bounds_of(const AnyPlan& plan);

struct SimulationReport {
    std::string sampling_method;
    std::string attack_strategy;
    std::uint64_t seed = 0;
    std::int64_t trials = 0;
    std::int64_t detections = 0;
    double detection_rate = 0;
    double target_probability = 0;
    double sigma = 0;  // binomial standard error of detection_rate
    double ci_low = 0;   // 95%, normal approximation with continuity correction
    double ci_high = 0;
    double mean_sample_size = 0;  // distinct units per trial
    double sd_sample_size = 0;
};

/// Each trial draws a fresh sample with sub-seed derive_seed(seed, trial)
/// and counts a detection when any corrupted unit is in it. Results do not
/// depend on `threads` (0 = hardware concurrency).
SimulationReport run_detection_trials(const AnyPlan& plan, const AttackScenario& attack,
                                      std::int64_t trials, std::uint64_t seed, unsigned threads = 0);

/// Equal-size units, two candidates ("W" beats "L"), margin spread evenly;
/// an odd per-unit remainder becomes one undervote.
Contest synthetic_contest(std::int64_t units, Count ballots, double margin_fraction);

struct FixedRateRow {
    double margin_percent = 0;
    Count margin_votes = 0;
    std::int64_t corrupt_units = 0;  // whole-unit C from the averaged estimate
    std::int64_t fixed_sample_size = 0;
    double fixed_probability = 0;
    std::int64_t risk_limiting_size = 0;
    double risk_limiting_probability = 0;
};

std::vector<FixedRateRow> fixed_rate_curve(std::int64_t units, Count ballots,
                                           const std::vector<double>& margin_percents, double rate,
                                           double probability = 0.99, double k = 0.4);

/// Ballots as candidate bitmasks (bit j = candidate j).
using Ballot = std::uint32_t;

/// One vote per ballot while the votes fit; otherwise vote j lands on
/// ballot j mod b, which keeps every ballot within `seats` marks.
std::vector<Ballot> ballots_from_counts(const Contest& contest, const AuditUnit& unit);

struct WitnessMove {
    std::string unit_id;
    std::vector<std::string> reported;  // candidate ids on the counted ballot
    std::vector<std::string> truth;     // what the ballot really said
    std::string winner_id;              // pair the error is charged to
    std::string loser_id;
    Count ballots = 0;
    Count error = 0;  // total over those ballots
};

struct TightnessResult {
    Count max_error = 0;
    Count allpairs_bound_total = 0;
    /// First smallest set of winner/loser pairs reaching max_error.
    std::vector<std::pair<std::string, std::string>> witness_pairs;
    std::vector<WitnessMove> witness;
    /// Number of smallest pair sets reaching max_error.
    std::int64_t optimal_pair_sets = 0;
};

/// Exhaustive over sets of winner/loser pairs; each ballot is re-read as
/// the true ballot that most increases the error of one chosen pair.
/// Limited to 10 units, 5 candidates and 100,000 ballots.
TightnessResult allpairs_tightness_search(const Contest& contest);
TightnessResult allpairs_tightness_search(const Contest& contest,
                                          const std::vector<std::vector<Ballot>>& ballots);

}  // namespace rla
