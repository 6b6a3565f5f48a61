#include "rla/weighted.hpp"

#include <cmath>
#include <limits>

#include "rla/error.hpp"

namespace rla {

namespace {

void check_inputs(double probability, double k) {
    require(probability > 0.0 && probability < 1.0, "probability P must be in (0,1)");
    require(k > 0.0 && k <= 1.0, "undetectability k must be in (0,1]");
}

WeightedPlan skeleton(const Contest& contest, const BoundSet& bounds, WeightedMethod method,
                      double probability) {
    WeightedPlan plan;
    plan.method = method;
    plan.contest = contest.name();
    plan.probability = probability;
    plan.undetectability = bounds.k;
    plan.margin = bounds.margin;
    plan.scaled_pair_total = bounds.scaled_pair_total();
    plan.allpairs_total = bounds.allpairs_total;
    return plan;
}

}  // namespace

std::int64_t WeightedPlan::expected_sample_size_rounded() const {
    // Guard against 5.000000000001 style noise from summing doubles.
    return static_cast<std::int64_t>(std::ceil(expected_sample_size - 1e-9));
}

WeightedPlan ppmeb_plan(const Contest& contest, double probability, double k) {
    check_inputs(probability, k);
    const auto bounds = bound_set(contest, k);
    auto plan = skeleton(contest, bounds, WeightedMethod::ppmeb, probability);
    const double margin = static_cast<double>(bounds.margin.margin_votes);

    for (const auto& ub : bounds.units) {
        WeightedUnit wu;
        wu.bounds = ub;
        const double scaled = k * static_cast<double>(ub.allpairs);
        if (ub.allpairs == 0) {
            wu.units_to_flip = std::numeric_limits<double>::infinity();
            wu.probability = 0.0;
        } else {
            wu.units_to_flip = margin / scaled;
            if (scaled >= margin) {
                wu.always_audit = true;
                wu.probability = 1.0;
            } else {
                wu.probability = -std::expm1(scaled / margin * std::log1p(-probability));
            }
        }
        wu.inclusion = wu.probability;
        plan.expected_sample_size += wu.probability;
        plan.units.push_back(std::move(wu));
    }
    return plan;
}

std::int64_t ppmebwr_draws(Count margin, double scaled_pair_total, double probability) {
    require(margin > 0, "margin M must be positive");
    require(scaled_pair_total > static_cast<double>(margin), "E_wr must exceed the margin M");
    require(probability > 0.0 && probability < 1.0, "probability P must be in (0,1)");
    const double t = std::log1p(-probability) /
                     std::log1p(-static_cast<double>(margin) / scaled_pair_total);
    return static_cast<std::int64_t>(std::ceil(t - 1e-12));
}

WeightedPlan ppmebwr_plan(const Contest& contest, double probability, double k) {
    check_inputs(probability, k);
    const auto bounds = bound_set(contest, k);
    auto plan = skeleton(contest, bounds, WeightedMethod::ppmebwr, probability);
    require(plan.scaled_pair_total > 0.0, "E_wr must be positive");

    plan.full_count = static_cast<double>(bounds.margin.margin_votes) >= plan.scaled_pair_total;
    if (!plan.full_count)
        plan.draws = ppmebwr_draws(bounds.margin.margin_votes, plan.scaled_pair_total, probability);

    const double total = static_cast<double>(bounds.allpairs_total);
    for (const auto& ub : bounds.units) {
        WeightedUnit wu;
        wu.bounds = ub;
        wu.probability = total > 0 ? static_cast<double>(ub.allpairs) / total : 0.0;
        if (plan.full_count) {
            wu.always_audit = true;
            wu.inclusion = 1.0;
        } else {
            wu.inclusion = -std::expm1(static_cast<double>(plan.draws) * std::log1p(-wu.probability));
        }
        plan.expected_sample_size += wu.inclusion;
        plan.units.push_back(std::move(wu));
    }
    return plan;
}

}  // namespace rla
