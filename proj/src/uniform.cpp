#include "rla/uniform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rla/error.hpp"
#include "rla/hypergeometric.hpp"

namespace rla {

namespace {

std::int64_t whole_units(double c, std::int64_t units) {
    if (c <= 1.0) return 1;
    return std::min<std::int64_t>(static_cast<std::int64_t>(std::ceil(c)), units);
}

std::int64_t size_for(std::int64_t units, std::int64_t corrupt, double probability) {
    const double s = static_cast<double>(units) *
                     (1.0 - std::pow(1.0 - probability, 1.0 / static_cast<double>(corrupt)));
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil(s)), 1, units);
}

}  // namespace

CorruptUnitCount min_corrupt_units(const BoundSet& bounds) {
    require(bounds.margin.margin_votes > 0, "margin M must be positive");
    require(bounds.k > 0.0 && bounds.k <= 1.0, "undetectability k must be in (0,1]");

    std::vector<std::size_t> order(bounds.units.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ua = bounds.units[a];
        const auto& ub = bounds.units[b];
        if (ua.pair != ub.pair) return ua.pair > ub.pair;
        return ua.unit_id < ub.unit_id;
    });

    CorruptUnitCount out;
    out.reversible = false;
    out.corrupt_units = static_cast<std::int64_t>(bounds.units.size());
    const double margin = static_cast<double>(bounds.margin.margin_votes);
    double cumulative = 0.0;
    for (std::size_t j = 0; j < order.size(); ++j) {
        const auto& u = bounds.units[order[j]];
        const double scaled = bounds.k * static_cast<double>(u.pair);
        cumulative += scaled;
        out.rows.push_back({u.unit_id, scaled, cumulative});
        if (!out.reversible && cumulative > margin) {
            out.reversible = true;
            out.corrupt_units = static_cast<std::int64_t>(j + 1);
        }
    }
    return out;
}

EstimateBracket estimate_c_bracket(const Contest& contest, double k, std::optional<Count> largest_unit) {
    require(k > 0.0 && k <= 1.0, "undetectability k must be in (0,1]");
    const auto margin = just_pair(contest);
    const Count b0 = largest_unit.value_or(contest.largest_unit_ballots());
    require(b0 > 0, "largest unit ballots b_0 must be positive");

    const double n = static_cast<double>(contest.unit_count());
    const double b = static_cast<double>(contest.total_ballots());
    const double m = static_cast<double>(margin.margin_votes);

    EstimateBracket br;
    br.largest_unit = b0;
    br.c_avg = m * n / (k * (b + m));
    br.c_zero = b / (n * static_cast<double>(b0)) * br.c_avg;
    const auto units = static_cast<std::int64_t>(contest.unit_count());
    br.c_lower = whole_units(br.c_zero, units);
    br.c_upper = std::max(br.c_lower, whole_units(br.c_avg, units));
    return br;
}

EstimateBracket estimate_s_bracket(std::int64_t units, EstimateBracket bracket, double probability) {
    require(probability > 0.0 && probability < 1.0, "probability P must be in (0,1)");
    require(units >= 1, "number of units N must be at least 1");
    require(bracket.c_lower >= 1 && bracket.c_lower <= bracket.c_upper && bracket.c_upper <= units,
            "C bracket must satisfy 1 <= C_lower <= C_upper <= N");
    bracket.s_avg = size_for(units, bracket.c_upper, probability);
    bracket.s_zero = size_for(units, bracket.c_lower, probability);
    return bracket;
}

UniformPlan plan_uniform(const Contest& contest, double probability, double k, UniformMethod method,
                         std::optional<Count> largest_unit) {
    require(probability > 0.0 && probability < 1.0, "probability P must be in (0,1)");
    const auto bounds = bound_set(contest, k);
    const auto n = static_cast<std::int64_t>(contest.unit_count());

    UniformPlan plan;
    plan.method = method;
    plan.contest = contest.name();
    plan.probability = probability;
    plan.undetectability = k;
    plan.margin = bounds.margin;
    plan.units_total = n;
    plan.units = bounds.units;

    const auto greedy = min_corrupt_units(bounds);
    plan.cumulative = greedy.rows;

    if (method == UniformMethod::detailed) {
        plan.corrupt_units = greedy.corrupt_units;
        plan.full_count = !greedy.reversible;
        plan.sample_size = plan.full_count ? n : exact_sample_size(n, plan.corrupt_units, probability);
    } else {
        auto bracket = estimate_s_bracket(n, estimate_c_bracket(contest, k, largest_unit), probability);
        plan.corrupt_units = bracket.c_lower;
        plan.sample_size = bracket.s_zero;
        plan.estimate = bracket;
    }
    plan.closed_form_size = sample_size_estimate(n, plan.corrupt_units, probability);
    plan.achieved_probability = plan.full_count ? 1.0 : check_probability(n, plan.corrupt_units, plan.sample_size);
    return plan;
}

}  // namespace rla
