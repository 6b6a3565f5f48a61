#include "rla/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "rla/error.hpp"
#include "rla/json_io.hpp"

namespace rla {

__extension__ using u128 = unsigned __int128;

std::uint64_t AuditRng::below(std::uint64_t n) {
    require(n >= 1, "AuditRng::below needs a positive bound");
    std::uint64_t x = next();
    auto m = static_cast<u128>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            x = next();
            m = static_cast<u128>(x) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t seed_from_dice(std::string_view digits) {
    require(!digits.empty(), "dice string is empty");
    std::uint64_t seed = 0;
    for (char ch : digits) {
        require(ch >= '0' && ch <= '9', "dice string may contain only digits 0-9");
        seed = seed * 10 + static_cast<std::uint64_t>(ch - '0');  // wraps mod 2^64
    }
    return seed;
}

std::string_view to_string(DrawSource source) {
    switch (source) {
        case DrawSource::random: return "random";
        case DrawSource::discretionary: return "discretionary";
        case DrawSource::jurisdiction_supplement: return "jurisdiction_supplement";
    }
    return "random";
}

DrawSource draw_source_from_string(std::string_view text) {
    if (text == "random") return DrawSource::random;
    if (text == "discretionary") return DrawSource::discretionary;
    if (text == "jurisdiction_supplement") return DrawSource::jurisdiction_supplement;
    fail("unknown draw source '" + std::string(text) + "'");
}

const std::vector<UnitBounds>& plan_units(const UniformPlan& plan) { return plan.units; }

std::vector<UnitBounds> plan_units(const AnyPlan& plan) {
    if (const auto* u = std::get_if<UniformPlan>(&plan)) return u->units;
    std::vector<UnitBounds> out;
    for (const auto& wu : std::get<WeightedPlan>(plan).units) out.push_back(wu.bounds);
    return out;
}

namespace {

std::vector<std::size_t> unit_id_order(const WeightedPlan& plan) {
    std::vector<std::size_t> order(plan.units.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return plan.units[a].bounds.unit_id < plan.units[b].bounds.unit_id;
    });
    return order;
}

std::string method_label(const AnyPlan& plan) { return method_name(plan); }

SelectionRecord make_record(const AnyPlan& plan, std::uint64_t seed,
                            const std::vector<std::size_t>& picks, const AuditRng& rng) {
    const auto units = plan_units(plan);
    SelectionRecord rec;
    rec.method = method_label(plan);
    rec.contest = std::visit([](const auto& p) { return p.contest; }, plan);
    rec.plan_fingerprint = plan_fingerprint(plan);
    rec.seed = seed;
    rec.rng_outputs_consumed = rng.consumed();
    std::set<std::string> distinct;
    for (std::size_t i = 0; i < picks.size(); ++i) {
        rec.draws.push_back({static_cast<std::int64_t>(i), units[picks[i]].unit_id, DrawSource::random});
        distinct.insert(units[picks[i]].unit_id);
    }
    rec.distinct_units.assign(distinct.begin(), distinct.end());
    return rec;
}

}  // namespace

std::vector<std::size_t> sample_uniform(const UniformPlan& plan, AuditRng& rng) {
    const std::size_t n = plan.units.size();
    const auto s = static_cast<std::size_t>(std::max<std::int64_t>(plan.sample_size, 0));
    require(s <= n, "sample size S exceeds the number of units N");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    // Partial Fisher-Yates: the first s slots are the sample, in draw order.
    for (std::size_t i = 0; i < s; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(s);
    return idx;
}

std::vector<std::size_t> sample_weighted(const WeightedPlan& plan, AuditRng& rng) {
    const auto order = unit_id_order(plan);
    std::vector<std::size_t> picks;

    if (plan.full_count) return order;

    if (plan.method == WeightedMethod::ppmeb) {
        for (auto i : order) {
            const double u = rng.unit();
            if (u < plan.units[i].probability) picks.push_back(i);
        }
        return picks;
    }

    std::vector<double> cumulative;
    std::vector<std::size_t> positive;
    double total = 0.0;
    for (auto i : order) {
        const double w = plan.units[i].probability;
        require(w >= 0.0, "negative selection weight");
        if (w == 0.0) continue;
        total += w;
        cumulative.push_back(total);
        positive.push_back(i);
    }
    require(std::abs(total - 1.0) <= 1e-9, "PPMEBWR weights must sum to 1 (within 1e-9)");
    for (std::int64_t d = 0; d < plan.draws; ++d) {
        const double x = rng.unit() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
        if (it == cumulative.end()) --it;
        picks.push_back(positive[static_cast<std::size_t>(it - cumulative.begin())]);
    }
    return picks;
}

std::vector<std::size_t> sample_plan(const AnyPlan& plan, AuditRng& rng) {
    if (const auto* u = std::get_if<UniformPlan>(&plan)) return sample_uniform(*u, rng);
    return sample_weighted(std::get<WeightedPlan>(plan), rng);
}

SelectionRecord draw_uniform(const UniformPlan& plan, std::uint64_t seed) {
    AuditRng rng(seed);
    const auto picks = sample_uniform(plan, rng);
    return make_record(AnyPlan{plan}, seed, picks, rng);
}

SelectionRecord draw_weighted(const WeightedPlan& plan, std::uint64_t seed) {
    AuditRng rng(seed);
    const auto picks = sample_weighted(plan, rng);
    return make_record(AnyPlan{plan}, seed, picks, rng);
}

SelectionRecord draw(const AnyPlan& plan, std::uint64_t seed) {
    if (const auto* u = std::get_if<UniformPlan>(&plan)) return draw_uniform(*u, seed);
    return draw_weighted(std::get<WeightedPlan>(plan), seed);
}

SelectionRecord apply_supplements(SelectionRecord record, const std::vector<UnitBounds>& units,
                                  const std::vector<std::string>& discretionary) {
    std::set<std::string> known;
    for (const auto& u : units) known.insert(u.unit_id);
    std::set<std::string> distinct(record.distinct_units.begin(), record.distinct_units.end());

    auto append = [&](const std::string& unit_id, DrawSource source) {
        record.draws.push_back({static_cast<std::int64_t>(record.draws.size()), unit_id, source});
        distinct.insert(unit_id);
    };

    for (const auto& id : discretionary) {
        require(known.count(id) == 1, "unknown discretionary unit id '" + id + "'");
        append(id, DrawSource::discretionary);
    }

    std::map<std::string, std::vector<std::string>> by_jurisdiction;
    for (const auto& u : units) by_jurisdiction[u.jurisdiction].push_back(u.unit_id);

    AuditRng rng(record.seed);
    rng.skip(record.rng_outputs_consumed);
    for (auto& [jurisdiction, ids] : by_jurisdiction) {
        const bool covered = std::any_of(ids.begin(), ids.end(),
                                         [&](const std::string& id) { return distinct.count(id) > 0; });
        if (covered) continue;
        std::sort(ids.begin(), ids.end());
        append(ids[static_cast<std::size_t>(rng.below(ids.size()))], DrawSource::jurisdiction_supplement);
    }
    record.rng_outputs_consumed = rng.consumed();
    record.distinct_units.assign(distinct.begin(), distinct.end());
    return record;
}

SelectionRecord apply_supplements(SelectionRecord record, const Contest& contest,
                                  const std::vector<std::string>& discretionary) {
    std::vector<UnitBounds> units;
    for (const auto& u : contest.units()) {
        UnitBounds ub;
        ub.unit_id = u.unit_id;
        ub.jurisdiction = u.jurisdiction.value_or("");
        ub.ballots = u.ballots;
        units.push_back(std::move(ub));
    }
    return apply_supplements(std::move(record), units, discretionary);
}

}  // namespace rla
