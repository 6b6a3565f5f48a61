#include "rla/simulation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "rla/error.hpp"
#include "rla/hypergeometric.hpp"
#include "rla/json_io.hpp"
#include "rla/uniform.hpp"

namespace rla {

namespace {

constexpr double kZ95 = 1.959963984540054;

AttackScenario attack_in_order(const BoundSet& bounds, const std::vector<std::size_t>& order,
                               std::string strategy) {
    require(bounds.margin.margin_votes > 0, "margin M must be positive");
    AttackScenario a;
    a.strategy = std::move(strategy);
    a.winner_id = bounds.margin.winner_id;
    a.loser_id = bounds.margin.loser_id;
    a.margin = bounds.margin.margin_votes;
    a.undetectability = bounds.k;
    const double margin = static_cast<double>(a.margin);
    for (auto i : order) {
        const auto& u = bounds.units[i];
        if (u.pair <= 0) continue;
        const double planted = bounds.k * static_cast<double>(u.pair);
        a.corrupted_units.push_back(u.unit_id);
        a.planted_error.push_back(planted);
        a.total_planted_error += planted;
        if (a.total_planted_error > margin) return a;
    }
    throw AuditError(ErrorKind::infeasible,
                     "attack infeasible: total k-capped error does not exceed the margin M");
}

}  // namespace

AttackScenario minimal_attack(const BoundSet& bounds) {
    std::vector<std::size_t> order(bounds.units.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ua = bounds.units[a];
        const auto& ub = bounds.units[b];
        if (ua.pair != ub.pair) return ua.pair > ub.pair;
        return ua.unit_id < ub.unit_id;
    });
    return attack_in_order(bounds, order, "greedy");
}

AttackScenario random_subset_attack(const BoundSet& bounds, std::uint64_t seed) {
    std::vector<std::size_t> order(bounds.units.size());
    std::iota(order.begin(), order.end(), 0);
    AuditRng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);
    return attack_in_order(bounds, order, "random");
}

BoundSet bounds_of(const AnyPlan& plan) {
    BoundSet set;
    set.units = plan_units(plan);
    std::visit(
        [&](const auto& p) {
            set.margin = p.margin;
            set.k = p.undetectability;
        },
        plan);
    for (const auto& u : set.units) {
        set.pair_total += u.pair;
        set.allpairs_total += u.allpairs;
    }
    return set;
}

SimulationReport run_detection_trials(const AnyPlan& plan, const AttackScenario& attack,
                                      std::int64_t trials, std::uint64_t seed, unsigned threads) {
    require(trials >= 1, "trials must be at least 1");
    const auto units = plan_units(plan);
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < units.size(); ++i) index.emplace(units[i].unit_id, i);
    std::vector<char> corrupted(units.size(), 0);
    for (const auto& id : attack.corrupted_units) {
        auto it = index.find(id);
        require(it != index.end(), "attack names unit '" + id + "' which is not in the plan");
        corrupted[it->second] = 1;
    }

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::int64_t>(threads, trials));

    struct Totals {
        std::int64_t hits = 0;
        std::int64_t size_sum = 0;
        std::int64_t size_sq_sum = 0;
    };
    std::vector<Totals> partial(threads);

    auto worker = [&](unsigned t) {
        const std::int64_t begin = trials * t / threads;
        const std::int64_t end = trials * (t + 1) / threads;
        std::vector<char> seen(units.size());
        Totals acc;
        for (std::int64_t trial = begin; trial < end; ++trial) {
            AuditRng rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
            const auto picks = sample_plan(plan, rng);
            std::fill(seen.begin(), seen.end(), 0);
            std::int64_t distinct = 0;
            bool hit = false;
            for (auto i : picks) {
                if (!seen[i]) {
                    seen[i] = 1;
                    ++distinct;
                }
                hit = hit || corrupted[i];
            }
            acc.hits += hit ? 1 : 0;
            acc.size_sum += distinct;
            acc.size_sq_sum += distinct * distinct;
        }
        partial[t] = acc;
    };

    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker, t);
    worker(0);
    for (auto& th : pool) th.join();

    Totals sum;
    for (const auto& p : partial) {
        sum.hits += p.hits;
        sum.size_sum += p.size_sum;
        sum.size_sq_sum += p.size_sq_sum;
    }

    SimulationReport r;
    r.sampling_method = method_name(plan);
    r.attack_strategy = attack.strategy;
    r.seed = seed;
    r.trials = trials;
    r.detections = sum.hits;
    r.target_probability = std::visit([](const auto& p) { return p.probability; }, plan);
    const double n = static_cast<double>(trials);
    r.detection_rate = static_cast<double>(sum.hits) / n;
    r.sigma = std::sqrt(r.detection_rate * (1.0 - r.detection_rate) / n);
    const double half = kZ95 * r.sigma + 0.5 / n;
    r.ci_low = std::max(0.0, r.detection_rate - half);
    r.ci_high = std::min(1.0, r.detection_rate + half);
    r.mean_sample_size = static_cast<double>(sum.size_sum) / n;
    const double var = static_cast<double>(sum.size_sq_sum) / n - r.mean_sample_size * r.mean_sample_size;
    r.sd_sample_size = std::sqrt(std::max(0.0, var));
    return r;
}

Contest synthetic_contest(std::int64_t units, Count ballots, double margin_fraction) {
    require(units >= 1, "synthetic contest needs at least one unit");
    require(ballots >= units, "synthetic contest needs at least one ballot per unit");
    require(margin_fraction > 0.0 && margin_fraction <= 1.0, "margin fraction must be in (0,1]");
    const Count margin = std::max<Count>(1, std::llround(margin_fraction * static_cast<double>(ballots)));

    std::vector<AuditUnit> list;
    list.reserve(static_cast<std::size_t>(units));
    const int width = static_cast<int>(std::to_string(units).size());
    for (std::int64_t i = 0; i < units; ++i) {
        AuditUnit u;
        std::string num = std::to_string(i + 1);
        u.unit_id = "U" + std::string(static_cast<std::size_t>(width) - num.size(), '0') + num;
        u.ballots = ballots / units + (i < ballots % units ? 1 : 0);
        const Count m = std::min(u.ballots, margin / units + (i < margin % units ? 1 : 0));
        const Count w = (u.ballots + m) / 2;
        u.votes = {w, w - m};
        list.push_back(std::move(u));
    }
    return Contest::create("synthetic", 1, {{"W", "W"}, {"L", "L"}}, std::move(list), {"W"});
}

std::vector<FixedRateRow> fixed_rate_curve(std::int64_t units, Count ballots,
                                           const std::vector<double>& margin_percents, double rate,
                                           double probability, double k) {
    require(rate > 0.0 && rate <= 1.0, "fixed audit rate must be in (0,1]");
    require(probability > 0.0 && probability < 1.0, "probability P must be in (0,1)");
    std::vector<FixedRateRow> rows;
    for (double pct : margin_percents) {
        const auto contest = synthetic_contest(units, ballots, pct / 100.0);
        const auto bracket = estimate_c_bracket(contest, k);
        FixedRateRow row;
        row.margin_percent = pct;
        row.margin_votes = just_pair(contest).margin_votes;
        row.corrupt_units = bracket.c_upper;
        row.fixed_sample_size = std::min<std::int64_t>(
            units, static_cast<std::int64_t>(std::ceil(rate * static_cast<double>(units) - 1e-9)));
        row.fixed_probability = check_probability(units, row.corrupt_units, row.fixed_sample_size);
        row.risk_limiting_size = exact_sample_size(units, row.corrupt_units, probability);
        row.risk_limiting_probability = check_probability(units, row.corrupt_units, row.risk_limiting_size);
        rows.push_back(row);
    }
    return rows;
}

std::vector<Ballot> ballots_from_counts(const Contest& contest, const AuditUnit& unit) {
    std::vector<Ballot> out(static_cast<std::size_t>(unit.ballots), 0);
    if (unit.ballots == 0) return out;
    Count slot = 0;
    for (std::size_t c = 0; c < contest.candidates().size(); ++c) {
        for (Count v = 0; v < unit.votes[c]; ++v) {
            out[static_cast<std::size_t>(slot % unit.ballots)] |= Ballot{1} << c;
            ++slot;
        }
    }
    return out;
}

TightnessResult allpairs_tightness_search(const Contest& contest) {
    std::vector<std::vector<Ballot>> ballots;
    for (const auto& u : contest.units()) ballots.push_back(ballots_from_counts(contest, u));
    return allpairs_tightness_search(contest, ballots);
}

TightnessResult allpairs_tightness_search(const Contest& contest,
                                          const std::vector<std::vector<Ballot>>& ballots) {
    const auto ncand = contest.candidates().size();
    require(contest.unit_count() <= 10, "tightness search is limited to 10 units");
    require(ncand <= 5, "tightness search is limited to 5 candidates");
    require(ballots.size() == contest.unit_count(), "ballot lists must match the contest's units");
    Count total_ballots = 0;
    for (const auto& b : ballots) total_ballots += static_cast<Count>(b.size());
    require(total_ballots <= 100000, "tightness search is limited to 100,000 ballots");

    TightnessResult result;
    for (const auto& u : contest.units()) result.allpairs_bound_total += allpairs_bound(contest, u);

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t w = 0; w < ncand; ++w)
        if (contest.is_winner(w))
            for (std::size_t l = 0; l < ncand; ++l)
                if (!contest.is_winner(l)) pairs.emplace_back(w, l);
    if (pairs.empty()) return result;

    const auto seats = contest.seats();
    const Ballot all = (Ballot{1} << ncand) - 1;
    auto diff = [](Ballot b, std::size_t w, std::size_t l) {
        return static_cast<Count>((b >> w) & 1) - static_cast<Count>((b >> l) & 1);
    };

    // Distinct reported ballots per unit, with the best error and the
    // lowest-mask true ballot achieving it for every pair.
    struct Group {
        std::size_t unit;
        Ballot reported;
        Count count;
        std::vector<Count> error;
        std::vector<Ballot> truth;
    };
    std::vector<Group> groups;
    for (std::size_t u = 0; u < ballots.size(); ++u) {
        std::map<Ballot, Count> counts;
        for (Ballot b : ballots[u]) {
            require((b & ~all) == 0 && std::popcount(b) <= seats, "ballot has more marks than seats");
            ++counts[b];
        }
        for (const auto& [reported, count] : counts) {
            Group g{u, reported, count, {}, {}};
            for (const auto& [w, l] : pairs) {
                Count best = 0;
                Ballot best_truth = reported;
                for (Ballot t = 0; t <= all; ++t) {
                    if (std::popcount(t) > seats) continue;
                    const Count e = diff(reported, w, l) - diff(t, w, l);
                    if (e > best) {
                        best = e;
                        best_truth = t;
                    }
                }
                g.error.push_back(best);
                g.truth.push_back(best_truth);
            }
            groups.push_back(std::move(g));
        }
    }

    auto total_for = [&](const std::vector<std::size_t>& set) {
        Count total = 0;
        for (const auto& g : groups) {
            Count best = 0;
            for (auto p : set) best = std::max(best, g.error[p]);
            total += best * g.count;
        }
        return total;
    };

    std::vector<std::size_t> everything(pairs.size());
    std::iota(everything.begin(), everything.end(), 0);
    result.max_error = total_for(everything);
    if (result.max_error == 0) return result;

    // Smallest pair sets first, each size in lexicographic order.
    std::vector<std::size_t> best_set;
    for (std::size_t size = 1; size <= pairs.size() && best_set.empty(); ++size) {
        std::vector<std::size_t> set(size);
        std::iota(set.begin(), set.end(), 0);
        while (true) {
            if (total_for(set) == result.max_error) {
                if (best_set.empty()) best_set = set;
                ++result.optimal_pair_sets;
            }
            std::size_t i = size;
            while (i > 0 && set[i - 1] == pairs.size() - size + i - 1) --i;
            if (i == 0) break;
            ++set[i - 1];
            for (std::size_t j = i; j < size; ++j) set[j] = set[j - 1] + 1;
        }
    }

    auto ids = [&](Ballot b) {
        std::vector<std::string> out;
        for (std::size_t c = 0; c < ncand; ++c)
            if ((b >> c) & 1) out.push_back(contest.candidates()[c].id);
        return out;
    };
    for (auto p : best_set)
        result.witness_pairs.emplace_back(contest.candidates()[pairs[p].first].id,
                                          contest.candidates()[pairs[p].second].id);
    for (const auto& g : groups) {
        std::size_t chosen = best_set.front();
        for (auto p : best_set)
            if (g.error[p] > g.error[chosen]) chosen = p;
        if (g.error[chosen] == 0) continue;
        WitnessMove m;
        m.unit_id = contest.units()[g.unit].unit_id;
        m.reported = ids(g.reported);
        m.truth = ids(g.truth[chosen]);
        m.winner_id = contest.candidates()[pairs[chosen].first].id;
        m.loser_id = contest.candidates()[pairs[chosen].second].id;
        m.ballots = g.count;
        m.error = g.error[chosen] * g.count;
        result.witness.push_back(std::move(m));
    }
    return result;
}

}  // namespace rla
