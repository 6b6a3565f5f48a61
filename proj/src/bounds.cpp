#include "rla/bounds.hpp"

#include <algorithm>

#include "rla/error.hpp"

namespace rla {

namespace {

// Exact per-ballot maximum over all winner/loser pairs of the margin error
// one ballot can carry.
Count single_ballot_bound(const Contest& contest, const AuditUnit& unit) {
    bool winner_voted = false;
    bool loser_missing = false;
    for (std::size_t j = 0; j < unit.votes.size(); ++j) {
        if (contest.is_winner(j))
            winner_voted = winner_voted || unit.votes[j] > 0;
        else
            loser_missing = loser_missing || unit.votes[j] == 0;
    }
    if (winner_voted && loser_missing) return 2;
    if (!winner_voted && !loser_missing) return 0;
    return 1;
}

}  // namespace

Count pair_bound(const Contest& contest, const AuditUnit& unit, std::string_view winner_id,
                 std::string_view loser_id) {
    const auto w = contest.candidate_index(winner_id);
    const auto r = contest.candidate_index(loser_id);
    return unit.ballots + unit.votes[w] - unit.votes[r];
}

Count allpairs_bound(const Contest& contest, const AuditUnit& unit) {
    if (unit.ballots == 0) return 0;
    if (unit.ballots == 1) return single_ballot_bound(contest, unit);
    Count winner_votes = 0;
    for (std::size_t j = 0; j < unit.votes.size(); ++j)
        if (contest.is_winner(j)) winner_votes += unit.votes[j];
    return unit.ballots + std::min(winner_votes, unit.ballots);
}

double legacy_2sv_bound(const AuditUnit& unit, double s) {
    require(s > 0.0 && s < 1.0, "legacy rate s must be in (0,1)");
    return 2.0 * s * static_cast<double>(unit.votes_cast());
}

BoundSet bound_set(const Contest& contest, double k) {
    require(k > 0.0 && k <= 1.0, "undetectability k must be in (0,1]");
    BoundSet set;
    set.margin = just_pair(contest);
    set.k = k;
    set.units.reserve(contest.unit_count());
    for (const auto& u : contest.units()) {
        UnitBounds ub;
        ub.unit_id = u.unit_id;
        ub.jurisdiction = u.jurisdiction.value_or("");
        ub.ballots = u.ballots;
        ub.pair = pair_bound(contest, u, set.margin.winner_id, set.margin.loser_id);
        ub.allpairs = allpairs_bound(contest, u);
        set.pair_total += ub.pair;
        set.allpairs_total += ub.allpairs;
        set.units.push_back(std::move(ub));
    }
    return set;
}

std::vector<Figure3Row> figure3_rows(const Contest& contest, double s) {
    const auto margin = just_pair(contest);
    const auto r = contest.candidate_index(margin.loser_id);
    std::vector<Figure3Row> rows;
    for (const auto& u : contest.units()) {
        Figure3Row row;
        row.unit_id = u.unit_id;
        row.loser_share = u.ballots > 0 ? static_cast<double>(u.votes[r]) / static_cast<double>(u.ballots) : 0.0;
        row.scaled_pair = 2.0 * s * static_cast<double>(pair_bound(contest, u, margin.winner_id, margin.loser_id));
        row.scaled_allpairs = 2.0 * s * static_cast<double>(allpairs_bound(contest, u));
        row.legacy_2sv = legacy_2sv_bound(u, s);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace rla
