#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "../support/oracle.hpp"
#include "rla/election.hpp"
#include "rla/error.hpp"

using namespace rla;

namespace {

Contest parse(const std::string& csv, ContestConfig cfg = {}) {
    std::istringstream in(csv);
    if (cfg.name.empty()) cfg.name = "t";
    return parse_contest_csv(in, cfg);
}

Contest rep3() { return load_contest(fixture::data("utah_rep3_2004.csv"), {}); }
Contest sen1() { return load_contest(fixture::data("utah_sen1_2004.csv"), {}); }

}  // namespace

TEST(LoadContest, Rep3Totals) {
    const auto c = rep3();
    EXPECT_EQ(c.unit_count(), 23u);
    EXPECT_EQ(c.total_ballots(), 13495);
    EXPECT_EQ(c.total_votes("Buttars"), 9614);
    EXPECT_EQ(c.total_votes("Hurtson"), 2930);
    EXPECT_EQ(c.total_votes("Elwell"), 236);
    EXPECT_EQ(c.name(), "utah_rep3_2004");
    ASSERT_EQ(c.winners().size(), 1u);
    EXPECT_EQ(c.winners()[0], "Buttars");
    EXPECT_EQ(c.largest_unit_ballots(), 996);
}

TEST(LoadContest, Sen1Totals) {
    const auto c = sen1();
    EXPECT_EQ(c.unit_count(), 44u);
    EXPECT_EQ(c.total_ballots(), 16976);
    EXPECT_EQ(c.total_votes("Fife"), 7981);
    EXPECT_EQ(c.total_votes("Evans"), 7553);
    EXPECT_EQ(c.largest_unit_ballots(), 597);
}

TEST(LoadContest, TotalsAreSumsOverUnits) {
    for (const auto& c : {rep3(), sen1()}) {
        Count b = 0;
        std::vector<Count> v(c.candidates().size(), 0);
        for (const auto& u : c.units()) {
            b += u.ballots;
            for (std::size_t j = 0; j < v.size(); ++j) v[j] += u.votes[j];
        }
        EXPECT_EQ(b, c.total_ballots());
        for (std::size_t j = 0; j < v.size(); ++j) EXPECT_EQ(v[j], c.total_votes(j));
    }
}

TEST(LoadContest, DegenerateZeroBallotUnit) {
    const auto c = parse("unit_id,jurisdiction,ballots,X\nU1,,0,0\n");
    EXPECT_EQ(c.unit_count(), 1u);
    EXPECT_EQ(c.total_ballots(), 0);
}

TEST(LoadContest, VotesAboveCapacityRejected) {
    EXPECT_THROW(parse("unit_id,jurisdiction,ballots,A,B\nU1,,10,6,5\n"), AuditError);
    EXPECT_NO_THROW(parse("unit_id,jurisdiction,ballots,A,B\nU1,,10,6,4\n"));
}

TEST(LoadContest, MalformedInputs) {
    EXPECT_THROW(parse("unit,jurisdiction,ballots,A\nU1,,1,1\n"), AuditError);            // header
    EXPECT_THROW(parse("unit_id,jurisdiction,ballots,A,B\nU1,,10,6\n"), AuditError);       // field count
    EXPECT_THROW(parse("unit_id,jurisdiction,ballots,A,B\nU1,,10,x,1\n"), AuditError);     // not a number
    EXPECT_THROW(parse("unit_id,jurisdiction,ballots,A,B\nU1,,10,-1,1\n"), AuditError);    // negative
    EXPECT_THROW(parse("unit_id,jurisdiction,ballots,A,B\nU1,,5,3,1\nU1,,5,3,1\n"), AuditError);  // dup
    EXPECT_THROW(parse("unit_id,jurisdiction,ballots,A,A\nU1,,5,3,1\n"), AuditError);      // dup candidate
    EXPECT_THROW(parse("unit_id,jurisdiction,ballots,A,B\n"), AuditError);                 // no units
    EXPECT_THROW(load_contest("/nonexistent/file.csv", {}), AuditError);
}

TEST(LoadContest, ToleratesCrlfBomAndBlankLines) {
    const auto c = parse("\xEF\xBB\xBFunit_id,jurisdiction,ballots,A,B\r\nU1,north,10,6,3\r\n\r\nU2,,4,1,2\r\n");
    ASSERT_EQ(c.unit_count(), 2u);
    EXPECT_EQ(c.units()[0].jurisdiction.value_or(""), "north");
    EXPECT_FALSE(c.units()[1].jurisdiction.has_value());
    EXPECT_EQ(c.total_votes("A"), 7);
}

TEST(LoadContest, WinnerTieNeedsDeclaration) {
    try {
        load_contest(fixture::test_file("tied.csv"), {});
        FAIL() << "expected a tie error";
    } catch (const AuditError& e) {
        EXPECT_NE(std::string(e.what()).find("M = w - r = 0 <= 0"), std::string::npos);
    }
    ContestConfig cfg;
    cfg.winners = {"Alice"};
    const auto c = load_contest(fixture::test_file("tied.csv"), cfg);
    EXPECT_TRUE(c.is_winner("Alice"));
    EXPECT_THROW(just_pair(c), AuditError);
}

TEST(LoadContest, ConfigFile) {
    const auto cfg = load_contest_config(fixture::test_file("allpairs_example.json"));
    EXPECT_EQ(cfg.seats, 2);
    EXPECT_EQ(cfg.winners, (std::vector<std::string>{"A", "B"}));
    const auto c = load_contest(fixture::test_file("allpairs_example.csv"), cfg);
    EXPECT_EQ(c.seats(), 2);
    EXPECT_TRUE(c.is_winner("A"));
    EXPECT_TRUE(c.is_winner("B"));
    EXPECT_FALSE(c.is_winner("C"));
}

TEST(LoadContest, DeclaredWinnersValidated) {
    ContestConfig cfg;
    cfg.winners = {"Z"};
    EXPECT_THROW(parse("unit_id,jurisdiction,ballots,A,B\nU1,,10,6,3\n", cfg), AuditError);
    cfg.winners = {"A", "B"};
    EXPECT_THROW(parse("unit_id,jurisdiction,ballots,A,B\nU1,,10,6,3\n", cfg), AuditError);
}

TEST(JustPair, Fixtures) {
    const auto r = just_pair(rep3());
    EXPECT_EQ(r.winner_id, "Buttars");
    EXPECT_EQ(r.loser_id, "Hurtson");
    EXPECT_EQ(r.margin_votes, 6684);
    EXPECT_NEAR(r.margin_fraction, 6684.0 / 13495.0, 1e-15);
    EXPECT_NEAR(r.margin_fraction, 0.4953, 1e-4);

    const auto s = just_pair(sen1());
    EXPECT_EQ(s.winner_id, "Fife");
    EXPECT_EQ(s.loser_id, "Evans");
    EXPECT_EQ(s.margin_votes, 428);
}

TEST(JustPair, DenominatorIsBallotsNotVotes) {
    const auto c = parse("unit_id,jurisdiction,ballots,A,B\nU1,,100,50,30\n");
    EXPECT_DOUBLE_EQ(just_pair(c).margin_fraction, 0.2);
}

TEST(JustPair, ExhaustiveAgreementOnRandomContests) {
    std::mt19937_64 gen(20240611);
    for (int trial = 0; trial < 500; ++trial) {
        const int ncand = 2 + static_cast<int>(gen() % 5);
        const int seats = 1 + static_cast<int>(gen() % static_cast<unsigned>(ncand - 1));
        std::vector<Candidate> cands;
        for (int j = 0; j < ncand; ++j) cands.push_back({"c" + std::to_string(j), ""});
        std::vector<AuditUnit> units;
        const int nunits = 1 + static_cast<int>(gen() % 6);
        for (int u = 0; u < nunits; ++u) {
            AuditUnit au;
            au.unit_id = "u" + std::to_string(u);
            au.ballots = 50 + static_cast<Count>(gen() % 200);
            for (int j = 0; j < ncand; ++j)
                au.votes.push_back(static_cast<Count>(gen() % static_cast<unsigned>(au.ballots * seats / ncand + 1)));
            units.push_back(au);
        }
        // Declare a random winner set so ties never block construction.
        std::vector<int> idx(ncand);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), gen);
        std::vector<std::string> winners;
        for (int s = 0; s < seats; ++s) winners.push_back(cands[idx[s]].id);
        const auto c = Contest::create("r", seats, cands, units, winners);

        Count best = std::numeric_limits<Count>::max();
        for (int w = 0; w < ncand; ++w)
            for (int l = 0; l < ncand; ++l)
                if (c.is_winner(w) && !c.is_winner(l)) best = std::min(best, c.total_votes(w) - c.total_votes(l));
        if (best <= 0) {
            EXPECT_THROW(just_pair(c), AuditError);
        } else {
            const auto p = just_pair(c);
            EXPECT_EQ(p.margin_votes, best);
            EXPECT_EQ(c.total_votes(p.winner_id) - c.total_votes(p.loser_id), best);
        }
    }
}

TEST(JustPair, NeedsALoser) {
    const auto c = parse("unit_id,jurisdiction,ballots,A\nU1,,10,6\n");
    EXPECT_THROW(just_pair(c), AuditError);
}

TEST(Undervotes, Examples) {
    const auto c = rep3();
    EXPECT_EQ(undervote_total(c.unit("SMI1"), c), 37);
    const auto full = parse("unit_id,jurisdiction,ballots,A,B\nU1,,10,6,4\n");
    EXPECT_EQ(undervote_total(full.units()[0], full), 0);
    ContestConfig cfg;
    cfg.seats = 2;
    cfg.winners = {"A", "B"};
    const auto two = parse("unit_id,jurisdiction,ballots,A,B,C\nU1,,200,100,100,100\n", cfg);
    EXPECT_EQ(undervote_total(two.units()[0], two), 100);
}

TEST(CsvRoundTrip, IdentityOnCounts) {
    for (const auto& c : {rep3(), sen1()}) {
        const auto text = to_csv(c);
        std::istringstream in(text);
        ContestConfig cfg;
        cfg.name = c.name();
        const auto back = parse_contest_csv(in, cfg);
        ASSERT_EQ(back.unit_count(), c.unit_count());
        for (std::size_t i = 0; i < c.unit_count(); ++i) {
            EXPECT_EQ(back.units()[i].unit_id, c.units()[i].unit_id);
            EXPECT_EQ(back.units()[i].ballots, c.units()[i].ballots);
            EXPECT_EQ(back.units()[i].votes, c.units()[i].votes);
            EXPECT_EQ(back.units()[i].jurisdiction, c.units()[i].jurisdiction);
        }
        EXPECT_EQ(to_csv(back), text);
    }
}

TEST(Contest, Lookups) {
    const auto c = rep3();
    EXPECT_TRUE(c.has_unit("SMI1"));
    EXPECT_FALSE(c.has_unit("NOPE"));
    EXPECT_THROW(c.unit("NOPE"), AuditError);
    EXPECT_THROW(c.candidate_index("Nobody"), AuditError);
    EXPECT_EQ(c.unit("SMI1").votes_cast(), 834);
}
