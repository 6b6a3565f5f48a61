#include "rla/election.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rla/error.hpp"

namespace rla {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

Count parse_count(const std::string& text, std::size_t line_no, const std::string& column) {
    Count value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
        fail("line " + std::to_string(line_no) + ": column '" + column +
             "' is not an integer: '" + text + "'");
    if (value < 0)
        fail("line " + std::to_string(line_no) + ": column '" + column + "' is negative");
    return value;
}

}  // namespace

Count AuditUnit::votes_cast() const {
    return std::accumulate(votes.begin(), votes.end(), Count{0});
}

Contest Contest::create(std::string name, int seats, std::vector<Candidate> candidates,
                        std::vector<AuditUnit> units, std::vector<std::string> winners) {
    require(seats >= 1, "seats must be a positive integer");
    require(!units.empty(), "a contest needs at least one audit unit");
    require(!candidates.empty(), "a contest needs at least one candidate");

    Contest c;
    c.name_ = std::move(name);
    c.seats_ = seats;
    c.candidates_ = std::move(candidates);

    std::set<std::string> ids;
    for (const auto& cand : c.candidates_) {
        require(!cand.id.empty(), "empty candidate id");
        require(ids.insert(cand.id).second, "duplicate candidate id '" + cand.id + "'");
    }

    std::set<std::string> unit_ids;
    c.totals_.assign(c.candidates_.size(), 0);
    for (const auto& u : units) {
        require(!u.unit_id.empty(), "empty unit id");
        require(unit_ids.insert(u.unit_id).second, "duplicate unit_id '" + u.unit_id + "'");
        require(u.votes.size() == c.candidates_.size(),
                "unit '" + u.unit_id + "' has the wrong number of vote columns");
        require(u.ballots >= 0, "unit '" + u.unit_id + "' has negative ballots");
        for (std::size_t j = 0; j < u.votes.size(); ++j) {
            require(u.votes[j] >= 0, "unit '" + u.unit_id + "' has a negative vote count");
            require(u.votes[j] <= u.ballots, "unit '" + u.unit_id + "': candidate '" +
                                                 c.candidates_[j].id + "' has more votes than ballots");
            c.totals_[j] += u.votes[j];
        }
        require(u.votes_cast() <= u.ballots * seats,
                "unit '" + u.unit_id + "': votes cast exceed ballots x seats");
        c.total_ballots_ += u.ballots;
    }
    c.units_ = std::move(units);

    if (winners.empty()) {
        require(c.candidates_.size() >= static_cast<std::size_t>(seats),
                "fewer candidates than seats");
        std::vector<std::size_t> order(c.candidates_.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return c.totals_[a] > c.totals_[b]; });
        if (order.size() > static_cast<std::size_t>(seats) &&
            c.totals_[order[seats - 1]] == c.totals_[order[seats]])
            fail("tie for the last winning seat between '" + c.candidates_[order[seats - 1]].id +
                 "' and '" + c.candidates_[order[seats]].id +
                 "' (margin M = w - r = 0 <= 0); declare winners explicitly");
        for (int s = 0; s < seats; ++s) winners.push_back(c.candidates_[order[s]].id);
    }

    require(winners.size() == static_cast<std::size_t>(seats),
            "number of declared winners must equal seats");
    c.winner_mask_.assign(c.candidates_.size(), false);
    for (const auto& w : winners) {
        const auto idx = c.candidate_index(w);
        require(!c.winner_mask_[idx], "winner '" + w + "' declared twice");
        c.winner_mask_[idx] = true;
    }
    for (std::size_t j = 0; j < c.candidates_.size(); ++j)
        if (c.winner_mask_[j]) c.winners_.push_back(c.candidates_[j].id);
    return c;
}

bool Contest::is_winner(std::string_view candidate_id) const {
    return winner_mask_[candidate_index(candidate_id)];
}

std::size_t Contest::candidate_index(std::string_view candidate_id) const {
    for (std::size_t j = 0; j < candidates_.size(); ++j)
        if (candidates_[j].id == candidate_id) return j;
    fail("unknown candidate id '" + std::string(candidate_id) + "'");
}

const AuditUnit& Contest::unit(std::string_view unit_id) const {
    for (const auto& u : units_)
        if (u.unit_id == unit_id) return u;
    fail("unknown unit id '" + std::string(unit_id) + "'");
}

bool Contest::has_unit(std::string_view unit_id) const {
    return std::any_of(units_.begin(), units_.end(),
                       [&](const AuditUnit& u) { return u.unit_id == unit_id; });
}

Count Contest::total_votes(std::string_view candidate_id) const {
    return totals_[candidate_index(candidate_id)];
}

Count Contest::largest_unit_ballots() const {
    Count b0 = 0;
    for (const auto& u : units_) b0 = std::max(b0, u.ballots);
    return b0;
}

Contest parse_contest_csv(std::istream& in, const ContestConfig& config) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        header = split_csv_line(line);
    }
    require(header.size() >= 4, "header must be unit_id,jurisdiction,ballots,<candidates...>");
    for (auto& h : header) h = trim(h);
    require(header[0] == "unit_id" && header[1] == "jurisdiction" && header[2] == "ballots",
            "header must start with unit_id,jurisdiction,ballots");

    std::vector<Candidate> candidates;
    for (std::size_t j = 3; j < header.size(); ++j) candidates.push_back({header[j], header[j]});

    std::vector<AuditUnit> units;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            fail("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                 " fields, found " + std::to_string(fields.size()));
        for (auto& f : fields) f = trim(f);
        AuditUnit u;
        u.unit_id = fields[0];
        if (u.unit_id.empty()) fail("line " + std::to_string(line_no) + ": empty unit_id");
        if (!fields[1].empty()) u.jurisdiction = fields[1];
        u.ballots = parse_count(fields[2], line_no, "ballots");
        for (std::size_t j = 3; j < fields.size(); ++j)
            u.votes.push_back(parse_count(fields[j], line_no, header[j]));
        if (u.votes_cast() > u.ballots * config.seats)
            fail("line " + std::to_string(line_no) + ": unit '" + u.unit_id +
                 "' has more votes than ballots x seats");
        units.push_back(std::move(u));
    }
    return Contest::create(config.name, config.seats, std::move(candidates), std::move(units),
                           config.winners);
}

Contest load_contest(const std::filesystem::path& path, const ContestConfig& config) {
    std::ifstream in(path);
    if (!in) fail("cannot open contest file '" + path.string() + "'");
    ContestConfig cfg = config;
    if (cfg.name.empty()) cfg.name = path.stem().string();
    return parse_contest_csv(in, cfg);
}

std::string to_csv(const Contest& contest) {
    std::ostringstream out;
    out << "unit_id,jurisdiction,ballots";
    for (const auto& c : contest.candidates()) out << ',' << c.id;
    out << '\n';
    for (const auto& u : contest.units()) {
        out << u.unit_id << ',' << u.jurisdiction.value_or("") << ',' << u.ballots;
        for (auto v : u.votes) out << ',' << v;
        out << '\n';
    }
    return out.str();
}

ContestConfig load_contest_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    ContestConfig cfg;
    cfg.name = j.value("name", std::string{});
    cfg.seats = j.value("seats", 1);
    if (j.contains("winners")) cfg.winners = j.at("winners").get<std::vector<std::string>>();
    return cfg;
}

MarginPair just_pair(const Contest& contest) {
    const auto& cands = contest.candidates();
    std::optional<std::size_t> weakest_winner;
    std::optional<std::size_t> strongest_loser;
    for (std::size_t j = 0; j < cands.size(); ++j) {
        const Count v = contest.total_votes(j);
        if (contest.is_winner(j)) {
            if (!weakest_winner || v < contest.total_votes(*weakest_winner)) weakest_winner = j;
        } else if (!strongest_loser || v > contest.total_votes(*strongest_loser)) {
            strongest_loser = j;
        }
    }
    require(weakest_winner && strongest_loser,
            "contest needs at least one winner and one losing candidate");

    MarginPair pair;
    pair.winner_id = cands[*weakest_winner].id;
    pair.loser_id = cands[*strongest_loser].id;
    pair.margin_votes = contest.total_votes(*weakest_winner) - contest.total_votes(*strongest_loser);
    if (pair.margin_votes <= 0)
        fail("margin M = w - r = " + std::to_string(pair.margin_votes) + " <= 0 between '" +
             pair.winner_id + "' and '" + pair.loser_id + "': declared outcome is inconsistent");
    pair.margin_fraction = contest.total_ballots() > 0
                               ? static_cast<double>(pair.margin_votes) /
                                     static_cast<double>(contest.total_ballots())
                               : 0.0;
    return pair;
}

Count undervote_total(const AuditUnit& unit, const Contest& contest) {
    const Count residual = unit.ballots * contest.seats() - unit.votes_cast();
    require(residual >= 0, "unit '" + unit.unit_id + "' has more votes than capacity");
    return residual;
}

}  // namespace rla
