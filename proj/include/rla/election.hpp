#pragma once

// Reported election results: contests, audit units, and the
// just-winning / just-losing candidate pair.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rla {

using Count = std::int64_t;

struct Candidate {
    std::string id;
    std::string name;
};

/// One publicly reported tally group. `votes` is aligned with the owning
/// contest's candidate list.
struct AuditUnit {
    std::string unit_id;
    std::optional<std::string> jurisdiction;
    Count ballots = 0;
    std::vector<Count> votes;

    Count votes_cast() const;
};

struct MarginPair {
    std::string winner_id;
    std::string loser_id;
    Count margin_votes = 0;      // M = w - r
    double margin_fraction = 0;  // m = M / b (ballots, not votes)
};

/// Full reported results for a single contest. Immutable once built;
/// construct through `Contest::create` or `load_contest` so every invariant
/// is checked.
class Contest {
public:
    static Contest create(std::string name, int seats,
                          std::vector<Candidate> candidates,
                          std::vector<AuditUnit> units,
                          std::vector<std::string> winners);

    const std::string& name() const { return name_; }
    int seats() const { return seats_; }
    const std::vector<Candidate>& candidates() const { return candidates_; }
    const std::vector<AuditUnit>& units() const { return units_; }
    std::size_t unit_count() const { return units_.size(); }

    /// Declared winners, in candidate-list order.
    const std::vector<std::string>& winners() const { return winners_; }
    bool is_winner(std::size_t candidate_index) const { return winner_mask_[candidate_index]; }
    bool is_winner(std::string_view candidate_id) const;

    /// Throws on an unknown id.
    std::size_t candidate_index(std::string_view candidate_id) const;
    const AuditUnit& unit(std::string_view unit_id) const;
    bool has_unit(std::string_view unit_id) const;

    Count total_ballots() const { return total_ballots_; }
    Count total_votes(std::size_t candidate_index) const { return totals_[candidate_index]; }
    Count total_votes(std::string_view candidate_id) const;

    /// Ballots in the largest unit (b_0).
    Count largest_unit_ballots() const;

private:
    Contest() = default;

    std::string name_;
    int seats_ = 1;
    std::vector<Candidate> candidates_;
    std::vector<AuditUnit> units_;
    std::vector<std::string> winners_;
    std::vector<bool> winner_mask_;
    std::vector<Count> totals_;
    Count total_ballots_ = 0;
};

struct ContestConfig {
    std::string name;
    int seats = 1;
    /// Empty means "top `seats` candidates by total votes".
    std::vector<std::string> winners;
};

/// Parses the contest CSV format:
///   unit_id,jurisdiction,ballots,<candidate_1>,...,<candidate_k>
Contest parse_contest_csv(std::istream& in, const ContestConfig& config);
Contest load_contest(const std::filesystem::path& path, const ContestConfig& config);

/// Inverse of `parse_contest_csv`.
std::string to_csv(const Contest& contest);

/// Reads `seats` / `winners` / `name` from a JSON companion file.
ContestConfig load_contest_config(const std::filesystem::path& path);

/// Smallest-margin pair over declared winners x non-winners. Throws if the
/// contest has no loser or the pair's margin is not positive.
MarginPair just_pair(const Contest& contest);

/// Unexercised vote capacity: ballots*seats - votes cast. Under- and
/// over-votes are not distinguished.
Count undervote_total(const AuditUnit& unit, const Contest& contest);

}  // namespace rla
