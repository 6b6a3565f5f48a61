#pragma once

// Reproducible random selection of audit units.
//
// All randomness comes from AuditRng: std::mt19937_64 (whose output
// sequence is fixed by the C++ standard) with integer and real mappings
// defined here rather than by <random> distributions, which differ between
// standard libraries. A (plan, seed) pair therefore replays identically on
// every platform.

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rla/bounds.hpp"
#include "rla/uniform.hpp"
#include "rla/weighted.hpp"

namespace rla {

class AuditRng {
public:
    static constexpr std::string_view kGeneratorId = "mt19937_64+lemire/v1";

    explicit AuditRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() {
        ++consumed_;
        return engine_();
    }

    /// Unbiased integer in [0, n), n >= 1 (Lemire's multiply-and-reject).
    std::uint64_t below(std::uint64_t n);

    /// Double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    std::uint64_t consumed() const { return consumed_; }

    void skip(std::uint64_t outputs) {
        engine_.discard(outputs);
        consumed_ += outputs;
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t consumed_ = 0;
};

/// splitmix64 finaliser over (seed, stream); used for per-trial sub-seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Decimal digit string (e.g. from ten-sided dice) to a seed, mod 2^64.
std::uint64_t seed_from_dice(std::string_view digits);

using AnyPlan = std::variant<UniformPlan, WeightedPlan>;

enum class DrawSource { random, discretionary, jurisdiction_supplement };

std::string_view to_string(DrawSource source);
DrawSource draw_source_from_string(std::string_view text);

struct Draw {
    std::int64_t index = 0;
    std::string unit_id;
    DrawSource source = DrawSource::random;

    friend bool operator==(const Draw&, const Draw&) = default;
};

struct SelectionRecord {
    std::string method;
    std::string contest;
    std::string plan_fingerprint;
    std::uint64_t seed = 0;
    std::string generator_id{AuditRng::kGeneratorId};
    std::uint64_t rng_outputs_consumed = 0;
    std::vector<Draw> draws;
    std::vector<std::string> distinct_units;  // sorted

    friend bool operator==(const SelectionRecord&, const SelectionRecord&) = default;
};

/// Plan units in the order samplers walk them: contest order for uniform
/// plans, unit_id order for weighted ones.
const std::vector<UnitBounds>& plan_units(const UniformPlan& plan);
std::vector<UnitBounds> plan_units(const AnyPlan& plan);

/// Index-level samplers shared by `draw_*` and the Monte Carlo harness.
/// Indices refer to the plan's unit vector. Weighted samplers may repeat an
/// index (PPMEBWR) and visit units in unit_id order.
std::vector<std::size_t> sample_uniform(const UniformPlan& plan, AuditRng& rng);
std::vector<std::size_t> sample_weighted(const WeightedPlan& plan, AuditRng& rng);
std::vector<std::size_t> sample_plan(const AnyPlan& plan, AuditRng& rng);

SelectionRecord draw_uniform(const UniformPlan& plan, std::uint64_t seed);
SelectionRecord draw_weighted(const WeightedPlan& plan, std::uint64_t seed);
SelectionRecord draw(const AnyPlan& plan, std::uint64_t seed);

/// Appends discretionary units, then one uniformly chosen unit from every
/// jurisdiction the sample missed. Supplement draws continue the record's
/// generator stream after the main sample. Units without a jurisdiction
/// count as one implicit jurisdiction.
SelectionRecord apply_supplements(SelectionRecord record, const std::vector<UnitBounds>& units,
                                  const std::vector<std::string>& discretionary);
SelectionRecord apply_supplements(SelectionRecord record, const Contest& contest,
                                  const std::vector<std::string>& discretionary);

}  // namespace rla
