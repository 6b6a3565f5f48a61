#include "rla/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "rla/error.hpp"

namespace rla {

using nlohmann::json;

namespace {

json margin_json(const MarginPair& m) {
    return {{"winner_id", m.winner_id},
            {"loser_id", m.loser_id},
            {"margin_votes", m.margin_votes},
            {"margin_fraction", m.margin_fraction}};
}

MarginPair margin_from(const json& j) {
    MarginPair m;
    m.winner_id = j.at("winner_id").get<std::string>();
    m.loser_id = j.at("loser_id").get<std::string>();
    m.margin_votes = j.at("margin_votes").get<Count>();
    m.margin_fraction = j.at("margin_fraction").get<double>();
    return m;
}

json bounds_json(const UnitBounds& u) {
    return {{"unit_id", u.unit_id},
            {"jurisdiction", u.jurisdiction},
            {"ballots", u.ballots},
            {"pair_bound", u.pair},
            {"allpairs_bound", u.allpairs}};
}

UnitBounds bounds_from(const json& j) {
    UnitBounds u;
    u.unit_id = j.at("unit_id").get<std::string>();
    u.jurisdiction = j.at("jurisdiction").get<std::string>();
    u.ballots = j.at("ballots").get<Count>();
    u.pair = j.at("pair_bound").get<Count>();
    u.allpairs = j.at("allpairs_bound").get<Count>();
    return u;
}

void check_header(const json& doc, std::string_view kind) {
    require(doc.is_object(), "JSON document must be an object");
    require(doc.contains("schema_version") && doc.at("schema_version") == kSchemaVersion,
            "unsupported schema_version (expected 1)");
    require(doc.value("kind", "") == kind, "expected a JSON document of kind '" + std::string(kind) + "'");
}

UniformPlan uniform_from(const json& doc) {
    UniformPlan p;
    p.method = doc.at("method") == "uniform-estimate" ? UniformMethod::estimate : UniformMethod::detailed;
    p.contest = doc.at("contest").get<std::string>();
    p.probability = doc.at("probability").get<double>();
    p.undetectability = doc.at("undetectability").get<double>();
    p.margin = margin_from(doc.at("margin"));
    p.units_total = doc.at("units_total").get<std::int64_t>();
    p.corrupt_units = doc.at("corrupt_units").get<std::int64_t>();
    p.sample_size = doc.at("sample_size").get<std::int64_t>();
    p.closed_form_size = doc.at("closed_form_size").get<std::int64_t>();
    p.achieved_probability = doc.at("achieved_probability").get<double>();
    p.full_count = doc.at("full_count").get<bool>();
    if (doc.contains("estimate") && !doc.at("estimate").is_null()) {
        const auto& e = doc.at("estimate");
        EstimateBracket b;
        b.c_zero = e.at("c_zero").get<double>();
        b.c_avg = e.at("c_avg").get<double>();
        b.c_lower = e.at("c_lower").get<std::int64_t>();
        b.c_upper = e.at("c_upper").get<std::int64_t>();
        b.s_avg = e.at("s_avg").get<std::int64_t>();
        b.s_zero = e.at("s_zero").get<std::int64_t>();
        b.largest_unit = e.at("largest_unit").get<Count>();
        p.estimate = b;
    }
    for (const auto& r : doc.at("cumulative"))
        p.cumulative.push_back({r.at("unit_id").get<std::string>(), r.at("scaled_bound").get<double>(),
                                r.at("cumulative").get<double>()});
    for (const auto& u : doc.at("units")) p.units.push_back(bounds_from(u));
    require(static_cast<std::int64_t>(p.units.size()) == p.units_total, "plan units do not match units_total");
    return p;
}

WeightedPlan weighted_from(const json& doc) {
    WeightedPlan p;
    p.method = doc.at("method") == "ppmebwr" ? WeightedMethod::ppmebwr : WeightedMethod::ppmeb;
    p.contest = doc.at("contest").get<std::string>();
    p.probability = doc.at("probability").get<double>();
    p.undetectability = doc.at("undetectability").get<double>();
    p.margin = margin_from(doc.at("margin"));
    p.scaled_pair_total = doc.at("scaled_pair_total").get<double>();
    p.allpairs_total = doc.at("allpairs_total").get<Count>();
    p.draws = doc.at("draws").get<std::int64_t>();
    p.expected_sample_size = doc.at("expected_sample_size").get<double>();
    p.full_count = doc.at("full_count").get<bool>();
    for (const auto& u : doc.at("units")) {
        WeightedUnit w;
        w.bounds = bounds_from(u);
        const auto& flip = u.at("units_to_flip");
        w.units_to_flip = flip.is_null() ? std::numeric_limits<double>::infinity() : flip.get<double>();
        w.probability = u.at("probability").get<double>();
        w.inclusion = u.at("inclusion").get<double>();
        w.always_audit = u.at("always_audit").get<bool>();
        p.units.push_back(std::move(w));
    }
    return p;
}

}  // namespace

std::string method_name(const AnyPlan& plan) {
    if (const auto* u = std::get_if<UniformPlan>(&plan))
        return u->method == UniformMethod::estimate ? "uniform-estimate" : "uniform";
    return std::get<WeightedPlan>(plan).method == WeightedMethod::ppmebwr ? "ppmebwr" : "ppmeb";
}

json to_json(const UniformPlan& plan) {
    json doc = {{"schema_version", kSchemaVersion},
                {"kind", "plan"},
                {"method", method_name(AnyPlan{plan})},
                {"contest", plan.contest},
                {"probability", plan.probability},
                {"undetectability", plan.undetectability},
                {"margin", margin_json(plan.margin)},
                {"units_total", plan.units_total},
                {"corrupt_units", plan.corrupt_units},
                {"sample_size", plan.sample_size},
                {"closed_form_size", plan.closed_form_size},
                {"achieved_probability", plan.achieved_probability},
                {"full_count", plan.full_count}};
    if (plan.estimate) {
        const auto& e = *plan.estimate;
        doc["estimate"] = {{"c_zero", e.c_zero},   {"c_avg", e.c_avg}, {"c_lower", e.c_lower},
                           {"c_upper", e.c_upper}, {"s_avg", e.s_avg}, {"s_zero", e.s_zero},
                           {"largest_unit", e.largest_unit}};
    } else {
        doc["estimate"] = nullptr;
    }
    json rows = json::array();
    for (const auto& r : plan.cumulative)
        rows.push_back({{"unit_id", r.unit_id}, {"scaled_bound", r.scaled_bound}, {"cumulative", r.cumulative}});
    doc["cumulative"] = std::move(rows);
    json units = json::array();
    for (const auto& u : plan.units) units.push_back(bounds_json(u));
    doc["units"] = std::move(units);
    return doc;
}

json to_json(const WeightedPlan& plan) {
    json doc = {{"schema_version", kSchemaVersion},
                {"kind", "plan"},
                {"method", method_name(AnyPlan{plan})},
                {"contest", plan.contest},
                {"probability", plan.probability},
                {"undetectability", plan.undetectability},
                {"margin", margin_json(plan.margin)},
                {"scaled_pair_total", plan.scaled_pair_total},
                {"allpairs_total", plan.allpairs_total},
                {"draws", plan.draws},
                {"expected_sample_size", plan.expected_sample_size},
                {"expected_sample_size_rounded", plan.expected_sample_size_rounded()},
                {"full_count", plan.full_count}};
    json units = json::array();
    for (const auto& w : plan.units) {
        json u = bounds_json(w.bounds);
        if (std::isfinite(w.units_to_flip))
            u["units_to_flip"] = w.units_to_flip;
        else
            u["units_to_flip"] = nullptr;
        u["probability"] = w.probability;
        u["inclusion"] = w.inclusion;
        u["always_audit"] = w.always_audit;
        units.push_back(std::move(u));
    }
    doc["units"] = std::move(units);
    return doc;
}

json to_json(const AnyPlan& plan) {
    return std::visit([](const auto& p) { return to_json(p); }, plan);
}

AnyPlan plan_from_json(const json& doc) {
    check_header(doc, "plan");
    try {
        const auto method = doc.at("method").get<std::string>();
        if (method == "uniform" || method == "uniform-estimate") return uniform_from(doc);
        if (method == "ppmeb" || method == "ppmebwr") return weighted_from(doc);
        fail("unknown plan method '" + method + "'");
    } catch (const json::exception& e) {
        fail(std::string("malformed plan JSON: ") + e.what());
    }
}

json to_json(const SelectionRecord& r) {
    json draws = json::array();
    for (const auto& d : r.draws)
        draws.push_back({{"index", d.index}, {"unit_id", d.unit_id}, {"source", std::string(to_string(d.source))}});
    return {{"schema_version", kSchemaVersion},
            {"kind", "selection_record"},
            {"method", r.method},
            {"contest", r.contest},
            {"plan_fingerprint", r.plan_fingerprint},
            {"seed", r.seed},
            {"generator_id", r.generator_id},
            {"rng_outputs_consumed", r.rng_outputs_consumed},
            {"draws", std::move(draws)},
            {"distinct_units", r.distinct_units}};
}

SelectionRecord record_from_json(const json& doc) {
    check_header(doc, "selection_record");
    try {
        SelectionRecord r;
        r.method = doc.at("method").get<std::string>();
        r.contest = doc.at("contest").get<std::string>();
        r.plan_fingerprint = doc.at("plan_fingerprint").get<std::string>();
        r.seed = doc.at("seed").get<std::uint64_t>();
        r.generator_id = doc.at("generator_id").get<std::string>();
        r.rng_outputs_consumed = doc.at("rng_outputs_consumed").get<std::uint64_t>();
        for (const auto& d : doc.at("draws"))
            r.draws.push_back({d.at("index").get<std::int64_t>(), d.at("unit_id").get<std::string>(),
                               draw_source_from_string(d.at("source").get<std::string>())});
        r.distinct_units = doc.at("distinct_units").get<std::vector<std::string>>();
        return r;
    } catch (const json::exception& e) {
        fail(std::string("malformed selection record JSON: ") + e.what());
    }
}

std::string plan_fingerprint(const AnyPlan& plan) {
    const std::string text = to_json(plan).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string dump_document(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace rla
