#include "rla/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rla/bounds.hpp"
#include "rla/election.hpp"
#include "rla/error.hpp"
#include "rla/hypergeometric.hpp"
#include "rla/json_io.hpp"
#include "rla/selection.hpp"
#include "rla/simulation.hpp"
#include "rla/uniform.hpp"
#include "rla/weighted.hpp"

namespace rla::cli {

namespace {

using nlohmann::json;

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail("cannot write '" + path + "'");
    out << text;
    if (!out) fail("error writing '" + path + "'");
}

json read_json(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        fail("'" + path + "' is not valid JSON: " + e.what());
    }
}

struct ContestOptions {
    std::string input;
    std::string config;
    std::string name;
    int seats = 0;
    std::vector<std::string> winners;

    void attach(CLI::App* cmd) {
        cmd->add_option("input", input, "Contest CSV: unit_id,jurisdiction,ballots,<candidates...>")
            ->required();
        cmd->add_option("--config", config, "JSON file with name / seats / winners");
        cmd->add_option("--name", name, "Contest name (default: file stem)");
        cmd->add_option("--seats", seats, "Number of winners");
        cmd->add_option("--winners", winners, "Declared winner ids (comma separated)")->delimiter(',');
    }

    Contest load() const {
        ContestConfig cfg;
        if (!config.empty()) cfg = load_contest_config(config);
        if (!name.empty()) cfg.name = name;
        if (seats != 0) cfg.seats = seats;
        if (!winners.empty()) cfg.winners = winners;
        return load_contest(input, cfg);
    }
};

struct Tunables {
    double probability = 0.99;
    double k = 0.4;
    bool allow_k_1 = false;

    void attach(CLI::App* cmd, bool with_k = true) {
        cmd->add_option("-P,--probability", probability, "Detection probability P, in (0,1)");
        if (with_k) {
            cmd->add_option("-k,--undetectability", k, "Maximum level of undetectability k, in (0,1)");
            cmd->add_flag("--allow-k-1", allow_k_1, "Permit k = 1");
        }
    }

    void validate(bool with_k = true) const {
        require(probability > 0.0 && probability < 1.0, "probability P must be in (0,1)");
        if (!with_k) return;
        if (allow_k_1)
            require(k > 0.0 && k <= 1.0, "undetectability k must be in (0,1]");
        else
            require(k > 0.0 && k < 1.0, "undetectability k must be in (0,1) (use --allow-k-1 for k = 1)");
    }
};

// ---- bounds ---------------------------------------------------------------

int cmd_bounds(const ContestOptions& co, std::optional<double> legacy_s, bool figure3, bool as_json,
               const std::string& out_path, std::ostream& out) {
    const auto contest = co.load();
    std::ostringstream os;

    if (figure3) {
        require(legacy_s.has_value(), "--figure3 needs --legacy-s <rate>");
        os << "unit_id,loser_share,scaled_pair_bound,scaled_allpairs_bound,legacy_2sv\n";
        for (const auto& r : figure3_rows(contest, *legacy_s))
            os << r.unit_id << ',' << fixed(r.loser_share, 4) << ',' << fixed(r.scaled_pair, 1) << ','
               << fixed(r.scaled_allpairs, 1) << ',' << fixed(r.legacy_2sv, 1) << '\n';
    } else if (as_json) {
        const auto set = bound_set(contest, 0.4);
        json units = json::array();
        for (const auto& ub : set.units) {
            json u = {{"unit_id", ub.unit_id}, {"jurisdiction", ub.jurisdiction}, {"ballots", ub.ballots},
                      {"pair_bound", ub.pair},  {"allpairs_bound", ub.allpairs}};
            if (legacy_s) u["legacy_2sv"] = legacy_2sv_bound(contest.unit(ub.unit_id), *legacy_s);
            units.push_back(std::move(u));
        }
        json doc = {{"schema_version", kSchemaVersion},
                    {"kind", "bounds"},
                    {"contest", contest.name()},
                    {"winner_id", set.margin.winner_id},
                    {"loser_id", set.margin.loser_id},
                    {"margin_votes", set.margin.margin_votes},
                    {"pair_total", set.pair_total},
                    {"allpairs_total", set.allpairs_total},
                    {"units", std::move(units)}};
        os << dump_document(doc);
    } else {
        const auto set = bound_set(contest, 0.4);
        os << "unit_id,ballots";
        for (const auto& c : contest.candidates()) os << ',' << c.id;
        os << ",pair_bound,allpairs_bound";
        if (legacy_s) os << ",legacy_2sv";
        os << '\n';
        os << "Totals," << contest.total_ballots();
        for (std::size_t j = 0; j < contest.candidates().size(); ++j) os << ',' << contest.total_votes(j);
        os << ',' << set.pair_total << ',' << set.allpairs_total;
        if (legacy_s) {
            double total = 0;
            for (const auto& u : contest.units()) total += legacy_2sv_bound(u, *legacy_s);
            os << ',' << fixed(total, 1);
        }
        os << '\n';
        for (std::size_t i = 0; i < contest.unit_count(); ++i) {
            const auto& u = contest.units()[i];
            os << u.unit_id << ',' << u.ballots;
            for (auto v : u.votes) os << ',' << v;
            os << ',' << set.units[i].pair << ',' << set.units[i].allpairs;
            if (legacy_s) os << ',' << fixed(legacy_2sv_bound(u, *legacy_s), 1);
            os << '\n';
        }
    }

    if (!out_path.empty())
        write_file(out_path, os.str());
    else
        out << os.str();
    return kExitOk;
}

// ---- plan -----------------------------------------------------------------

void print_header(std::ostream& os, const std::string& title, const std::string& contest, double p,
                  double k, std::int64_t n, const MarginPair& m) {
    os << title << "\n";
    os << "contest " << contest << "  P = " << p << "  k = " << k << "  N = " << n << "\n";
    os << "just-winning/just-losing pair " << m.winner_id << " - " << m.loser_id << "  M = " << m.margin_votes
       << " (" << fixed(100.0 * m.margin_fraction, 2) << "% of ballots)\n\n";
}

void print_uniform(std::ostream& os, const UniformPlan& plan, const EstimateBracket& est) {
    print_header(os, "Uniform sampling method", plan.contest, plan.probability, plan.undetectability,
                 plan.units_total, plan.margin);
    const bool detailed = plan.method == UniformMethod::detailed;
    os << std::left;
    os << std::setw(22) << "" << std::setw(26) << "Uniform Sampling Method" << "Uniform Estimation Method\n";
    os << std::setw(22) << "Sample Size"
       << std::setw(26) << (detailed ? (plan.full_count ? std::string("full count") : std::to_string(plan.sample_size)) : "-")
       << est.s_avg << " ~ S <= " << est.s_zero << "\n";
    os << std::setw(22) << "min #corrupt AUs"
       << std::setw(26) << (detailed ? std::to_string(plan.corrupt_units) : "-")
       << est.c_lower << " <= C ~ " << est.c_upper << "  (C_0 = " << fixed(est.c_zero, 2)
       << ", C_avg = " << fixed(est.c_avg, 2) << ")\n";
    os << std::setw(22) << "closed-form S" << plan.closed_form_size << "\n";
    os << std::setw(22) << "detection prob." << fixed(plan.achieved_probability, 2) << "\n\n";

    os << std::setw(12) << "Precinct" << std::right << std::setw(10) << "k*u_i" << std::setw(28)
       << "cumulative margin error" << "\n";
    for (const auto& r : plan.cumulative)
        os << std::left << std::setw(12) << r.unit_id << std::right << std::setw(10) << fixed(r.scaled_bound, 1)
           << std::setw(28) << fixed(r.cumulative, 1) << "\n";
    os << std::left;
    if (plan.full_count) os << "\nmargin cannot be reversed by corrupting units at rate k; only a full hand count is risk-limiting\n";
}

void print_weighted(std::ostream& os, const WeightedPlan& plan) {
    const bool wr = plan.method == WeightedMethod::ppmebwr;
    print_header(os, wr ? "Improved PPMEBWR approach" : "Improved PPMEB approach", plan.contest,
                 plan.probability, plan.undetectability, static_cast<std::int64_t>(plan.units.size()),
                 plan.margin);
    os << std::left << std::setw(24) << "Expected Sample Size" << plan.expected_sample_size_rounded() << "  ("
       << fixed(plan.expected_sample_size, 2) << ")\n";
    if (wr) {
        os << std::setw(24) << "#Draws" << (plan.full_count ? std::string("full count") : std::to_string(plan.draws))
           << "\n";
        os << std::setw(24) << "E_wr" << fixed(plan.scaled_pair_total, 1) << "\n";
    }
    os << std::setw(24) << "E_a" << plan.allpairs_total << "\n\n";
    os << std::setw(12) << "Precinct" << std::right;
    if (wr)
        os << std::setw(10) << "p_i" << std::setw(14) << "1-(1-p)^t" << "\n";
    else
        os << std::setw(10) << "c_i" << std::setw(10) << "p_i" << "\n";
    for (const auto& u : plan.units) {
        os << std::left << std::setw(12) << u.bounds.unit_id << std::right;
        if (wr) {
            os << std::setw(10) << fixed(u.probability, 2) << std::setw(14) << fixed(u.inclusion, 2) << "\n";
        } else {
            const std::string c = std::isfinite(u.units_to_flip) ? fixed(u.units_to_flip, 2) : "inf";
            os << std::setw(10) << c << std::setw(10) << fixed(u.probability, 2) << "\n";
        }
    }
    os << std::left;
    if (plan.full_count) os << "\nM >= E_wr: only a full hand count is risk-limiting\n";
}

int cmd_plan(const ContestOptions& co, const Tunables& tn, const std::string& method, std::optional<Count> b0,
             bool as_json, const std::string& out_path, std::ostream& out) {
    tn.validate();
    const auto contest = co.load();
    AnyPlan plan;
    if (method == "uniform")
        plan = plan_uniform(contest, tn.probability, tn.k, UniformMethod::detailed, b0);
    else if (method == "uniform-estimate")
        plan = plan_uniform(contest, tn.probability, tn.k, UniformMethod::estimate, b0);
    else if (method == "ppmeb")
        plan = ppmeb_plan(contest, tn.probability, tn.k);
    else if (method == "ppmebwr")
        plan = ppmebwr_plan(contest, tn.probability, tn.k);
    else
        fail("unknown method '" + method + "' (uniform, uniform-estimate, ppmeb, ppmebwr)");

    const auto doc = to_json(plan);
    if (!out_path.empty()) write_file(out_path, dump_document(doc));
    if (as_json) {
        out << dump_document(doc);
    } else if (const auto* u = std::get_if<UniformPlan>(&plan)) {
        const auto est = u->estimate ? *u->estimate
                                     : estimate_s_bracket(u->units_total, estimate_c_bracket(contest, tn.k, b0),
                                                          tn.probability);
        print_uniform(out, *u, est);
    } else {
        print_weighted(out, std::get<WeightedPlan>(plan));
    }
    const bool full = std::visit([](const auto& p) { return p.full_count; }, plan);
    return full ? kExitInfeasible : kExitOk;
}

// ---- draw -----------------------------------------------------------------

std::string transcript(const SelectionRecord& r) {
    std::ostringstream os;
    os << "selection record for contest " << r.contest << " (" << r.method << ")\n";
    os << "plan fingerprint " << r.plan_fingerprint << "\n";
    os << "generator " << r.generator_id << "  seed " << r.seed << "  outputs consumed " << r.rng_outputs_consumed
       << "\n";
    os << std::left << std::setw(8) << "draw" << std::setw(14) << "unit_id" << "source\n";
    for (const auto& d : r.draws)
        os << std::setw(8) << d.index << std::setw(14) << d.unit_id << to_string(d.source) << "\n";
    os << "distinct units (" << r.distinct_units.size() << "):";
    for (const auto& id : r.distinct_units) os << ' ' << id;
    os << "\n";
    return os.str();
}

SelectionRecord make_selection(const AnyPlan& plan, std::uint64_t seed, const std::vector<std::string>& extra) {
    return apply_supplements(draw(plan, seed), plan_units(plan), extra);
}

int cmd_draw(const std::string& plan_path, std::optional<std::uint64_t> seed, const std::string& dice,
             const std::vector<std::string>& discretionary, const std::string& verify, bool as_json,
             const std::string& out_path, std::ostream& out) {
    const auto plan = plan_from_json(read_json(plan_path));

    if (!verify.empty()) {
        const std::string recorded = read_file(verify);
        const auto record = record_from_json(json::parse(recorded));
        require(record.generator_id == AuditRng::kGeneratorId,
                "record uses generator '" + record.generator_id + "', this build provides '" +
                    std::string(AuditRng::kGeneratorId) + "'");
        require(record.plan_fingerprint == plan_fingerprint(plan), "record was made from a different plan");
        std::vector<std::string> extra;
        for (const auto& d : record.draws)
            if (d.source == DrawSource::discretionary) extra.push_back(d.unit_id);
        const auto replay = dump_document(to_json(make_selection(plan, record.seed, extra)));
        if (replay != recorded) {
            out << "replay differs from " << verify << "\n";
            return kExitInvalid;
        }
        out << "replay matches " << verify << " byte for byte\n";
        return kExitOk;
    }

    require(seed.has_value() != !dice.empty(), "give exactly one of --seed or --dice");
    const std::uint64_t s = seed ? *seed : seed_from_dice(dice);
    const auto record = make_selection(plan, s, discretionary);
    const auto text = dump_document(to_json(record));
    if (!out_path.empty()) write_file(out_path, text);
    out << (as_json ? text : transcript(record));
    return kExitOk;
}

// ---- check ----------------------------------------------------------------

int cmd_check(std::int64_t n, std::int64_t c, std::int64_t s, double p, bool as_json, std::ostream& out) {
    require(p > 0.0 && p < 1.0, "probability P must be in (0,1)");
    const double prob = check_probability(n, c, s);
    const bool meets = prob >= p || (1.0 - prob) <= (1.0 - p) * (1.0 + kTieTolerance);
    const auto exact = exact_sample_size(n, c, p);
    if (as_json) {
        out << dump_document({{"schema_version", kSchemaVersion},
                              {"kind", "check"},
                              {"units", n},
                              {"corrupt_units", c},
                              {"sample_size", s},
                              {"detection_probability", prob},
                              {"probability", p},
                              {"meets_target", meets},
                              {"exact_sample_size", exact}});
        return kExitOk;
    }
    out << "N = " << n << ", C = " << c << ", S = " << s << "\n";
    out << "detection probability: " << fixed(prob, 6) << "\n";
    out << "meets P=" << p << ": " << (meets ? "yes" : "no") << "\n";
    out << "smallest S meeting P: " << exact << "\n";
    return kExitOk;
}

// ---- simulate -------------------------------------------------------------

int cmd_simulate(const std::string& plan_path, const std::string& attack_name, std::int64_t trials,
                 std::uint64_t seed, unsigned threads, bool as_json, std::ostream& out) {
    const auto plan = plan_from_json(read_json(plan_path));
    const auto bounds = bounds_of(plan);
    AttackScenario attack;
    if (attack_name == "greedy")
        attack = minimal_attack(bounds);
    else if (attack_name == "random")
        attack = random_subset_attack(bounds, derive_seed(seed, ~std::uint64_t{0}));
    else
        fail("unknown attack '" + attack_name + "' (greedy, random)");

    const auto r = run_detection_trials(plan, attack, trials, seed, threads);
    if (as_json) {
        out << dump_document({{"schema_version", kSchemaVersion},
                              {"kind", "simulation_report"},
                              {"sampling_method", r.sampling_method},
                              {"attack_strategy", r.attack_strategy},
                              {"corrupted_units", attack.corrupted_units},
                              {"total_planted_error", attack.total_planted_error},
                              {"seed", r.seed},
                              {"trials", r.trials},
                              {"detections", r.detections},
                              {"detection_rate", r.detection_rate},
                              {"target_probability", r.target_probability},
                              {"sigma", r.sigma},
                              {"confidence_interval", {r.ci_low, r.ci_high}},
                              {"mean_sample_size", r.mean_sample_size},
                              {"sd_sample_size", r.sd_sample_size}});
        return kExitOk;
    }
    out << "method " << r.sampling_method << "  attack " << r.attack_strategy << " ("
        << attack.corrupted_units.size() << " units, " << fixed(attack.total_planted_error, 1)
        << " planted vs M = " << attack.margin << ")\n";
    out << "trials " << r.trials << "  seed " << r.seed << "\n";
    out << "detection rate " << fixed(r.detection_rate, 4) << "  95% CI [" << fixed(r.ci_low, 4) << ", "
        << fixed(r.ci_high, 4) << "]  target P = " << r.target_probability << "\n";
    out << "sample size mean " << fixed(r.mean_sample_size, 2) << "  sd " << fixed(r.sd_sample_size, 2) << "\n";
    return kExitOk;
}

// ---- compare --------------------------------------------------------------

int cmd_compare(double rate, std::int64_t n, Count ballots, const std::vector<double>& margins,
                const Tunables& tn, const std::string& out_path, std::ostream& out) {
    tn.validate();
    require(!margins.empty(), "--margins needs at least one value");
    std::ostringstream os;
    os << "margin_percent,margin_votes,corrupt_units,fixed_sample_size,fixed_probability,"
          "risk_limiting_size,risk_limiting_probability\n";
    for (const auto& r : fixed_rate_curve(n, ballots, margins, rate, tn.probability, tn.k))
        os << r.margin_percent << ',' << r.margin_votes << ',' << r.corrupt_units << ',' << r.fixed_sample_size
           << ',' << fixed(r.fixed_probability, 4) << ',' << r.risk_limiting_size << ','
           << fixed(r.risk_limiting_probability, 4) << '\n';
    if (!out_path.empty())
        write_file(out_path, os.str());
    else
        out << os.str();
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Risk-limiting post-election audit sample sizes, bounds and selections", "rla"};
    app.require_subcommand(1);

    // bounds
    auto* bounds = app.add_subcommand("bounds", "Per-unit upper margin error bounds as CSV");
    ContestOptions bounds_co;
    bounds_co.attach(bounds);
    std::optional<double> legacy_s;
    bool figure3 = false;
    bool bounds_json = false;
    std::string bounds_out;
    bounds->add_option("--legacy-s", legacy_s, "Add the legacy 2sv column for rate s");
    bounds->add_flag("--figure3", figure3, "Emit loser share and 2s-scaled bounds per unit");
    bounds->add_flag("--json", bounds_json, "Emit JSON instead of CSV");
    bounds->add_option("--out", bounds_out, "Write to file instead of stdout");

    // plan
    auto* plan = app.add_subcommand("plan", "Sample size and selection plan");
    ContestOptions plan_co;
    plan_co.attach(plan);
    Tunables plan_tn;
    plan_tn.attach(plan);
    std::string method = "uniform";
    std::optional<Count> b0;
    bool plan_json = false;
    std::string plan_out;
    plan->add_option("--method", method, "uniform | uniform-estimate | ppmeb | ppmebwr");
    plan->add_option("--b0", b0, "Largest unit size for the estimate bracket");
    plan->add_flag("--json", plan_json, "Print the plan JSON instead of the table");
    plan->add_option("--out", plan_out, "Write the plan JSON to this file");

    // draw
    auto* drw = app.add_subcommand("draw", "Draw a reproducible sample from a plan");
    std::string draw_plan;
    std::optional<std::uint64_t> draw_seed;
    std::string dice;
    std::vector<std::string> discretionary;
    std::string verify;
    bool draw_json = false;
    std::string draw_out;
    drw->add_option("--plan", draw_plan, "Plan JSON written by `plan`")->required();
    drw->add_option("--seed", draw_seed, "64-bit unsigned seed");
    drw->add_option("--dice", dice, "Seed from rolled decimal digits");
    drw->add_option("--discretionary", discretionary, "Unit ids added at a loser's discretion")->delimiter(',');
    drw->add_option("--verify", verify, "Replay a saved record and compare byte for byte");
    drw->add_flag("--json", draw_json, "Print the record JSON instead of the transcript");
    drw->add_option("--out", draw_out, "Write the record JSON to this file");

    // check
    auto* chk = app.add_subcommand("check", "Detection probability of a uniform sample");
    std::int64_t n = 0, c = 0, s = 0;
    double check_p = 0.99;
    bool check_json = false;
    chk->add_option("-N,--units", n, "Number of audit units")->required();
    chk->add_option("-C,--corrupt", c, "Number of corrupt units")->required();
    chk->add_option("-S,--sample", s, "Sample size")->required();
    chk->add_option("-P,--probability", check_p, "Target probability");
    chk->add_flag("--json", check_json, "Emit JSON");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo detection rate of a plan");
    std::string sim_plan;
    std::string attack = "greedy";
    std::int64_t trials = 100000;
    std::uint64_t sim_seed = 1;
    unsigned threads = 0;
    bool sim_json = false;
    sim->add_option("--plan", sim_plan, "Plan JSON written by `plan`")->required();
    sim->add_option("--attack", attack, "greedy | random");
    sim->add_option("--trials", trials, "Number of trials");
    sim->add_option("--seed", sim_seed, "64-bit unsigned seed");
    sim->add_option("--threads", threads, "Worker threads (0 = all cores)");
    sim->add_flag("--json", sim_json, "Emit JSON");

    // compare
    auto* cmp = app.add_subcommand("compare", "Fixed-rate vs risk-limiting detection on a synthetic contest");
    double rate = 0.03;
    std::int64_t cmp_n = 500;
    Count cmp_ballots = 150000;
    std::vector<double> margins{0.1, 0.2, 0.5, 1, 2, 5, 10, 15, 20, 30};
    Tunables cmp_tn;
    cmp_tn.attach(cmp);
    std::string cmp_out;
    cmp->add_option("--fixed-rate", rate, "Fixed audit rate");
    cmp->add_option("--n", cmp_n, "Number of units");
    cmp->add_option("--ballots", cmp_ballots, "Total ballots");
    cmp->add_option("--margins", margins, "Margins in percent of ballots")->delimiter(',');
    cmp->add_option("--out", cmp_out, "Write CSV to file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (*bounds) return cmd_bounds(bounds_co, legacy_s, figure3, bounds_json, bounds_out, out);
        if (*plan) return cmd_plan(plan_co, plan_tn, method, b0, plan_json, plan_out, out);
        if (*drw) return cmd_draw(draw_plan, draw_seed, dice, discretionary, verify, draw_json, draw_out, out);
        if (*chk) return cmd_check(n, c, s, check_p, check_json, out);
        if (*sim) return cmd_simulate(sim_plan, attack, trials, sim_seed, threads, sim_json, out);
        if (*cmp) return cmd_compare(rate, cmp_n, cmp_ballots, margins, cmp_tn, cmp_out, out);
    } catch (const AuditError& e) {
        err << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::infeasible ? kExitInfeasible : kExitInvalid;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}

}  // namespace rla::cli
