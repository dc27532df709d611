// truetop: command-line driver for graph building, ranking, attack
// evaluation and theory checks.

#include "truetop/attack.hpp"
#include "truetop/eval.hpp"
#include "truetop/graph.hpp"
#include "truetop/ingest.hpp"
#include "truetop/rank.hpp"
#include "truetop/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace truetop;
using nlohmann::json;

namespace {

enum ExitCode { exit_ok = 0, exit_io = 1, exit_validation = 2, exit_seeding = 3, exit_theory = 4 };

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    auto out = open_output(path);
    out << text;
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

void require_file(const fs::path& path, const char* what) {
    if (!fs::exists(path)) {
        throw IoError(std::string(what) + " not found: " + path.string());
    }
}

// --- generate ---------------------------------------------------------------

struct GenerateOptions {
    std::size_t nodes = 1000;
    double gamma = 2.5;
    double mean_out_degree = 5.0;
    std::string interactions = "geometric:15";
    double reciprocity = 0.3;
    double verified_fraction = 0.05;
    std::int64_t period_start = 0;
    std::int64_t period_end = 90 * 86400;
    int epochs = 90;
    std::uint64_t rng_seed = 1;
    fs::path log = "interactions.csv";
    fs::path attrs = "users.csv";
};

void cmd_generate(const GenerateOptions& o) {
    SyntheticSpec spec;
    spec.node_count = o.nodes;
    spec.degree_exponent = o.gamma;
    spec.mean_out_degree = o.mean_out_degree;
    spec.interactions_per_edge = InteractionCountDistribution::parse(o.interactions);
    spec.reciprocity = o.reciprocity;
    spec.verified_fraction = o.verified_fraction;
    spec.period = {o.period_start, o.period_end, o.epochs};
    spec.rng_seed = o.rng_seed;
    spec.validate();
    auto data = generate_powerlaw_graph(spec);
    {
        auto out = open_output(o.log);
        write_interaction_log(out, data.records);
    }
    {
        auto out = open_output(o.attrs);
        write_user_attributes(out, data.attributes);
    }
    std::cout << "records " << data.records.size() << "\nusers " << data.attributes.size() << '\n';
}

// --- build ------------------------------------------------------------------

struct BuildOptions {
    fs::path log;
    fs::path attrs;
    std::string model = "sum";
    int epochs = 90;
    std::int64_t period_start = 0;
    std::int64_t period_end = 90 * 86400;
    fs::path out = "graph.tg";
    bool full_graph = false;
    fs::path stats;
};

void cmd_build(const BuildOptions& o) {
    if (o.epochs < 1) {
        throw ValidationError("--epochs must be >= 1");
    }
    WeightModel model = o.model == "entropy" ? WeightModel::entropy(o.epochs) : WeightModel::parse(o.model);
    model.validate();
    TargetPeriod period{o.period_start, o.period_end, o.epochs};
    period.validate();
    require_file(o.log, "interaction log");
    require_file(o.attrs, "attribute file");

    auto parsed = read_interaction_log(o.log, period);
    for (const auto& w : parsed.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    auto attrs = read_user_attributes(o.attrs);
    auto graph = build_graph(parsed.records, attrs, model, period);
    auto gscc = extract_gscc(graph);

    const InteractionGraph& kept = o.full_graph ? graph : gscc.graph;
    write_snapshot(o.out, kept);

    json stats;
    stats["records"] = parsed.records.size();
    stats["dropped_malformed"] = parsed.dropped.malformed;
    stats["dropped_out_of_period"] = parsed.dropped.out_of_period;
    stats["dropped_self_interaction"] = parsed.dropped.self_interaction;
    stats["model"] = model.to_string();
    stats["users"] = graph.user_count();
    stats["edges"] = graph.edge_count();
    stats["verified"] = graph.verified_users().size();
    stats["total_weight"] = graph.total_weight();
    stats["scc_count"] = gscc.component_count;
    stats["gscc_users"] = gscc.largest_size;
    stats["gscc_edges"] = gscc.graph.edge_count();
    stats["gscc_share"] = graph.user_count() ? static_cast<double>(gscc.largest_size) / graph.user_count() : 0.0;
    stats["second_scc_users"] = gscc.second_size;
    stats["gscc_total_weight"] = gscc.graph.total_weight();
    stats["snapshot"] = o.full_graph ? "full" : "gscc";
    std::cout << stats.dump(2) << '\n';
    if (!o.stats.empty()) {
        write_text(o.stats, stats.dump(2) + "\n");
    }
}

// --- rank -------------------------------------------------------------------

struct RankOptions {
    fs::path graph;
    std::size_t k = 100;
    double epsilon = 0.0;
    std::size_t max_iterations = 1000;
    std::size_t seeds = 100;
    std::string seed_method = "basic";
    double eta = default_eta;
    std::uint64_t rng_seed = 1;
    fs::path out = "ranking.csv";
    fs::path trace = "trace.csv";
    std::size_t limit = 0;
};

void cmd_rank(const RankOptions& o) {
    require_file(o.graph, "graph snapshot");
    auto g = read_snapshot(o.graph);
    SeedConfig sc;
    sc.count = o.seeds;
    sc.method = parse_seed_method(o.seed_method);
    sc.rng_seed = o.rng_seed;
    sc.eta = o.eta;
    auto seeds = select_seeds(g, sc);

    TerminationConfig term;
    term.k = o.k;
    term.epsilon = o.epsilon;
    term.max_iterations = o.max_iterations;
    term.eta = o.eta;
    if (o.k > g.user_count()) {
        std::cerr << "warning: K=" << o.k << " exceeds " << g.user_count() << " users; clipped\n";
    }
    auto result = truetop_rank(g, seeds, term);
    {
        auto out = open_output(o.out);
        write_ranked_csv(out, g, result.ranking, o.limit > 0 ? o.limit : result.top.size());
    }
    {
        auto out = open_output(o.trace);
        write_trace_csv(out, result.trace);
    }
    std::cerr << (result.stabilized ? "stabilized" : "not_stabilized") << " after " << result.iterations
              << " iterations\n";
}

// --- attack-eval ------------------------------------------------------------

struct AttackOptions {
    fs::path graph;
    fs::path scenario;
    fs::path out_dir = "reports";
    std::size_t k = 100;
    std::vector<double> epsilons{0.0};
    std::size_t max_iterations = 1000;
    std::size_t seeds = 100;
    std::string seed_method = "basic";
    std::size_t wec_max_iterations = 2000;
    double nu = default_nu;
    std::size_t jobs = 1;
    std::uint64_t rng_seed = 0;
    bool rng_seed_given = false;
    bool no_baselines = false;
};

int cmd_attack_eval(const AttackOptions& o) {
    require_file(o.graph, "graph snapshot");
    require_file(o.scenario, "scenario file");
    auto desc = ScenarioDescriptor::read(o.scenario);
    if (o.rng_seed_given) {
        desc.rng_seed = o.rng_seed;
    }
    auto honest = extract_gscc(read_snapshot(o.graph)).graph;
    if (desc.strategy == AttackStrategy::seed_attack && desc.known_seeds.empty()) {
        throw ValidationError("seed_attack scenarios must list known_seeds (user ids)");
    }
    auto truth = ground_truth(honest, o.k);
    if (!truth.converged) {
        std::cerr << "warning: ground truth did not converge (periodic graph?)\n";
    }

    BaselineOptions opts;
    opts.k = o.k;
    opts.seeds.count = o.seeds;
    opts.seeds.method = parse_seed_method(o.seed_method);
    opts.epsilons = o.epsilons;
    opts.max_iterations = o.max_iterations;
    opts.wec_max_iterations = o.wec_max_iterations;
    opts.wec_nu = o.nu;
    opts.kred_days = desc.kred_days;
    opts.run_wec = opts.run_pagerank = opts.run_kred = !o.no_baselines;

    auto trials = run_trials(honest, truth, desc, opts, o.jobs);
    fs::create_directories(o.out_dir);
    const bool several = o.epsilons.size() > 1;
    std::size_t failed = 0;
    for (const auto& t : trials) {
        if (!t.error.empty()) {
            ++failed;
            std::cerr << "trial " << t.trial << " failed: " << t.error << '\n';
            continue;
        }
        for (const auto& m : t.methods) {
            auto name = "report_" + method_label(m, several) + "_" + std::to_string(t.trial) + ".json";
            write_text(o.out_dir / name, method_report_json(m, t, desc, o.k).dump(2) + "\n");
        }
    }
    auto agg = aggregate_json(trials, desc, o.k);
    write_text(o.out_dir / "aggregate.json", agg.dump(2) + "\n");
    for (auto& [label, m] : agg["methods"].items()) {
        if (m.contains("mean_sybil_count")) {
            std::cout << label << ": mean #sybil " << m["mean_sybil_count"].get<double>() << ", mean type-I "
                      << m["mean_type1"].get<double>() << ", mean type-II " << m["mean_type2"].get<double>() << '\n';
        }
    }
    if (!trials.empty() && failed == trials.size()) {
        std::cerr << "all trials failed\n";
        return exit_validation;
    }
    return exit_ok;
}

// --- theory -----------------------------------------------------------------

struct TheoryOptions {
    fs::path graph;
    std::size_t nodes = 2000;
    std::string interactions = "geometric:15";
    std::size_t k = 10;
    std::size_t seeds = 10;
    std::size_t strength = 100;
    std::size_t sybils = default_sybil_count;
    std::uint64_t rng_seed = 1;
    fs::path out;
};

struct CheckLine {
    std::string name;
    std::string status;
    std::string detail;
};

int cmd_theory(const TheoryOptions& o) {
    InteractionGraph base;
    if (!o.graph.empty()) {
        require_file(o.graph, "graph snapshot");
        base = read_snapshot(o.graph);
    } else {
        SyntheticSpec spec;
        spec.node_count = o.nodes;
        spec.interactions_per_edge = InteractionCountDistribution::parse(o.interactions);
        spec.rng_seed = o.rng_seed;
        base = build_synthetic_graph(spec, WeightModel::sum());
    }
    auto honest = extract_gscc(base).graph;
    NormalizedMatrix w(honest);
    SeedConfig sc;
    sc.count = std::min(o.seeds, honest.verified_users().size());
    sc.rng_seed = o.rng_seed;
    auto seeds = select_seeds(honest, sc);

    std::vector<CheckLine> lines;
    json doc = json::object();
    auto record = [&](std::string name, bool skipped, bool passed, std::string detail, json data) {
        lines.push_back({name, skipped ? "SKIP" : (passed ? "PASS" : "FAIL"), std::move(detail)});
        data["status"] = lines.back().status;
        doc[name] = std::move(data);
    };

    {
        bool all = true;
        json grid = json::array();
        double worst = 0.0;
        for (double a : {1e-3, 1e-2, 1e-1}) {
            for (double b : {1e-3, 1e-2, 1e-1}) {
                auto r = two_region_check(a, b);
                all = all && r.passed;
                worst = std::max(worst, r.max_error);
                grid.push_back({{"alpha", a}, {"beta", b}, {"max_error", r.max_error}, {"monotone", r.monotone},
                                {"limit_error", r.limit_error}, {"passed", r.passed}});
            }
        }
        std::ostringstream d;
        d << "max |simulated - closed form| = " << worst << " (tolerance 1e-9)";
        record("two_region", false, all, d.str(), {{"grid", grid}});
    }
    {
        auto r = error_decay_check(w, seeds.initial_credits);
        std::ostringstream d;
        d << "lambda^ = " << r.lambda << ", worst relative error / lambda^t = " << r.worst_ratio << " (limit 1.1)";
        record("error_decay", r.checked == 0, r.passed, d.str(),
               {{"lambda", r.lambda}, {"worst_ratio", r.worst_ratio}, {"checked", r.checked}});
    }
    auto truth = ground_truth(honest, o.k);
    {
        auto fit = fit_power_law(truth.pi);
        auto gaps = relative_gap_curve(truth.pi);
        bool passed = !fit.unreliable && fit.gamma > 1.5 && fit.gamma < 3.5 && std::abs(gaps.slope + 1.0) <= 0.25;
        std::ostringstream d;
        d << "gamma = " << fit.gamma << " (expected in (1.5, 3.5)), gap slope = " << gaps.slope
          << " (expected -1 +- 0.25)";
        record("power_law_tail", false, passed, d.str(),
               {{"gamma", fit.gamma}, {"tail_size", fit.tail_size}, {"ccdf_r2", fit.ccdf_r2},
                {"gap_slope", gaps.slope}, {"gap_points", gaps.points}});
    }
    {
        auto r = topk_stability_check(w, honest.lexical_rank(), seeds.initial_credits, o.k);
        std::ostringstream d;
        if (r.skipped) {
            d << r.skip_reason;
        } else {
            d << "predicted t = " << r.predicted_t << ", observed stable from t = " << r.observed_t
              << ", violations = " << r.violations;
        }
        record("topk_stability", r.skipped, r.passed, d.str(),
               {{"lambda", r.lambda}, {"gap_k", r.gap_k}, {"predicted_t", r.predicted_t},
                {"observed_t", r.observed_t}, {"violations", r.violations}, {"skip_reason", r.skip_reason}});
    }
    {
        SybilRegion region;
        region.sybil_count = o.sybils;
        AttackScenario scenario;
        scenario.strength = o.strength;
        scenario.rng_seed = o.rng_seed;
        BaselineOptions opts;
        opts.k = o.k;
        opts.seeds = sc;
        opts.run_wec = opts.run_pagerank = opts.run_kred = false;
        auto trial = compare_baselines(honest, truth, region, scenario, opts);
        const auto* m = trial.find("truetop");
        double bound = sybil_topk_bound(trial.alpha, m->iterations, o.k);
        std::ostringstream d;
        d << "#sybil = " << m->sybil_count << " at t = " << m->iterations << ", alpha = " << trial.alpha
          << ", bound = " << bound;
        record("sybil_bound", false, static_cast<double>(m->sybil_count) <= bound, d.str(),
               {{"sybil_count", m->sybil_count}, {"iterations", m->iterations}, {"alpha", trial.alpha},
                {"bound", bound}});
    }

    bool ok = true;
    for (const auto& l : lines) {
        std::cout << l.status << ' ' << l.name << ": " << l.detail << '\n';
        ok = ok && l.status != "FAIL";
    }
    if (!o.out.empty()) {
        write_text(o.out, doc.dump(2) + "\n");
    }
    return ok ? exit_ok : exit_theory;
}

template <class F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const SeedingError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_seeding;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sybil-resilient top-K influence ranking"};
    app.set_config("--config", "", "TOML/INI file of flag values; command-line flags take precedence");
    app.require_subcommand(1);

    GenerateOptions gen;
    auto* g = app.add_subcommand("generate", "Write a synthetic power-law interaction log and attribute file");
    g->add_option("--nodes", gen.nodes, "Number of users")->check(CLI::PositiveNumber);
    g->add_option("--gamma", gen.gamma, "In-degree tail exponent (> 2)");
    g->add_option("--mean-out-degree", gen.mean_out_degree, "Attachment edges per new user");
    g->add_option("--interactions", gen.interactions, "Interactions per edge: const:<k> or geometric:<mean>");
    g->add_option("--reciprocity", gen.reciprocity, "Probability of a reply edge");
    g->add_option("--verified-fraction", gen.verified_fraction, "Share of users flagged verified");
    g->add_option("--period-start", gen.period_start, "Start of the target period (s)");
    g->add_option("--period-end", gen.period_end, "End of the target period (s, exclusive)");
    g->add_option("--epochs", gen.epochs, "Epoch count mu");
    g->add_option("--rng-seed", gen.rng_seed, "Root random seed");
    g->add_option("--log", gen.log, "Output interaction log");
    g->add_option("--attrs", gen.attrs, "Output user attribute file");

    BuildOptions build;
    auto* b = app.add_subcommand("build", "Build a weighted interaction graph snapshot from a log");
    b->add_option("--log", build.log, "Interaction log (source,target,kind,timestamp)")->required();
    b->add_option("--attrs", build.attrs, "User attributes (user_id,verified)")->required();
    b->add_option("--model", build.model, "Weight model: sum or entropy");
    b->add_option("--epochs", build.epochs, "Epoch count mu");
    b->add_option("--period-start", build.period_start, "Start of the target period (s)");
    b->add_option("--period-end", build.period_end, "End of the target period (s, exclusive)");
    b->add_option("--out", build.out, "Snapshot path");
    b->add_flag("--full-graph", build.full_graph, "Keep every user instead of the GSCC");
    b->add_option("--stats", build.stats, "Also write the stats summary here");

    RankOptions rank;
    auto* r = app.add_subcommand("rank", "Rank the top-K users with early-terminated credit distribution");
    r->add_option("--graph", rank.graph, "Graph snapshot")->required();
    r->add_option("--k", rank.k, "K")->check(CLI::PositiveNumber);
    r->add_option("--epsilon", rank.epsilon, "Ranking-distance tolerance")->check(CLI::NonNegativeNumber);
    r->add_option("--max-iterations", rank.max_iterations, "Loop bound T");
    r->add_option("--seeds", rank.seeds, "Seed count s");
    r->add_option("--seed-method", rank.seed_method, "basic or reverse_wec");
    r->add_option("--eta", rank.eta, "Reverse distribution threshold");
    r->add_option("--rng-seed", rank.rng_seed, "Root random seed");
    r->add_option("--out", rank.out, "Ranked CSV");
    r->add_option("--trace", rank.trace, "Trace CSV");
    r->add_option("--limit", rank.limit, "Rows in the ranked CSV (default K)");

    AttackOptions attack;
    auto* a = app.add_subcommand("attack-eval", "Run attack trials and score every method");
    a->add_option("--graph", attack.graph, "Honest graph snapshot")->required();
    a->add_option("--scenario", attack.scenario, "Scenario JSON")->required();
    a->add_option("--out-dir", attack.out_dir, "Report directory");
    a->add_option("--k", attack.k, "K")->check(CLI::PositiveNumber);
    a->add_option("--epsilon", attack.epsilons, "Ranking-distance tolerance(s)")->check(CLI::NonNegativeNumber);
    a->add_option("--max-iterations", attack.max_iterations, "Loop bound T");
    a->add_option("--seeds", attack.seeds, "Seed count s");
    a->add_option("--seed-method", attack.seed_method, "basic or reverse_wec");
    a->add_option("--wec-max-iterations", attack.wec_max_iterations, "Iteration cap of the WEC and PageRank runs");
    a->add_option("--nu", attack.nu, "Power-iteration tolerance");
    a->add_option("--jobs", attack.jobs, "Trials run in parallel")->check(CLI::PositiveNumber);
    auto* seed_opt = a->add_option("--rng-seed", attack.rng_seed, "Overrides the scenario's rng_seed");
    a->add_flag("--no-baselines", attack.no_baselines, "Run TrueTop only");

    TheoryOptions theory;
    auto* t = app.add_subcommand("theory", "Check the convergence and resilience statements");
    t->add_option("--graph", theory.graph, "Honest graph snapshot (default: synthetic)");
    t->add_option("--nodes", theory.nodes, "Synthetic graph size")->check(CLI::PositiveNumber);
    t->add_option("--interactions", theory.interactions, "Synthetic interactions per edge");
    t->add_option("--k", theory.k, "K")->check(CLI::PositiveNumber);
    t->add_option("--seeds", theory.seeds, "Seed count s");
    t->add_option("--wg", theory.strength, "Attack strength of the resilience check");
    t->add_option("--n2", theory.sybils, "Sybil region size");
    t->add_option("--rng-seed", theory.rng_seed, "Root random seed");
    t->add_option("--out", theory.out, "JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_validation;
    }
    attack.rng_seed_given = seed_opt->count() > 0;

    if (g->parsed()) {
        return guarded([&] {
            cmd_generate(gen);
            return int{exit_ok};
        });
    }
    if (b->parsed()) {
        return guarded([&] {
            cmd_build(build);
            return int{exit_ok};
        });
    }
    if (r->parsed()) {
        return guarded([&] {
            cmd_rank(rank);
            return int{exit_ok};
        });
    }
    if (a->parsed()) {
        return guarded([&] { return cmd_attack_eval(attack); });
    }
    return guarded([&] { return cmd_theory(theory); });
}
