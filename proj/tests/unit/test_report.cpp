#include <doctest.h>

#include "truetop/report.hpp"

#include <fstream>

using namespace truetop;

namespace {

InteractionGraph small_honest() {
    SyntheticSpec spec;
    spec.node_count = 500;
    spec.rng_seed = 8;
    return extract_gscc(build_synthetic_graph(spec, WeightModel::sum())).graph;
}

} // namespace

TEST_CASE("scenario parsing") {
    auto d = ScenarioDescriptor::parse(
        R"({"strategy": "seed_attack", "w_g": 20, "n2": 50, "d": 300, "beta": 0.1,
            "rng_seed": 9, "trials": 4, "known_seeds": ["a", "b"], "kred_days": 30})");
    CHECK(d.strategy == AttackStrategy::seed_attack);
    CHECK(d.strength == 20);
    CHECK(d.region.sybil_count == 50);
    CHECK(d.successor_pool == 300);
    CHECK(d.region.outgoing_to_honest == 0.1);
    CHECK(d.rng_seed == 9);
    CHECK(d.trials == 4);
    CHECK(d.known_seeds == std::vector<UserId>{"a", "b"});
    CHECK(d.kred_days == 30);
    CHECK(d.document["w_g"] == 20);

    auto defaults = ScenarioDescriptor::parse("{}");
    CHECK(defaults.strategy == AttackStrategy::random);
    CHECK(defaults.strength == 100);
    CHECK(defaults.region.sybil_count == default_sybil_count);

    auto custom = ScenarioDescriptor::parse(R"({"n2": 3, "topology": "custom", "custom_edges": [[0, 1], [1, 2]]})");
    CHECK(custom.region.topology == SybilTopology::custom);
    CHECK(custom.region.custom_edges.size() == 2);
}

TEST_CASE("bad scenarios are validation errors") {
    for (const char* text : {"not json", "[]", R"({"w_g": 0})", R"({"w_g": -3})", R"({"w_g": 1.5})",
                             R"({"strategy": 4})", R"({"strategy": "flood"})", R"({"beta": 1.0})",
                             R"({"beta": "x"})", R"({"topology": "ring"})", R"({"topology": "custom"})",
                             R"({"n2": 2, "topology": "custom", "custom_edges": [[0, 5]]})",
                             R"({"known_seeds": "a"})", R"({"known_seeds": [1]})", R"({"trials": 0})"}) {
        CAPTURE(text);
        CHECK_THROWS_AS(ScenarioDescriptor::parse(text), ValidationError);
    }
    CHECK_THROWS_AS(ScenarioDescriptor::read("/nonexistent/scenario.json"), IoError);
}

TEST_CASE("trial scenarios derive distinct seeds and map known seeds") {
    auto honest = small_honest();
    auto d = ScenarioDescriptor::parse(R"({"strategy": "seed_attack", "rng_seed": 5})");
    d.known_seeds = {honest.user_id(3), honest.user_id(0)};
    auto t0 = d.trial_scenario(honest, 0);
    auto t1 = d.trial_scenario(honest, 1);
    CHECK(t0.rng_seed == trial_seed(5, 0));
    CHECK(t0.rng_seed != t1.rng_seed);
    CHECK(t0.known_seeds == std::vector<NodeIndex>{3, 0});
    d.known_seeds = {"nobody"};
    CHECK_THROWS_AS(d.trial_scenario(honest, 0), ScenarioError);
}

TEST_CASE("trials are identical whatever the worker count") {
    auto honest = small_honest();
    auto truth = ground_truth(honest, 10);
    auto d = ScenarioDescriptor::parse(R"({"w_g": 5, "n2": 20, "trials": 5, "rng_seed": 3})");
    BaselineOptions opts;
    opts.k = 10;
    opts.seeds.count = 10;
    auto serial = run_trials(honest, truth, d, opts, 1);
    auto parallel = run_trials(honest, truth, d, opts, 3);
    REQUIRE(serial.size() == 5);
    REQUIRE(parallel.size() == 5);
    for (std::size_t t = 0; t < 5; ++t) {
        CHECK(serial[t].trial == t);
        CHECK(parallel[t].trial == t);
        CHECK(serial[t].rng_seed == parallel[t].rng_seed);
        REQUIRE(serial[t].methods.size() == parallel[t].methods.size());
        for (std::size_t m = 0; m < serial[t].methods.size(); ++m) {
            CHECK(method_report_json(serial[t].methods[m], serial[t], d, 10).dump() ==
                  method_report_json(parallel[t].methods[m], parallel[t], d, 10).dump());
        }
    }
    CHECK(aggregate_json(serial, d, 10).dump() == aggregate_json(parallel, d, 10).dump());
}

TEST_CASE("report and aggregate layout") {
    ScenarioDescriptor d = ScenarioDescriptor::parse(R"({"w_g": 7})");
    TrialReport ok;
    ok.trial = 0;
    ok.rng_seed = 11;
    ok.alpha = 0.01;
    MethodReport tt{"truetop", 0.0, 0.5, 2, 3, 10, true, 0.2, ""};
    MethodReport wec{"wec", std::nullopt, 1.5, 4, 5, 2000, false, 0.4, ""};
    MethodReport broken{"pagerank", std::nullopt, 0, 0, 0, 0, false, 0, "diverged"};
    ok.methods = {tt, wec, broken};
    TrialReport failed;
    failed.trial = 1;
    failed.error = "bad trial";
    TrialReport second = ok;
    second.trial = 2;
    second.methods[0].sybil_count = 0;

    auto j = method_report_json(tt, ok, d, 100);
    for (const char* key : {"method", "epsilon", "trial", "rng_seed", "scenario", "k", "alpha", "type1", "type2",
                            "sybil_count", "iterations", "converged", "region_credits", "bound"}) {
        CAPTURE(key);
        CHECK(j.contains(key));
    }
    CHECK(j["bound"].get<double>() == doctest::Approx(sybil_topk_bound(0.01, 10, 100)));
    CHECK(j["scenario"]["w_g"] == 7);
    auto e = method_report_json(broken, ok, d, 100);
    CHECK(e["error"] == "diverged");
    CHECK_FALSE(e.contains("type1"));
    CHECK_FALSE(method_report_json(wec, ok, d, 100).contains("epsilon"));

    std::vector<TrialReport> all{ok, failed, second};
    auto agg = aggregate_json(all, d, 100);
    CHECK(agg["trials"] == 3);
    CHECK(agg["failed_trials"] == 1);
    const auto& m = agg["methods"]["truetop"];
    CHECK(m["runs"] == 2);
    CHECK(m["mean_sybil_count"].get<double>() == 1.5);
    CHECK(m["max_sybil_count"] == 3);
    CHECK(m["mean_type1"].get<double>() == 0.5);
    CHECK(agg["methods"]["pagerank"]["failures"] == 2);
    CHECK(agg["methods"]["pagerank"]["runs"] == 0);

    MethodReport eps{"truetop", 25.0, 0, 0, 0, 0, true, 0, ""};
    CHECK(method_label(eps, true) == "truetop-eps25");
    CHECK(method_label(eps, false) == "truetop");
    CHECK(method_label(wec, true) == "wec");
}
