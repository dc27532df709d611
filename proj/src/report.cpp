#include "truetop/report.hpp"
#include "truetop/random.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace truetop {

namespace {

using nlohmann::json;

std::size_t positive_size(const json& doc, const char* key, std::size_t fallback, bool allow_zero = false) {
    if (!doc.contains(key)) {
        return fallback;
    }
    const auto& v = doc.at(key);
    if (!v.is_number_integer()) {
        throw ValidationError(std::string("scenario field '") + key + "' must be an integer");
    }
    auto value = v.get<std::int64_t>();
    if (value < 0 || (!allow_zero && value == 0)) {
        throw ValidationError(std::string("scenario field '") + key + "' must be positive");
    }
    return static_cast<std::size_t>(value);
}

} // namespace

ScenarioDescriptor ScenarioDescriptor::from_json(nlohmann::json doc) {
    if (!doc.is_object()) {
        throw ValidationError("scenario must be a JSON object");
    }
    ScenarioDescriptor d;
    if (doc.contains("strategy")) {
        if (!doc["strategy"].is_string()) {
            throw ValidationError("scenario field 'strategy' must be a string");
        }
        d.strategy = parse_attack_strategy(doc["strategy"].get<std::string>());
    }
    d.strength = positive_size(doc, "w_g", d.strength);
    d.region.sybil_count = positive_size(doc, "n2", d.region.sybil_count);
    d.successor_pool = positive_size(doc, "d", d.successor_pool);
    d.trials = positive_size(doc, "trials", d.trials);
    d.kred_days = positive_size(doc, "kred_days", d.kred_days, true);
    if (doc.contains("rng_seed")) {
        if (!doc["rng_seed"].is_number_unsigned() && !doc["rng_seed"].is_number_integer()) {
            throw ValidationError("scenario field 'rng_seed' must be an integer");
        }
        d.rng_seed = doc["rng_seed"].get<std::uint64_t>();
    }
    if (doc.contains("beta")) {
        if (!doc["beta"].is_number()) {
            throw ValidationError("scenario field 'beta' must be a number");
        }
        d.region.outgoing_to_honest = doc["beta"].get<double>();
    }
    if (doc.contains("topology")) {
        auto topology = doc["topology"].is_string() ? doc["topology"].get<std::string>() : std::string();
        if (topology == "complete_digraph") {
            d.region.topology = SybilTopology::complete_digraph;
        } else if (topology == "custom") {
            d.region.topology = SybilTopology::custom;
            if (!doc.contains("custom_edges") || !doc["custom_edges"].is_array()) {
                throw ValidationError("custom topology needs a 'custom_edges' array of [i, j] pairs");
            }
            for (const auto& e : doc["custom_edges"]) {
                if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned()) {
                    throw ValidationError("custom_edges entries must be [i, j] with nonnegative integers");
                }
                d.region.custom_edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
            }
        } else {
            throw ValidationError("unknown sybil topology in scenario");
        }
    }
    if (doc.contains("known_seeds")) {
        if (!doc["known_seeds"].is_array()) {
            throw ValidationError("scenario field 'known_seeds' must be an array of user ids");
        }
        for (const auto& s : doc["known_seeds"]) {
            if (!s.is_string()) {
                throw ValidationError("known_seeds entries must be user id strings");
            }
            d.known_seeds.push_back(s.get<std::string>());
        }
    }
    d.region.validate();
    d.document = std::move(doc);
    return d;
}

ScenarioDescriptor ScenarioDescriptor::parse(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("scenario is not valid JSON: ") + e.what());
    }
    return from_json(std::move(doc));
}

ScenarioDescriptor ScenarioDescriptor::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open scenario file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

AttackScenario ScenarioDescriptor::trial_scenario(const InteractionGraph& honest, std::size_t trial) const {
    AttackScenario sc;
    sc.strategy = strategy;
    sc.strength = strength;
    sc.successor_pool = successor_pool;
    sc.rng_seed = trial_seed(rng_seed, trial);
    for (const auto& id : known_seeds) {
        auto u = honest.find(id);
        if (!u) {
            throw ScenarioError("known seed " + id + " is not an honest user");
        }
        sc.known_seeds.push_back(*u);
    }
    return sc;
}

std::uint64_t trial_seed(std::uint64_t root, std::size_t trial) { return derive_seed(root, "trial", trial); }

std::vector<TrialReport> run_trials(const InteractionGraph& honest, const GroundTruth& truth,
                                    const ScenarioDescriptor& desc, const BaselineOptions& options,
                                    std::size_t jobs) {
    std::vector<TrialReport> reports(desc.trials);
    auto run_one = [&](std::size_t trial) {
        TrialReport& report = reports[trial];
        try {
            auto scenario = desc.trial_scenario(honest, trial);
            BaselineOptions opts = options;
            opts.seeds.rng_seed = derive_seed(scenario.rng_seed, "seed-selection");
            report = compare_baselines(honest, truth, desc.region, scenario, opts);
        } catch (const std::exception& e) {
            report.error = e.what();
            report.strength = desc.strength;
            report.rng_seed = trial_seed(desc.rng_seed, trial);
        }
        report.trial = trial;
    };

    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(desc.trials, 1));
    if (jobs == 1) {
        for (std::size_t t = 0; t < desc.trials; ++t) {
            run_one(t);
        }
        return reports;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t j = 0; j < jobs; ++j) {
        workers.emplace_back([&] {
            for (std::size_t t = next++; t < desc.trials; t = next++) {
                run_one(t);
            }
        });
    }
    for (auto& w : workers) {
        w.join();
    }
    return reports;
}

std::string method_label(const MethodReport& method, bool several_epsilons) {
    if (method.epsilon && several_epsilons) {
        return method.method + "-eps" + format_double(*method.epsilon);
    }
    return method.method;
}

nlohmann::json method_report_json(const MethodReport& method, const TrialReport& trial,
                                  const ScenarioDescriptor& desc, std::size_t k) {
    json out;
    out["method"] = method.method;
    if (method.epsilon) {
        out["epsilon"] = *method.epsilon;
    }
    out["trial"] = trial.trial;
    out["rng_seed"] = trial.rng_seed;
    out["scenario"] = desc.document;
    out["k"] = k;
    out["alpha"] = trial.alpha;
    if (!method.error.empty()) {
        out["error"] = method.error;
        return out;
    }
    out["type1"] = method.type1;
    out["type2"] = method.type2;
    out["sybil_count"] = method.sybil_count;
    out["iterations"] = method.iterations;
    out["converged"] = method.converged;
    out["region_credits"] = method.region_credits;
    out["bound"] = sybil_topk_bound(trial.alpha, method.iterations, k);
    return out;
}

nlohmann::json aggregate_json(std::span<const TrialReport> trials, const ScenarioDescriptor& desc, std::size_t k) {
    struct Acc {
        std::size_t runs = 0;
        std::size_t failures = 0;
        double type1 = 0, type2 = 0, sybil = 0, iterations = 0, bound = 0;
        std::size_t max_sybil = 0;
        std::size_t over_bound = 0;
    };
    std::map<std::string, Acc> acc;
    std::size_t failed_trials = 0;
    bool several = false;
    for (const auto& t : trials) {
        std::size_t eps = 0;
        for (const auto& m : t.methods) {
            eps += m.method == "truetop";
        }
        several = several || eps > 1;
    }
    for (const auto& t : trials) {
        if (!t.error.empty()) {
            ++failed_trials;
            continue;
        }
        for (const auto& m : t.methods) {
            auto& a = acc[method_label(m, several)];
            if (!m.error.empty()) {
                ++a.failures;
                continue;
            }
            double bound = sybil_topk_bound(t.alpha, m.iterations, k);
            ++a.runs;
            a.type1 += m.type1;
            a.type2 += static_cast<double>(m.type2);
            a.sybil += static_cast<double>(m.sybil_count);
            a.iterations += static_cast<double>(m.iterations);
            a.bound += bound;
            a.max_sybil = std::max(a.max_sybil, m.sybil_count);
            a.over_bound += static_cast<double>(m.sybil_count) > bound;
        }
    }
    json out;
    out["scenario"] = desc.document;
    out["k"] = k;
    out["trials"] = trials.size();
    out["failed_trials"] = failed_trials;
    json methods = json::object();
    for (const auto& [label, a] : acc) {
        json m;
        m["runs"] = a.runs;
        m["failures"] = a.failures;
        if (a.runs > 0) {
            double n = static_cast<double>(a.runs);
            m["mean_type1"] = a.type1 / n;
            m["mean_type2"] = a.type2 / n;
            m["mean_sybil_count"] = a.sybil / n;
            m["max_sybil_count"] = a.max_sybil;
            m["mean_iterations"] = a.iterations / n;
            m["mean_bound"] = a.bound / n;
            m["runs_above_bound"] = a.over_bound;
        }
        methods[label] = std::move(m);
    }
    out["methods"] = std::move(methods);
    return out;
}

} // namespace truetop
