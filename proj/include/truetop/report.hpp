#pragma once

#include "truetop/attack.hpp"
#include "truetop/eval.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace truetop {

/// Attack scenario file (JSON object). Recognized keys: strategy, w_g, n2, d,
/// topology ("complete_digraph" or "custom" with custom_edges), beta,
/// rng_seed, trials, known_seeds (user ids), kred_days. The document is kept
/// as read and echoed into every report.
struct ScenarioDescriptor {
    nlohmann::json document;
    AttackStrategy strategy = AttackStrategy::random;
    std::size_t strength = 100;
    std::size_t successor_pool = 3000;
    SybilRegion region;
    std::uint64_t rng_seed = 1;
    std::size_t trials = 1;
    std::vector<UserId> known_seeds;
    std::size_t kred_days = default_kred_days;

    static ScenarioDescriptor parse(std::string_view text);
    static ScenarioDescriptor from_json(nlohmann::json document);
    static ScenarioDescriptor read(const std::filesystem::path& path);

    /// Scenario for one trial; the rng seed is derived from (rng_seed, trial).
    AttackScenario trial_scenario(const InteractionGraph& honest, std::size_t trial) const;
};

std::uint64_t trial_seed(std::uint64_t root, std::size_t trial);

/// Runs every trial of `desc` against the honest graph, up to `jobs` at once.
/// Reports come back in trial order whatever the scheduling; a trial that
/// throws keeps its message in TrialReport::error.
std::vector<TrialReport> run_trials(const InteractionGraph& honest, const GroundTruth& truth,
                                    const ScenarioDescriptor& desc, const BaselineOptions& options,
                                    std::size_t jobs = 1);

/// One method of one trial with the EvalReport keys.
nlohmann::json method_report_json(const MethodReport& method, const TrialReport& trial,
                                  const ScenarioDescriptor& desc, std::size_t k);

/// Per-method means over the successful trials.
nlohmann::json aggregate_json(std::span<const TrialReport> trials, const ScenarioDescriptor& desc, std::size_t k);

/// File stem used for a method's reports, e.g. "truetop" or "truetop-eps25".
std::string method_label(const MethodReport& method, bool several_epsilons);

} // namespace truetop
