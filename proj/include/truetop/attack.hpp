#pragma once

#include "truetop/common.hpp"
#include "truetop/graph.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace truetop {

inline constexpr std::size_t default_sybil_count = 500;
/// Days of mutual retweeting among sybils fed to the Kred-style baseline.
inline constexpr std::size_t default_kred_days = 90;

enum class SybilTopology { complete_digraph, custom };

struct SybilRegion {
    std::size_t sybil_count = default_sybil_count;
    SybilTopology topology = SybilTopology::complete_digraph;
    /// Internal edges (sybil-local indices) for the custom topology.
    std::vector<std::pair<std::size_t, std::size_t>> custom_edges;
    /// Fraction of each sybil's out-weight sent back to honest users; 0 is the
    /// worst case where the region keeps every credit it receives.
    double outgoing_to_honest = 0.0;
    std::string id_prefix = "sybil";

    void validate() const;
};

enum class AttackStrategy { random, community, seed_attack };

std::string_view to_string(AttackStrategy strategy);
AttackStrategy parse_attack_strategy(std::string_view text);

struct AttackScenario {
    AttackStrategy strategy = AttackStrategy::random;
    /// w_g: number of weight-1 honest -> sybil links.
    std::size_t strength = 100;
    /// d: size of the candidate pool around the known seeds (seed_attack).
    std::size_t successor_pool = 3000;
    std::uint64_t rng_seed = 1;
    /// Honest-graph indices of the seeds the attacker knows (seed_attack).
    std::vector<NodeIndex> known_seeds;
};

/// Honest users come first (same indices as in the honest graph), sybils after.
struct AugmentedGraph {
    InteractionGraph graph;
    std::vector<char> is_sybil;
    std::size_t honest_count = 0;
    /// Honest endpoints of the attack links, in link order.
    std::vector<NodeIndex> attacked;
    /// w_g over the honest graph's total edge weight.
    double alpha = 0.0;

    std::vector<NodeIndex> sybils() const;
};

/// Appends the region with its internal topology and no attack links.
AugmentedGraph append_sybil_region(const InteractionGraph& honest, const SybilRegion& region, std::uint64_t rng_seed);

/// Appends the region and wires w_g honest users to uniformly chosen sybils.
/// random: w_g distinct honest users uniformly. community: the first w_g users
/// met by an undirected BFS from a random honest user. seed_attack: an
/// undirected multi-source BFS from the known seeds collects the first d
/// non-seed users by depth then discovery order; w_g of them are drawn
/// uniformly. Throws ScenarioError when the graph cannot supply them.
AugmentedGraph attach_sybil_region(const InteractionGraph& honest, const SybilRegion& region,
                                   const AttackScenario& scenario);

/// Users met by an undirected BFS from `sources` (excluded), in depth then
/// discovery order, at most `limit` of them.
std::vector<NodeIndex> bfs_order(const InteractionGraph& g, std::span<const NodeIndex> sources, std::size_t limit,
                                 bool include_sources);

/// Exact two-region construction: the honest users form a unit complete digraph
/// and each sends exactly alpha of its out-weight to one sybil; the sybils do
/// the same among themselves with beta going back to one honest user. Needs
/// two or more honest users, and two or more sybils when beta > 0.
AugmentedGraph two_region_graph(std::size_t honest_count, std::size_t sybil_count, double alpha, double beta);

// --- closed forms -----------------------------------------------------------

/// n2/n1 = 1/suspension_ratio; returns io_sybil * (n2/n1) / (1 + io_honest).
double estimate_alpha_star(double suspension_ratio, double io_ratio_honest, double io_ratio_sybil);

/// Credits held by the sybil side after t rounds when all credits start on the
/// honest side, the honest side leaks alpha and the sybil side leaks beta of
/// its credits per round.
double prop1_closed_form(double alpha, double beta, std::size_t t);

/// Largest x in [1, K] with C >= x * C_{K+1-x}, or 0 when C < C_K. `honest_top`
/// holds C_1 >= ... >= C_K.
std::size_t sybil_count_metric(double region_credits, std::span<const double> honest_top);

/// K (1 - (1 - alpha)^t) / (1 - alpha)^t.
double sybil_topk_bound(double alpha, std::size_t t, std::size_t k);

} // namespace truetop
