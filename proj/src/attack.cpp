#include "truetop/attack.hpp"
#include "truetop/random.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace truetop {

void SybilRegion::validate() const {
    if (sybil_count < 1) {
        throw ScenarioError("sybil region needs at least one sybil");
    }
    if (!(outgoing_to_honest >= 0.0 && outgoing_to_honest < 1.0)) {
        throw ScenarioError("sybil outgoing fraction must lie in [0, 1)");
    }
    if (topology == SybilTopology::custom) {
        for (auto [a, b] : custom_edges) {
            if (a >= sybil_count || b >= sybil_count || a == b) {
                throw ScenarioError("custom sybil edge out of range or a self-loop");
            }
        }
    }
}

std::string_view to_string(AttackStrategy strategy) {
    switch (strategy) {
    case AttackStrategy::random:
        return "random";
    case AttackStrategy::community:
        return "community";
    case AttackStrategy::seed_attack:
        return "seed_attack";
    }
    return "random";
}

AttackStrategy parse_attack_strategy(std::string_view text) {
    text = trim(text);
    if (text == "random") {
        return AttackStrategy::random;
    }
    if (text == "community") {
        return AttackStrategy::community;
    }
    if (text == "seed_attack" || text == "seed") {
        return AttackStrategy::seed_attack;
    }
    throw ValidationError("unknown attack strategy '" + std::string(text) + "'");
}

std::vector<NodeIndex> AugmentedGraph::sybils() const {
    std::vector<NodeIndex> out;
    for (std::size_t i = 0; i < is_sybil.size(); ++i) {
        if (is_sybil[i]) {
            out.push_back(static_cast<NodeIndex>(i));
        }
    }
    return out;
}

namespace {

struct Assembly {
    std::vector<UserId> users;
    std::vector<char> verified;
    std::vector<EdgeInput> edges;
};

Assembly assemble_region(const InteractionGraph& honest, const SybilRegion& region, std::uint64_t rng_seed) {
    region.validate();
    const std::size_t h = honest.user_count();
    const std::size_t n2 = region.sybil_count;
    Assembly a;
    a.users.assign(honest.user_ids().begin(), honest.user_ids().end());
    a.verified.assign(honest.verified_flags().begin(), honest.verified_flags().end());
    const std::size_t width = std::to_string(n2 > 0 ? n2 - 1 : 0).size();
    for (std::size_t s = 0; s < n2; ++s) {
        std::string digits = std::to_string(s);
        std::string id = region.id_prefix + std::string(width - digits.size(), '0') + digits;
        if (honest.find(id)) {
            throw ScenarioError("sybil id " + id + " collides with an honest user");
        }
        a.users.push_back(std::move(id));
        a.verified.push_back(0);
    }

    auto all = honest.edges();
    a.edges.reserve(all.size() + n2 * (n2 - 1));
    for (std::size_t e = 0; e < all.size(); ++e) {
        auto counts = honest.epoch_counts(e);
        a.edges.push_back({all[e].source, all[e].target, all[e].weight, {counts.begin(), counts.end()}});
    }
    // One-time interactions in the first epoch weigh 1 under either model.
    const std::vector<EpochCount> once{{0, 1}};
    std::vector<double> internal_out(n2, 0.0);
    auto add_internal = [&](std::size_t from, std::size_t to) {
        a.edges.push_back({static_cast<NodeIndex>(h + from), static_cast<NodeIndex>(h + to), 1.0, once});
        internal_out[from] += 1.0;
    };
    if (region.topology == SybilTopology::complete_digraph) {
        for (std::size_t i = 0; i < n2; ++i) {
            for (std::size_t j = 0; j < n2; ++j) {
                if (i != j) {
                    add_internal(i, j);
                }
            }
        }
    } else {
        auto custom = region.custom_edges;
        std::sort(custom.begin(), custom.end());
        custom.erase(std::unique(custom.begin(), custom.end()), custom.end());
        for (auto [i, j] : custom) {
            add_internal(i, j);
        }
    }
    if (region.outgoing_to_honest > 0.0) {
        Rng rng(derive_seed(rng_seed, "attack.sybil-out"));
        const double beta = region.outgoing_to_honest;
        for (std::size_t s = 0; s < n2; ++s) {
            double weight = internal_out[s] > 0.0 ? internal_out[s] * beta / (1.0 - beta) : 1.0;
            auto target = static_cast<NodeIndex>(rng.uniform_index(h));
            a.edges.push_back({static_cast<NodeIndex>(h + s), target, weight, once});
        }
    }
    return a;
}

AugmentedGraph finish(Assembly a, const InteractionGraph& honest, std::vector<NodeIndex> attacked) {
    AugmentedGraph out;
    out.honest_count = honest.user_count();
    out.is_sybil.assign(a.users.size(), 0);
    std::fill(out.is_sybil.begin() + static_cast<std::ptrdiff_t>(out.honest_count), out.is_sybil.end(), 1);
    const double total = honest.total_weight();
    out.alpha = total > 0.0 ? static_cast<double>(attacked.size()) / total : 0.0;
    out.attacked = std::move(attacked);
    out.graph = InteractionGraph::from_edges(std::move(a.users), std::move(a.verified), honest.model(),
                                             honest.epochs(), std::move(a.edges));
    return out;
}

} // namespace

AugmentedGraph append_sybil_region(const InteractionGraph& honest, const SybilRegion& region, std::uint64_t rng_seed) {
    return finish(assemble_region(honest, region, rng_seed), honest, {});
}

std::vector<NodeIndex> bfs_order(const InteractionGraph& g, std::span<const NodeIndex> sources, std::size_t limit,
                                 bool include_sources) {
    const std::size_t n = g.user_count();
    // Undirected adjacency, neighbors ascending.
    std::vector<std::size_t> offsets(n + 1, 0);
    for (const auto& e : g.edges()) {
        ++offsets[e.source + 1];
        ++offsets[e.target + 1];
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    std::vector<NodeIndex> adjacency(offsets.back());
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& e : g.edges()) {
        adjacency[cursor[e.source]++] = e.target;
        adjacency[cursor[e.target]++] = e.source;
    }
    for (std::size_t u = 0; u < n; ++u) {
        std::sort(adjacency.begin() + static_cast<std::ptrdiff_t>(offsets[u]),
                  adjacency.begin() + static_cast<std::ptrdiff_t>(offsets[u + 1]));
    }

    std::vector<char> seen(n, 0);
    std::deque<NodeIndex> queue;
    std::vector<NodeIndex> out;
    for (auto s : sources) {
        if (s >= n) {
            throw ScenarioError("BFS source out of range");
        }
        if (!seen[s]) {
            seen[s] = 1;
            queue.push_back(s);
            if (include_sources && out.size() < limit) {
                out.push_back(s);
            }
        }
    }
    while (!queue.empty() && out.size() < limit) {
        NodeIndex u = queue.front();
        queue.pop_front();
        for (std::size_t k = offsets[u]; k < offsets[u + 1] && out.size() < limit; ++k) {
            NodeIndex v = adjacency[k];
            if (!seen[v]) {
                seen[v] = 1;
                queue.push_back(v);
                out.push_back(v);
            }
        }
    }
    return out;
}

AugmentedGraph attach_sybil_region(const InteractionGraph& honest, const SybilRegion& region,
                                   const AttackScenario& scenario) {
    const std::size_t h = honest.user_count();
    if (h == 0) {
        throw ScenarioError("honest graph is empty");
    }
    if (scenario.strength < 1) {
        throw ScenarioError("attack strength w_g must be >= 1");
    }
    if (scenario.strength > h) {
        throw ScenarioError("attack strength exceeds the number of honest users");
    }
    Rng pick(derive_seed(scenario.rng_seed, "attack.targets"));

    std::vector<NodeIndex> attacked;
    switch (scenario.strategy) {
    case AttackStrategy::random: {
        std::vector<NodeIndex> pool(h);
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t i = 0; i < scenario.strength; ++i) {
            std::size_t j = i + static_cast<std::size_t>(pick.uniform_index(h - i));
            std::swap(pool[i], pool[j]);
        }
        attacked.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(scenario.strength));
        break;
    }
    case AttackStrategy::community: {
        std::vector<NodeIndex> start{static_cast<NodeIndex>(pick.uniform_index(h))};
        attacked = bfs_order(honest, start, scenario.strength, true);
        if (attacked.size() < scenario.strength) {
            throw ScenarioError("community BFS reached only " + std::to_string(attacked.size()) + " users");
        }
        break;
    }
    case AttackStrategy::seed_attack: {
        if (scenario.known_seeds.empty()) {
            throw ScenarioError("seed attack needs the known seed users");
        }
        if (scenario.successor_pool < scenario.strength) {
            throw ScenarioError("seed attack pool d is smaller than w_g");
        }
        auto pool = bfs_order(honest, scenario.known_seeds, scenario.successor_pool, false);
        if (pool.size() < scenario.successor_pool) {
            throw ScenarioError("seed attack BFS reached only " + std::to_string(pool.size()) + " users");
        }
        for (std::size_t i = 0; i < scenario.strength; ++i) {
            std::size_t j = i + static_cast<std::size_t>(pick.uniform_index(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        attacked.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(scenario.strength));
        break;
    }
    }

    Assembly a = assemble_region(honest, region, scenario.rng_seed);
    Rng wire(derive_seed(scenario.rng_seed, "attack.sybils"));
    const std::vector<EpochCount> once{{0, 1}};
    for (auto u : attacked) {
        auto sybil = static_cast<NodeIndex>(h + wire.uniform_index(region.sybil_count));
        a.edges.push_back({u, sybil, 1.0, once});
    }
    return finish(std::move(a), honest, std::move(attacked));
}

AugmentedGraph two_region_graph(std::size_t honest_count, std::size_t sybil_count, double alpha, double beta) {
    if (honest_count < 2 || sybil_count < 1) {
        throw ValidationError("two-region graph needs >= 2 honest users and >= 1 sybil");
    }
    if (!(alpha > 0.0 && alpha < 1.0) || !(beta >= 0.0 && beta < 1.0)) {
        throw ValidationError("alpha must lie in (0, 1) and beta in [0, 1)");
    }
    if (beta > 0.0 && sybil_count < 2) {
        throw ValidationError("beta > 0 needs at least two sybils");
    }
    const std::size_t h = honest_count;
    const std::size_t n = h + sybil_count;
    std::vector<WeightedEdge> edges;
    auto clique = [&](std::size_t first, std::size_t size, double leak, std::size_t other_first,
                      std::size_t other_size) {
        const double internal = static_cast<double>(size - 1);
        for (std::size_t i = 0; i < size; ++i) {
            for (std::size_t j = 0; j < size; ++j) {
                if (i != j) {
                    edges.push_back({static_cast<NodeIndex>(first + i), static_cast<NodeIndex>(first + j), 1.0});
                }
            }
            if (leak > 0.0) {
                edges.push_back({static_cast<NodeIndex>(first + i), static_cast<NodeIndex>(other_first + i % other_size),
                                 internal * leak / (1.0 - leak)});
            }
        }
    };
    clique(0, h, alpha, h, sybil_count);
    if (sybil_count > 1) {
        clique(h, sybil_count, beta, 0, h);
    }

    AugmentedGraph out;
    out.graph = graph_from_weighted_edges(n, edges);
    out.honest_count = h;
    out.is_sybil.assign(n, 0);
    std::fill(out.is_sybil.begin() + static_cast<std::ptrdiff_t>(h), out.is_sybil.end(), 1);
    out.alpha = alpha;
    for (std::size_t i = 0; i < h; ++i) {
        out.attacked.push_back(static_cast<NodeIndex>(i));
    }
    return out;
}

// ---------------------------------------------------------------------------

double estimate_alpha_star(double suspension_ratio, double io_ratio_honest, double io_ratio_sybil) {
    if (!(suspension_ratio > 0.0) || !(io_ratio_honest >= 0.0) || !(io_ratio_sybil >= 0.0)) {
        throw ValidationError("alpha* needs a positive population ratio and nonnegative I-O ratios");
    }
    return io_ratio_sybil / suspension_ratio / (1.0 + io_ratio_honest);
}

double prop1_closed_form(double alpha, double beta, std::size_t t) {
    const double leak = alpha + beta;
    if (!(leak > 0.0)) {
        throw ValidationError("alpha + beta must be positive");
    }
    if (t < 1) {
        throw ValidationError("closed form is defined for t >= 1");
    }
    return (1.0 - 1.0 / leak) * alpha * std::pow(1.0 - leak, static_cast<double>(t - 1)) + alpha / leak;
}

std::size_t sybil_count_metric(double region_credits, std::span<const double> honest_top) {
    const std::size_t k = honest_top.size();
    if (k == 0 || region_credits < honest_top[k - 1]) {
        return 0;
    }
    std::size_t best = 0;
    for (std::size_t x = 1; x <= k; ++x) {
        if (region_credits >= static_cast<double>(x) * honest_top[k - x]) {
            best = x;
        }
    }
    return best;
}

double sybil_topk_bound(double alpha, std::size_t t, std::size_t k) {
    if (!(alpha >= 0.0 && alpha < 1.0)) {
        throw ValidationError("alpha must lie in [0, 1)");
    }
    // (1 - alpha)^-t - 1, written to stay accurate for tiny alpha.
    return static_cast<double>(k) * std::expm1(-static_cast<double>(t) * std::log1p(-alpha));
}

} // namespace truetop
