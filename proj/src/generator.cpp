#include "truetop/ingest.hpp"
#include "truetop/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace truetop {

InteractionCountDistribution InteractionCountDistribution::parse(std::string_view text) {
    auto fields = split(trim(text), ':');
    if (fields.size() != 2) {
        throw ValidationError("interaction distribution must look like const:<k> or geometric:<mean>");
    }
    InteractionCountDistribution dist;
    if (fields[0] == "const") {
        dist.kind = Kind::constant;
    } else if (fields[0] == "geometric") {
        dist.kind = Kind::geometric;
    } else {
        throw ValidationError("unknown interaction distribution '" + std::string(fields[0]) + "'");
    }
    dist.mean = parse_double(fields[1]);
    if (!(dist.mean >= 1.0)) {
        throw ValidationError("interactions per edge must be >= 1");
    }
    if (dist.kind == Kind::constant && dist.mean != std::floor(dist.mean)) {
        throw ValidationError("constant interaction count must be an integer");
    }
    return dist;
}

std::string InteractionCountDistribution::to_string() const {
    return (kind == Kind::constant ? "const:" : "geometric:") + format_double(mean);
}

void SyntheticSpec::validate() const {
    if (node_count < 2) {
        throw ValidationError("invalid synthetic spec: node_count must be >= 2");
    }
    if (!(degree_exponent > 2.0)) {
        throw ValidationError("invalid synthetic spec: degree exponent must be > 2");
    }
    if (!(mean_out_degree > 0.0)) {
        throw ValidationError("invalid synthetic spec: mean out-degree must be positive");
    }
    if (!(interactions_per_edge.mean >= 1.0)) {
        throw ValidationError("invalid synthetic spec: interactions per edge must be >= 1");
    }
    if (!(verified_fraction >= 0.0 && verified_fraction <= 1.0)) {
        throw ValidationError("invalid synthetic spec: verified fraction must lie in [0, 1]");
    }
    if (!(reciprocity >= 0.0 && reciprocity <= 1.0)) {
        throw ValidationError("invalid synthetic spec: reciprocity must lie in [0, 1]");
    }
    period.validate();
}

std::string synthetic_user_id(std::size_t index, std::size_t node_count) {
    std::size_t width = std::to_string(node_count > 0 ? node_count - 1 : 0).size();
    std::string digits = std::to_string(index);
    return "u" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

SyntheticTopology generate_topology(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(derive_seed(spec.rng_seed, "topology"));
    const std::size_t n = spec.node_count;
    const double m = spec.mean_out_degree;
    // Price model: P(target = v) ~ in_degree(v) + a gives in-degree exponent 2 + a/m.
    const double attractiveness = m * (spec.degree_exponent - 2.0);
    const auto whole = static_cast<std::size_t>(std::floor(m));
    const double fraction = m - std::floor(m);

    SyntheticTopology topo;
    std::vector<NodeIndex> attachment_targets; // one entry per attachment edge
    std::vector<NodeIndex> chosen;
    std::vector<std::size_t> in_degree(n, 0);

    for (std::size_t u = 1; u < n; ++u) {
        std::size_t k = whole + (rng.bernoulli(fraction) ? 1 : 0);
        k = std::clamp<std::size_t>(k, 1, u);
        chosen.clear();
        if (k == u) {
            for (std::size_t v = 0; v < u; ++v) {
                chosen.push_back(static_cast<NodeIndex>(v));
            }
        } else {
            const double edge_mass = static_cast<double>(attachment_targets.size());
            const double uniform_mass = attractiveness * static_cast<double>(u);
            while (chosen.size() < k) {
                NodeIndex v = 0;
                if (rng.uniform01() * (edge_mass + uniform_mass) < edge_mass) {
                    v = attachment_targets[rng.uniform_index(attachment_targets.size())];
                } else {
                    v = static_cast<NodeIndex>(rng.uniform_index(u));
                }
                if (std::find(chosen.begin(), chosen.end(), v) == chosen.end()) {
                    chosen.push_back(v);
                }
            }
        }
        for (NodeIndex v : chosen) {
            topo.edges.emplace_back(static_cast<NodeIndex>(u), v);
            ++in_degree[v];
            if (rng.bernoulli(spec.reciprocity)) {
                topo.edges.emplace_back(v, static_cast<NodeIndex>(u));
                ++in_degree[u];
            }
        }
        attachment_targets.insert(attachment_targets.end(), chosen.begin(), chosen.end());
    }

    std::vector<NodeIndex> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](NodeIndex a, NodeIndex b) { return in_degree[a] > in_degree[b]; });
    auto verified_count = static_cast<std::size_t>(std::ceil(spec.verified_fraction * static_cast<double>(n)));
    topo.verified.assign(n, 0);
    for (std::size_t i = 0; i < std::min(verified_count, n); ++i) {
        topo.verified[order[i]] = 1;
    }
    return topo;
}

void for_each_synthetic_interaction(
    const SyntheticSpec& spec, const SyntheticTopology& topology,
    const std::function<void(std::size_t, InteractionKind, std::int64_t)>& visit) {
    Rng rng(derive_seed(spec.rng_seed, "interactions"));
    const auto span = static_cast<std::uint64_t>(spec.period.end - spec.period.start);
    for (std::size_t e = 0; e < topology.edges.size(); ++e) {
        std::uint64_t count = 1;
        if (spec.interactions_per_edge.kind == InteractionCountDistribution::Kind::constant) {
            count = static_cast<std::uint64_t>(spec.interactions_per_edge.mean);
        } else {
            count = rng.geometric(spec.interactions_per_edge.mean);
        }
        for (std::uint64_t c = 0; c < count; ++c) {
            auto kind = static_cast<InteractionKind>(rng.uniform_index(3));
            auto timestamp = spec.period.start + static_cast<std::int64_t>(rng.uniform_index(span));
            visit(e, kind, timestamp);
        }
    }
}

SyntheticData generate_powerlaw_graph(const SyntheticSpec& spec) {
    SyntheticTopology topo = generate_topology(spec);
    const std::size_t n = spec.node_count;
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = synthetic_user_id(i, n);
    }
    SyntheticData data;
    for_each_synthetic_interaction(spec, topo, [&](std::size_t e, InteractionKind kind, std::int64_t ts) {
        const auto& [source, target] = topo.edges[e];
        data.records.push_back({ids[source], ids[target], kind, ts});
    });
    data.attributes.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        data.attributes.push_back({ids[i], topo.verified[i] != 0});
    }
    return data;
}

} // namespace truetop
