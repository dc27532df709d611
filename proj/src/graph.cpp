#include "truetop/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace truetop {

void WeightModel::validate() const {
    if (kind == WeightModelKind::entropy && epochs < 1) {
        throw ValidationError("entropy weight model needs at least one epoch");
    }
}

std::string WeightModel::to_string() const {
    return kind == WeightModelKind::sum ? std::string("sum") : "entropy:" + std::to_string(epochs);
}

WeightModel WeightModel::parse(std::string_view text) {
    text = trim(text);
    if (text == "sum") {
        return sum();
    }
    if (text.starts_with("entropy:")) {
        auto mu = parse_int64(text.substr(8));
        if (mu < 1) {
            throw ValidationError("entropy weight model needs at least one epoch");
        }
        return entropy(static_cast<int>(mu));
    }
    throw ValidationError("unknown weight model '" + std::string(text) + "'");
}

double edge_weight_sum(std::span<const std::uint32_t> counts) {
    std::uint64_t total = 0;
    for (auto c : counts) {
        total += c;
    }
    return static_cast<double>(total);
}

double edge_weight_entropy(std::span<const std::uint32_t> counts) {
    const double total = edge_weight_sum(counts);
    if (total <= 0.0) {
        throw ValidationError("entropy weight is undefined without interactions");
    }
    double entropy = 0.0;
    for (auto c : counts) {
        if (c == 0) {
            continue;
        }
        const double p = static_cast<double>(c) / total;
        entropy -= p * std::log(p);
    }
    return (1.0 + entropy) * total;
}

namespace {

double sparse_weight(const WeightModel& model, std::span<const EpochCount> counts) {
    std::vector<std::uint32_t> values;
    values.reserve(counts.size());
    for (const auto& c : counts) {
        values.push_back(c.count);
    }
    return model.kind == WeightModelKind::sum ? edge_weight_sum(values) : edge_weight_entropy(values);
}

// Run-length encodes sorted epoch indices into a sparse histogram.
std::vector<EpochCount> histogram(std::vector<std::uint32_t>& epochs) {
    std::sort(epochs.begin(), epochs.end());
    std::vector<EpochCount> out;
    for (auto e : epochs) {
        if (!out.empty() && out.back().epoch == e) {
            ++out.back().count;
        } else {
            out.push_back({e, 1});
        }
    }
    return out;
}

} // namespace

InteractionGraph InteractionGraph::from_edges(std::vector<UserId> users, std::vector<char> verified,
                                              WeightModel model, int epochs, std::vector<EdgeInput> edges) {
    model.validate();
    if (epochs < 1) {
        throw ValidationError("graph needs at least one epoch");
    }
    if (verified.size() != users.size()) {
        throw ValidationError("verified flags do not match the user count");
    }
    const std::size_t n = users.size();
    InteractionGraph g;
    g.model_ = model;
    g.epochs_ = epochs;
    g.index_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (users[i].empty()) {
            throw ValidationError("empty user id");
        }
        if (!g.index_.emplace(users[i], static_cast<NodeIndex>(i)).second) {
            throw ValidationError("duplicate user id " + users[i]);
        }
    }

    std::sort(edges.begin(), edges.end(), [](const EdgeInput& a, const EdgeInput& b) {
        return std::tie(a.source, a.target) < std::tie(b.source, b.target);
    });
    g.edges_.reserve(edges.size());
    g.count_offsets_.reserve(edges.size() + 1);
    g.count_offsets_.push_back(0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto& in = edges[e];
        if (in.source >= n || in.target >= n) {
            throw ValidationError("edge endpoint out of range");
        }
        if (in.source == in.target) {
            throw ValidationError("self-edge on user " + users[in.source]);
        }
        if (e > 0 && edges[e - 1].source == in.source && edges[e - 1].target == in.target) {
            throw ValidationError("duplicate edge " + users[in.source] + " -> " + users[in.target]);
        }
        if (!(in.weight > 0.0) || !std::isfinite(in.weight)) {
            throw ValidationError("edge weight must be positive and finite");
        }
        std::uint64_t interactions = 0;
        std::uint32_t last_epoch = 0;
        for (std::size_t k = 0; k < in.counts.size(); ++k) {
            const auto& c = in.counts[k];
            if (c.epoch >= static_cast<std::uint32_t>(epochs) || c.count == 0 || (k > 0 && c.epoch <= last_epoch)) {
                throw ValidationError("malformed epoch histogram on edge " + users[in.source] + " -> " +
                                      users[in.target]);
            }
            last_epoch = c.epoch;
            interactions += c.count;
            g.counts_.push_back(c);
        }
        g.count_offsets_.push_back(g.counts_.size());
        g.edges_.push_back({in.source, in.target, in.weight, interactions});
    }

    g.out_offsets_.assign(n + 1, 0);
    for (const auto& e : g.edges_) {
        ++g.out_offsets_[e.source + 1];
    }
    std::partial_sum(g.out_offsets_.begin(), g.out_offsets_.end(), g.out_offsets_.begin());

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return users[a] < users[b]; });
    g.lexical_rank_.assign(n, 0);
    for (std::size_t pos = 0; pos < n; ++pos) {
        g.lexical_rank_[order[pos]] = static_cast<std::uint32_t>(pos);
    }

    g.users_ = std::move(users);
    g.verified_ = std::move(verified);
    return g;
}

std::optional<NodeIndex> InteractionGraph::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<NodeIndex> InteractionGraph::verified_users() const {
    std::vector<NodeIndex> out;
    for (std::size_t i = 0; i < verified_.size(); ++i) {
        if (verified_[i]) {
            out.push_back(static_cast<NodeIndex>(i));
        }
    }
    return out;
}

std::span<const Edge> InteractionGraph::out_edges(NodeIndex u) const {
    return std::span<const Edge>(edges_).subspan(out_offsets_[u], out_offsets_[u + 1] - out_offsets_[u]);
}

std::span<const EpochCount> InteractionGraph::epoch_counts(std::size_t edge) const {
    return std::span<const EpochCount>(counts_).subspan(count_offsets_[edge],
                                                        count_offsets_[edge + 1] - count_offsets_[edge]);
}

std::vector<std::uint32_t> InteractionGraph::dense_epoch_counts(std::size_t edge) const {
    std::vector<std::uint32_t> dense(static_cast<std::size_t>(epochs_), 0);
    for (const auto& c : epoch_counts(edge)) {
        dense[c.epoch] = c.count;
    }
    return dense;
}

double InteractionGraph::out_weight(NodeIndex u) const {
    double total = 0.0;
    for (const auto& e : out_edges(u)) {
        total += e.weight;
    }
    return total;
}

double InteractionGraph::total_weight() const {
    std::vector<double> weights;
    weights.reserve(edges_.size());
    for (const auto& e : edges_) {
        weights.push_back(e.weight);
    }
    return compensated_sum(weights);
}

// ---------------------------------------------------------------------------

InteractionGraph graph_from_weighted_edges(std::size_t user_count, std::span<const WeightedEdge> edges,
                                           std::span<const NodeIndex> verified) {
    std::vector<UserId> users;
    users.reserve(user_count);
    for (std::size_t i = 0; i < user_count; ++i) {
        users.push_back(synthetic_user_id(i, user_count));
    }
    std::vector<char> flags(user_count, 0);
    for (auto v : verified) {
        if (v >= user_count) {
            throw ValidationError("verified user out of range");
        }
        flags[v] = 1;
    }
    std::vector<EdgeInput> inputs;
    inputs.reserve(edges.size());
    for (const auto& e : edges) {
        inputs.push_back({e.source, e.target, e.weight, {{0, 1}}});
    }
    return InteractionGraph::from_edges(std::move(users), std::move(flags), WeightModel::sum(), 1,
                                        std::move(inputs));
}

InteractionGraph build_graph(std::span<const InteractionRecord> records, std::span<const UserAttributes> attrs,
                             const WeightModel& model, const TargetPeriod& period) {
    model.validate();
    period.validate();
    if (model.kind == WeightModelKind::entropy && model.epochs != period.epochs) {
        throw ValidationError("entropy model epochs (" + std::to_string(model.epochs) +
                              ") differ from the target period's (" + std::to_string(period.epochs) + ")");
    }
    if (records.empty()) {
        throw ValidationError("cannot build a graph from an empty record set");
    }

    std::vector<UserId> users;
    for (const auto& r : records) {
        users.push_back(r.source);
        users.push_back(r.target);
    }
    std::sort(users.begin(), users.end());
    users.erase(std::unique(users.begin(), users.end()), users.end());
    std::unordered_map<std::string_view, NodeIndex> index;
    index.reserve(users.size());
    for (std::size_t i = 0; i < users.size(); ++i) {
        index.emplace(users[i], static_cast<NodeIndex>(i));
    }

    struct Hit {
        NodeIndex source;
        NodeIndex target;
        std::uint32_t epoch;
    };
    std::vector<Hit> hits;
    hits.reserve(records.size());
    for (const auto& r : records) {
        if (r.source == r.target) {
            throw ValidationError("self-interaction record for " + r.source);
        }
        if (!period.contains(r.timestamp)) {
            throw ValidationError("record outside the target period");
        }
        hits.push_back({index.at(r.source), index.at(r.target), static_cast<std::uint32_t>(period.epoch_of(r.timestamp))});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        return std::tie(a.source, a.target, a.epoch) < std::tie(b.source, b.target, b.epoch);
    });

    std::vector<EdgeInput> edges;
    for (const auto& h : hits) {
        if (edges.empty() || edges.back().source != h.source || edges.back().target != h.target) {
            edges.push_back({h.source, h.target, 0.0, {}});
        }
        auto& counts = edges.back().counts;
        if (!counts.empty() && counts.back().epoch == h.epoch) {
            ++counts.back().count;
        } else {
            counts.push_back({h.epoch, 1});
        }
    }
    for (auto& e : edges) {
        e.weight = sparse_weight(model, e.counts);
    }

    std::vector<char> verified(users.size(), 0);
    for (const auto& a : attrs) {
        auto it = index.find(a.user_id);
        if (it != index.end()) {
            verified[it->second] = a.verified ? 1 : 0;
        }
    }
    return InteractionGraph::from_edges(std::move(users), std::move(verified), model, period.epochs,
                                        std::move(edges));
}

InteractionGraph build_synthetic_graph(const SyntheticSpec& spec, const WeightModel& model) {
    model.validate();
    if (model.kind == WeightModelKind::entropy && model.epochs != spec.period.epochs) {
        throw ValidationError("entropy model epochs differ from the synthetic period's");
    }
    SyntheticTopology topo = generate_topology(spec);
    const std::size_t n = spec.node_count;

    std::vector<EdgeInput> edges(topo.edges.size());
    std::vector<std::vector<std::uint32_t>> pending(topo.edges.size());
    for_each_synthetic_interaction(spec, topo, [&](std::size_t e, InteractionKind, std::int64_t ts) {
        pending[e].push_back(static_cast<std::uint32_t>(spec.period.epoch_of(ts)));
    });
    std::vector<char> seen(n, 0);
    for (std::size_t e = 0; e < topo.edges.size(); ++e) {
        auto [s, t] = topo.edges[e];
        edges[e].source = s;
        edges[e].target = t;
        edges[e].counts = histogram(pending[e]);
        edges[e].weight = sparse_weight(model, edges[e].counts);
        std::vector<std::uint32_t>().swap(pending[e]);
        seen[s] = seen[t] = 1;
    }

    // Users without interactions are dropped; keep the rest in index (= id) order.
    std::vector<NodeIndex> remap(n, 0);
    std::vector<UserId> users;
    std::vector<char> verified;
    for (std::size_t i = 0; i < n; ++i) {
        if (seen[i]) {
            remap[i] = static_cast<NodeIndex>(users.size());
            users.push_back(synthetic_user_id(i, n));
            verified.push_back(topo.verified[i]);
        }
    }
    for (auto& e : edges) {
        e.source = remap[e.source];
        e.target = remap[e.target];
    }
    return InteractionGraph::from_edges(std::move(users), std::move(verified), model, spec.period.epochs,
                                        std::move(edges));
}

InteractionGraph induced_subgraph(const InteractionGraph& g, std::span<const NodeIndex> keep) {
    constexpr NodeIndex absent = static_cast<NodeIndex>(-1);
    std::vector<NodeIndex> remap(g.user_count(), absent);
    std::vector<UserId> users;
    std::vector<char> verified;
    for (std::size_t k = 0; k < keep.size(); ++k) {
        remap[keep[k]] = static_cast<NodeIndex>(k);
        users.push_back(g.user_id(keep[k]));
        verified.push_back(g.verified(keep[k]) ? 1 : 0);
    }
    std::vector<EdgeInput> edges;
    auto all = g.edges();
    for (std::size_t e = 0; e < all.size(); ++e) {
        if (remap[all[e].source] == absent || remap[all[e].target] == absent) {
            continue;
        }
        auto counts = g.epoch_counts(e);
        edges.push_back({remap[all[e].source], remap[all[e].target], all[e].weight, {counts.begin(), counts.end()}});
    }
    return InteractionGraph::from_edges(std::move(users), std::move(verified), g.model(), g.epochs(),
                                        std::move(edges));
}

std::vector<std::uint32_t> strongly_connected_components(const InteractionGraph& g, std::size_t* count) {
    const std::size_t n = g.user_count();
    constexpr std::uint32_t unvisited = static_cast<std::uint32_t>(-1);
    std::vector<std::uint32_t> index(n, unvisited), low(n, 0), component(n, unvisited);
    std::vector<char> on_stack(n, 0);
    std::vector<NodeIndex> stack;
    struct Frame {
        NodeIndex node;
        std::size_t next_edge;
    };
    std::vector<Frame> call;
    std::uint32_t next_index = 0;
    std::uint32_t components = 0;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited) {
            continue;
        }
        call.push_back({static_cast<NodeIndex>(root), 0});
        index[root] = low[root] = next_index++;
        stack.push_back(static_cast<NodeIndex>(root));
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& frame = call.back();
            auto out = g.out_edges(frame.node);
            if (frame.next_edge < out.size()) {
                NodeIndex w = out[frame.next_edge++].target;
                if (index[w] == unvisited) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[frame.node] = std::min(low[frame.node], index[w]);
                }
                continue;
            }
            NodeIndex v = frame.node;
            call.pop_back();
            if (!call.empty()) {
                low[call.back().node] = std::min(low[call.back().node], low[v]);
            }
            if (low[v] == index[v]) {
                NodeIndex w = 0;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    component[w] = components;
                } while (w != v);
                ++components;
            }
        }
    }
    if (count != nullptr) {
        *count = components;
    }
    return component;
}

GsccResult extract_gscc(const InteractionGraph& g) {
    if (g.empty()) {
        throw ValidationError("cannot extract the GSCC of an empty graph");
    }
    std::size_t count = 0;
    auto component = strongly_connected_components(g, &count);
    std::vector<std::size_t> size(count, 0);
    std::vector<std::uint32_t> min_lex(count, static_cast<std::uint32_t>(-1));
    auto lex = g.lexical_rank();
    for (std::size_t u = 0; u < g.user_count(); ++u) {
        ++size[component[u]];
        min_lex[component[u]] = std::min(min_lex[component[u]], lex[u]);
    }
    std::vector<std::uint32_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (size[a] != size[b]) {
            return size[a] > size[b];
        }
        return min_lex[a] < min_lex[b];
    });
    const std::uint32_t giant = order[0];

    GsccResult result;
    result.component_count = count;
    result.largest_size = size[giant];
    result.second_size = count > 1 ? size[order[1]] : 0;
    for (std::size_t u = 0; u < g.user_count(); ++u) {
        if (component[u] == giant) {
            result.original_index.push_back(static_cast<NodeIndex>(u));
        }
    }
    result.graph = induced_subgraph(g, result.original_index);
    return result;
}

InteractionGraph inverse_unit_graph(const InteractionGraph& g) {
    if (g.empty()) {
        throw ValidationError("cannot invert an empty graph");
    }
    std::vector<EdgeInput> edges;
    auto all = g.edges();
    edges.reserve(all.size());
    for (std::size_t e = 0; e < all.size(); ++e) {
        auto counts = g.epoch_counts(e);
        edges.push_back({all[e].target, all[e].source, 1.0, {counts.begin(), counts.end()}});
    }
    std::vector<UserId> users(g.user_ids().begin(), g.user_ids().end());
    std::vector<char> verified(g.verified_flags().begin(), g.verified_flags().end());
    return InteractionGraph::from_edges(std::move(users), std::move(verified), g.model(), g.epochs(),
                                        std::move(edges));
}

// ---------------------------------------------------------------------------

NormalizedMatrix::NormalizedMatrix(const InteractionGraph& g) {
    const std::size_t n = g.user_count();
    dangling_.assign(n, 0);
    out_offsets_.assign(n + 1, 0);
    // Row-major copy: out-edges already sorted by (source, target).
    for (std::size_t u = 0; u < n; ++u) {
        auto out = g.out_edges(static_cast<NodeIndex>(u));
        if (out.empty()) {
            dangling_[u] = 1;
            out_targets_.push_back(static_cast<NodeIndex>(u));
            out_values_.push_back(1.0);
        } else {
            double total = 0.0;
            for (const auto& e : out) {
                total += e.weight;
            }
            for (const auto& e : out) {
                out_targets_.push_back(e.target);
                out_values_.push_back(e.weight / total);
            }
        }
        out_offsets_[u + 1] = out_targets_.size();
    }

    // Column-major copy for the pull step; filling rows in ascending order keeps
    // each column's predecessors ascending.
    in_offsets_.assign(n + 1, 0);
    for (auto t : out_targets_) {
        ++in_offsets_[t + 1];
    }
    std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());
    in_sources_.resize(out_targets_.size());
    in_values_.resize(out_targets_.size());
    std::vector<std::size_t> cursor(in_offsets_.begin(), in_offsets_.end() - 1);
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t k = out_offsets_[u]; k < out_offsets_[u + 1]; ++k) {
            auto slot = cursor[out_targets_[k]]++;
            in_sources_[slot] = static_cast<NodeIndex>(u);
            in_values_[slot] = out_values_[k];
        }
    }
}

double NormalizedMatrix::entry(NodeIndex row, NodeIndex col) const {
    auto sources = column_sources(col);
    auto it = std::lower_bound(sources.begin(), sources.end(), row);
    if (it == sources.end() || *it != row) {
        return 0.0;
    }
    return column_values(col)[static_cast<std::size_t>(it - sources.begin())];
}

std::vector<std::pair<NodeIndex, double>> NormalizedMatrix::row(NodeIndex u) const {
    std::vector<std::pair<NodeIndex, double>> out;
    for (std::size_t k = out_offsets_[u]; k < out_offsets_[u + 1]; ++k) {
        out.emplace_back(out_targets_[k], out_values_[k]);
    }
    return out;
}

double NormalizedMatrix::row_sum(NodeIndex u) const {
    return compensated_sum(std::span<const double>(out_values_).subspan(out_offsets_[u], out_offsets_[u + 1] - out_offsets_[u]));
}

std::span<const NodeIndex> NormalizedMatrix::column_sources(NodeIndex col) const {
    return std::span<const NodeIndex>(in_sources_).subspan(in_offsets_[col], in_offsets_[col + 1] - in_offsets_[col]);
}

std::span<const double> NormalizedMatrix::column_values(NodeIndex col) const {
    return std::span<const double>(in_values_).subspan(in_offsets_[col], in_offsets_[col + 1] - in_offsets_[col]);
}

void NormalizedMatrix::propagate(std::span<const double> x, std::span<double> out) const {
    const std::size_t n = size();
    const NodeIndex* sources = in_sources_.data();
    const double* values = in_values_.data();
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t k = in_offsets_[j]; k < in_offsets_[j + 1]; ++k) {
            acc += x[sources[k]] * values[k];
        }
        out[j] = acc;
    }
}

} // namespace truetop
