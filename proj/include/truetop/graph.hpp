#pragma once

#include "truetop/common.hpp"
#include "truetop/ingest.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace truetop {

enum class WeightModelKind { sum, entropy };

struct WeightModel {
    WeightModelKind kind = WeightModelKind::sum;
    /// Epoch count; only meaningful for the entropy model.
    int epochs = 1;

    static WeightModel sum() { return {WeightModelKind::sum, 1}; }
    static WeightModel entropy(int epochs) { return {WeightModelKind::entropy, epochs}; }

    void validate() const;
    /// "sum" or "entropy:<mu>".
    std::string to_string() const;
    static WeightModel parse(std::string_view text);

    bool operator==(const WeightModel&) const = default;
};

/// |I|: the number of interactions, i.e. the sum of the per-epoch counts.
double edge_weight_sum(std::span<const std::uint32_t> counts);

/// (1 - sum_x p_x ln p_x) * |I| with p_x = d_x / |I| and 0 ln 0 = 0.
/// Requires at least one interaction.
double edge_weight_entropy(std::span<const std::uint32_t> counts);

struct EpochCount {
    std::uint32_t epoch = 0;
    std::uint32_t count = 0;

    bool operator==(const EpochCount&) const = default;
};

struct Edge {
    NodeIndex source = 0;
    NodeIndex target = 0;
    double weight = 0.0;
    /// |I_{source,target}|, equal to the sum of the edge's epoch counts.
    std::uint64_t interactions = 0;
};

struct EdgeInput {
    NodeIndex source = 0;
    NodeIndex target = 0;
    double weight = 0.0;
    /// Sparse per-epoch histogram, nonzero entries only.
    std::vector<EpochCount> counts;
};

/// Weighted directed interaction graph over densely indexed users. Immutable
/// once built; edges are stored sorted by (source, target).
class InteractionGraph {
public:
    InteractionGraph() = default;

    /// Validates and takes ownership. Throws ValidationError on self-edges,
    /// duplicate pairs, non-positive weights, out-of-range indices or ids
    /// that repeat.
    static InteractionGraph from_edges(std::vector<UserId> users, std::vector<char> verified,
                                       WeightModel model, int epochs, std::vector<EdgeInput> edges);

    std::size_t user_count() const { return users_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    bool empty() const { return users_.empty(); }

    const UserId& user_id(NodeIndex u) const { return users_[u]; }
    std::span<const UserId> user_ids() const { return users_; }
    std::optional<NodeIndex> find(std::string_view id) const;

    bool verified(NodeIndex u) const { return verified_[u] != 0; }
    std::span<const char> verified_flags() const { return verified_; }
    std::vector<NodeIndex> verified_users() const;

    std::span<const Edge> edges() const { return edges_; }
    std::span<const Edge> out_edges(NodeIndex u) const;
    std::span<const EpochCount> epoch_counts(std::size_t edge) const;
    std::vector<std::uint32_t> dense_epoch_counts(std::size_t edge) const;

    const WeightModel& model() const { return model_; }
    int epochs() const { return epochs_; }

    double out_weight(NodeIndex u) const;
    double total_weight() const;

    /// Position of each user in ascending user-id order; the ranking tie-break.
    std::span<const std::uint32_t> lexical_rank() const { return lexical_rank_; }

private:
    std::vector<UserId> users_;
    std::vector<char> verified_;
    WeightModel model_;
    int epochs_ = 1;
    std::vector<Edge> edges_;
    std::vector<std::size_t> out_offsets_;
    std::vector<std::size_t> count_offsets_;
    std::vector<EpochCount> counts_;
    std::vector<std::uint32_t> lexical_rank_;
    std::unordered_map<std::string, NodeIndex> index_;
};

struct WeightedEdge {
    NodeIndex source = 0;
    NodeIndex target = 0;
    double weight = 1.0;
};

/// Graph over users u0..u{n-1} (zero-padded ids, so index order is id order)
/// with explicit weights and one interaction per edge in epoch 0.
InteractionGraph graph_from_weighted_edges(std::size_t user_count, std::span<const WeightedEdge> edges,
                                           std::span<const NodeIndex> verified = {});

/// Groups records by ordered pair and weighs each pair under `model`. Users
/// are indexed in ascending id order; attribute rows for users without any
/// interaction are ignored, users missing from `attrs` are unverified.
InteractionGraph build_graph(std::span<const InteractionRecord> records, std::span<const UserAttributes> attrs,
                             const WeightModel& model, const TargetPeriod& period);

/// Same graph as build_graph(generate_powerlaw_graph(spec)) without
/// materializing the records.
InteractionGraph build_synthetic_graph(const SyntheticSpec& spec, const WeightModel& model);

/// Subgraph induced by `keep` (ascending original indices).
InteractionGraph induced_subgraph(const InteractionGraph& g, std::span<const NodeIndex> keep);

struct GsccResult {
    InteractionGraph graph;
    /// original_index[i] is the index in the input graph of GSCC user i.
    std::vector<NodeIndex> original_index;
    std::size_t largest_size = 0;
    std::size_t second_size = 0;
    std::size_t component_count = 0;
};

/// Strongly connected components (iterative Tarjan); component id per user.
std::vector<std::uint32_t> strongly_connected_components(const InteractionGraph& g, std::size_t* count = nullptr);

/// Largest SCC by vertex count; ties go to the component holding the smallest user id.
GsccResult extract_gscc(const InteractionGraph& g);

/// Every edge reversed with weight 1; epoch counts are kept.
InteractionGraph inverse_unit_graph(const InteractionGraph& g);

/// Row-stochastic W with W(i,j) = w_ij / sum_k w_ik. A user without out-edges
/// gets a self-loop of weight 1 so that the credits it receives stay there.
class NormalizedMatrix {
public:
    explicit NormalizedMatrix(const InteractionGraph& g);

    std::size_t size() const { return dangling_.size(); }
    std::size_t nonzeros() const { return in_sources_.size(); }

    bool dangling(NodeIndex u) const { return dangling_[u] != 0; }
    double entry(NodeIndex row, NodeIndex col) const;
    std::vector<std::pair<NodeIndex, double>> row(NodeIndex u) const;
    double row_sum(NodeIndex u) const;

    /// Predecessors of `col` in ascending order, with their matrix entries.
    std::span<const NodeIndex> column_sources(NodeIndex col) const;
    std::span<const double> column_values(NodeIndex col) const;

    /// out = x W, each output summed over ascending predecessor index.
    void propagate(std::span<const double> x, std::span<double> out) const;

private:
    std::vector<std::size_t> in_offsets_;
    std::vector<NodeIndex> in_sources_;
    std::vector<double> in_values_;
    std::vector<std::size_t> out_offsets_;
    std::vector<NodeIndex> out_targets_;
    std::vector<double> out_values_;
    std::vector<char> dangling_;
};

inline NormalizedMatrix normalize(const InteractionGraph& g) { return NormalizedMatrix(g); }

// --- snapshot persistence ---------------------------------------------------
//   #truetop-graph v1 model=<sum|entropy:mu>
//   i,j,w,d_1|d_2|...|d_mu
//   #users
//   user_id,verified

void write_snapshot(std::ostream& out, const InteractionGraph& g);
void write_snapshot(const std::filesystem::path& path, const InteractionGraph& g);
InteractionGraph read_snapshot(std::istream& in);
InteractionGraph read_snapshot(const std::filesystem::path& path);

struct GraphStats {
    std::size_t users = 0;
    std::size_t edges = 0;
    std::size_t verified = 0;
    double total_weight = 0.0;
    std::size_t gscc_users = 0;
    std::size_t gscc_edges = 0;
    std::size_t second_scc_users = 0;
};

} // namespace truetop
