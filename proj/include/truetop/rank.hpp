#pragma once

#include "truetop/common.hpp"
#include "truetop/graph.hpp"
#include "truetop/ingest.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace truetop {

inline constexpr double default_eta = 1e-9;
inline constexpr double default_nu = 1e-9;
inline constexpr double ground_truth_nu = 1e-8;
inline constexpr double pagerank_reset = 0.15;

// --- seeds --------------------------------------------------------------

enum class SeedMethod { basic, reverse_wec };

std::string_view to_string(SeedMethod method);
SeedMethod parse_seed_method(std::string_view text);

struct SeedConfig {
    std::size_t count = 100;
    SeedMethod method = SeedMethod::basic;
    std::uint64_t rng_seed = 1;
    /// Convergence threshold of the reverse distribution.
    double eta = default_eta;
    std::size_t max_iterations = 10000;
};

struct SeedSelection {
    /// Seeds in selection order. For the basic method a larger count with the
    /// same rng_seed extends the same sequence.
    std::vector<NodeIndex> seeds;
    /// Initial credit of every user; sums to 1 and is nonzero only on seeds.
    std::vector<double> initial_credits;
};

/// basic: `count` verified users uniformly at random, 1/count credits each.
/// reverse_wec: credit distribution to convergence on the unit-weight reversed
/// graph started uniformly on all verified users; the `count` verified users
/// with the most credits become seeds with credits proportional to those.
SeedSelection select_seeds(const InteractionGraph& g, const SeedConfig& cfg);

/// Dense initial vector spreading one credit evenly over `seeds`.
std::vector<double> uniform_seed_vector(std::size_t user_count, std::span<const NodeIndex> seeds);

// --- credit distribution --------------------------------------------------

struct CreditState {
    std::vector<double> credits;
    std::size_t iteration = 0;

    double total() const { return compensated_sum(credits); }
};

/// One round of credit distribution: every user forwards all its credits to
/// its successors in proportion to edge weight. The result is rescaled by the
/// ratio of compensated totals so credits are conserved to rounding.
CreditState distribute_step(const CreditState& state, const NormalizedMatrix& w);

/// In-place variant used by the iteration loops; `out` must not alias `in`.
void distribute_into(const NormalizedMatrix& w, std::span<const double> in, std::span<double> out);

// --- rankings -------------------------------------------------------------

/// Order used everywhere: credit descending, then user id ascending.
struct RankOrder {
    std::span<const double> credits;
    std::span<const std::uint32_t> lexical_rank;

    bool before(NodeIndex a, NodeIndex b) const {
        if (credits[a] != credits[b]) {
            return credits[a] > credits[b];
        }
        return lexical_rank[a] < lexical_rank[b];
    }
};

/// Full ranking of every user, rank 1 first.
class RankedList {
public:
    RankedList() = default;
    static RankedList from_credits(std::span<const double> credits, std::span<const std::uint32_t> lexical_rank);

    std::size_t size() const { return order_.size(); }
    std::span<const NodeIndex> order() const { return order_; }
    /// 1-based position of `u`.
    std::size_t rank_of(NodeIndex u) const { return position_[u]; }
    double credit_of(NodeIndex u) const { return credits_[u]; }
    std::span<const double> credits() const { return credits_; }
    std::vector<NodeIndex> top(std::size_t k) const;

private:
    std::vector<NodeIndex> order_;
    std::vector<std::size_t> position_;
    std::vector<double> credits_;
};

/// Sum of |r_curr(u) - r_prev(u)| over the union of both top-K sets, with
/// ranks taken from the full rankings. Throws ValidationError when the two
/// lists do not rank the same number of users.
std::size_t ranking_distance(const RankedList& prev, const RankedList& curr, std::size_t k);

/// The k best users under `order`, best first. O(n + k log k).
std::vector<NodeIndex> top_k(const RankOrder& order, std::size_t k);

/// 1-based full-ranking positions of `users` under `order` without sorting
/// everyone. O(n log |users|).
std::vector<std::size_t> rank_positions(const RankOrder& order, std::span<const NodeIndex> users);

/// ranking_distance computed from two credit vectors via top_k/rank_positions.
std::size_t ranking_distance(const RankOrder& prev, const RankOrder& curr, std::size_t k);

// --- early-terminated distribution ---------------------------------------

struct TerminationConfig {
    std::size_t k = 100;
    double epsilon = 0.0;
    /// Loop bound T: at most T-1 distribution rounds are run.
    std::size_t max_iterations = 1000;
    double eta = default_eta;
    double nu = default_nu;

    void validate() const;
};

struct TraceRow {
    std::size_t t = 0;
    std::size_t distance = 0;
    std::optional<double> region_credits;
    double l1_step = 0.0;
};

struct TrueTopResult {
    RankedList ranking;
    std::vector<NodeIndex> top;
    /// Distribution rounds run.
    std::size_t iterations = 0;
    /// false when the loop bound was hit before the distance dropped to epsilon.
    bool stabilized = false;
    std::vector<TraceRow> trace;
    CreditState state;
};

/// Credit distribution from `initial`, stopping at the first round whose
/// top-K ranking distance to the previous round is <= epsilon, or at the loop
/// bound. `region` (optional, one flag per user) adds the credits held by the
/// flagged users to each trace row.
TrueTopResult truetop_rank(const NormalizedMatrix& w, std::span<const std::uint32_t> lexical_rank,
                           std::span<const double> initial, const TerminationConfig& term,
                           std::span<const char> region = {});

TrueTopResult truetop_rank(const InteractionGraph& g, const SeedSelection& seeds, const TerminationConfig& term,
                           std::span<const char> region = {});

// --- baselines ------------------------------------------------------------

struct PowerIterationResult {
    std::vector<double> credits;
    std::size_t iterations = 0;
    bool converged = false;
    double last_step = 0.0;
};

/// x <- x W until ||x_t - x_{t-1}||_1 < nu or `max_iterations` rounds.
PowerIterationResult wec_power_iteration(const NormalizedMatrix& w, std::span<const double> v0, double nu,
                                         std::size_t max_iterations);

/// x <- (1 - reset) x W + reset / n from the uniform vector.
PowerIterationResult pagerank_baseline(const NormalizedMatrix& w, double reset, double nu,
                                       std::size_t max_iterations);

struct KredScore {
    UserId user;
    std::uint64_t score = 0;
};

/// Incoming interaction counts of every user appearing in `records`, highest
/// first, ties by user id.
std::vector<KredScore> kred_baseline(std::span<const InteractionRecord> records);

/// Ranking by precomputed incoming counts; ties by user id.
std::vector<NodeIndex> kred_ranking(std::span<const std::uint64_t> incoming, std::span<const std::uint32_t> lexical_rank);

// --- output ---------------------------------------------------------------

/// `rank,user_id,credit` with a header row.
void write_ranked_csv(std::ostream& out, const InteractionGraph& g, const RankedList& ranking, std::size_t limit);

/// `t,d_K,credits_in_sybil_region,l1_step` with a header row.
void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace);

} // namespace truetop
