#include "truetop/rank.hpp"
#include "truetop/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace truetop {

std::string_view to_string(SeedMethod method) {
    return method == SeedMethod::basic ? "basic" : "reverse_wec";
}

SeedMethod parse_seed_method(std::string_view text) {
    text = trim(text);
    if (text == "basic") {
        return SeedMethod::basic;
    }
    if (text == "reverse_wec" || text == "reverse-wec" || text == "rwec") {
        return SeedMethod::reverse_wec;
    }
    throw ValidationError("unknown seed method '" + std::string(text) + "'");
}

std::vector<double> uniform_seed_vector(std::size_t user_count, std::span<const NodeIndex> seeds) {
    std::vector<double> v(user_count, 0.0);
    for (auto s : seeds) {
        v[s] = 1.0 / static_cast<double>(seeds.size());
    }
    return v;
}

SeedSelection select_seeds(const InteractionGraph& g, const SeedConfig& cfg) {
    if (cfg.count < 1) {
        throw ValidationError("seed count must be >= 1");
    }
    auto verified = g.verified_users();
    if (verified.size() < cfg.count) {
        throw SeedingError("graph has " + std::to_string(verified.size()) + " verified users, " +
                           std::to_string(cfg.count) + " seeds requested");
    }
    SeedSelection out;
    if (cfg.method == SeedMethod::basic) {
        Rng rng(derive_seed(cfg.rng_seed, "seeds"));
        rng.shuffle(verified);
        out.seeds.assign(verified.begin(), verified.begin() + static_cast<std::ptrdiff_t>(cfg.count));
        out.initial_credits = uniform_seed_vector(g.user_count(), out.seeds);
        return out;
    }

    NormalizedMatrix reverse(inverse_unit_graph(g));
    auto start = uniform_seed_vector(g.user_count(), verified);
    auto reach = wec_power_iteration(reverse, start, cfg.eta, cfg.max_iterations);
    RankOrder order{reach.credits, g.lexical_rank()};
    std::sort(verified.begin(), verified.end(), [&](NodeIndex a, NodeIndex b) { return order.before(a, b); });
    out.seeds.assign(verified.begin(), verified.begin() + static_cast<std::ptrdiff_t>(cfg.count));
    out.initial_credits.assign(g.user_count(), 0.0);
    double total = 0.0;
    for (auto s : out.seeds) {
        total += reach.credits[s];
    }
    if (!(total > 0.0)) {
        out.initial_credits = uniform_seed_vector(g.user_count(), out.seeds);
        return out;
    }
    for (auto s : out.seeds) {
        out.initial_credits[s] = reach.credits[s] / total;
    }
    return out;
}

// ---------------------------------------------------------------------------

void distribute_into(const NormalizedMatrix& w, std::span<const double> in, std::span<double> out) {
    w.propagate(in, out);
    const double before = compensated_sum(in);
    const double after = compensated_sum(std::span<const double>(out.data(), out.size()));
    if (after > 0.0 && before != after) {
        const double scale = before / after;
        for (auto& v : out) {
            v *= scale;
        }
    }
}

CreditState distribute_step(const CreditState& state, const NormalizedMatrix& w) {
    if (state.credits.size() != w.size()) {
        throw ValidationError("credit vector does not match the matrix size");
    }
    CreditState next;
    next.credits.resize(w.size());
    distribute_into(w, state.credits, next.credits);
    next.iteration = state.iteration + 1;
    return next;
}

// ---------------------------------------------------------------------------

RankedList RankedList::from_credits(std::span<const double> credits, std::span<const std::uint32_t> lexical_rank) {
    RankedList list;
    const std::size_t n = credits.size();
    list.credits_.assign(credits.begin(), credits.end());
    list.order_.resize(n);
    std::iota(list.order_.begin(), list.order_.end(), 0);
    RankOrder order{list.credits_, lexical_rank};
    std::sort(list.order_.begin(), list.order_.end(), [&](NodeIndex a, NodeIndex b) { return order.before(a, b); });
    list.position_.assign(n, 0);
    for (std::size_t p = 0; p < n; ++p) {
        list.position_[list.order_[p]] = p + 1;
    }
    return list;
}

std::vector<NodeIndex> RankedList::top(std::size_t k) const {
    k = std::min(k, order_.size());
    return {order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(k)};
}

namespace {

std::vector<NodeIndex> union_of(std::span<const NodeIndex> a, std::span<const NodeIndex> b) {
    std::vector<NodeIndex> u(a.begin(), a.end());
    u.insert(u.end(), b.begin(), b.end());
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    return u;
}

std::size_t abs_diff(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

} // namespace

std::size_t ranking_distance(const RankedList& prev, const RankedList& curr, std::size_t k) {
    if (prev.size() != curr.size()) {
        throw ValidationError("ranking distance needs two rankings of the same users");
    }
    auto members = union_of(prev.top(k), curr.top(k));
    std::size_t d = 0;
    for (auto u : members) {
        d += abs_diff(curr.rank_of(u), prev.rank_of(u));
    }
    return d;
}

std::vector<NodeIndex> top_k(const RankOrder& order, std::size_t k) {
    const std::size_t n = order.credits.size();
    k = std::min(k, n);
    std::vector<NodeIndex> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    auto cmp = [&](NodeIndex a, NodeIndex b) { return order.before(a, b); };
    if (k < n) {
        std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), cmp);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end(), cmp);
    return idx;
}

std::vector<std::size_t> rank_positions(const RankOrder& order, std::span<const NodeIndex> users) {
    const std::size_t m = users.size();
    std::vector<std::size_t> slots(m);
    std::iota(slots.begin(), slots.end(), 0);
    std::sort(slots.begin(), slots.end(), [&](std::size_t a, std::size_t b) { return order.before(users[a], users[b]); });
    if (m == 0) {
        return {};
    }
    // Someone can only precede a member if its credit is at least the lowest member credit.
    const double floor = order.credits[users[slots.back()]];
    std::vector<std::size_t> starts(m + 1, 0);
    const std::size_t n = order.credits.size();
    for (std::size_t v = 0; v < n; ++v) {
        if (order.credits[v] < floor) {
            continue;
        }
        // First sorted member that v precedes; v precedes that member and all after it.
        std::size_t lo = 0;
        std::size_t hi = m;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (order.before(static_cast<NodeIndex>(v), users[slots[mid]])) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        ++starts[lo];
    }
    std::vector<std::size_t> positions(m);
    std::size_t ahead = 0;
    for (std::size_t i = 0; i < m; ++i) {
        ahead += starts[i];
        positions[slots[i]] = ahead + 1;
    }
    return positions;
}

std::size_t ranking_distance(const RankOrder& prev, const RankOrder& curr, std::size_t k) {
    if (prev.credits.size() != curr.credits.size()) {
        throw ValidationError("ranking distance needs two rankings of the same users");
    }
    auto members = union_of(top_k(prev, k), top_k(curr, k));
    auto before = rank_positions(prev, members);
    auto after = rank_positions(curr, members);
    std::size_t d = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        d += abs_diff(before[i], after[i]);
    }
    return d;
}

// ---------------------------------------------------------------------------

void TerminationConfig::validate() const {
    if (k < 1) {
        throw ValidationError("K must be >= 1");
    }
    if (!(epsilon >= 0.0)) {
        throw ValidationError("ranking-error tolerance must be >= 0");
    }
    if (max_iterations < 1) {
        throw ValidationError("maximum iteration count T must be >= 1");
    }
    if (!(eta > 0.0) || !(nu > 0.0)) {
        throw ValidationError("convergence thresholds must be positive");
    }
}

namespace {

double region_total(std::span<const double> credits, std::span<const char> region) {
    double total = 0.0;
    double carry = 0.0;
    for (std::size_t i = 0; i < region.size(); ++i) {
        if (region[i]) {
            // Kahan: region totals feed the hoarding checks at 1e-12 scale.
            double y = credits[i] - carry;
            double t = total + y;
            carry = (t - total) - y;
            total = t;
        }
    }
    return total;
}

} // namespace

TrueTopResult truetop_rank(const NormalizedMatrix& w, std::span<const std::uint32_t> lexical_rank,
                           std::span<const double> initial, const TerminationConfig& term,
                           std::span<const char> region) {
    term.validate();
    const std::size_t n = w.size();
    if (initial.size() != n || lexical_rank.size() != n || (!region.empty() && region.size() != n)) {
        throw ValidationError("credit vector, tie-break order and region labels must cover every user");
    }
    const std::size_t k = std::min(term.k, n);
    std::vector<double> prev(initial.begin(), initial.end());
    std::vector<double> curr(n, 0.0);

    TrueTopResult result;
    std::size_t t = 1;
    while (t < term.max_iterations) {
        distribute_into(w, prev, curr);
        result.iterations = t;
        RankOrder before{prev, lexical_rank};
        RankOrder after{curr, lexical_rank};
        TraceRow row;
        row.t = t;
        row.distance = ranking_distance(before, after, k);
        row.l1_step = l1_distance(curr, prev);
        if (!region.empty()) {
            row.region_credits = region_total(curr, region);
        }
        result.trace.push_back(row);
        prev.swap(curr);
        if (static_cast<double>(row.distance) <= term.epsilon) {
            result.stabilized = true;
            break;
        }
        ++t;
    }
    result.ranking = RankedList::from_credits(prev, lexical_rank);
    result.top = result.ranking.top(k);
    result.state.credits = std::move(prev);
    result.state.iteration = result.iterations;
    return result;
}

TrueTopResult truetop_rank(const InteractionGraph& g, const SeedSelection& seeds, const TerminationConfig& term,
                           std::span<const char> region) {
    NormalizedMatrix w(g);
    return truetop_rank(w, g.lexical_rank(), seeds.initial_credits, term, region);
}

// ---------------------------------------------------------------------------

PowerIterationResult wec_power_iteration(const NormalizedMatrix& w, std::span<const double> v0, double nu,
                                         std::size_t max_iterations) {
    if (v0.size() != w.size()) {
        throw ValidationError("start vector does not match the matrix size");
    }
    PowerIterationResult out;
    std::vector<double> prev(v0.begin(), v0.end());
    std::vector<double> curr(w.size(), 0.0);
    while (out.iterations < max_iterations) {
        distribute_into(w, prev, curr);
        ++out.iterations;
        out.last_step = l1_distance(curr, prev);
        prev.swap(curr);
        if (out.last_step < nu) {
            out.converged = true;
            break;
        }
    }
    out.credits = std::move(prev);
    return out;
}

PowerIterationResult pagerank_baseline(const NormalizedMatrix& w, double reset, double nu,
                                       std::size_t max_iterations) {
    if (!(reset >= 0.0 && reset <= 1.0)) {
        throw ValidationError("reset probability must lie in [0, 1]");
    }
    const std::size_t n = w.size();
    PowerIterationResult out;
    if (n == 0) {
        out.converged = true;
        return out;
    }
    const double teleport = reset / static_cast<double>(n);
    std::vector<double> prev(n, 1.0 / static_cast<double>(n));
    std::vector<double> curr(n, 0.0);
    while (out.iterations < max_iterations) {
        w.propagate(prev, curr);
        for (auto& v : curr) {
            v = (1.0 - reset) * v + teleport;
        }
        ++out.iterations;
        out.last_step = l1_distance(curr, prev);
        prev.swap(curr);
        if (out.last_step < nu) {
            out.converged = true;
            break;
        }
    }
    out.credits = std::move(prev);
    return out;
}

std::vector<KredScore> kred_baseline(std::span<const InteractionRecord> records) {
    std::unordered_map<std::string_view, std::uint64_t> scores;
    for (const auto& r : records) {
        scores.try_emplace(r.source, 0);
        ++scores[r.target];
    }
    std::vector<KredScore> out;
    out.reserve(scores.size());
    for (const auto& [user, score] : scores) {
        out.push_back({std::string(user), score});
    }
    std::sort(out.begin(), out.end(), [](const KredScore& a, const KredScore& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.user < b.user;
    });
    return out;
}

std::vector<NodeIndex> kred_ranking(std::span<const std::uint64_t> incoming, std::span<const std::uint32_t> lexical_rank) {
    std::vector<NodeIndex> order(incoming.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](NodeIndex a, NodeIndex b) {
        if (incoming[a] != incoming[b]) {
            return incoming[a] > incoming[b];
        }
        return lexical_rank[a] < lexical_rank[b];
    });
    return order;
}

// ---------------------------------------------------------------------------

void write_ranked_csv(std::ostream& out, const InteractionGraph& g, const RankedList& ranking, std::size_t limit) {
    out << "rank,user_id,credit\n";
    auto order = ranking.order();
    limit = std::min(limit, order.size());
    for (std::size_t p = 0; p < limit; ++p) {
        out << p + 1 << ',' << g.user_id(order[p]) << ',' << format_double(ranking.credit_of(order[p])) << '\n';
    }
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace) {
    out << "t,d_K,credits_in_sybil_region,l1_step\n";
    for (const auto& row : trace) {
        out << row.t << ',' << row.distance << ',';
        if (row.region_credits) {
            out << format_double(*row.region_credits);
        }
        out << ',' << format_double(row.l1_step) << '\n';
    }
}

} // namespace truetop
