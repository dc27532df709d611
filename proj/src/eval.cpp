#include "truetop/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace truetop {

GroundTruth ground_truth(const NormalizedMatrix& w, std::span<const std::uint32_t> lexical_rank, std::size_t k,
                         double nu, std::size_t max_iterations) {
    const std::size_t n = w.size();
    if (n == 0) {
        throw ValidationError("ground truth needs a nonempty graph");
    }
    GroundTruth truth;
    truth.nu = nu;
    truth.clipped = k > n;
    truth.k = std::min(k, n);
    std::vector<double> v0(n, 1.0 / static_cast<double>(n));
    auto run = wec_power_iteration(w, v0, nu, max_iterations);
    truth.iterations = run.iterations;
    truth.converged = run.converged;
    truth.pi = std::move(run.credits);
    truth.ranking = RankedList::from_credits(truth.pi, lexical_rank);
    truth.top = truth.ranking.top(truth.k);
    return truth;
}

GroundTruth ground_truth(const InteractionGraph& honest, std::size_t k, double nu, std::size_t max_iterations) {
    NormalizedMatrix w(honest);
    return ground_truth(w, honest.lexical_rank(), k, nu, max_iterations);
}

double type1_error(const GroundTruth& truth, const RankedList& output, std::size_t k) {
    const std::size_t honest = truth.pi.size();
    if (output.size() < honest) {
        throw ValidationError("output ranking must cover every honest user");
    }
    k = std::min({k, honest, output.size()});
    if (k == 0) {
        return 0.0;
    }
    std::vector<std::size_t> sybil_rank(output.size() - honest, 0);
    std::size_t seen = 0;
    for (auto u : output.order()) {
        if (u >= honest) {
            sybil_rank[u - honest] = honest + ++seen;
        }
    }
    auto truth_rank = [&](NodeIndex u) { return u < honest ? truth.ranking.rank_of(u) : sybil_rank[u - honest]; };

    auto a = truth.ranking.top(k);
    auto b = output.top(k);
    std::vector<NodeIndex> both(a);
    both.insert(both.end(), b.begin(), b.end());
    std::sort(both.begin(), both.end());
    both.erase(std::unique(both.begin(), both.end()), both.end());
    std::size_t d = 0;
    for (auto u : both) {
        std::size_t r1 = truth_rank(u);
        std::size_t r2 = output.rank_of(u);
        d += r1 > r2 ? r1 - r2 : r2 - r1;
    }
    return static_cast<double>(d) / static_cast<double>(k);
}

std::size_t type2_error(std::span<const NodeIndex> truth_top, std::span<const NodeIndex> output_top, std::size_t k) {
    std::vector<NodeIndex> a(truth_top.begin(), truth_top.begin() + static_cast<std::ptrdiff_t>(std::min(k, truth_top.size())));
    std::vector<NodeIndex> b(output_top.begin(),
                             output_top.begin() + static_cast<std::ptrdiff_t>(std::min(k, output_top.size())));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<NodeIndex> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    return k - std::min(k, common.size());
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> start_vector(std::size_t n, std::span<const double> v0) {
    if (v0.empty()) {
        return std::vector<double>(n, n > 0 ? 1.0 / static_cast<double>(n) : 0.0);
    }
    if (v0.size() != n) {
        throw ValidationError("start vector does not match the matrix size");
    }
    return {v0.begin(), v0.end()};
}

// Reference fixed point, iterated well past the usual thresholds.
constexpr double reference_step = 1e-15;

} // namespace

LambdaEstimate estimate_lambda(const NormalizedMatrix& w, std::span<const double> v0, std::size_t max_iterations) {
    const std::size_t n = w.size();
    auto x0 = start_vector(n, v0);
    LambdaEstimate est;
    auto reference = wec_power_iteration(w, x0, reference_step, max_iterations);
    est.iterations = reference.iterations;
    const auto& pi = reference.credits;

    std::vector<double> prev = x0;
    std::vector<double> curr(n, 0.0);
    const double r0 = l1_distance(prev, pi);
    if (!reference.converged) {
        est.periodic = true;
        est.lambda = 1.0;
        return est;
    }
    if (r0 == 0.0) {
        return est;
    }
    // Residuals below this are dominated by the error in pi itself.
    const double floor = std::max(1e-9 * r0, 1e3 * reference.last_step);
    std::vector<double> residuals{r0};
    for (std::size_t t = 1; t <= reference.iterations + 1; ++t) {
        distribute_into(w, prev, curr);
        prev.swap(curr);
        double r = l1_distance(prev, pi);
        if (r < floor) {
            break;
        }
        residuals.push_back(r);
    }
    if (residuals.size() < 2) {
        // Converged within one step: a rank-one matrix, lambda = 0.
        return est;
    }
    const std::size_t window = std::min<std::size_t>(20, residuals.size() - 1);
    const std::size_t last = residuals.size() - 1;
    double log_sum = 0.0;
    for (std::size_t t = last + 1 - window; t <= last; ++t) {
        log_sum += std::log(residuals[t] / residuals[t - 1]);
    }
    est.samples = window;
    est.lambda = std::exp(log_sum / static_cast<double>(window));
    if (est.lambda >= 1.0) {
        est.periodic = true;
    }
    return est;
}

PowerLawFit fit_power_law(std::span<const double> values, double cutoff, std::size_t min_tail) {
    PowerLawFit fit;
    std::vector<double> tail;
    for (double v : values) {
        if (v >= cutoff && v > 0.0) {
            tail.push_back(v);
        }
    }
    std::sort(tail.begin(), tail.end(), std::greater<>());
    fit.tail_size = tail.size();
    if (tail.empty()) {
        fit.unreliable = true;
        fit.gamma = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    fit.x_min = tail.back();
    double log_sum = 0.0;
    for (double v : tail) {
        log_sum += std::log(v / fit.x_min);
    }
    if (log_sum <= 0.0) {
        fit.unreliable = true;
        fit.gamma = std::numeric_limits<double>::quiet_NaN();
    } else {
        fit.gamma = 1.0 + static_cast<double>(tail.size()) / log_sum;
    }
    if (tail.size() < min_tail) {
        fit.unreliable = true;
    }

    // CCDF at log-spaced ranks; rank i (1-based) holds F(v_i) = i / n.
    const double n = static_cast<double>(values.size());
    std::size_t last_rank = 0;
    const std::size_t samples = 200;
    for (std::size_t s = 0; s <= samples; ++s) {
        double pos = std::pow(static_cast<double>(tail.size()), static_cast<double>(s) / samples);
        auto rank = static_cast<std::size_t>(std::llround(pos));
        rank = std::clamp<std::size_t>(rank, 1, tail.size());
        if (rank == last_rank) {
            continue;
        }
        last_rank = rank;
        fit.ccdf.emplace_back(tail[rank - 1], static_cast<double>(rank) / n);
    }
    if (fit.ccdf.size() >= 3) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        const double m = static_cast<double>(fit.ccdf.size());
        for (auto [x, y] : fit.ccdf) {
            double lx = std::log10(x);
            double ly = std::log10(y);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            syy += ly * ly;
        }
        double vx = sxx - sx * sx / m;
        double vy = syy - sy * sy / m;
        double cxy = sxy - sx * sy / m;
        if (vx > 0.0 && vy > 0.0) {
            fit.ccdf_slope = cxy / vx;
            fit.ccdf_r2 = cxy * cxy / (vx * vy);
        }
    }
    return fit;
}

GapCurve relative_gap_curve(std::span<const double> values, std::size_t k_lo, std::size_t k_hi) {
    std::vector<double> tau(values.begin(), values.end());
    std::sort(tau.begin(), tau.end(), std::greater<>());
    GapCurve curve;
    if (tau.size() >= 2) {
        curve.gaps.resize(tau.size() - 1);
        for (std::size_t k = 0; k + 1 < tau.size(); ++k) {
            curve.gaps[k] = tau[k] > 0.0 ? (tau[k] - tau[k + 1]) / tau[k] : 0.0;
        }
    }
    if (k_hi == 0) {
        k_hi = tau.size() / 10;
    }
    k_hi = std::min(k_hi, curve.gaps.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = std::max<std::size_t>(k_lo, 1); k <= k_hi; ++k) {
        double g = curve.gaps[k - 1];
        if (!(g > 0.0)) {
            continue;
        }
        double lx = std::log(static_cast<double>(k));
        double ly = std::log(g);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++curve.points;
    }
    const double m = static_cast<double>(curve.points);
    double vx = sxx - sx * sx / m;
    curve.slope = curve.points >= 2 && vx > 0.0 ? (sxy - sx * sy / m) / vx : std::numeric_limits<double>::quiet_NaN();
    return curve;
}

// ---------------------------------------------------------------------------

StabilityReport topk_stability_check(const NormalizedMatrix& w, std::span<const std::uint32_t> lexical_rank,
                              std::span<const double> v0, std::size_t k, double nu, std::size_t max_iterations) {
    const std::size_t n = w.size();
    auto x0 = start_vector(n, v0);
    StabilityReport report;
    report.k = k;
    if (k == 0 || k >= n) {
        report.skipped = true;
        report.skip_reason = "K must lie in [1, n)";
        return report;
    }

    std::vector<std::vector<NodeIndex>> tops;
    std::vector<double> prev = x0;
    std::vector<double> curr(n, 0.0);
    tops.push_back(top_k(RankOrder{prev, lexical_rank}, k));
    bool converged = false;
    for (std::size_t t = 1; t <= max_iterations; ++t) {
        distribute_into(w, prev, curr);
        double step = l1_distance(curr, prev);
        prev.swap(curr);
        tops.push_back(top_k(RankOrder{prev, lexical_rank}, k));
        if (step < nu) {
            converged = true;
            break;
        }
    }
    report.converged_at = tops.size() - 1;
    if (!converged) {
        report.skipped = true;
        report.skip_reason = "no convergence within the iteration cap";
        return report;
    }

    auto gaps = relative_gap_curve(prev, 1, 1).gaps;
    for (std::size_t i = 1; i < k; ++i) {
        if (!(gaps[i] < gaps[i - 1])) {
            report.skipped = true;
            report.skip_reason = "relative gaps are not strictly decreasing up to K";
            return report;
        }
    }
    report.gap_k = gaps[k - 1];
    if (!(report.gap_k > 0.0)) {
        report.skipped = true;
        report.skip_reason = "tie at rank K";
        return report;
    }

    auto est = estimate_lambda(w, x0, max_iterations);
    if (est.periodic) {
        report.skipped = true;
        report.skip_reason = "residuals do not decay";
        return report;
    }
    report.lambda = est.lambda;
    if (est.lambda <= 0.0) {
        report.predicted_t = 1;
    } else {
        double t = std::log(report.gap_k / 2.0) / std::log(est.lambda);
        report.predicted_t = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t)));
    }

    const auto& final_top = tops.back();
    report.observed_t = tops.size() - 1;
    while (report.observed_t > 0 && tops[report.observed_t - 1] == final_top) {
        --report.observed_t;
    }
    for (std::size_t t = report.predicted_t; t < tops.size(); ++t) {
        if (tops[t] != final_top) {
            ++report.violations;
        }
    }
    report.passed = report.violations == 0;
    return report;
}

ErrorDecayReport error_decay_check(const NormalizedMatrix& w, std::span<const double> v0, std::size_t burn_in, double slack) {
    const std::size_t n = w.size();
    auto x0 = start_vector(n, v0);
    ErrorDecayReport report;
    report.burn_in = burn_in;
    auto est = estimate_lambda(w, x0);
    report.lambda = est.lambda;
    if (est.periodic) {
        return report;
    }
    auto pi = wec_power_iteration(w, x0, reference_step, 1'000'000).credits;

    std::vector<double> prev = x0;
    std::vector<double> curr(n, 0.0);
    // Relative errors below this are rounding noise on the smallest entries.
    const double noise = 1e-9;
    report.passed = true;
    for (std::size_t t = 1;; ++t) {
        distribute_into(w, prev, curr);
        prev.swap(curr);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pi[i] > 0.0) {
                worst = std::max(worst, std::abs(prev[i] - pi[i]) / pi[i]);
            }
        }
        double bound = std::pow(est.lambda, static_cast<double>(t));
        if (worst < noise && bound < noise) {
            break;
        }
        if (t > burn_in) {
            ++report.checked;
            double ratio = bound > 0.0 ? worst / bound : (worst < noise ? 0.0 : std::numeric_limits<double>::infinity());
            report.worst_ratio = std::max(report.worst_ratio, ratio);
            if (worst > bound * (1.0 + slack) && worst >= noise) {
                report.passed = false;
            }
        }
        if (t > 1'000'000) {
            break;
        }
    }
    return report;
}

TwoRegionReport two_region_check(double alpha, double beta, std::size_t t_max, double tol, double limit_tol) {
    TwoRegionReport report;
    report.alpha = alpha;
    report.beta = beta;
    auto aug = two_region_graph(4, 4, alpha, beta);
    NormalizedMatrix w(aug.graph);
    const std::size_t n = w.size();
    std::vector<double> prev(n, 0.0);
    for (std::size_t i = 0; i < aug.honest_count; ++i) {
        prev[i] = 1.0 / static_cast<double>(aug.honest_count);
    }
    std::vector<double> curr(n, 0.0);
    auto region = [&](std::span<const double> x) { return compensated_sum(x.subspan(aug.honest_count)); };

    const double limit = alpha / (alpha + beta);
    std::size_t t_limit = t_max;
    while (std::abs(prop1_closed_form(alpha, beta, t_limit) - limit) > limit_tol / 10.0) {
        ++t_limit;
    }
    report.limit_t = t_limit;
    double last = 0.0;
    for (std::size_t t = 1; t <= t_limit; ++t) {
        distribute_into(w, prev, curr);
        prev.swap(curr);
        double c = region(prev);
        if (t <= t_max) {
            report.max_error = std::max(report.max_error, std::abs(c - prop1_closed_form(alpha, beta, t)));
        }
        // Allow for one rounding step at the plateau.
        if (c < last - 1e-15) {
            report.monotone = false;
        }
        last = c;
    }
    report.limit_error = std::abs(last - limit);
    report.passed = report.max_error <= tol && report.monotone && report.limit_error <= limit_tol;
    return report;
}

// ---------------------------------------------------------------------------

std::size_t credit_sybil_count(std::span<const double> credits, std::span<const char> is_sybil, std::size_t k) {
    std::vector<double> honest;
    std::vector<double> sybil;
    honest.reserve(credits.size());
    for (std::size_t i = 0; i < credits.size(); ++i) {
        (is_sybil[i] ? sybil : honest).push_back(credits[i]);
    }
    double region = compensated_sum(sybil);
    k = std::min(k, honest.size());
    std::nth_element(honest.begin(), honest.begin() + static_cast<std::ptrdiff_t>(k - (k > 0 ? 1 : 0)), honest.end(),
                     std::greater<>());
    std::sort(honest.begin(), honest.begin() + static_cast<std::ptrdiff_t>(k), std::greater<>());
    return sybil_count_metric(region, std::span<const double>(honest).first(k));
}

std::vector<std::uint64_t> kred_incoming(const AugmentedGraph& aug, std::size_t days) {
    std::vector<std::uint64_t> incoming(aug.graph.user_count(), 0);
    for (const auto& e : aug.graph.edges()) {
        if (aug.is_sybil[e.source] && aug.is_sybil[e.target]) {
            incoming[e.target] += days;
        } else {
            incoming[e.target] += e.interactions;
        }
    }
    return incoming;
}

Trajectory run_trajectory(const NormalizedMatrix& w, std::span<const std::uint32_t> lexical_rank,
                          std::span<const double> initial, const TrajectoryConfig& cfg) {
    const std::size_t n = w.size();
    if (initial.size() != n || lexical_rank.size() != n) {
        throw ValidationError("credit vector and tie-break order must cover every user");
    }
    const std::size_t k = std::min(cfg.k, n);
    Trajectory out;
    std::size_t pending = cfg.epsilons.size();
    for (double eps : cfg.epsilons) {
        if (!(eps >= 0.0)) {
            throw ValidationError("epsilon must be >= 0");
        }
        out.points.push_back({eps, 0, false, {}});
    }
    const std::size_t rounds = cfg.max_iterations > 0 ? cfg.max_iterations - 1 : 0;
    std::vector<double> prev(initial.begin(), initial.end());
    std::vector<double> curr(n, 0.0);
    if (rounds == 0) {
        for (auto& p : out.points) {
            p.credits = prev;
        }
        pending = 0;
    }
    bool wec_running = cfg.wec_max_iterations > 0;
    if (!wec_running) {
        out.wec.credits = prev;
    }

    for (std::size_t t = 1; pending > 0 || wec_running; ++t) {
        distribute_into(w, prev, curr);
        if (pending > 0) {
            auto d = static_cast<double>(ranking_distance(RankOrder{prev, lexical_rank}, RankOrder{curr, lexical_rank}, k));
            for (auto& p : out.points) {
                if (p.credits.empty() && (d <= p.epsilon || t == rounds)) {
                    p.iterations = t;
                    p.stabilized = d <= p.epsilon;
                    p.credits = curr;
                    --pending;
                }
            }
        }
        if (wec_running) {
            out.wec.iterations = t;
            out.wec.last_step = l1_distance(curr, prev);
            if (out.wec.last_step < cfg.wec_nu) {
                out.wec.converged = true;
            }
            if (out.wec.converged || t == cfg.wec_max_iterations) {
                out.wec.credits = curr;
                wec_running = false;
            }
        }
        prev.swap(curr);
    }
    return out;
}

// ---------------------------------------------------------------------------

const MethodReport* TrialReport::find(std::string_view method, std::optional<double> epsilon) const {
    for (const auto& m : methods) {
        if (m.method == method && (!epsilon || m.epsilon == epsilon)) {
            return &m;
        }
    }
    return nullptr;
}

namespace {

MethodReport score_credits(std::string method, std::span<const double> credits, const AugmentedGraph& aug,
                           const GroundTruth& truth, std::size_t k) {
    MethodReport r;
    r.method = std::move(method);
    auto ranking = RankedList::from_credits(credits, aug.graph.lexical_rank());
    r.type1 = type1_error(truth, ranking, k);
    r.type2 = type2_error(truth.top, ranking.top(k), k);
    r.sybil_count = credit_sybil_count(credits, aug.is_sybil, k);
    double region = 0.0;
    for (std::size_t i = aug.honest_count; i < credits.size(); ++i) {
        region += credits[i];
    }
    r.region_credits = region;
    return r;
}

template <class F>
void guarded(TrialReport& trial, std::string method, F&& body) {
    try {
        trial.methods.push_back(body());
    } catch (const std::exception& e) {
        MethodReport failed;
        failed.method = std::move(method);
        failed.error = e.what();
        trial.methods.push_back(std::move(failed));
    }
}

} // namespace

TrialReport compare_baselines(const InteractionGraph& honest, const GroundTruth& truth, const SybilRegion& region,
                              const AttackScenario& scenario, const BaselineOptions& options) {
    if (truth.pi.size() != honest.user_count()) {
        throw ValidationError("ground truth does not belong to the honest graph");
    }
    TrialReport trial;
    trial.rng_seed = scenario.rng_seed;
    trial.strength = scenario.strength;

    auto seeds = select_seeds(honest, options.seeds);
    AttackScenario sc = scenario;
    if (sc.strategy == AttackStrategy::seed_attack && sc.known_seeds.empty()) {
        std::size_t count = std::min(options.known_seed_count, seeds.seeds.size());
        sc.known_seeds.assign(seeds.seeds.begin(), seeds.seeds.begin() + static_cast<std::ptrdiff_t>(count));
    }
    auto aug = attach_sybil_region(honest, region, sc);
    trial.alpha = aug.alpha;
    NormalizedMatrix w(aug.graph);
    const std::size_t k = options.k;
    auto lex = aug.graph.lexical_rank();

    std::vector<double> initial(seeds.initial_credits);
    initial.resize(aug.graph.user_count(), 0.0);

    TrajectoryConfig cfg;
    cfg.k = k;
    cfg.epsilons = options.epsilons;
    cfg.max_iterations = options.max_iterations;
    cfg.wec_nu = options.wec_nu;
    cfg.wec_max_iterations = options.run_wec ? options.wec_max_iterations : 0;
    auto traj = run_trajectory(w, lex, initial, cfg);

    for (const auto& p : traj.points) {
        guarded(trial, "truetop", [&] {
            auto r = score_credits("truetop", p.credits, aug, truth, k);
            r.epsilon = p.epsilon;
            r.iterations = p.iterations;
            r.converged = p.stabilized;
            return r;
        });
    }
    if (options.run_wec) {
        guarded(trial, "wec", [&] {
            auto r = score_credits("wec", traj.wec.credits, aug, truth, k);
            r.iterations = traj.wec.iterations;
            r.converged = traj.wec.converged;
            return r;
        });
    }
    if (options.run_pagerank) {
        guarded(trial, "pagerank", [&] {
            auto pr = pagerank_baseline(w, pagerank_reset, options.wec_nu, options.wec_max_iterations);
            auto r = score_credits("pagerank", pr.credits, aug, truth, k);
            r.iterations = pr.iterations;
            r.converged = pr.converged;
            return r;
        });
    }
    if (options.run_kred) {
        guarded(trial, "kred", [&] {
            auto incoming = kred_incoming(aug, options.kred_days);
            std::vector<double> scores(incoming.begin(), incoming.end());
            MethodReport r;
            r.method = "kred";
            auto ranking = RankedList::from_credits(scores, lex);
            auto top = ranking.top(k);
            r.type1 = type1_error(truth, ranking, k);
            r.type2 = type2_error(truth.top, top, k);
            // Scores are counts, not credits: count the sybils actually ranked.
            r.sybil_count = static_cast<std::size_t>(
                std::count_if(top.begin(), top.end(), [&](NodeIndex u) { return aug.is_sybil[u] != 0; }));
            r.converged = true;
            return r;
        });
    }
    return trial;
}

} // namespace truetop
