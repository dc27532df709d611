#pragma once

#include "truetop/attack.hpp"
#include "truetop/graph.hpp"
#include "truetop/rank.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace truetop {

// --- ground truth and accuracy metrics --------------------------------------

struct GroundTruth {
    /// Converged WEC vector over the honest graph.
    std::vector<double> pi;
    RankedList ranking;
    std::vector<NodeIndex> top;
    std::size_t k = 0;
    double nu = ground_truth_nu;
    std::size_t iterations = 0;
    bool converged = false;
    /// Requested K exceeded the user count and was clipped.
    bool clipped = false;
};

/// Power iteration from the uniform vector over the honest graph until the L1
/// step drops below nu. Non-convergence within the cap is reported through
/// `converged` (typically a periodic graph).
GroundTruth ground_truth(const InteractionGraph& honest, std::size_t k, double nu = ground_truth_nu,
                         std::size_t max_iterations = 1'000'000);
GroundTruth ground_truth(const NormalizedMatrix& w, std::span<const std::uint32_t> lexical_rank, std::size_t k,
                         double nu = ground_truth_nu, std::size_t max_iterations = 1'000'000);

/// d(K)/K between the truth ranking and `output`. Users [0, truth size) are
/// honest and keep their indices in `output`; any further user is a sybil whose
/// truth rank is (honest count + its position among sybils in `output`).
double type1_error(const GroundTruth& truth, const RankedList& output, std::size_t k);

/// K - |U*_K intersect U_K|.
std::size_t type2_error(std::span<const NodeIndex> truth_top, std::span<const NodeIndex> output_top, std::size_t k);

// --- spectral estimates ----------------------------------------------------

struct LambdaEstimate {
    double lambda = 0.0;
    /// Residual ratios that were averaged.
    std::size_t samples = 0;
    /// Iterations the reference run needed to converge.
    std::size_t iterations = 0;
    /// Residuals failed to decay: the chain looks periodic or reducible.
    bool periodic = false;
};

/// |lambda_2| estimated from ||x_t - pi||_1 / ||x_{t-1} - pi||_1 averaged over
/// the last 20 iterations before the residual reaches the noise floor. Empty
/// `v0` means the uniform vector.
LambdaEstimate estimate_lambda(const NormalizedMatrix& w, std::span<const double> v0 = {},
                               std::size_t max_iterations = 1'000'000);

struct PowerLawFit {
    double gamma = 0.0;
    double x_min = 0.0;
    std::size_t tail_size = 0;
    /// (value, fraction of values >= value) on a log-spaced subsample.
    std::vector<std::pair<double, double>> ccdf;
    /// R^2 of a straight line through log10 ccdf points.
    double ccdf_r2 = 0.0;
    double ccdf_slope = 0.0;
    bool unreliable = false;
};

/// Continuous Hill estimator over values >= cutoff, with x_min the smallest of
/// them. Flags fewer than `min_tail` points or a degenerate tail.
PowerLawFit fit_power_law(std::span<const double> values, double cutoff = 1e-6, std::size_t min_tail = 50);

struct GapCurve {
    /// gaps[k-1] = (tau_k - tau_{k+1}) / tau_k for k = 1..n-1, tau sorted descending.
    std::vector<double> gaps;
    /// Least-squares slope of log gap against log k over the requested k range,
    /// ignoring zero gaps; NaN with fewer than two usable points.
    double slope = 0.0;
    std::size_t points = 0;
};

/// k range defaults to [10, n/10].
GapCurve relative_gap_curve(std::span<const double> values, std::size_t k_lo = 10, std::size_t k_hi = 0);

// --- theory checks -----------------------------------------------------------

struct StabilityReport {
    std::size_t k = 0;
    bool skipped = false;
    std::string skip_reason;
    double lambda = 0.0;
    double gap_k = 0.0;
    /// First t with lambda^t <= gap_K / 2.
    std::size_t predicted_t = 0;
    /// First t from which the top-K list never changes again.
    std::size_t observed_t = 0;
    std::size_t converged_at = 0;
    /// Iterations at or after predicted_t whose top-K list differs from the final one.
    std::size_t violations = 0;
    bool passed = false;
};

/// Runs credit distribution from `v0` to an L1 step below nu, keeping the
/// top-K list of every iteration, and checks stability from the
/// lambda-predicted iteration onward. Skipped unless gaps 1..K strictly decrease.
StabilityReport topk_stability_check(const NormalizedMatrix& w, std::span<const std::uint32_t> lexical_rank,
                              std::span<const double> v0, std::size_t k, double nu = 1e-12,
                              std::size_t max_iterations = 1'000'000);

struct ErrorDecayReport {
    double lambda = 0.0;
    std::size_t burn_in = 5;
    /// max over t > burn_in of max_k |x_k - pi_k| / pi_k divided by lambda^t.
    double worst_ratio = 0.0;
    std::size_t checked = 0;
    bool passed = false;
};

/// Relative per-user error against lambda^t (1 + slack) after the burn-in.
ErrorDecayReport error_decay_check(const NormalizedMatrix& w, std::span<const double> v0, std::size_t burn_in = 5,
                          double slack = 0.1);

struct TwoRegionReport {
    double alpha = 0.0;
    double beta = 0.0;
    double max_error = 0.0;
    bool monotone = true;
    double limit_error = 0.0;
    std::size_t limit_t = 0;
    bool passed = false;
};

/// Simulates the two-region graph and compares the aggregate sybil credits with
/// the closed form for t <= t_max, then runs on until the closed form sits
/// within limit_tol / 10 of alpha / (alpha + beta) and checks the simulation
/// is within limit_tol of the limit there.
TwoRegionReport two_region_check(double alpha, double beta, std::size_t t_max = 200, double tol = 1e-9,
                        double limit_tol = 1e-6);

// --- attack evaluation -------------------------------------------------------

/// Credits-based methods: attacker-optimal count from the region's total.
std::size_t credit_sybil_count(std::span<const double> credits, std::span<const char> is_sybil, std::size_t k);

/// Incoming interaction counts on the augmented graph as the Kred-style
/// baseline sees them: every sybil->sybil edge stands for one retweet per day
/// over `days` days; every other edge contributes its interaction count.
std::vector<std::uint64_t> kred_incoming(const AugmentedGraph& aug, std::size_t days);

struct TrajectoryConfig {
    std::size_t k = 100;
    /// Tolerances to terminate at; each gets its own stopping point.
    std::vector<double> epsilons{0.0};
    /// Loop bound T of the early-terminated runs.
    std::size_t max_iterations = 1000;
    double wec_nu = default_nu;
    /// 0 skips the WEC continuation.
    std::size_t wec_max_iterations = 2000;
};

struct TerminationPoint {
    double epsilon = 0.0;
    std::size_t iterations = 0;
    bool stabilized = false;
    std::vector<double> credits;
};

struct Trajectory {
    std::vector<TerminationPoint> points;
    /// The same sequence continued to WEC convergence or its cap.
    PowerIterationResult wec;
};

/// One pass that yields what truetop_rank would return for every epsilon and
/// what wec_power_iteration would return, all from `initial`.
Trajectory run_trajectory(const NormalizedMatrix& w, std::span<const std::uint32_t> lexical_rank,
                          std::span<const double> initial, const TrajectoryConfig& cfg);

struct MethodReport {
    std::string method;
    std::optional<double> epsilon;
    double type1 = 0.0;
    std::size_t type2 = 0;
    std::size_t sybil_count = 0;
    std::size_t iterations = 0;
    bool converged = false;
    double region_credits = 0.0;
    std::string error;
};

struct TrialReport {
    std::size_t trial = 0;
    std::uint64_t rng_seed = 0;
    std::size_t strength = 0;
    double alpha = 0.0;
    std::vector<MethodReport> methods;
    std::string error;

    const MethodReport* find(std::string_view method, std::optional<double> epsilon = std::nullopt) const;
};

struct BaselineOptions {
    std::size_t k = 100;
    SeedConfig seeds;
    std::vector<double> epsilons{0.0};
    std::size_t max_iterations = 1000;
    std::size_t wec_max_iterations = 2000;
    double wec_nu = default_nu;
    bool run_wec = true;
    bool run_pagerank = true;
    bool run_kred = true;
    std::size_t kred_days = default_kred_days;
    /// How many selected seeds the seed attack learns when the scenario names none.
    std::size_t known_seed_count = 10;
};

/// Builds the attacked graph for `scenario` on the honest graph, then runs
/// TrueTop (one report per epsilon), WEC, PageRank and Kred-style on it and
/// scores each against `truth`. Seeds come from the honest graph; with the
/// seed attack and no scenario seeds, the first known_seed_count seeds leak.
/// Failures of one method are recorded in its report.
TrialReport compare_baselines(const InteractionGraph& honest, const GroundTruth& truth, const SybilRegion& region,
                              const AttackScenario& scenario, const BaselineOptions& options);

} // namespace truetop
