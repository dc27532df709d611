#include "truetop/attack.hpp"
#include "truetop/eval.hpp"
#include "truetop/graph.hpp"
#include "truetop/ingest.hpp"
#include "truetop/rank.hpp"
#include "truetop/report.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace truetop;

namespace {

std::vector<std::string> ids_of(const InteractionGraph& g, std::span<const NodeIndex> users) {
    std::vector<std::string> out;
    out.reserve(users.size());
    for (auto u : users) {
        out.push_back(g.user_id(u));
    }
    return out;
}

SeedSelection seeds_for(const InteractionGraph& g, std::size_t count, const std::string& method,
                        std::uint64_t rng_seed) {
    SeedConfig cfg;
    cfg.count = count;
    cfg.method = parse_seed_method(method);
    cfg.rng_seed = rng_seed;
    return select_seeds(g, cfg);
}

py::dict rank_graph(const InteractionGraph& g, std::size_t k, double epsilon, std::size_t max_iterations,
                    std::size_t seeds, const std::string& seed_method, std::uint64_t rng_seed) {
    auto selection = seeds_for(g, seeds, seed_method, rng_seed);
    TerminationConfig term;
    term.k = k;
    term.epsilon = epsilon;
    term.max_iterations = max_iterations;
    auto result = truetop_rank(g, selection, term);
    py::list credits;
    for (auto u : result.top) {
        credits.append(result.ranking.credit_of(u));
    }
    py::list trace;
    for (const auto& row : result.trace) {
        trace.append(py::make_tuple(row.t, row.distance, row.l1_step));
    }
    py::dict out;
    out["top"] = ids_of(g, result.top);
    out["credits"] = credits;
    out["iterations"] = result.iterations;
    out["stabilized"] = result.stabilized;
    out["trace"] = trace;
    out["seeds"] = ids_of(g, selection.seeds);
    return out;
}

std::string attack_eval(const InteractionGraph& graph, const std::string& scenario_json, std::size_t k,
                        std::vector<double> epsilons, std::size_t seeds, bool baselines, std::size_t jobs) {
    auto desc = ScenarioDescriptor::parse(scenario_json);
    auto honest = extract_gscc(graph).graph;
    auto truth = ground_truth(honest, k);
    BaselineOptions opts;
    opts.k = k;
    opts.epsilons = std::move(epsilons);
    opts.seeds.count = seeds;
    opts.kred_days = desc.kred_days;
    opts.run_wec = opts.run_pagerank = opts.run_kred = baselines;
    std::vector<TrialReport> trials;
    {
        py::gil_scoped_release release;
        trials = run_trials(honest, truth, desc, opts, jobs);
    }
    return aggregate_json(trials, desc, k).dump();
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sybil-resilient top-K influence ranking over interaction graphs.";

    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<SeedingError>(m, "SeedingError", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

    py::class_<InteractionGraph>(m, "Graph")
        .def_property_readonly("user_count", &InteractionGraph::user_count)
        .def_property_readonly("edge_count", &InteractionGraph::edge_count)
        .def_property_readonly("total_weight", &InteractionGraph::total_weight)
        .def_property_readonly("model", [](const InteractionGraph& g) { return g.model().to_string(); })
        .def("user_ids", [](const InteractionGraph& g) {
            return std::vector<std::string>(g.user_ids().begin(), g.user_ids().end());
        })
        .def("verified_users", [](const InteractionGraph& g) { return ids_of(g, g.verified_users()); })
        .def("edges", [](const InteractionGraph& g) {
            py::list out;
            for (const auto& e : g.edges()) {
                out.append(py::make_tuple(g.user_id(e.source), g.user_id(e.target), e.weight));
            }
            return out;
        })
        .def("gscc", [](const InteractionGraph& g) { return extract_gscc(g).graph; })
        .def("save", [](const InteractionGraph& g, const std::filesystem::path& p) { write_snapshot(p, g); },
             py::arg("path"))
        .def("to_snapshot", [](const InteractionGraph& g) {
            std::ostringstream out;
            write_snapshot(out, g);
            return out.str();
        })
        .def("__repr__", [](const InteractionGraph& g) {
            return "<Graph users=" + std::to_string(g.user_count()) + " edges=" + std::to_string(g.edge_count()) +
                   " model=" + g.model().to_string() + ">";
        });

    m.def("load_graph", [](const std::filesystem::path& p) { return read_snapshot(p); }, py::arg("path"));

    m.def(
        "build_graph",
        [](const std::filesystem::path& log, const std::filesystem::path& attrs, const std::string& model,
           int epochs, std::int64_t start, std::int64_t end) {
            TargetPeriod period{start, end, epochs};
            period.validate();
            auto wm = model == "entropy" ? WeightModel::entropy(epochs) : WeightModel::parse(model);
            auto parsed = read_interaction_log(log, period);
            return build_graph(parsed.records, read_user_attributes(attrs), wm, period);
        },
        py::arg("log"), py::arg("attrs"), py::arg("model") = "sum", py::arg("epochs") = 90, py::arg("start") = 0,
        py::arg("end") = 90 * 86400, "Build a graph from an interaction log and attribute file.");

    m.def(
        "synthetic_graph",
        [](std::size_t nodes, double gamma, const std::string& interactions, const std::string& model,
           std::uint64_t rng_seed) {
            SyntheticSpec spec;
            spec.node_count = nodes;
            spec.degree_exponent = gamma;
            spec.interactions_per_edge = InteractionCountDistribution::parse(interactions);
            spec.rng_seed = rng_seed;
            auto wm = model == "entropy" ? WeightModel::entropy(spec.period.epochs) : WeightModel::parse(model);
            return build_synthetic_graph(spec, wm);
        },
        py::arg("nodes") = 1000, py::arg("gamma") = 2.5, py::arg("interactions") = "geometric:15",
        py::arg("model") = "sum", py::arg("rng_seed") = 1);

    m.def("edge_weight_sum", [](std::vector<std::uint32_t> counts) { return edge_weight_sum(counts); });
    m.def("edge_weight_entropy", [](std::vector<std::uint32_t> counts) { return edge_weight_entropy(counts); });

    m.def("rank", &rank_graph, py::arg("graph"), py::arg("k") = 100, py::arg("epsilon") = 0.0,
          py::arg("max_iterations") = 1000, py::arg("seeds") = 100, py::arg("seed_method") = "basic",
          py::arg("rng_seed") = 1, "Early-terminated credit distribution; returns the top-K and the trace.");

    m.def(
        "wec",
        [](const InteractionGraph& g, double nu, std::size_t max_iterations) {
            NormalizedMatrix w(g);
            std::vector<double> v0(g.user_count(), 1.0 / static_cast<double>(g.user_count()));
            auto r = wec_power_iteration(w, v0, nu, max_iterations);
            return py::make_tuple(r.credits, r.iterations, r.converged);
        },
        py::arg("graph"), py::arg("nu") = default_nu, py::arg("max_iterations") = 100000);

    m.def(
        "pagerank",
        [](const InteractionGraph& g, double reset, double nu, std::size_t max_iterations) {
            auto r = pagerank_baseline(NormalizedMatrix(g), reset, nu, max_iterations);
            return py::make_tuple(r.credits, r.iterations, r.converged);
        },
        py::arg("graph"), py::arg("reset") = pagerank_reset, py::arg("nu") = default_nu,
        py::arg("max_iterations") = 100000);

    m.def("attack_eval", &attack_eval, py::arg("graph"), py::arg("scenario"), py::arg("k") = 100,
          py::arg("epsilons") = std::vector<double>{0.0}, py::arg("seeds") = 100, py::arg("baselines") = true,
          py::arg("jobs") = 1, "Run the trials of a JSON scenario; returns the aggregate report as JSON text.");

    m.def("estimate_alpha_star", &estimate_alpha_star, py::arg("suspension_ratio"), py::arg("io_ratio_honest"),
          py::arg("io_ratio_sybil"));
    m.def("prop1_closed_form", &prop1_closed_form, py::arg("alpha"), py::arg("beta"), py::arg("t"));
    m.def("sybil_topk_bound", &sybil_topk_bound, py::arg("alpha"), py::arg("t"), py::arg("k"));
    m.def(
        "sybil_count_metric",
        [](double c, std::vector<double> honest_top) { return sybil_count_metric(c, honest_top); },
        py::arg("region_credits"), py::arg("honest_top"));

    m.def(
        "relative_gaps",
        [](std::vector<double> values, std::size_t k_lo, std::size_t k_hi) {
            auto c = relative_gap_curve(values, k_lo, k_hi);
            return py::make_tuple(c.gaps, c.slope);
        },
        py::arg("values"), py::arg("k_lo") = 10, py::arg("k_hi") = 0);
    m.def(
        "fit_power_law",
        [](std::vector<double> values, double cutoff) {
            auto f = fit_power_law(values, cutoff);
            return py::make_tuple(f.gamma, f.tail_size, f.unreliable);
        },
        py::arg("values"), py::arg("cutoff") = 1e-6);
}
