#ifndef NMC_JSON_IO_HPP
#define NMC_JSON_IO_HPP

#include <json.hpp>

#include <Eigen/Dense>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "nmc/ace.hpp"
#include "nmc/errors.hpp"
#include "nmc/experiments.hpp"
#include "nmc/graph.hpp"
#include "nmc/pairwise.hpp"
#include "nmc/partition_solver.hpp"
#include "nmc/solver.hpp"

namespace nmc {

using json = nlohmann::json;

inline json graph_to_json(const Graph& g) {
    json edges = json::array();
    for (const Edge& e : g.edges()) edges.push_back({e.a + 1, e.b + 1}); // 1-based in I/O
    return json{{"n", g.n()}, {"edges", std::move(edges)}};
}

// Transforms as symbol -> value maps keyed by the original category labels.
inline json transforms_to_json(const ProblemData& pd, const std::vector<TransformTable>& phi) {
    json out = json::array();
    for (int i = 0; i < pd.n(); ++i) {
        json values = json::object();
        const auto labels = pd.var_labels(i);
        for (int c = 0; c < pd.alphabet(i); ++c) values[labels[c]] = phi[i][c];
        out.push_back({{"variable", pd.var_name(i)}, {"values", std::move(values)}});
    }
    return out;
}

inline json edge_correlations_to_json(const Graph& g, const std::vector<double>& corr,
                                      const std::vector<int>* signs = nullptr) {
    json out = json::array();
    for (int e = 0; e < g.edge_count(); ++e) {
        json item{{"i", g.edges()[e].a + 1}, {"j", g.edges()[e].b + 1}, {"value", corr[e]}};
        if (signs) item["sign"] = (*signs)[e];
        out.push_back(std::move(item));
    }
    return out;
}

inline json solution_to_json(const ProblemData& pd, const NmcSolution& sol) {
    json out;
    out["rho_g"] = sol.rho_g;
    out["solver_objective"] = sol.solver_objective;
    out["edge_correlations"] =
        edge_correlations_to_json(pd.graph(), sol.edge_corr,
                                  sol.edge_signs.empty() ? nullptr : &sol.edge_signs);
    out["transforms"] = transforms_to_json(pd, sol.transforms);
    out["trace"] = sol.trace;
    out["flags"] = json{{"degenerate_updates", sol.degenerate_updates},
                        {"escape_flips", sol.escape_flips},
                        {"winning_start", sol.winning_start},
                        {"sweeps", sol.sweeps}};
    out["seed"] = sol.seed;
    return out;
}

// Explicit-distribution input: {"alphabet_sizes": [..], "names": [..]?,
// "edges": {"i,j": row-major joint pmf matrix}} with 1-based edge keys.
struct DistInput {
    Graph graph;
    std::vector<PairwiseJoint> joints;
    std::vector<std::string> names;
};

inline DistInput read_dist_json(std::istream& in) {
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& ex) {
        throw invalid_input(std::string("distribution json: parse error: ") + ex.what());
    }
    if (!doc.contains("edges") || !doc["edges"].is_object())
        throw invalid_input("distribution json: missing \"edges\" object");

    std::vector<std::pair<Edge, Eigen::MatrixXd>> raw;
    int max_vertex = 0;
    for (auto it = doc["edges"].begin(); it != doc["edges"].end(); ++it) {
        const std::string& key = it.key();
        const auto comma = key.find(',');
        if (comma == std::string::npos)
            throw invalid_input("distribution json: edge key '" + key + "' is not \"i,j\"");
        int i = 0, j = 0;
        try {
            i = std::stoi(key.substr(0, comma));
            j = std::stoi(key.substr(comma + 1));
        } catch (...) {
            throw invalid_input("distribution json: edge key '" + key + "' is not \"i,j\"");
        }
        if (i < 1 || j < 1 || i == j)
            throw invalid_input("distribution json: bad edge key '" + key + "'");
        const json& rows = it.value();
        if (!rows.is_array() || rows.empty())
            throw invalid_input("distribution json: edge '" + key + "' pmf must be a matrix");
        Eigen::MatrixXd pmf(rows.size(), rows[0].size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (!rows[r].is_array() || rows[r].size() != rows[0].size())
                throw invalid_input("distribution json: ragged pmf for edge '" + key + "'");
            for (std::size_t c = 0; c < rows[r].size(); ++c) {
                if (!rows[r][c].is_number())
                    throw invalid_input("distribution json: non-numeric pmf entry for edge '" + key + "'");
                pmf(r, c) = rows[r][c].get<double>();
            }
        }
        max_vertex = std::max({max_vertex, i, j});
        if (i < j)
            raw.emplace_back(Edge(i - 1, j - 1), std::move(pmf));
        else
            raw.emplace_back(Edge(j - 1, i - 1), Eigen::MatrixXd(pmf.transpose()));
    }

    int n = max_vertex;
    if (doc.contains("n")) n = doc["n"].get<int>();
    std::vector<Edge> edges;
    for (auto& [e, pmf] : raw) edges.push_back(e);
    DistInput out{Graph(n, edges), {}, {}};
    out.joints.resize(out.graph.edge_count());
    std::vector<bool> filled(out.graph.edge_count(), false);
    for (auto& [e, pmf] : raw) {
        const int idx = out.graph.edge_index(e.a, e.b);
        if (filled[idx])
            throw invalid_input("distribution json: duplicate edge (" + std::to_string(e.a + 1) + "," +
                                std::to_string(e.b + 1) + ")");
        filled[idx] = true;
        out.joints[idx] = pairwise_from_pmf(pmf);
    }

    if (doc.contains("alphabet_sizes")) {
        const auto sizes = doc["alphabet_sizes"].get<std::vector<int>>();
        if (static_cast<int>(sizes.size()) != n)
            throw invalid_input("distribution json: alphabet_sizes length != n");
        for (int e = 0; e < out.graph.edge_count(); ++e) {
            const Edge& edge = out.graph.edges()[e];
            // declared sizes are pre-pruning; pruned joints may only be smaller
            if (static_cast<int>(out.joints[e].marginal_a.size()) > sizes[edge.a] ||
                static_cast<int>(out.joints[e].marginal_b.size()) > sizes[edge.b])
                throw invalid_input("distribution json: pmf for edge (" + std::to_string(edge.a + 1) +
                                    "," + std::to_string(edge.b + 1) + ") exceeds declared alphabet size");
        }
    }
    if (doc.contains("names")) out.names = doc["names"].get<std::vector<std::string>>();
    return out;
}

// Experiment config for gaussian-inference: every field is optional and
// falls back to the built-in example. A custom lambda_x must come with the
// null_pairs (1-based) the error metric scores against.
struct InferenceConfigFile {
    experiments::InferenceSetup setup;
    std::string links = "example1";
    int m = 10000;
    int bins = 10;
    int seeds = 50;
    SolverConfig solver;
};

inline InferenceConfigFile read_inference_config(std::istream& in) {
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& ex) {
        throw invalid_input(std::string("experiment config: parse error: ") + ex.what());
    }
    InferenceConfigFile out;
    if (doc.contains("lambda_x")) {
        const auto rows = doc["lambda_x"].get<std::vector<std::vector<double>>>();
        Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size())
                throw invalid_input("experiment config: lambda_x must be square");
            for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
        }
        out.setup.lambda_x = CorrelationMatrix(m);
        if (!doc.contains("null_pairs"))
            throw invalid_input("experiment config: a custom lambda_x needs null_pairs");
    }
    if (doc.contains("null_pairs")) {
        out.setup.null_pairs.clear();
        for (const auto& pair : doc["null_pairs"]) {
            if (!pair.is_array() || pair.size() != 2)
                throw invalid_input("experiment config: null_pairs entries are 1-based [i, j]");
            out.setup.null_pairs.emplace_back(pair[0].get<int>() - 1, pair[1].get<int>() - 1);
        }
        if (out.setup.null_pairs.empty())
            throw invalid_input("experiment config: null_pairs must not be empty");
    }
    if (doc.contains("links")) out.links = doc["links"].get<std::string>();
    if (doc.contains("m")) out.m = doc["m"].get<int>();
    if (doc.contains("bins")) out.bins = doc["bins"].get<int>();
    if (doc.contains("seeds")) out.seeds = doc["seeds"].get<int>();
    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        if (s.contains("starts")) out.solver.starts = s["starts"].get<int>();
        if (s.contains("max_iter")) out.solver.max_iter = s["max_iter"].get<int>();
        if (s.contains("tol")) out.solver.tol = s["tol"].get<double>();
        if (s.contains("seed")) out.solver.seed = s["seed"].get<std::uint64_t>();
    }
    return out;
}

namespace experiments {

inline json continuity_to_json(const ContinuityReport& rep) {
    json inst = json::array();
    for (const auto& c : rep.instances)
        inst.push_back({{"gamma", c.gamma},
                        {"delta", c.delta},
                        {"rho", c.rho},
                        {"rho_perturbed", c.rho_perturbed},
                        {"bound", c.bound},
                        {"holds", c.holds}});
    return json{{"experiment", "continuity"}, {"instances", std::move(inst)}, {"pass", rep.pass}};
}

inline json sample_convergence_to_json(const SampleConvergenceReport& rep) {
    return json{{"experiment", "sample-convergence"},
                {"sample_sizes", rep.sample_sizes},
                {"median_abs_error", rep.median_abs_error},
                {"rho_true", rep.rho_true},
                {"pass", rep.pass}};
}

inline json partition_bound_to_json(const PartitionBoundReport& rep) {
    return json{{"experiment", "partition-bound"},
                {"epsilon", rep.epsilon},
                {"k", rep.k},
                {"samples", rep.samples},
                {"rho_exact", rep.rho_exact},
                {"mean_rho_hat", rep.mean_rho_hat},
                {"std_rho_hat", rep.std_rho_hat},
                {"threshold", rep.threshold},
                {"mean_cut_edges", rep.mean_cut_edges},
                {"block_size_histogram", rep.block_size_histogram},
                {"pass", rep.pass}};
}

inline json inference_summary_to_json(const InferenceSummary& s) {
    return json{{"median", s.median}, {"q25", s.q25}, {"q75", s.q75}, {"per_seed", s.per_seed}};
}

inline json inference_to_json(const InferenceReport& rep) {
    return json{{"experiment", "gaussian-inference"},
                {"links", rep.links},
                {"m", rep.m},
                {"seeds", rep.seeds},
                {"bins", rep.bins},
                {"error_nmc", inference_summary_to_json(rep.nmc)},
                {"error_multimc", inference_summary_to_json(rep.multimc)},
                {"error_observed", inference_summary_to_json(rep.observed)},
                {"error_latent", inference_summary_to_json(rep.latent)},
                {"pass", rep.pass}};
}

} // namespace experiments

} // namespace nmc

#endif
