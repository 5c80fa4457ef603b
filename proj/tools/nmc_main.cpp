// nmc: network maximal correlation solver toolkit, command-line front end.
//
// Exit codes: 0 success, 2 malformed input, 3 solver degenerate failure,
// 4 configuration conflict. All randomness flows from --seed; repeated runs
// with the same seed produce byte-identical JSON for any --threads value.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nmc/ace.hpp"
#include "nmc/csv.hpp"
#include "nmc/errors.hpp"
#include "nmc/experiments.hpp"
#include "nmc/gaussian.hpp"
#include "nmc/graph.hpp"
#include "nmc/inference.hpp"
#include "nmc/json_io.hpp"
#include "nmc/partition_solver.hpp"
#include "nmc/solver.hpp"

namespace {

using nmc::json;

int env_threads() {
    if (const char* env = std::getenv("NMC_THREADS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (...) {
            throw nmc::config_error("NMC_THREADS is not an integer");
        }
    }
    return 1;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw nmc::invalid_input("cannot open '" + path + "'");
    return in;
}

nmc::Graph load_graph(const std::string& spec, int n) {
    if (std::filesystem::exists(spec)) {
        std::ifstream in = open_input(spec);
        return nmc::read_edge_list(in, n);
    }
    nmc::Graph g = nmc::experiments::builtin_graph(spec);
    if (n > 0 && g.n() != n)
        throw nmc::invalid_input("graph '" + spec + "' has " + std::to_string(g.n()) +
                                 " vertices, data has " + std::to_string(n));
    return g;
}

void emit(const json& doc, const std::string& out_path) {
    std::string text = doc.dump(2);
    text.push_back('\n');
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) throw nmc::invalid_input("cannot write '" + out_path + "'");
        out << text;
    }
}

struct SolveArgs {
    std::string data_path, dist_path, graph_spec, out_path;
    bool complete = false;
    std::string solver = "ace";
    bool absolute = false;
    double lambda = -1.0;
    int bins = 0;
    std::string bin_scheme = "quantile";
    double epsilon = 0.2;
    int k = 0;
    int partition_samples = 1;
    bool epsilon_set = false, k_set = false, samples_set = false;
    nmc::SolverConfig cfg;
};

void validate_solve_args(const SolveArgs& a) {
    if (a.data_path.empty() == a.dist_path.empty())
        throw nmc::config_error("exactly one of --data and --dist is required");
    if (a.solver != "ace" && a.solver != "mep" && a.solver != "partitioned")
        throw nmc::config_error("--solver must be ace, mep or partitioned (see `nmc gaussian` "
                                "for the correlation-matrix path)");
    if (!a.dist_path.empty() && (a.complete || !a.graph_spec.empty()))
        throw nmc::config_error("--dist carries its own graph; --graph/--complete conflict");
    if (!a.dist_path.empty() && a.bins != 0)
        throw nmc::config_error("--bins applies to --data input only");
    if (!a.data_path.empty() && a.complete == !a.graph_spec.empty())
        throw nmc::config_error("exactly one of --graph and --complete is required with --data");
    if (a.lambda >= 0.0 && (a.solver != "ace" || a.absolute))
        throw nmc::config_error("--lambda requires the plain ace solver");
    if (a.absolute && a.solver != "ace")
        throw nmc::config_error("--absolute requires the ace solver");
    if ((a.epsilon_set || a.k_set || a.samples_set) && a.solver != "partitioned")
        throw nmc::config_error("--epsilon/--k/--partition-samples require --solver partitioned");
    if (a.bins == 1 || a.bins < 0) throw nmc::config_error("--bins must be >= 2");
    if (a.bin_scheme != "quantile" && a.bin_scheme != "fixed")
        throw nmc::config_error("--bin-scheme must be quantile or fixed");
}

json config_echo(const SolveArgs& a) {
    json cfg{{"solver", a.solver},
             {"max_iter", a.cfg.max_iter},
             {"tol", a.cfg.tol},
             {"starts", a.cfg.starts},
             {"seed", a.cfg.seed}};
    if (!a.data_path.empty()) cfg["data"] = a.data_path;
    if (!a.dist_path.empty()) cfg["dist"] = a.dist_path;
    if (!a.graph_spec.empty()) cfg["graph"] = a.graph_spec;
    if (a.complete) cfg["complete"] = true;
    if (a.bins > 0) {
        cfg["bins"] = a.bins;
        cfg["bin_scheme"] = a.bin_scheme;
    }
    if (a.absolute) cfg["absolute"] = true;
    if (a.lambda >= 0.0) cfg["lambda"] = a.lambda;
    if (a.solver == "partitioned") {
        cfg["epsilon"] = a.epsilon;
        cfg["k"] = a.k > 0 ? a.k : nmc::default_radius_cap(a.epsilon);
        cfg["partition_samples"] = a.partition_samples;
    }
    return cfg;
}

int run_solve(const SolveArgs& a) {
    validate_solve_args(a);
    json doc;
    doc["command"] = "solve";
    doc["config"] = config_echo(a);

    std::optional<nmc::ProblemData> pd;
    if (!a.data_path.empty()) {
        std::ifstream in = open_input(a.data_path);
        nmc::CsvData csv = nmc::read_csv(in);
        nmc::Dataset ds = nmc::dataset_from_csv(
            csv, a.bins, a.bin_scheme == "fixed" ? nmc::BinScheme::fixed_width : nmc::BinScheme::quantile);
        nmc::Graph g = a.complete ? nmc::Graph::complete(ds.n) : load_graph(a.graph_spec, ds.n);
        doc["input"] = json{{"n", ds.n}, {"m", ds.m}, {"rejected_rows", csv.rejected_rows}};
        for (int i = 0; i < ds.n; ++i)
            if (ds.degenerate[i])
                std::cerr << "warning: variable '" << (ds.names.empty() ? std::to_string(i + 1) : ds.names[i])
                          << "' is degenerate (single category)\n";
        pd.emplace(std::move(g), std::move(ds));
    } else {
        std::ifstream in = open_input(a.dist_path);
        nmc::DistInput dist = nmc::read_dist_json(in);
        doc["input"] = json{{"n", dist.graph.n()}, {"edges", dist.graph.edge_count()}};
        pd.emplace(std::move(dist.graph), std::move(dist.joints), std::move(dist.names));
    }
    doc["graph"] = nmc::graph_to_json(pd->graph());

    if (a.solver == "partitioned") {
        nmc::PartitionSampler sampler;
        sampler.epsilon = a.epsilon;
        sampler.k = a.k;
        json samples = json::array();
        double mean = 0.0;
        for (int t = 0; t < a.partition_samples; ++t) {
            sampler.seed = nmc::mix_seed(a.cfg.seed, static_cast<std::uint64_t>(t));
            nmc::ApproxNmcResult res = nmc::approx_nmc(*pd, sampler, a.cfg);
            json blocks = json::array();
            json block_solutions = json::array();
            for (std::size_t b = 0; b < res.partition.blocks.size(); ++b) {
                json blk = json::array();
                for (int v : res.partition.blocks[b]) blk.push_back(v + 1);
                blocks.push_back(std::move(blk));
                block_solutions.push_back(
                    json{{"rho_g", res.block_solutions[b].rho_g},
                         {"trace", res.block_solutions[b].trace}});
            }
            samples.push_back(json{{"rho_hat", res.rho_hat},
                                   {"cut_edges", res.cut_edge_count},
                                   {"block_sizes", res.block_sizes},
                                   {"blocks", std::move(blocks)},
                                   {"block_solutions", std::move(block_solutions)}});
            mean += res.rho_hat;
        }
        doc["samples"] = std::move(samples);
        doc["rho_hat_mean"] = mean / a.partition_samples;
        emit(doc, a.out_path);
        return 0;
    }

    if (a.lambda >= 0.0) {
        nmc::NmcSolution sol = nmc::solve_regularized_nmc(*pd, a.lambda, a.cfg);
        doc.update(nmc::solution_to_json(*pd, sol));
    } else if (a.absolute) {
        nmc::NmcSolution sol = nmc::solve_absolute_nmc(*pd, a.cfg);
        doc.update(nmc::solution_to_json(*pd, sol));
    } else if (a.solver == "mep") {
        nmc::NmcSolution sol = nmc::solve_nmc_mep(*pd, a.cfg);
        doc.update(nmc::solution_to_json(*pd, sol));
    } else {
        nmc::NmcSolution sol = nmc::solve_nmc_ace(*pd, a.cfg);
        doc.update(nmc::solution_to_json(*pd, sol));
    }
    emit(doc, a.out_path);
    return 0;
}

int run_mc(const std::string& data_path, int bins, const std::string& scheme,
           const std::string& out_path) {
    std::ifstream in = open_input(data_path);
    nmc::CsvData csv = nmc::read_csv(in);
    if (csv.n() != 2)
        throw nmc::invalid_input("mc: expected exactly 2 columns, found " + std::to_string(csv.n()));
    nmc::Dataset ds = nmc::dataset_from_csv(
        csv, bins, scheme == "fixed" ? nmc::BinScheme::fixed_width : nmc::BinScheme::quantile);
    nmc::ProblemData pd(nmc::Graph::complete(2), std::move(ds));
    nmc::BivariateMc mc = nmc::bivariate_mc_svd(pd.edge_pair(0));
    json doc;
    doc["command"] = "mc";
    doc["mc"] = mc.value;
    doc["transforms"] = nmc::transforms_to_json(pd, {mc.phi_a, mc.phi_b});
    emit(doc, out_path);
    return 0;
}

int run_gaussian(const std::string& corr_path, int restarts, std::uint64_t seed,
                 const std::string& out_path) {
    std::ifstream in = open_input(corr_path);
    nmc::CorrelationMatrix rho = nmc::read_correlation_csv(in);
    nmc::GaussianNmc res;
    if (rho.n() <= 24) {
        res = nmc::gaussian_nmc(rho);
    } else {
        nmc::MaxCutSolution cut = nmc::maxcut_local_search(rho, restarts, seed);
        res.signs = cut.signs;
        res.objective_ordered = cut.objective;
        res.value = 0.5 * cut.objective;
        res.method = cut.method;
        res.certified = nmc::certify_sign_solution(rho, cut.signs);
    }
    nmc::IdentityConditionResult a1 = nmc::check_identity_condition(rho);
    json doc;
    doc["command"] = "gaussian";
    doc["n"] = rho.n();
    doc["value"] = res.value;
    doc["objective_ordered"] = res.objective_ordered;
    doc["signs"] = res.signs;
    doc["certified"] = res.certified;
    doc["method"] = res.method;
    doc["identity_condition"] = json{{"per_vertex", a1.per_vertex}, {"all", a1.all}};
    emit(doc, out_path);
    return 0;
}

int run_partition(const std::string& graph_spec, double epsilon, int k, int samples,
                  std::uint64_t seed, const std::string& out_path) {
    nmc::Graph g = load_graph(graph_spec, 0);
    json all = json::array();
    for (int t = 0; t < samples; ++t) {
        nmc::PartitionSampler sampler;
        sampler.epsilon = epsilon;
        sampler.k = k;
        sampler.seed = nmc::mix_seed(seed, static_cast<std::uint64_t>(t));
        nmc::Partition p = nmc::sample_partition(g, sampler);
        json blocks = json::array();
        std::vector<int> hist;
        for (const auto& blk : p.blocks) {
            json b = json::array();
            for (int v : blk) b.push_back(v + 1);
            blocks.push_back(std::move(b));
            if (static_cast<int>(blk.size()) >= static_cast<int>(hist.size()))
                hist.resize(blk.size() + 1, 0);
            ++hist[blk.size()];
        }
        all.push_back(json{{"blocks", std::move(blocks)},
                           {"internal_edges", static_cast<int>(nmc::internal_edges(g, p).size())},
                           {"cut_edges", static_cast<int>(nmc::cut_edges(g, p).size())},
                           {"block_size_histogram", hist}});
    }
    json doc;
    doc["command"] = "partition";
    doc["graph"] = nmc::graph_to_json(g);
    doc["epsilon"] = epsilon;
    doc["k"] = k > 0 ? k : nmc::default_radius_cap(epsilon);
    doc["samples"] = std::move(all);
    emit(doc, out_path);
    return 0;
}

struct ExperimentArgs {
    std::string name;
    std::string links = "example1";
    std::string m_spec; // single value, or comma list for sample-convergence
    int seeds = 50;
    int bins = 10;
    int instances = 50;
    int resamples = 20;
    std::string graph_spec = "grid8x8";
    double epsilon = 0.2;
    int k = 0;
    int samples = 200;
    double flip = 0.1;
    int tree_m = 2000;
    std::string config_path;
    std::string matrices_out;
    std::string out_path;
    nmc::SolverConfig cfg;
    // which flags were given explicitly (they override --config values)
    bool links_set = false, m_set = false, seeds_set = false, bins_set = false, seed_set = false,
         starts_set = false, tol_set = false, max_iter_set = false;
};

std::vector<int> parse_m_list(const std::string& spec, const std::string& fallback) {
    std::vector<int> ms;
    std::stringstream ss(spec.empty() ? fallback : spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            ms.push_back(std::stoi(tok));
        } catch (...) {
            throw nmc::config_error("--m: '" + tok + "' is not an integer");
        }
        if (ms.back() < 1) throw nmc::config_error("--m: sample sizes must be >= 1");
    }
    if (ms.empty()) throw nmc::config_error("--m: empty sample-size list");
    return ms;
}

int run_experiment(const ExperimentArgs& a) {
    json doc;
    if (a.name == "continuity") {
        doc = nmc::experiments::continuity_to_json(
            nmc::experiments::run_continuity(a.instances, a.cfg.seed));
    } else if (a.name == "sample-convergence") {
        std::vector<int> ms = parse_m_list(a.m_spec, "100,1000,10000");
        doc = nmc::experiments::sample_convergence_to_json(
            nmc::experiments::run_sample_convergence(ms, a.resamples, a.cfg.seed));
    } else if (a.name == "partition-bound") {
        nmc::Graph g = load_graph(a.graph_spec, 0);
        nmc::Dataset ds = nmc::experiments::sample_tree_dataset(g, a.tree_m, a.flip, a.cfg.seed);
        std::vector<nmc::PairwiseJoint> joints;
        for (const nmc::Edge& e : g.edges()) joints.push_back(nmc::empirical_joint(ds, e.a, e.b));
        nmc::ProblemData pd(g, std::move(joints));
        doc = nmc::experiments::partition_bound_to_json(nmc::experiments::run_partition_bound(
            g, pd, a.epsilon, a.k, a.samples, nmc::mix_seed(a.cfg.seed, 0x9a27ULL)));
        doc["graph"] = a.graph_spec;
    } else if (a.name == "gaussian-inference") {
        nmc::experiments::InferenceSetup setup;
        std::string links = a.links;
        int m = 10000, bins = a.bins, seeds = a.seeds;
        nmc::SolverConfig cfg = a.cfg;
        if (!a.config_path.empty()) {
            std::ifstream in = open_input(a.config_path);
            nmc::InferenceConfigFile file = nmc::read_inference_config(in);
            setup = std::move(file.setup);
            if (!a.links_set) links = file.links;
            if (!a.m_set) m = file.m;
            if (!a.bins_set) bins = file.bins;
            if (!a.seeds_set) seeds = file.seeds;
            if (!a.starts_set) cfg.starts = file.solver.starts;
            if (!a.max_iter_set) cfg.max_iter = file.solver.max_iter;
            if (!a.tol_set) cfg.tol = file.solver.tol;
            if (!a.seed_set) cfg.seed = file.solver.seed;
        }
        if (a.m_set || a.config_path.empty()) {
            std::vector<int> ms = parse_m_list(a.m_spec, "10000");
            if (ms.size() != 1)
                throw nmc::config_error("gaussian-inference: --m takes a single sample size");
            m = ms[0];
        }
        doc = nmc::experiments::inference_to_json(
            nmc::experiments::run_gaussian_inference(links, m, seeds, bins, cfg, setup));
        if (!a.matrices_out.empty()) {
            std::filesystem::create_directories(a.matrices_out);
            auto mats = nmc::experiments::gaussian_inference_single(
                nmc::link_suite_from_name(links), m, bins, cfg, 0, setup);
            auto dump = [&](const std::string& tag, const nmc::PrecisionEstimate& est) {
                std::ofstream(a.matrices_out + "/lambda_" + tag + ".csv")
                    << nmc::matrix_to_csv(est.lambda_hat);
                std::ofstream(a.matrices_out + "/j_" + tag + ".csv") << nmc::matrix_to_csv(est.j_hat);
            };
            dump("nmc", mats.nmc);
            dump("multimc", mats.multimc);
            dump("observed", mats.observed);
            dump("latent", mats.latent);
        }
    } else {
        throw nmc::config_error("unknown experiment '" + a.name +
                                "' (continuity, sample-convergence, partition-bound, gaussian-inference)");
    }
    emit(doc, a.out_path);
    return 0;
}

void add_solver_flags(CLI::App* cmd, nmc::SolverConfig& cfg) {
    cmd->add_option("--max-iter", cfg.max_iter, "Sweep cap per solve");
    cmd->add_option("--tol", cfg.tol, "Objective-gain stopping tolerance");
    cmd->add_option("--starts", cfg.starts, "Multi-start count");
    cmd->add_option("--seed", cfg.seed, "Random seed (drives all randomness)");
    cmd->add_option("--threads", cfg.threads, "Worker threads (NMC_THREADS fallback)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"network maximal correlation toolkit"};
    app.require_subcommand(1);

    SolveArgs sa;
    sa.cfg.threads = 0;
    CLI::App* solve = app.add_subcommand("solve", "Solve NMC on samples or explicit distributions");
    solve->add_option("--data", sa.data_path, "CSV sample matrix (header row)");
    solve->add_option("--dist", sa.dist_path, "Explicit per-edge joint pmfs (JSON)");
    solve->add_option("--graph", sa.graph_spec, "Edge-list file or builtin name (c6, grid5x5, ...)");
    solve->add_flag("--complete", sa.complete, "Use the complete graph");
    solve->add_option("--solver", sa.solver, "ace | mep | partitioned");
    solve->add_flag("--absolute", sa.absolute, "Maximize total absolute correlation (ace)");
    solve->add_option("--lambda", sa.lambda, "Regularization weight in [0,1] (ace)");
    solve->add_option("--bins", sa.bins, "Discretize real columns into this many bins");
    solve->add_option("--bin-scheme", sa.bin_scheme, "quantile | fixed");
    solve->add_option("--epsilon", sa.epsilon, "Partition cut probability");
    solve->add_option("--k", sa.k, "Partition radius cap");
    solve->add_option("--partition-samples", sa.partition_samples, "Partitions to sample");
    solve->add_option("--out", sa.out_path, "Write JSON here instead of stdout");
    add_solver_flags(solve, sa.cfg);

    std::string mc_data, mc_scheme = "quantile", mc_out;
    int mc_bins = 0;
    CLI::App* mc = app.add_subcommand("mc", "Bivariate maximal correlation via the Q-matrix SVD");
    mc->add_option("--data", mc_data, "CSV with exactly two columns")->required();
    mc->add_option("--bins", mc_bins, "Discretize real columns");
    mc->add_option("--bin-scheme", mc_scheme, "quantile | fixed");
    mc->add_option("--out", mc_out, "Write JSON here instead of stdout");

    std::string ga_corr, ga_out;
    int ga_restarts = 64;
    std::uint64_t ga_seed = 0;
    CLI::App* ga = app.add_subcommand("gaussian", "Gaussian NMC via the Max-Cut reduction");
    ga->add_option("--corr", ga_corr, "Correlation matrix CSV")->required();
    ga->add_option("--restarts", ga_restarts, "Local-search restarts for n > 24");
    ga->add_option("--seed", ga_seed, "Seed for local-search restarts");
    ga->add_option("--out", ga_out, "Write JSON here instead of stdout");

    std::string pa_graph, pa_out;
    double pa_eps = 0.2;
    int pa_k = 0, pa_samples = 1;
    std::uint64_t pa_seed = 0;
    CLI::App* pa = app.add_subcommand("partition", "Sample ball-growing graph partitions");
    pa->add_option("--graph", pa_graph, "Edge-list file or builtin name")->required();
    pa->add_option("--epsilon", pa_eps, "Cut probability in (0,1)");
    pa->add_option("--k", pa_k, "Radius cap (derived from epsilon when 0)");
    pa->add_option("--samples", pa_samples, "Number of partitions");
    pa->add_option("--seed", pa_seed, "Random seed");
    pa->add_option("--out", pa_out, "Write JSON here instead of stdout");

    ExperimentArgs ea;
    ea.cfg.threads = 0;
    CLI::App* ex = app.add_subcommand("experiment", "Run a named experiment harness");
    ex->add_option("name", ea.name,
                   "continuity | sample-convergence | partition-bound | gaussian-inference")
        ->required();
    ex->add_option("--links", ea.links, "identity | example1 | example2");
    ex->add_option("--m", ea.m_spec,
                   "Samples per replication; comma list for sample-convergence");
    ex->add_option("--seeds", ea.seeds, "Replications");
    ex->add_option("--bins", ea.bins, "Quantile bins for discretization");
    ex->add_option("--instances", ea.instances, "Instances (continuity)");
    ex->add_option("--resamples", ea.resamples, "Resamples per m (sample-convergence)");
    ex->add_option("--graph", ea.graph_spec, "Graph for partition-bound");
    ex->add_option("--epsilon", ea.epsilon, "Partition cut probability");
    ex->add_option("--k", ea.k, "Partition radius cap");
    ex->add_option("--samples", ea.samples, "Sampled partitions (partition-bound)");
    ex->add_option("--flip", ea.flip, "Tree-model flip probability (partition-bound)");
    ex->add_option("--data-m", ea.tree_m, "Dataset size for partition-bound");
    ex->add_option("--config", ea.config_path,
                   "JSON config for gaussian-inference (lambda_x, null_pairs, links, m, bins, "
                   "seeds, solver); explicit flags override it");
    ex->add_option("--matrices-out", ea.matrices_out, "Directory for seed-0 Lambda/J CSV echo");
    ex->add_option("--out", ea.out_path, "Write JSON here instead of stdout");
    add_solver_flags(ex, ea.cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 4;
    }

    const auto t0 = std::chrono::steady_clock::now();
    int rc = 0;
    try {
        if (sa.cfg.threads <= 0) sa.cfg.threads = env_threads();
        if (ea.cfg.threads <= 0) ea.cfg.threads = env_threads();
        if (solve->parsed()) {
            sa.epsilon_set = solve->count("--epsilon") > 0;
            sa.k_set = solve->count("--k") > 0;
            sa.samples_set = solve->count("--partition-samples") > 0;
            rc = run_solve(sa);
        } else if (mc->parsed()) {
            rc = run_mc(mc_data, mc_bins, mc_scheme, mc_out);
        } else if (ga->parsed()) {
            rc = run_gaussian(ga_corr, ga_restarts, ga_seed, ga_out);
        } else if (pa->parsed()) {
            rc = run_partition(pa_graph, pa_eps, pa_k, pa_samples, pa_seed, pa_out);
        } else if (ex->parsed()) {
            ea.links_set = ex->count("--links") > 0;
            ea.m_set = ex->count("--m") > 0;
            ea.seeds_set = ex->count("--seeds") > 0;
            ea.bins_set = ex->count("--bins") > 0;
            ea.seed_set = ex->count("--seed") > 0;
            ea.starts_set = ex->count("--starts") > 0;
            ea.tol_set = ex->count("--tol") > 0;
            ea.max_iter_set = ex->count("--max-iter") > 0;
            rc = run_experiment(ea);
        }
    } catch (const nmc::invalid_input& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const nmc::solver_error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const nmc::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    const auto t1 = std::chrono::steady_clock::now();
    std::cerr << "wall_time_s="
              << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() / 1000.0
              << "\n";
    return rc;
}
