#include <catch2/catch.hpp>

#include <cmath>
#include <map>

#include "nmc/experiments.hpp"
#include "nmc/graph.hpp"
#include "nmc/partition_solver.hpp"
#include "nmc/rng.hpp"
#include "nmc/solver.hpp"
#include "oracle_helpers.hpp"

using namespace nmc;

TEST_CASE("truncated geometric pmf") {
    SECTION("sums to one for any (epsilon, k)") {
        for (double eps : {0.05, 0.2, 0.5, 0.9}) {
            for (int k : {1, 2, 5, 17}) {
                double total = 0.0;
                for (int l = 1; l <= k; ++l) total += truncated_geometric_pmf(eps, k, l);
                REQUIRE(total == Approx(1.0).margin(1e-12));
            }
        }
    }
    SECTION("k = 1 is the point mass at 1") {
        REQUIRE(truncated_geometric_pmf(0.3, 1, 1) == Approx(1.0));
        Rng rng(1);
        for (int t = 0; t < 20; ++t) REQUIRE(draw_truncated_geometric(0.3, 1, rng) == 1);
    }
    SECTION("epsilon near 1 concentrates at radius 1") {
        Rng rng(2);
        int ones = 0;
        for (int t = 0; t < 500; ++t) ones += draw_truncated_geometric(0.999, 10, rng) == 1;
        REQUIRE(ones >= 495);
    }
    SECTION("draws follow the pmf") {
        Rng rng(3);
        const double eps = 0.35;
        const int k = 5, n_draws = 20000;
        std::vector<int> counts(k + 1, 0);
        for (int t = 0; t < n_draws; ++t) ++counts[draw_truncated_geometric(eps, k, rng)];
        for (int l = 1; l <= k; ++l) {
            const double p = truncated_geometric_pmf(eps, k, l);
            const double se = std::sqrt(p * (1 - p) / n_draws);
            REQUIRE(std::abs(static_cast<double>(counts[l]) / n_draws - p) <= 5 * se);
        }
    }
}

TEST_CASE("sampled partitions are valid and deterministic") {
    Rng seed_rng(5);
    for (int t = 0; t < 15; ++t) {
        Graph g = Graph::grid(4, 5);
        PartitionSampler sampler;
        sampler.epsilon = 0.1 + 0.5 * seed_rng.uniform01();
        sampler.k = seed_rng.uniform_int(1, 8);
        sampler.seed = seed_rng.next_u64();
        Partition p = sample_partition(g, sampler);
        p.validate(g.n()); // throws on failure
        Partition q = sample_partition(g, sampler);
        REQUIRE(p.blocks == q.blocks);
    }
    PartitionSampler bad;
    bad.epsilon = 1.5;
    REQUIRE_THROWS_AS(sample_partition(Graph::path(3), bad), config_error);
}

TEST_CASE("default radius cap follows the (2/eps) log(2/eps) guidance") {
    REQUIRE(default_radius_cap(0.2) == static_cast<int>(std::ceil(10.0 * std::log(10.0))));
    REQUIRE(default_radius_cap(0.1) == static_cast<int>(std::ceil(20.0 * std::log(20.0))));
}

TEST_CASE("per-edge cut rate stays within the epsilon budget on a grid") {
    Graph g = Graph::grid(6, 6);
    const double eps = 0.25;
    const int n_samples = 300;
    std::vector<int> cut_count(g.edge_count(), 0);
    for (int t = 0; t < n_samples; ++t) {
        PartitionSampler sampler;
        sampler.epsilon = eps;
        sampler.seed = mix_seed(11, static_cast<std::uint64_t>(t));
        Partition p = sample_partition(g, sampler);
        auto owner = p.block_of(g.n());
        for (int e = 0; e < g.edge_count(); ++e)
            if (owner[g.edges()[e].a] != owner[g.edges()[e].b]) ++cut_count[e];
    }
    const double guard = 3.0 * std::sqrt(eps * (1 - eps) / n_samples);
    for (int e = 0; e < g.edge_count(); ++e)
        REQUIRE(static_cast<double>(cut_count[e]) / n_samples <= eps + guard);
}

TEST_CASE("approx NMC on a graph of disconnected components is exact") {
    // two disjoint edges; balls never cross components, so no cut edges
    Graph g(4, {{0, 1}, {2, 3}});
    Dataset d = experiments::sample_tree_dataset(g, 500, 0.15, 19);
    std::vector<PairwiseJoint> joints;
    for (const Edge& e : g.edges()) joints.push_back(empirical_joint(d, e.a, e.b));
    ProblemData pd(g, std::move(joints));
    SolverConfig cfg;
    cfg.seed = 23;
    PartitionSampler sampler;
    sampler.epsilon = 0.3;
    sampler.seed = 29;
    ApproxNmcResult res = approx_nmc(pd, sampler, cfg);
    REQUIRE(res.cut_edge_count == 0);
    NmcSolution full = solve_nmc_ace(pd, cfg);
    REQUIRE(res.rho_hat == Approx(full.rho_g).margin(1e-6));
}

TEST_CASE("single-vertex blocks carry no objective") {
    Graph g = Graph::cycle(4);
    Dataset d = experiments::sample_tree_dataset(g, 200, 0.2, 31);
    ProblemData pd(g, d);
    SolverConfig cfg;
    ProblemData sub = pd.restrict({2});
    NmcSolution sol = solve_nmc_ace(sub, cfg);
    REQUIRE(sol.rho_g == 0.0);
}

TEST_CASE("block optima dominate the restriction of global transforms") {
    Rng rng(37);
    Graph g = Graph::grid(3, 3);
    Dataset d = experiments::sample_tree_dataset(g, 800, 0.12, 41);
    std::vector<PairwiseJoint> joints;
    for (const Edge& e : g.edges()) joints.push_back(empirical_joint(d, e.a, e.b));
    ProblemData pd(g, joints);
    BinaryExact global = binary_exact_nmc(pd);
    for (int t = 0; t < 10; ++t) {
        PartitionSampler sampler;
        sampler.epsilon = 0.3;
        sampler.k = 3;
        sampler.seed = mix_seed(43, static_cast<std::uint64_t>(t));
        Partition p = sample_partition(g, sampler);
        auto owner = p.block_of(g.n());
        for (const auto& blk : p.blocks) {
            const double block_opt = binary_exact_nmc(pd.restrict(blk)).value;
            double restricted = 0.0;
            for (int e = 0; e < g.edge_count(); ++e) {
                const Edge& edge = g.edges()[e];
                if (owner[edge.a] == owner[edge.b] && owner[edge.a] == owner[blk[0]])
                    restricted += pd.edge_correlation(e, global.transforms);
            }
            REQUIRE(block_opt >= restricted - 1e-9);
        }
    }
}

TEST_CASE("approx NMC rho_hat is identical across thread counts") {
    Graph g = Graph::grid(3, 4);
    Dataset d = experiments::sample_tree_dataset(g, 300, 0.15, 47);
    ProblemData pd(g, d);
    PartitionSampler sampler;
    sampler.epsilon = 0.4;
    sampler.k = 2;
    sampler.seed = 53;
    SolverConfig cfg;
    cfg.seed = 59;
    cfg.starts = 3;
    cfg.threads = 1;
    ApproxNmcResult a = approx_nmc(pd, sampler, cfg);
    cfg.threads = 4;
    ApproxNmcResult b = approx_nmc(pd, sampler, cfg);
    REQUIRE(a.rho_hat == b.rho_hat);
    REQUIRE(a.partition.blocks == b.partition.blocks);
    REQUIRE(a.cut_edge_count == b.cut_edge_count);
}

TEST_CASE("partition bound harness on a small cycle") {
    Graph g = Graph::cycle(6);
    Dataset d = experiments::sample_tree_dataset(g, 1500, 0.1, 61);
    std::vector<PairwiseJoint> joints;
    for (const Edge& e : g.edges()) joints.push_back(empirical_joint(d, e.a, e.b));
    ProblemData pd(g, std::move(joints));
    auto rep = experiments::run_partition_bound(g, pd, 0.2, 0, 60, 67);
    REQUIRE(rep.rho_exact > 0.5);
    REQUIRE(rep.pass);
}
