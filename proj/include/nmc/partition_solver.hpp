#ifndef NMC_PARTITION_SOLVER_HPP
#define NMC_PARTITION_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <queue>
#include <vector>

#include "nmc/ace.hpp"
#include "nmc/errors.hpp"
#include "nmc/graph.hpp"
#include "nmc/parallel.hpp"
#include "nmc/rng.hpp"
#include "nmc/solver.hpp"

namespace nmc {

// Ball-growing partition sampler. epsilon controls the per-edge cut
// probability, k caps the ball radius of the truncated geometric draw.
struct PartitionSampler {
    double epsilon = 0.2;
    int k = 0; // 0: derive from epsilon via default_radius_cap
    std::uint64_t seed = 0;
    bool shuffle_order = false; // seeded shuffle of the vertex processing order

    void validate() const {
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw config_error("partition sampler: epsilon must be in (0,1)");
        if (k < 0) throw config_error("partition sampler: k must be >= 1");
    }
};

// Radius cap from the (r/eps) log(r/eps) guidance with r = 2 (grid-like growth).
inline int default_radius_cap(double epsilon) {
    const double x = 2.0 / epsilon;
    return std::max(1, static_cast<int>(std::ceil(x * std::log(x))));
}

// P[R = l] = eps (1-eps)^{l-1} for l < k, and (1-eps)^{k-1} for l = k.
inline double truncated_geometric_pmf(double epsilon, int k, int l) {
    if (l < 1 || l > k) return 0.0;
    if (l == k) return std::pow(1.0 - epsilon, k - 1);
    return epsilon * std::pow(1.0 - epsilon, l - 1);
}

inline int draw_truncated_geometric(double epsilon, int k, Rng& rng) {
    const double u = rng.uniform01();
    // P[R > l] = (1-eps)^l for l < k
    double tail = 1.0;
    for (int l = 1; l < k; ++l) {
        tail *= 1.0 - epsilon;
        if (u >= tail) return l;
    }
    return k;
}

// Samples one partition: vertices are processed in index order (optionally a
// seeded shuffle), each grows a ball of truncated-geometric radius and
// re-colors everything inside it; color classes become the blocks.
inline Partition sample_partition(const Graph& g, const PartitionSampler& sampler) {
    sampler.validate();
    const int n = g.n();
    const int k = sampler.k > 0 ? sampler.k : default_radius_cap(sampler.epsilon);
    Rng rng(sampler.seed, 0x9a17ULL);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (sampler.shuffle_order)
        for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_int(0, i)]);

    std::vector<int> color(n, -1);
    std::vector<int> dist(n, -1);
    std::vector<int> frontier;
    for (int center : order) {
        const int radius = draw_truncated_geometric(sampler.epsilon, k, rng);
        // radius-bounded BFS from the center
        std::fill(dist.begin(), dist.end(), -1);
        dist[center] = 0;
        color[center] = center;
        frontier.assign(1, center);
        for (int d = 0; d < radius && !frontier.empty(); ++d) {
            std::vector<int> next;
            for (int v : frontier)
                for (auto [nb, e] : g.neighbors(v))
                    if (dist[nb] < 0) {
                        dist[nb] = d + 1;
                        color[nb] = center;
                        next.push_back(nb);
                    }
            frontier = std::move(next);
        }
    }

    Partition p;
    std::vector<int> block_id(n, -1);
    for (int v = 0; v < n; ++v) {
        const int c = color[v];
        if (block_id[c] < 0) {
            block_id[c] = static_cast<int>(p.blocks.size());
            p.blocks.emplace_back();
        }
        p.blocks[block_id[c]].push_back(v);
    }
    return p;
}

struct ApproxNmcResult {
    Partition partition;
    std::vector<NmcSolution> block_solutions; // aligned with partition.blocks
    double rho_hat = 0.0;                     // sum of block objectives
    int cut_edge_count = 0;
    std::vector<int> block_sizes;
};

using BlockSolver = std::function<NmcSolution(const ProblemData&, const SolverConfig&)>;

// Partitioned approximate NMC: sample a partition, solve each block's induced
// sub-problem independently (cut edges dropped), and sum the objectives.
// Blocks may be solved in parallel; rho_hat accumulates in block-index order
// so the output is bit-stable for any thread count.
inline ApproxNmcResult approx_nmc(const ProblemData& pd, const PartitionSampler& sampler,
                                  const SolverConfig& cfg, const BlockSolver& block_solver = {}) {
    ApproxNmcResult res;
    res.partition = sample_partition(pd.graph(), sampler);
    res.cut_edge_count = static_cast<int>(cut_edges(pd.graph(), res.partition).size());
    const int blocks = static_cast<int>(res.partition.blocks.size());
    res.block_solutions.resize(blocks);
    res.block_sizes.resize(blocks);
    const BlockSolver solve = block_solver ? block_solver : BlockSolver(&solve_nmc_ace);
    parallel_for(blocks, cfg.threads, [&](int b) {
        const auto& vars = res.partition.blocks[b];
        res.block_sizes[b] = static_cast<int>(vars.size());
        ProblemData sub = pd.restrict(vars);
        SolverConfig sub_cfg = cfg;
        sub_cfg.threads = 1;
        sub_cfg.seed = mix_seed(cfg.seed, 0xb10cULL, static_cast<std::uint64_t>(b));
        try {
            res.block_solutions[b] = solve(sub, sub_cfg);
        } catch (const std::exception& ex) {
            throw solver_error("block " + std::to_string(b + 1) + ": " + ex.what());
        }
    });
    res.rho_hat = 0.0;
    for (int b = 0; b < blocks; ++b) res.rho_hat += res.block_solutions[b].rho_g;
    return res;
}

} // namespace nmc

#endif
