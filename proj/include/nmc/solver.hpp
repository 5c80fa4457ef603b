#ifndef NMC_SOLVER_HPP
#define NMC_SOLVER_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "nmc/ace.hpp"
#include "nmc/errors.hpp"
#include "nmc/graph.hpp"
#include "nmc/mep.hpp"
#include "nmc/pairwise.hpp"
#include "nmc/parallel.hpp"
#include "nmc/rng.hpp"

namespace nmc {

struct SolverConfig {
    int starts = 10;
    int max_iter = 1000;
    double tol = 1e-9;
    int escape_rounds = 50; // sign-flip escape / re-solve rounds
    std::uint64_t seed = 0;
    int threads = 1;
};

struct NmcSolution {
    std::vector<TransformTable> transforms;
    std::vector<double> edge_corr;   // E[phi_i phi_i'] per edge, graph order
    double rho_g = 0.0;              // sum of edge_corr
    double solver_objective = 0.0;   // quantity the iteration maximizes (== rho_g for plain NMC)
    std::vector<double> trace;       // winning start's objective trace
    std::vector<int> edge_signs;     // absolute variant only
    int degenerate_updates = 0;
    int escape_flips = 0;
    int winning_start = 0;
    int sweeps = 0;
    std::uint64_t seed = 0;
};

namespace detail {

// Unit vector orthogonal to sqrt(p); zero vector for one-letter alphabets.
inline Eigen::VectorXd random_b_block(const Eigen::VectorXd& sqrt_p, Rng& rng) {
    const int d = static_cast<int>(sqrt_p.size());
    if (d < 2) return Eigen::VectorXd::Zero(d);
    for (;;) {
        Eigen::VectorXd g(d);
        for (int j = 0; j < d; ++j) g[j] = rng.normal();
        g -= sqrt_p.dot(g) * sqrt_p;
        const double norm = g.norm();
        if (norm > 1e-8) return g / norm;
    }
}

// Deterministic fallback direction for vertices with no usable warm start.
inline Eigen::VectorXd fallback_b_block(const Eigen::VectorXd& sqrt_p) {
    const int d = static_cast<int>(sqrt_p.size());
    if (d < 2) return Eigen::VectorXd::Zero(d);
    int j = 0;
    for (int c = 1; c < d; ++c)
        if (sqrt_p[c] < sqrt_p[j]) j = c;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    v[j] = 1.0;
    v -= sqrt_p.dot(v) * sqrt_p;
    return v / v.norm();
}

inline Eigen::VectorXd sqrt_marginal(const ProblemData& pd, int i) {
    return pd.marginal(i).array().sqrt();
}

inline TransformTable b_to_phi(const Eigen::VectorXd& b, const Eigen::VectorXd& sqrt_p) {
    if (b.size() < 2) return Eigen::VectorXd::Zero(b.size());
    return b.cwiseQuotient(sqrt_p);
}

} // namespace detail

// Warm start: per-edge bivariate SVD transforms averaged per vertex in the
// b-coordinates and re-normalized. Start index 0 of every multi-start run.
inline std::vector<Eigen::VectorXd> warm_start_blocks(const ProblemData& pd) {
    const int n = pd.n();
    std::vector<Eigen::VectorXd> blocks(n);
    std::vector<Eigen::VectorXd> acc(n);
    for (int i = 0; i < n; ++i) acc[i] = Eigen::VectorXd::Zero(pd.alphabet(i));
    for (int e = 0; e < pd.graph().edge_count(); ++e) {
        const Edge& edge = pd.graph().edges()[e];
        if (pd.degenerate(edge.a) || pd.degenerate(edge.b)) continue;
        PairwiseJoint pj = pd.edge_pair(e);
        BivariateMc mc = bivariate_mc_svd(pj);
        acc[edge.a] += detail::sqrt_marginal(pd, edge.a).cwiseProduct(mc.phi_a);
        acc[edge.b] += detail::sqrt_marginal(pd, edge.b).cwiseProduct(mc.phi_b);
    }
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd sp = detail::sqrt_marginal(pd, i);
        Eigen::VectorXd v = acc[i];
        if (v.size() > 1) v -= sp.dot(v) * sp;
        const double norm = v.norm();
        blocks[i] = (norm > 1e-10) ? Eigen::VectorXd(v / norm) : detail::fallback_b_block(sp);
    }
    return blocks;
}

// Start k >= 1: independent uniform directions on the sphere orthogonal to
// sqrt(p_i), one stream per (seed, start, variable) so results do not depend
// on execution order or thread count.
inline std::vector<Eigen::VectorXd> random_start_blocks(const ProblemData& pd, std::uint64_t seed,
                                                        int start_index) {
    std::vector<Eigen::VectorXd> blocks(pd.n());
    for (int i = 0; i < pd.n(); ++i) {
        Rng rng(seed, mix_seed(0x5eedULL, static_cast<std::uint64_t>(start_index),
                               static_cast<std::uint64_t>(i)));
        blocks[i] = detail::random_b_block(detail::sqrt_marginal(pd, i), rng);
    }
    return blocks;
}

inline std::vector<TransformTable> blocks_to_transforms(const ProblemData& pd,
                                                        const std::vector<Eigen::VectorXd>& blocks) {
    std::vector<TransformTable> phi(pd.n());
    for (int i = 0; i < pd.n(); ++i) phi[i] = detail::b_to_phi(blocks[i], detail::sqrt_marginal(pd, i));
    return phi;
}

namespace detail {

// Row-sum multiplier of the ACE iteration in transform coordinates:
// lambda_i = sum over neighbors of s_e E[phi_i phi_i'] (plus the regularizer
// term when lambda > 0). Negating phi_i changes the objective by -2 lambda_i.
inline std::vector<double> ace_lambdas(const ProblemData& pd, const std::vector<TransformTable>& phi,
                                       const AceMode& mode) {
    std::vector<double> lam(pd.n(), 0.0);
    const double w = mode.lambda > 0.0 ? 1.0 - mode.lambda : 1.0;
    for (int e = 0; e < pd.graph().edge_count(); ++e) {
        const Edge& edge = pd.graph().edges()[e];
        const double c = (mode.edge_sign ? (*mode.edge_sign)[e] : 1.0) * pd.edge_correlation(e, phi) * w;
        lam[edge.a] += c;
        lam[edge.b] += c;
    }
    if (mode.lambda > 0.0)
        for (int i = 0; i < pd.n(); ++i) {
            const double mean = pd.numeric_mean(i);
            double reg = 0.0;
            for (int c = 0; c < pd.alphabet(i); ++c)
                reg += pd.marginal(i)[c] * phi[i][c] * (pd.numeric_levels()[i][c] - mean);
            lam[i] += 2.0 * mode.lambda * reg;
        }
    return lam;
}

// One multi-start candidate: iterate, then alternate sign-flip escapes with
// re-solves until no multiplier is negative (or the round cap is reached).
struct AceCandidate {
    AceRun run;
    int escape_flips = 0;
};

inline AceCandidate ace_solve_one(const ProblemData& pd, std::vector<TransformTable> init,
                                  const SolverConfig& cfg, const AceMode& mode) {
    AceCandidate cand;
    cand.run = ace_iterate(pd, std::move(init), cfg.max_iter, cfg.tol, mode);
    for (int round = 0; round < cfg.escape_rounds; ++round) {
        std::vector<double> lam = ace_lambdas(pd, cand.run.phi, mode);
        int worst = -1;
        for (int i = 0; i < pd.n(); ++i)
            if (lam[i] < -1e-12 && (worst < 0 || lam[i] < lam[worst])) worst = i;
        if (worst < 0) break;
        // flip negative-multiplier blocks one at a time, most negative first
        while (worst >= 0) {
            cand.run.phi[worst] = -cand.run.phi[worst];
            ++cand.escape_flips;
            lam = ace_lambdas(pd, cand.run.phi, mode);
            worst = -1;
            for (int i = 0; i < pd.n(); ++i)
                if (lam[i] < -1e-12 && (worst < 0 || lam[i] < lam[worst])) worst = i;
        }
        AceRun cont = ace_iterate(pd, cand.run.phi, cfg.max_iter, cfg.tol, mode);
        cand.run.degenerate_updates += cont.degenerate_updates;
        cand.run.sweeps += cont.sweeps;
        // splice: the continuation's first entry repeats the current objective
        cand.run.trace.insert(cand.run.trace.end(), cont.trace.begin() + 1, cont.trace.end());
        cand.run.phi = std::move(cont.phi);
    }
    return cand;
}

inline NmcSolution finalize_solution(const ProblemData& pd, const AceCandidate& cand, int start_index,
                                     const SolverConfig& cfg, const AceMode& mode) {
    NmcSolution sol;
    sol.transforms = cand.run.phi;
    sol.edge_corr.resize(pd.graph().edge_count());
    sol.rho_g = 0.0;
    for (int e = 0; e < pd.graph().edge_count(); ++e) {
        sol.edge_corr[e] = pd.edge_correlation(e, sol.transforms);
        sol.rho_g += sol.edge_corr[e];
    }
    sol.solver_objective = cand.run.trace.back();
    sol.trace = cand.run.trace;
    sol.degenerate_updates = cand.run.degenerate_updates;
    sol.escape_flips = cand.escape_flips;
    sol.winning_start = start_index;
    sol.sweeps = cand.run.sweeps;
    sol.seed = cfg.seed;
    if (mode.edge_sign) {
        sol.edge_signs.resize(mode.edge_sign->size());
        for (std::size_t e = 0; e < mode.edge_sign->size(); ++e)
            sol.edge_signs[e] = (*mode.edge_sign)[e] < 0 ? -1 : 1;
    }
    return sol;
}

} // namespace detail

// Multi-start Network ACE. Start 0 is the bivariate-SVD warm start, the rest
// are seeded random directions; candidates may run on several threads and the
// winner (largest objective, ties to the lowest start index) is deterministic.
inline NmcSolution solve_nmc_ace(const ProblemData& pd, const SolverConfig& cfg) {
    const int starts = std::max(1, cfg.starts);
    std::vector<detail::AceCandidate> cands(starts);
    std::vector<Eigen::VectorXd> warm = warm_start_blocks(pd);
    parallel_for(starts, cfg.threads, [&](int k) {
        auto blocks = (k == 0) ? warm : random_start_blocks(pd, cfg.seed, k);
        cands[k] = detail::ace_solve_one(pd, blocks_to_transforms(pd, blocks), cfg, {});
    });
    int best = 0;
    for (int k = 1; k < starts; ++k)
        if (cands[k].run.trace.back() > cands[best].run.trace.back()) best = k;
    return detail::finalize_solution(pd, cands[best], best, cfg, {});
}

// Single-start Network ACE from a caller-supplied initialization.
inline NmcSolution network_ace(const ProblemData& pd, std::vector<TransformTable> init, int max_iter,
                               double tol) {
    SolverConfig cfg;
    cfg.max_iter = max_iter;
    cfg.tol = tol;
    cfg.escape_rounds = 0;
    detail::AceCandidate cand;
    cand.run = ace_iterate(pd, std::move(init), max_iter, tol, {});
    return detail::finalize_solution(pd, cand, 0, cfg, {});
}

// Multi-start Gauss-Seidel MEP solver over the assembled MCP form, converted
// back to transforms at the end. Shares the start policy with solve_nmc_ace.
inline NmcSolution solve_nmc_mep(const ProblemData& pd, const SolverConfig& cfg) {
    std::vector<PairwiseJoint> joints;
    joints.reserve(pd.graph().edge_count());
    for (int e = 0; e < pd.graph().edge_count(); ++e) joints.push_back(pd.edge_pair(e));
    const std::vector<std::string>& names = pd.names();
    McpProblem prob = assemble_mcp(joints, pd.graph(), names.empty() ? nullptr : &names);

    struct MepCandidate {
        GsResult gs;
        int escape_flips = 0;
    };
    const int starts = std::max(1, cfg.starts);
    std::vector<MepCandidate> cands(starts);
    std::vector<Eigen::VectorXd> warm = warm_start_blocks(pd);
    parallel_for(starts, cfg.threads, [&](int k) {
        auto blocks = (k == 0) ? warm : random_start_blocks(pd, cfg.seed, k);
        MepCandidate cand;
        cand.gs = gauss_seidel_mep(prob, make_state(prob, blocks), cfg.max_iter, cfg.tol);
        for (int round = 0; round < cfg.escape_rounds; ++round) {
            bool negative = false;
            for (double l : cand.gs.state.lambdas)
                if (l < -1e-12) negative = true;
            if (!negative) break;
            MepState flipped = sign_flip_escape(prob, cand.gs.state);
            for (int i = 0; i < pd.n(); ++i)
                if ((flipped.b[i] + cand.gs.state.b[i]).norm() < 1e-12) ++cand.escape_flips;
            GsResult cont = gauss_seidel_mep(prob, std::move(flipped), cfg.max_iter, cfg.tol);
            cand.gs.degenerate_updates += cont.degenerate_updates;
            cand.gs.sweeps += cont.sweeps;
            cand.gs.trace.insert(cand.gs.trace.end(), cont.trace.begin(), cont.trace.end());
            cand.gs.state = std::move(cont.state);
        }
        cands[k] = std::move(cand);
    });
    int best = 0;
    for (int k = 1; k < starts; ++k)
        if (cands[k].gs.state.r > cands[best].gs.state.r) best = k;

    NmcSolution sol;
    sol.transforms = b_to_transforms(prob, cands[best].gs.state);
    sol.edge_corr.resize(pd.graph().edge_count());
    sol.rho_g = 0.0;
    for (int e = 0; e < pd.graph().edge_count(); ++e) {
        sol.edge_corr[e] = pd.edge_correlation(e, sol.transforms);
        sol.rho_g += sol.edge_corr[e];
    }
    sol.solver_objective = cands[best].gs.state.r;
    sol.trace = cands[best].gs.trace;
    sol.degenerate_updates = cands[best].gs.degenerate_updates;
    sol.escape_flips = cands[best].escape_flips;
    sol.winning_start = best;
    sol.sweeps = cands[best].gs.sweeps;
    sol.seed = cfg.seed;
    return sol;
}

// Absolute NMC: alternate converged ACE sweeps under fixed edge signs with
// sign resets s_e <- sign(E[phi phi']); both step types are nondecreasing in
// sum_e s_e E[phi phi']. Signs start from the Pearson correlations of the
// numeric levels; zero correlations keep their previous sign.
inline NmcSolution solve_absolute_nmc(const ProblemData& pd, const SolverConfig& cfg) {
    const int ne = pd.graph().edge_count();

    std::vector<double> pearson_signs(ne, 1.0);
    {
        std::vector<TransformTable> ident(pd.n());
        for (int i = 0; i < pd.n(); ++i) {
            Eigen::VectorXd z(pd.alphabet(i));
            const double mean = pd.numeric_mean(i);
            for (int c = 0; c < pd.alphabet(i); ++c) z[c] = pd.numeric_levels()[i][c] - mean;
            detail::standardize(z, pd.marginal(i));
            ident[i] = z;
        }
        for (int e = 0; e < ne; ++e) {
            const double c = pd.edge_correlation(e, ident);
            if (c < 0) pearson_signs[e] = -1.0;
        }
    }

    auto alternate = [&](std::vector<TransformTable> phi, std::vector<double> signs) {
        detail::AceCandidate cand;
        AceMode mode;
        mode.edge_sign = &signs;
        cand.run = ace_iterate(pd, std::move(phi), cfg.max_iter, cfg.tol, mode);
        const int outer_cap = 100;
        for (int round = 0; round < outer_cap; ++round) {
            bool changed = false;
            for (int e = 0; e < ne; ++e) {
                const double c = pd.edge_correlation(e, cand.run.phi);
                if (c > 0 && signs[e] < 0) { signs[e] = 1.0; changed = true; }
                else if (c < 0 && signs[e] > 0) { signs[e] = -1.0; changed = true; }
                // c == 0: keep the previous sign
            }
            double obj = 0.0;
            for (int e = 0; e < ne; ++e) obj += signs[e] * pd.edge_correlation(e, cand.run.phi);
            cand.run.trace.push_back(obj);
            detail::AceCandidate next = detail::ace_solve_one(pd, cand.run.phi, cfg, mode);
            cand.run.degenerate_updates += next.run.degenerate_updates;
            cand.escape_flips += next.escape_flips;
            cand.run.sweeps += next.run.sweeps;
            const double gain = next.run.trace.back() - cand.run.trace.back();
            cand.run.trace.insert(cand.run.trace.end(), next.run.trace.begin() + 1, next.run.trace.end());
            cand.run.phi = std::move(next.run.phi);
            if (!changed && gain < cfg.tol) break;
        }
        return std::pair<detail::AceCandidate, std::vector<double>>(std::move(cand), std::move(signs));
    };

    const int starts = std::max(1, cfg.starts);
    // plain solution as an extra candidate so the absolute objective can never
    // fall below the plain one
    NmcSolution plain = solve_nmc_ace(pd, cfg);
    std::vector<double> plain_signs(ne, 1.0);
    for (int e = 0; e < ne; ++e)
        if (plain.edge_corr[e] < 0) plain_signs[e] = -1.0;

    std::vector<std::pair<detail::AceCandidate, std::vector<double>>> cands(starts + 1);
    std::vector<Eigen::VectorXd> warm = warm_start_blocks(pd);
    parallel_for(starts + 1, cfg.threads, [&](int k) {
        if (k == starts) {
            cands[k] = alternate(plain.transforms, plain_signs);
            return;
        }
        auto blocks = (k == 0) ? warm : random_start_blocks(pd, cfg.seed, k);
        cands[k] = alternate(blocks_to_transforms(pd, blocks), pearson_signs);
    });
    int best = 0;
    for (int k = 1; k <= starts; ++k)
        if (cands[k].first.run.trace.back() > cands[best].first.run.trace.back()) best = k;

    AceMode mode;
    mode.edge_sign = &cands[best].second;
    NmcSolution sol = detail::finalize_solution(pd, cands[best].first, best, cfg, mode);
    return sol;
}

// Regularized NMC (lambda in [0,1]); lambda = 0 reduces exactly to
// solve_nmc_ace, lambda = 1 yields the standardized identity transforms.
inline NmcSolution solve_regularized_nmc(const ProblemData& pd, double lambda,
                                         const SolverConfig& cfg) {
    if (lambda < 0.0 || lambda > 1.0) throw config_error("regularized NMC: lambda must be in [0,1]");
    AceMode mode;
    mode.lambda = lambda;
    const int starts = std::max(1, cfg.starts);
    std::vector<detail::AceCandidate> cands(starts);
    std::vector<Eigen::VectorXd> warm = warm_start_blocks(pd);
    parallel_for(starts, cfg.threads, [&](int k) {
        auto blocks = (k == 0) ? warm : random_start_blocks(pd, cfg.seed, k);
        cands[k] = detail::ace_solve_one(pd, blocks_to_transforms(pd, blocks), cfg, mode);
    });
    int best = 0;
    for (int k = 1; k < starts; ++k)
        if (cands[k].run.trace.back() > cands[best].run.trace.back()) best = k;
    return detail::finalize_solution(pd, cands[best], best, cfg, mode);
}

// Exact NMC for all-binary alphabets. A two-letter mean-zero unit-variance
// transform is unique up to sign, so the optimum is an exhaustive search over
// sign patterns (Gray-code order, s_1 fixed to +1 by global sign symmetry).
struct BinaryExact {
    double value = 0.0;
    std::vector<int> signs;
    std::vector<TransformTable> transforms;
};

inline TransformTable canonical_binary_transform(const Eigen::VectorXd& marginal) {
    TransformTable phi(2);
    const double p0 = marginal[0], p1 = marginal[1];
    phi[0] = std::sqrt(p1 / p0);
    phi[1] = -std::sqrt(p0 / p1);
    return phi;
}

inline BinaryExact binary_exact_nmc(const ProblemData& pd) {
    const int n = pd.n();
    if (n > 26) throw config_error("binary_exact_nmc: enumeration budget is n <= 26");
    std::vector<TransformTable> base(n);
    for (int i = 0; i < n; ++i) {
        if (pd.alphabet(i) == 2) {
            base[i] = canonical_binary_transform(pd.marginal(i));
        } else if (pd.graph().degree(i) == 0) {
            // isolated vertices carry no objective terms; a zero transform is fine
            base[i] = Eigen::VectorXd::Zero(pd.alphabet(i));
        } else {
            throw invalid_input("binary_exact_nmc: all alphabets must be binary");
        }
    }
    const int ne = pd.graph().edge_count();
    std::vector<double> c(ne);
    for (int e = 0; e < ne; ++e) {
        const Edge& edge = pd.graph().edges()[e];
        c[e] = pd.expect_product(edge.a, edge.b, base[edge.a], base[edge.b]);
    }

    std::vector<int> s(n, 1), best_s(n, 1);
    double obj = 0.0;
    for (int e = 0; e < ne; ++e) obj += c[e];
    double best = obj;
    const std::uint64_t patterns = n > 1 ? (1ULL << (n - 1)) : 1ULL;
    for (std::uint64_t i = 1; i < patterns; ++i) {
        const int v = 1 + __builtin_ctzll(i); // Gray code: flip one vertex per step
        double delta = 0.0;
        for (auto [nb, e] : pd.graph().neighbors(v)) delta += s[v] * s[nb] * c[e];
        obj -= 2.0 * delta;
        s[v] = -s[v];
        if (obj > best) {
            best = obj;
            best_s = s;
        }
    }
    BinaryExact out;
    out.value = best;
    out.signs = best_s;
    out.transforms.resize(n);
    for (int i = 0; i < n; ++i) out.transforms[i] = best_s[i] * base[i];
    return out;
}

} // namespace nmc

#endif
