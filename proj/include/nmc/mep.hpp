#ifndef NMC_MEP_HPP
#define NMC_MEP_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "nmc/errors.hpp"
#include "nmc/graph.hpp"
#include "nmc/pairwise.hpp"

namespace nmc {

// The NMC objective rewritten as a Maximum Correlation Problem: maximize
// sum over edges of b_i^T C_{i,i'} b_{i'} subject to ||b_i|| = 1. Per variable
// i, B_i = sqrt(I - sqrt(p_i) sqrt(p_i)^T) and A_i is its pseudo-inverse on
// the complement of sqrt(p_i); both are the same orthogonal projection since
// I - vv^T is idempotent for a unit v, but they are built from the
// eigendecomposition so the conditioning check is explicit.
struct McpProblem {
    const Graph* g = nullptr;
    std::vector<int> dims;                  // |X_i| per variable
    std::vector<Eigen::VectorXd> sqrt_p;    // sqrt of marginals
    std::vector<Eigen::MatrixXd> a_mat;     // A_i
    std::vector<Eigen::MatrixXd> b_mat;     // B_i
    std::vector<Eigen::MatrixXd> c_block;   // C_{a,b} for each edge (a < b); C_{b,a} = C_{a,b}^T
    std::vector<const PairwiseJoint*> edge_joint; // aligned with g->edges()
};

// Block vector with its objective value and multipliers.
// Conventions: r(b) sums each edge ONCE (so r equals the NMC objective
// Sum_edges E[phi_i phi_i']), while lambda_i = b_i^T Sum_{i'} C_{i,i'} b_{i'}
// keeps the MEP row-sum definition; hence r = (1/2) Sum_i lambda_i.
struct MepState {
    std::vector<Eigen::VectorXd> b;
    double r = 0.0;
    std::vector<double> lambdas;
};

namespace detail {

inline Eigen::VectorXd row_image(const McpProblem& prob, int i, const std::vector<Eigen::VectorXd>& b) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(prob.dims[i]);
    for (auto [nb, e] : prob.g->neighbors(i)) {
        const Edge& edge = prob.g->edges()[e];
        if (edge.a == i)
            acc.noalias() += prob.c_block[e] * b[nb];
        else
            acc.noalias() += prob.c_block[e].transpose() * b[nb];
    }
    return acc;
}

} // namespace detail

// Recomputes r and the lambdas for a given block vector.
inline void refresh_state(const McpProblem& prob, MepState& st) {
    const int n = prob.g->n();
    st.lambdas.assign(n, 0.0);
    for (int i = 0; i < n; ++i) st.lambdas[i] = st.b[i].dot(detail::row_image(prob, i, st.b));
    double r = 0.0;
    for (int e = 0; e < prob.g->edge_count(); ++e) {
        const Edge& edge = prob.g->edges()[e];
        r += st.b[edge.a].dot(prob.c_block[e] * st.b[edge.b]);
    }
    st.r = r;
}

inline MepState make_state(const McpProblem& prob, std::vector<Eigen::VectorXd> blocks) {
    MepState st;
    st.b = std::move(blocks);
    refresh_state(prob, st);
    return st;
}

// Builds the MCP form from per-edge joints. Eigendecomposition of
// I - sqrt(p) sqrt(p)^T assigns the zero eigenvalue to the sqrt(p) direction;
// a second-smallest eigenvalue below 1e-8 (in particular a one-letter
// alphabet) means the variable cannot carry a unit-variance transform.
inline McpProblem assemble_mcp(const std::vector<PairwiseJoint>& joints, const Graph& g,
                               const std::vector<std::string>* names = nullptr) {
    if (static_cast<int>(joints.size()) != g.edge_count())
        throw invalid_input("assemble_mcp: one joint per edge required");
    McpProblem prob;
    prob.g = &g;
    const int n = g.n();
    prob.dims.assign(n, 0);
    prob.sqrt_p.resize(n);

    auto var_name = [&](int i) {
        return names && !names->empty() ? (*names)[i] : "variable " + std::to_string(i + 1);
    };

    // collect marginals from incident edges
    for (int e = 0; e < g.edge_count(); ++e) {
        const Edge& edge = g.edges()[e];
        const PairwiseJoint& pj = joints[e];
        auto take = [&](int v, const Eigen::VectorXd& marg) {
            if (prob.dims[v] == 0) {
                prob.dims[v] = static_cast<int>(marg.size());
                prob.sqrt_p[v] = marg.array().sqrt();
            } else if (prob.dims[v] != marg.size() ||
                       (prob.sqrt_p[v].array().square().matrix() - marg).lpNorm<Eigen::Infinity>() > 1e-6) {
                throw invalid_input("assemble_mcp: inconsistent marginals for " + var_name(v));
            }
        };
        take(edge.a, pj.marginal_a);
        take(edge.b, pj.marginal_b);
    }
    for (int i = 0; i < n; ++i)
        if (prob.dims[i] == 0) { // isolated vertex, inert in the objective
            prob.dims[i] = 1;
            prob.sqrt_p[i] = Eigen::VectorXd::Ones(1);
        }

    prob.a_mat.resize(n);
    prob.b_mat.resize(n);
    for (int i = 0; i < n; ++i) {
        const int d = prob.dims[i];
        if (d < 2) {
            if (g.degree(i) > 0)
                throw solver_error("assemble_mcp: ill-conditioned marginal for " + var_name(i) +
                                   " (alphabet collapses to one symbol)");
            prob.a_mat[i] = Eigen::MatrixXd::Zero(d, d);
            prob.b_mat[i] = Eigen::MatrixXd::Zero(d, d);
            continue;
        }
        Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(d, d) - prob.sqrt_p[i] * prob.sqrt_p[i].transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(proj);
        Eigen::VectorXd evals = eig.eigenvalues(); // ascending
        if (evals[1] < 1e-8)
            throw solver_error("assemble_mcp: ill-conditioned marginal for " + var_name(i) +
                               " (second-smallest singular value " + std::to_string(evals[1]) + ")");
        Eigen::VectorXd sqrt_vals = evals.cwiseMax(0.0).cwiseSqrt();
        sqrt_vals[0] = 0.0; // structural null direction sqrt(p)
        Eigen::VectorXd inv_vals = Eigen::VectorXd::Zero(d);
        for (int j = 1; j < d; ++j) inv_vals[j] = 1.0 / sqrt_vals[j];
        prob.b_mat[i] = eig.eigenvectors() * sqrt_vals.asDiagonal() * eig.eigenvectors().transpose();
        prob.a_mat[i] = eig.eigenvectors() * inv_vals.asDiagonal() * eig.eigenvectors().transpose();
    }

    prob.c_block.resize(g.edge_count());
    prob.edge_joint.resize(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        const Edge& edge = g.edges()[e];
        const PairwiseJoint& pj = joints[e];
        prob.c_block[e] = prob.a_mat[edge.a].transpose() *
                          (pj.q - prob.sqrt_p[edge.a] * prob.sqrt_p[edge.b].transpose()) *
                          prob.a_mat[edge.b];
        prob.edge_joint[e] = &pj;
    }
    return prob;
}

struct GsResult {
    MepState state;
    std::vector<double> trace;      // r after each sweep, nondecreasing
    int degenerate_updates = 0;     // blocks skipped on an all-zero conditional sum
    int sweeps = 0;
};

// Gauss-Seidel iteration for the MEP: each block is replaced by the normalized
// sum of its neighbor images, which maximizes the terms of r containing that
// block. Stops once the r increase drops below tol and every block satisfies
// the stationarity residual || sum C_{i,i'} b_{i'} - lambda_i b_i || < sqrt(tol).
inline GsResult gauss_seidel_mep(const McpProblem& prob, MepState init, int max_iter, double tol) {
    const int n = prob.g->n();
    for (int i = 0; i < n; ++i) {
        if (prob.g->degree(i) == 0) continue; // inert block, any content is fine
        const double norm = init.b[i].norm();
        if (std::abs(norm - 1.0) > 1e-9)
            throw invalid_input("gauss_seidel_mep: init block " + std::to_string(i + 1) + " not unit norm");
    }
    GsResult res;
    res.state = std::move(init);
    refresh_state(prob, res.state);
    res.trace.push_back(res.state.r);
    const double resid_tol = std::sqrt(tol);
    for (int sweep = 0; sweep < max_iter; ++sweep) {
        for (int i = 0; i < n; ++i) {
            if (prob.g->degree(i) == 0) continue;
            Eigen::VectorXd img = detail::row_image(prob, i, res.state.b);
            const double norm = img.norm();
            if (norm < 1e-12) {
                ++res.degenerate_updates;
                continue;
            }
            res.state.b[i] = img / norm;
        }
        refresh_state(prob, res.state);
        res.trace.push_back(res.state.r);
        ++res.sweeps;
        const double gain = res.trace[res.trace.size() - 1] - res.trace[res.trace.size() - 2];
        if (gain < tol) {
            double worst = 0.0;
            for (int i = 0; i < n; ++i) {
                Eigen::VectorXd img = detail::row_image(prob, i, res.state.b);
                worst = std::max(worst, (img - res.state.lambdas[i] * res.state.b[i]).norm());
            }
            if (worst < resid_tol) break;
        }
    }
    return res;
}

// Escape move for stationary points with a negative multiplier: flipping the
// sign of block i changes r by exactly -2 lambda_i, so flipping while any
// lambda is negative strictly increases r. Flips are applied one at a time
// (most negative first) with multipliers recomputed in between; a simultaneous
// flip of adjacent negative blocks can lose the guarantee through the edges
// joining them.
inline MepState sign_flip_escape(const McpProblem& prob, MepState state) {
    const int n = prob.g->n();
    refresh_state(prob, state);
    const int flip_cap = 64 * std::max(1, n);
    for (int round = 0; round < flip_cap; ++round) {
        int worst = -1;
        for (int i = 0; i < n; ++i)
            if (state.lambdas[i] < -1e-12 && (worst < 0 || state.lambdas[i] < state.lambdas[worst]))
                worst = i;
        if (worst < 0) break;
        state.b[worst] = -state.b[worst];
        refresh_state(prob, state);
    }
    return state;
}

// Transform recovery: a_i = A_i b_i (alpha_i = 0) and phi_i(j) = a_i(j)/sqrt(p_i(j)).
// For solver states b_i is orthogonal to sqrt(p_i), so phi_i is exactly
// standardized; arbitrary states get the residual standardization.
inline std::vector<TransformTable> b_to_transforms(const McpProblem& prob, const MepState& state) {
    std::vector<TransformTable> out(prob.g->n());
    for (int i = 0; i < prob.g->n(); ++i) {
        Eigen::VectorXd a = prob.a_mat[i] * state.b[i];
        out[i] = a.cwiseQuotient(prob.sqrt_p[i]);
        Eigen::VectorXd p = prob.sqrt_p[i].array().square();
        detail::standardize(out[i], p);
    }
    return out;
}

} // namespace nmc

#endif
