#ifndef NMC_PAIRWISE_HPP
#define NMC_PAIRWISE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nmc/dataset.hpp"
#include "nmc/errors.hpp"

namespace nmc {

// phi values per alphabet symbol for one variable.
using TransformTable = Eigen::VectorXd;

// Joint pmf of one variable pair together with its marginals and Q-matrix
// Q(j,j') = P(j,j') / sqrt(p_a(j) p_b(j')). Symbols with zero marginal are
// pruned; keep_a/keep_b map pruned codes back to the input ones.
struct PairwiseJoint {
    Eigen::MatrixXd joint;
    Eigen::VectorXd marginal_a;
    Eigen::VectorXd marginal_b;
    Eigen::MatrixXd q;
    std::vector<int> keep_a;
    std::vector<int> keep_b;
};

// Validates, prunes and derives marginals and the Q-matrix from a pmf matrix.
inline PairwiseJoint pairwise_from_pmf(const Eigen::MatrixXd& pmf) {
    if (pmf.rows() < 1 || pmf.cols() < 1) throw invalid_input("pairwise: empty pmf");
    if ((pmf.array() < -1e-12).any()) throw invalid_input("pairwise: negative pmf entry");
    const double total = pmf.sum();
    if (std::abs(total - 1.0) > 1e-9)
        throw invalid_input("pairwise: pmf sums to " + std::to_string(total) + ", expected 1");

    Eigen::VectorXd row_sum = pmf.rowwise().sum();
    Eigen::VectorXd col_sum = pmf.colwise().sum();
    PairwiseJoint pj;
    for (int j = 0; j < pmf.rows(); ++j)
        if (row_sum[j] > 0.0) pj.keep_a.push_back(j);
    for (int j = 0; j < pmf.cols(); ++j)
        if (col_sum[j] > 0.0) pj.keep_b.push_back(j);
    if (pj.keep_a.empty() || pj.keep_b.empty()) throw invalid_input("pairwise: all-zero pmf");

    const int ra = static_cast<int>(pj.keep_a.size());
    const int rb = static_cast<int>(pj.keep_b.size());
    pj.joint.resize(ra, rb);
    for (int j = 0; j < ra; ++j)
        for (int k = 0; k < rb; ++k) pj.joint(j, k) = std::max(0.0, pmf(pj.keep_a[j], pj.keep_b[k]));
    pj.joint /= pj.joint.sum();
    pj.marginal_a = pj.joint.rowwise().sum();
    pj.marginal_b = pj.joint.colwise().sum();
    pj.q = pj.joint.array() /
           (pj.marginal_a.array().sqrt().matrix() * pj.marginal_b.array().sqrt().matrix().transpose()).array();
    return pj;
}

// Empirical joint pmf of variables i and j: joint(a,b) = #{s : x_i=a, x_j=b}/m.
// Dataset pruning already guarantees positive marginals, so no symbol drops here.
inline PairwiseJoint empirical_joint(const Dataset& d, int i, int j) {
    if (i == j) throw invalid_input("empirical_joint: i and j must differ");
    if (i < 0 || j < 0 || i >= d.n || j >= d.n) throw invalid_input("empirical_joint: variable out of range");
    if (d.m < 1) throw invalid_input("empirical_joint: empty dataset");
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(d.alphabet[i], d.alphabet[j]);
    for (int s = 0; s < d.m; ++s) counts(d.values[i][s], d.values[j][s]) += 1.0;
    return pairwise_from_pmf(counts / static_cast<double>(d.m));
}

inline PairwiseJoint transpose(const PairwiseJoint& pj) {
    PairwiseJoint t;
    t.joint = pj.joint.transpose();
    t.q = pj.q.transpose();
    t.marginal_a = pj.marginal_b;
    t.marginal_b = pj.marginal_a;
    t.keep_a = pj.keep_b;
    t.keep_b = pj.keep_a;
    return t;
}

// Minimum marginal probability across a set of edge joints.
inline double marginal_floor(const std::vector<PairwiseJoint>& joints) {
    double delta = 1.0;
    for (const auto& pj : joints) {
        delta = std::min(delta, pj.marginal_a.minCoeff());
        delta = std::min(delta, pj.marginal_b.minCoeff());
    }
    return delta;
}

struct BivariateMc {
    double value = 0.0;       // sigma_2 of Q, in [0, 1]
    TransformTable phi_a;     // standardized, E[phi_a phi_b] = value >= 0
    TransformTable phi_b;
};

namespace detail {

// Standardize to mean 0 / variance 1 under marginal p; zero vector stays zero.
inline void standardize(Eigen::VectorXd& phi, const Eigen::VectorXd& p) {
    const double mean = p.dot(phi);
    phi.array() -= mean;
    const double var = p.dot(phi.cwiseProduct(phi));
    if (var > 1e-20) phi /= std::sqrt(var);
    else phi.setZero();
}

// Deterministic global sign: make the largest-magnitude entry of u positive
// (ties resolved by lowest index), flipping v along with it.
inline void canonical_sign(Eigen::VectorXd& u, Eigen::VectorXd& v) {
    int jmax = 0;
    for (int j = 1; j < u.size(); ++j)
        if (std::abs(u[j]) > std::abs(u[jmax]) + 1e-15) jmax = j;
    if (u[jmax] < 0.0) {
        u = -u;
        v = -v;
    }
}

} // namespace detail

// Bivariate maximal correlation: sigma_2 of the Q-matrix, with the optimal
// transforms read off the singular vectors. Works on the deflated matrix
// Q - sqrt(p_a) sqrt(p_b)^T so the top (structural) singular pair never mixes
// into the result even when the MC is 1.
inline BivariateMc bivariate_mc_svd(const PairwiseJoint& pj) {
    BivariateMc out;
    const int ra = static_cast<int>(pj.marginal_a.size());
    const int rb = static_cast<int>(pj.marginal_b.size());
    out.phi_a = Eigen::VectorXd::Zero(ra);
    out.phi_b = Eigen::VectorXd::Zero(rb);
    if (ra < 2 || rb < 2) return out; // degenerate alphabet: MC = 0, zero transform

    Eigen::VectorXd sa = pj.marginal_a.array().sqrt();
    Eigen::VectorXd sb = pj.marginal_b.array().sqrt();
    Eigen::MatrixXd deflated = pj.q - sa * sb.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(deflated, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.value = std::clamp(svd.singularValues()[0], 0.0, 1.0);
    Eigen::VectorXd u = svd.matrixU().col(0);
    Eigen::VectorXd v = svd.matrixV().col(0);
    detail::canonical_sign(u, v);
    out.phi_a = u.cwiseQuotient(sa);
    out.phi_b = v.cwiseQuotient(sb);
    detail::standardize(out.phi_a, pj.marginal_a);
    detail::standardize(out.phi_b, pj.marginal_b);
    return out;
}

// E[phi_a(X_a) phi_b(X_b)] under the pair's joint.
inline double expected_product(const PairwiseJoint& pj, const TransformTable& phi_a,
                               const TransformTable& phi_b) {
    return phi_a.dot(pj.joint * phi_b);
}

} // namespace nmc

#endif
