#ifndef NMC_ACE_HPP
#define NMC_ACE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nmc/dataset.hpp"
#include "nmc/errors.hpp"
#include "nmc/graph.hpp"
#include "nmc/pairwise.hpp"

namespace nmc {

// One NMC instance: a graph plus either per-edge joint pmfs or a dataset.
// With a dataset, conditional expectations are accumulated from raw sample
// co-occurrence instead of materialized joint matrices; the two routes are
// mathematically identical for discrete data.
class ProblemData {
public:
    ProblemData(Graph g, std::vector<PairwiseJoint> joints, std::vector<std::string> names = {})
        : g_(std::move(g)), joints_(std::move(joints)), names_(std::move(names)) {
        if (static_cast<int>(joints_.size()) != g_.edge_count())
            throw invalid_input("problem: one joint per edge required");
        alphabet_.assign(g_.n(), 0);
        marginal_.resize(g_.n());
        for (int e = 0; e < g_.edge_count(); ++e) {
            const Edge& edge = g_.edges()[e];
            adopt_marginal(edge.a, joints_[e].marginal_a);
            adopt_marginal(edge.b, joints_[e].marginal_b);
        }
        for (int i = 0; i < g_.n(); ++i)
            if (alphabet_[i] == 0) { // isolated vertex, carries no objective terms
                alphabet_[i] = 1;
                marginal_[i] = Eigen::VectorXd::Ones(1);
            }
        // dense category indices stand in for numeric levels
        numeric_level_.resize(g_.n());
        for (int i = 0; i < g_.n(); ++i) {
            numeric_level_[i].resize(alphabet_[i]);
            for (int c = 0; c < alphabet_[i]; ++c) numeric_level_[i][c] = c;
        }
    }

    ProblemData(Graph g, Dataset data) : g_(std::move(g)), data_(std::move(data)) {
        if (data_->n != g_.n())
            throw invalid_input("problem: dataset has " + std::to_string(data_->n) +
                                " variables, graph has " + std::to_string(g_.n()));
        alphabet_ = data_->alphabet;
        counts_ = category_counts(*data_);
        marginal_.resize(g_.n());
        for (int i = 0; i < g_.n(); ++i) {
            marginal_[i].resize(alphabet_[i]);
            for (int c = 0; c < alphabet_[i]; ++c)
                marginal_[i][c] = static_cast<double>(counts_[i][c]) / data_->m;
        }
        numeric_level_ = data_->numeric_level;
        names_ = data_->names;
    }

    const Graph& graph() const { return g_; }
    int n() const { return g_.n(); }
    int alphabet(int i) const { return alphabet_[i]; }
    const Eigen::VectorXd& marginal(int i) const { return marginal_[i]; }
    bool degenerate(int i) const { return alphabet_[i] < 2; }
    bool sample_backed() const { return data_.has_value(); }
    const Dataset* dataset() const { return data_ ? &*data_ : nullptr; }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<std::vector<double>>& numeric_levels() const { return numeric_level_; }

    std::string var_name(int i) const {
        if (i < static_cast<int>(names_.size()) && !names_[i].empty()) return names_[i];
        return "variable " + std::to_string(i + 1);
    }

    // Category labels for reporting; dense indices when none were recorded.
    std::vector<std::string> var_labels(int i) const {
        if (data_) return data_->labels[i];
        std::vector<std::string> out;
        for (int c = 0; c < alphabet_[i]; ++c) out.push_back(std::to_string(c));
        return out;
    }

    // Joint pmf of the e-th edge (materialized on demand in the sample path).
    PairwiseJoint edge_pair(int e) const {
        const Edge& edge = g_.edges()[e];
        if (data_) return empirical_joint(*data_, edge.a, edge.b);
        return joints_[e];
    }

    // acc(j) += weight * E[phi_other(X_other) | X_i = j] for every symbol j.
    void add_cond_expect(int i, int other, const TransformTable& phi_other, double weight,
                         Eigen::VectorXd& acc) const {
        if (data_) {
            const auto& xi = data_->values[i];
            const auto& xo = data_->values[other];
            Eigen::VectorXd sums = Eigen::VectorXd::Zero(alphabet_[i]);
            for (int s = 0; s < data_->m; ++s) sums[xi[s]] += phi_other[xo[s]];
            for (int j = 0; j < alphabet_[i]; ++j)
                if (counts_[i][j] > 0) acc[j] += weight * sums[j] / counts_[i][j];
            return;
        }
        const int e = g_.edge_index(i, other);
        const Edge& edge = g_.edges()[e];
        Eigen::VectorXd prod = (edge.a == i) ? Eigen::VectorXd(joints_[e].joint * phi_other)
                                             : Eigen::VectorXd(joints_[e].joint.transpose() * phi_other);
        for (int j = 0; j < alphabet_[i]; ++j) acc[j] += weight * prod[j] / marginal_[i][j];
    }

    // E[phi_i(X_i) phi_other(X_other)].
    double expect_product(int i, int other, const TransformTable& phi_i,
                          const TransformTable& phi_other) const {
        if (data_) {
            const auto& xi = data_->values[i];
            const auto& xo = data_->values[other];
            double acc = 0.0;
            for (int s = 0; s < data_->m; ++s) acc += phi_i[xi[s]] * phi_other[xo[s]];
            return acc / data_->m;
        }
        const int e = g_.edge_index(i, other);
        const Edge& edge = g_.edges()[e];
        if (edge.a == i) return phi_i.dot(joints_[e].joint * phi_other);
        return phi_other.dot(joints_[e].joint * phi_i);
    }

    double edge_correlation(int e, const std::vector<TransformTable>& phi) const {
        const Edge& edge = g_.edges()[e];
        return expect_product(edge.a, edge.b, phi[edge.a], phi[edge.b]);
    }

    // E[X_i] under the marginal, on the variable's numeric scale.
    double numeric_mean(int i) const {
        double m = 0.0;
        for (int c = 0; c < alphabet_[i]; ++c) m += marginal_[i][c] * numeric_level_[i][c];
        return m;
    }

    // Restriction to a vertex subset (vertices renumbered in the given order).
    ProblemData restrict(const std::vector<int>& vars) const {
        std::vector<int> pos(g_.n(), -1);
        for (int k = 0; k < static_cast<int>(vars.size()); ++k) pos[vars[k]] = k;
        std::vector<Edge> sub_edges;
        std::vector<int> sub_edge_ids;
        for (int e = 0; e < g_.edge_count(); ++e) {
            const Edge& edge = g_.edges()[e];
            if (pos[edge.a] >= 0 && pos[edge.b] >= 0) {
                sub_edges.emplace_back(pos[edge.a], pos[edge.b]);
                sub_edge_ids.push_back(e);
            }
        }
        Graph sub(static_cast<int>(vars.size()), sub_edges);
        if (data_) return ProblemData(std::move(sub), subset_variables(*data_, vars));
        // reorder joints to the subgraph's canonical edge order
        std::vector<PairwiseJoint> sub_joints(sub.edge_count());
        std::vector<std::string> sub_names;
        for (int v : vars) sub_names.push_back(v < static_cast<int>(names_.size()) ? names_[v] : "");
        for (std::size_t k = 0; k < sub_edge_ids.size(); ++k) {
            const Edge& orig = g_.edges()[sub_edge_ids[k]];
            Edge mapped(pos[orig.a], pos[orig.b]);
            const int idx = sub.edge_index(mapped.a, mapped.b);
            // canonical order may swap endpoints relative to the original edge
            const bool flipped = pos[orig.a] > pos[orig.b];
            sub_joints[idx] = flipped ? transpose(joints_[sub_edge_ids[k]]) : joints_[sub_edge_ids[k]];
        }
        return ProblemData(std::move(sub), std::move(sub_joints), std::move(sub_names));
    }

private:
    void adopt_marginal(int v, const Eigen::VectorXd& marg) {
        if (alphabet_[v] == 0) {
            alphabet_[v] = static_cast<int>(marg.size());
            marginal_[v] = marg;
        } else if (alphabet_[v] != marg.size() ||
                   (marginal_[v] - marg).lpNorm<Eigen::Infinity>() > 1e-6) {
            throw invalid_input("problem: inconsistent marginals for " + var_name(v));
        }
    }

    Graph g_;
    std::optional<Dataset> data_;
    std::vector<PairwiseJoint> joints_;
    std::vector<int> alphabet_;
    std::vector<Eigen::VectorXd> marginal_;
    std::vector<std::vector<int>> counts_;
    std::vector<std::vector<double>> numeric_level_;
    std::vector<std::string> names_;
};

// One alternating-conditional-expectation run.
struct AceRun {
    std::vector<TransformTable> phi;
    std::vector<double> trace;   // solver objective after each sweep
    int degenerate_updates = 0;
    int sweeps = 0;
};

struct AceMode {
    const std::vector<double>* edge_sign = nullptr; // +-1 per edge (absolute variant)
    double lambda = 0.0;                            // regularization weight
};

namespace detail {

// Solver objective: the sum each sweep provably does not decrease.
// Plain/absolute: sum_e s_e E[phi phi']. Regularized: the update's potential,
// scaled so lambda = 0 coincides with the plain objective:
// (1-lambda) sum_e E[phi phi'] + 2 lambda sum_i E[phi_i (X_i - E X_i)].
inline double ace_objective(const ProblemData& pd, const std::vector<TransformTable>& phi,
                            const AceMode& mode) {
    double corr_sum = 0.0;
    for (int e = 0; e < pd.graph().edge_count(); ++e) {
        double c = pd.edge_correlation(e, phi);
        corr_sum += mode.edge_sign ? (*mode.edge_sign)[e] * c : c;
    }
    if (mode.lambda == 0.0) return corr_sum;
    double reg = 0.0;
    for (int i = 0; i < pd.n(); ++i) {
        const double mean = pd.numeric_mean(i);
        for (int c = 0; c < pd.alphabet(i); ++c)
            reg += pd.marginal(i)[c] * phi[i][c] * (pd.numeric_levels()[i][c] - mean);
    }
    return (1.0 - mode.lambda) * corr_sum + 2.0 * mode.lambda * reg;
}

} // namespace detail

// Gauss-Seidel sweeps of Algorithm-style conditional-expectation updates:
// phi_i <- standardized E[sum of neighbor transforms | X_i], updated neighbors
// contributing their new values within the sweep. The regularized variant uses
// phi_i <- standardized E[(1-lambda)/2 sum_N phi + lambda (X_i - E X_i) | X_i].
inline AceRun ace_iterate(const ProblemData& pd, std::vector<TransformTable> init, int max_iter,
                          double tol, const AceMode& mode = {}) {
    const int n = pd.n();
    if (static_cast<int>(init.size()) != n) throw invalid_input("ace: init size mismatch");
    for (int i = 0; i < n; ++i)
        if (init[i].size() != pd.alphabet(i)) throw invalid_input("ace: init alphabet mismatch");
    if (mode.lambda < 0.0 || mode.lambda > 1.0) throw config_error("ace: lambda must be in [0,1]");

    AceRun run;
    run.phi = std::move(init);
    run.trace.push_back(detail::ace_objective(pd, run.phi, mode));
    const double neighbor_weight = mode.lambda > 0.0 ? (1.0 - mode.lambda) / 2.0 : 1.0;
    for (int sweep = 0; sweep < max_iter; ++sweep) {
        for (int i = 0; i < n; ++i) {
            if (pd.degenerate(i)) continue;
            Eigen::VectorXd tilde = Eigen::VectorXd::Zero(pd.alphabet(i));
            for (auto [nb, e] : pd.graph().neighbors(i)) {
                const double w = (mode.edge_sign ? (*mode.edge_sign)[e] : 1.0) * neighbor_weight;
                pd.add_cond_expect(i, nb, run.phi[nb], w, tilde);
            }
            if (mode.lambda > 0.0) {
                const double mean = pd.numeric_mean(i);
                for (int c = 0; c < pd.alphabet(i); ++c)
                    tilde[c] += mode.lambda * (pd.numeric_levels()[i][c] - mean);
            }
            const Eigen::VectorXd& p = pd.marginal(i);
            const double mean = p.dot(tilde);
            tilde.array() -= mean;
            const double var = p.dot(tilde.cwiseProduct(tilde));
            if (var < 1e-20) {
                ++run.degenerate_updates;
                continue;
            }
            run.phi[i] = tilde / std::sqrt(var);
        }
        run.trace.push_back(detail::ace_objective(pd, run.phi, mode));
        ++run.sweeps;
        if (run.trace[run.trace.size() - 1] - run.trace[run.trace.size() - 2] < tol) break;
    }
    return run;
}

} // namespace nmc

#endif
