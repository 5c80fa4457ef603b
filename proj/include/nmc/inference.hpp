#ifndef NMC_INFERENCE_HPP
#define NMC_INFERENCE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nmc/dataset.hpp"
#include "nmc/errors.hpp"
#include "nmc/gaussian.hpp"
#include "nmc/graph.hpp"
#include "nmc/pairwise.hpp"
#include "nmc/rng.hpp"
#include "nmc/solver.hpp"

namespace nmc {

// n x m i.i.d. samples of N(0, lambda_x) via the symmetric eigenfactorization
// (handles merely positive semidefinite inputs).
inline Eigen::MatrixXd simulate_latent_gaussian(const CorrelationMatrix& lambda_x, int m,
                                                std::uint64_t seed) {
    const int n = lambda_x.n();
    if (m < 1) throw invalid_input("simulate_latent_gaussian: m must be >= 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lambda_x.matrix());
    if (eig.eigenvalues().minCoeff() < -1e-9)
        throw invalid_input("simulate_latent_gaussian: matrix not positive semidefinite");
    Eigen::MatrixXd root =
        eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    Eigen::MatrixXd z(n, m);
    Rng rng(seed, 0x6a55ULL);
    for (int s = 0; s < m; ++s)
        for (int i = 0; i < n; ++i) z(i, s) = rng.normal();
    return root * z;
}

enum class LinkSuite { identity, example1, example2 };

inline LinkSuite link_suite_from_name(const std::string& name) {
    if (name == "identity") return LinkSuite::identity;
    if (name == "example1") return LinkSuite::example1;
    if (name == "example2") return LinkSuite::example2;
    throw config_error("unknown link suite '" + name + "' (identity|example1|example2)");
}

namespace detail {

inline void standardize_rows(Eigen::MatrixXd& mat) {
    for (int i = 0; i < mat.rows(); ++i) {
        const double mean = mat.row(i).mean();
        mat.row(i).array() -= mean;
        const double sd = std::sqrt(mat.row(i).squaredNorm() / mat.cols());
        if (sd > 0) mat.row(i) /= sd;
    }
}

} // namespace detail

// Observation model Y_i = f_i(X_i). The suites are fixed four-variable
// batteries: example1 is monotone and bijective (piecewise-linear, exp(20x),
// negation, cube); example2 makes the first two links non-monotone (signed
// exponential and a sample-scaled tent map). Raw link values are returned:
// consumers that need moments standardize internally, and the rank-based
// discretization is standardization-invariant anyway. Mapping exp(20x)
// through (y - mean)/sd first would collapse the entire negative branch to
// one double value and destroy its ranks.
inline Eigen::MatrixXd apply_links(const Eigen::MatrixXd& latent, LinkSuite suite) {
    Eigen::MatrixXd y = latent;
    const int m = static_cast<int>(latent.cols());
    if (suite != LinkSuite::identity && latent.rows() != 4)
        throw invalid_input("apply_links: link suites are defined for 4 variables");
    if (suite == LinkSuite::example1) {
        for (int s = 0; s < m; ++s) {
            const double x1 = latent(0, s);
            y(0, s) = x1 >= 0 ? 10.0 * x1 : 0.1 * x1;
            y(1, s) = std::exp(20.0 * latent(1, s));
            y(2, s) = -latent(2, s);
            y(3, s) = std::pow(latent(3, s), 3);
        }
    } else if (suite == LinkSuite::example2) {
        const double x2_max = latent.row(1).maxCoeff();
        const double x2_min = latent.row(1).minCoeff();
        for (int s = 0; s < m; ++s) {
            const double x1 = latent(0, s);
            y(0, s) = x1 >= 0 ? std::exp(20.0 * x1) : -std::exp(-20.0 * x1);
            const double x2 = latent(1, s);
            y(1, s) = x2 >= 0 ? x2 / x2_max - 1.0 : -x2 / x2_min + 1.0;
            y(2, s) = -latent(2, s);
            y(3, s) = std::pow(latent(3, s), 3);
        }
    }
    return y;
}

struct PrecisionEstimate {
    Eigen::MatrixXd lambda_hat; // transformed-variable covariance
    Eigen::MatrixXd j_hat;      // its inverse (pseudo-inverse when singular)
    std::vector<std::pair<int, int>> edges; // thresholded support, 0-based i < j
    bool singular = false;
    double rcond = 0.0;
};

namespace detail {

// Invert with a singularity guard: pseudo-inverse below rcond 1e-10.
inline void invert_covariance(PrecisionEstimate& est) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(est.lambda_hat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    est.rcond = sv[sv.size() - 1] / sv[0];
    est.singular = !(est.rcond > 1e-10);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > 1e-10 * sv[0]) inv[i] = 1.0 / sv[i];
    est.j_hat = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

} // namespace detail

// Support recovery from a precision matrix with a relative threshold:
// (i,j) is an edge iff |J(i,j)| > tau * max off-diagonal |J|.
inline std::vector<std::pair<int, int>> edge_set_from_precision(const Eigen::MatrixXd& j_hat,
                                                                double tau = 0.1) {
    const int n = static_cast<int>(j_hat.rows());
    double max_off = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) max_off = std::max(max_off, std::abs(j_hat(i, j)));
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(j_hat(i, j)) > tau * max_off) edges.emplace_back(i, j);
    return edges;
}

// NMC inference pipeline: discretize the observations, solve NMC over the
// complete graph, push every sample through its variable's transform, and
// invert the covariance of the transformed samples.
inline PrecisionEstimate infer_precision_nmc(const Eigen::MatrixXd& observed, int bins,
                                             const SolverConfig& cfg, double tau = 0.1) {
    const int n = static_cast<int>(observed.rows());
    const int m = static_cast<int>(observed.cols());
    std::vector<std::vector<double>> cols(n, std::vector<double>(m));
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < m; ++s) cols[i][s] = observed(i, s);
    Dataset d = discretize(cols, bins, BinScheme::quantile);
    ProblemData pd(Graph::complete(n), std::move(d));
    NmcSolution sol = solve_nmc_ace(pd, cfg);

    Eigen::MatrixXd transformed(n, m);
    const Dataset& dd = *pd.dataset();
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < m; ++s) transformed(i, s) = sol.transforms[i][dd.values[i][s]];
    PrecisionEstimate est;
    est.lambda_hat = transformed * transformed.transpose() / m;
    detail::invert_covariance(est);
    est.edges = edge_set_from_precision(est.j_hat, tau);
    return est;
}

// Multiple-MC pipeline: per-pair bivariate MC transforms from the SVD on each
// discretized pair. Bivariate MC is sign-blind, so entries are the unsigned
// correlations; the matrix is symmetrized by averaging and has unit diagonal.
inline PrecisionEstimate infer_precision_multimc(const Eigen::MatrixXd& observed, int bins,
                                                 double tau = 0.1) {
    const int n = static_cast<int>(observed.rows());
    const int m = static_cast<int>(observed.cols());
    std::vector<std::vector<double>> cols(n, std::vector<double>(m));
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < m; ++s) cols[i][s] = observed(i, s);
    Dataset d = discretize(cols, bins, BinScheme::quantile);
    PrecisionEstimate est;
    est.lambda_hat = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            BivariateMc mc = bivariate_mc_svd(empirical_joint(d, i, j));
            est.lambda_hat(i, j) = mc.value; // sigma_2 is orientation-free, so
            est.lambda_hat(j, i) = mc.value; // mirroring equals averaging

        }
    detail::invert_covariance(est);
    est.edges = edge_set_from_precision(est.j_hat, tau);
    return est;
}

// Baseline: covariance of the (already standardized) rows, inverted. Used for
// both the raw-observation baseline J_Y and the latent baseline J_X.
inline PrecisionEstimate precision_from_samples(const Eigen::MatrixXd& samples, double tau = 0.1) {
    Eigen::MatrixXd z = samples;
    detail::standardize_rows(z);
    PrecisionEstimate est;
    est.lambda_hat = z * z.transpose() / z.cols();
    detail::invert_covariance(est);
    est.edges = edge_set_from_precision(est.j_hat, tau);
    return est;
}

// Structure-error measure: sum of |J| over the known-null pairs divided by the
// total sum of |J|. Null pairs are counted once (unordered) by default;
// `ordered` counts (i,j) and (j,i) both, `include_diagonal` controls the
// denominator.
inline double inference_error(const Eigen::MatrixXd& j_hat,
                              const std::vector<std::pair<int, int>>& null_pairs,
                              bool ordered = false, bool include_diagonal = true) {
    const int n = static_cast<int>(j_hat.rows());
    if (j_hat.cols() != n) throw invalid_input("inference_error: matrix must be square");
    double denom = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (include_diagonal || i != j) denom += std::abs(j_hat(i, j));
    if (denom == 0.0) throw invalid_input("inference_error: all-zero matrix, metric undefined");
    double numer = 0.0;
    for (auto [i, j] : null_pairs) {
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw invalid_input("inference_error: null pair out of range");
        numer += std::abs(j_hat(i, j));
        if (ordered) numer += std::abs(j_hat(j, i));
    }
    return numer / denom;
}

// The 4x4 latent covariance used by the inference examples; its precision
// matrix has (approximate) zeros at (1,3) and (2,4) in 1-based indexing.
inline CorrelationMatrix example_lambda_x() {
    Eigen::MatrixXd m(4, 4);
    m << 1.0, 0.4, 0.2, 0.3,
         0.4, 1.0, 0.3, 0.2,
         0.2, 0.3, 1.0, 0.4,
         0.3, 0.2, 0.4, 1.0;
    return CorrelationMatrix(m);
}

inline std::vector<std::pair<int, int>> example_null_pairs() { return {{0, 2}, {1, 3}}; }

} // namespace nmc

#endif
