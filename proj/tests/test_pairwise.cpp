#include <catch2/catch.hpp>

#include <Eigen/Dense>

#include "nmc/dataset.hpp"
#include "nmc/pairwise.hpp"
#include "nmc/rng.hpp"
#include "oracle_helpers.hpp"

using namespace nmc;

namespace {

double mean_under(const Eigen::VectorXd& p, const TransformTable& phi) { return p.dot(phi); }

double var_under(const Eigen::VectorXd& p, const TransformTable& phi) {
    return p.dot(phi.cwiseProduct(phi));
}

} // namespace

TEST_CASE("empirical joint of a perfectly dependent pair") {
    Dataset d = make_dataset({{0, 0, 1, 1}, {0, 0, 1, 1}});
    PairwiseJoint pj = empirical_joint(d, 0, 1);
    Eigen::MatrixXd expected(2, 2);
    expected << 0.5, 0.0, 0.0, 0.5;
    REQUIRE((pj.joint - expected).lpNorm<Eigen::Infinity>() < 1e-15);
    REQUIRE((pj.q - Eigen::MatrixXd::Identity(2, 2)).lpNorm<Eigen::Infinity>() < 1e-12);
    REQUIRE(bivariate_mc_svd(pj).value == Approx(1.0).margin(1e-9));
}

TEST_CASE("independent uniform binary pair") {
    Eigen::MatrixXd pmf(2, 2);
    pmf << 0.25, 0.25, 0.25, 0.25;
    PairwiseJoint pj = pairwise_from_pmf(pmf);
    REQUIRE((pj.q.array() - 0.5).abs().maxCoeff() < 1e-15);
    REQUIRE(oracle::power_sigma2(pj.q) == Approx(0.0).margin(1e-9));
    REQUIRE(bivariate_mc_svd(pj).value == Approx(0.0).margin(1e-9));
}

TEST_CASE("Q-matrix top singular structure on a random 3x4 pmf") {
    Rng rng(5);
    PairwiseJoint pj = pairwise_from_pmf(oracle::random_pmf(3, 4, rng));
    Eigen::VectorXd u, v;
    const double top = oracle::power_sigma_max(pj.q, &u, &v);
    REQUIRE(top == Approx(1.0).margin(1e-9));
    // top singular vectors are the square-root marginals (up to sign)
    if (u[0] < 0) { u = -u; v = -v; }
    REQUIRE((u - pj.marginal_a.array().sqrt().matrix()).norm() < 1e-7);
    REQUIRE((v - pj.marginal_b.array().sqrt().matrix()).norm() < 1e-7);
}

TEST_CASE("pmf validation and pruning") {
    Eigen::MatrixXd bad(2, 2);
    bad << 0.5, 0.5, 0.5, 0.5;
    REQUIRE_THROWS_AS(pairwise_from_pmf(bad), invalid_input);

    Eigen::MatrixXd zero_row(3, 2);
    zero_row << 0.5, 0.2, 0.0, 0.0, 0.1, 0.2;
    PairwiseJoint pj = pairwise_from_pmf(zero_row);
    REQUIRE(pj.joint.rows() == 2);
    REQUIRE(pj.keep_a == std::vector<int>{0, 2});
    REQUIRE(pj.marginal_a.minCoeff() > 0);
}

TEST_CASE("pairwise invariants on random pmfs") {
    Rng rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        const int ra = rng.uniform_int(2, 6), rb = rng.uniform_int(2, 6);
        PairwiseJoint pj = pairwise_from_pmf(oracle::random_pmf(ra, rb, rng));
        REQUIRE(std::abs(pj.joint.sum() - 1.0) < 1e-12);
        REQUIRE((pj.joint.rowwise().sum() - pj.marginal_a).lpNorm<Eigen::Infinity>() < 1e-12);
        REQUIRE((pj.joint.colwise().sum().transpose() - pj.marginal_b).lpNorm<Eigen::Infinity>() < 1e-12);
        REQUIRE(oracle::power_sigma_max(pj.q) == Approx(1.0).margin(1e-9));

        BivariateMc mc = bivariate_mc_svd(pj);
        REQUIRE(mc.value >= 0.0);
        REQUIRE(mc.value <= 1.0);
        REQUIRE(mc.value == Approx(oracle::power_sigma2(pj.q)).margin(1e-8));
        REQUIRE(std::abs(mean_under(pj.marginal_a, mc.phi_a)) < 1e-9);
        REQUIRE(std::abs(mean_under(pj.marginal_b, mc.phi_b)) < 1e-9);
        REQUIRE(var_under(pj.marginal_a, mc.phi_a) == Approx(1.0).margin(1e-9));
        REQUIRE(var_under(pj.marginal_b, mc.phi_b) == Approx(1.0).margin(1e-9));
        // transforms achieve the MC value with nonnegative sign
        REQUIRE(expected_product(pj, mc.phi_a, mc.phi_b) == Approx(mc.value).margin(1e-9));
    }
}

TEST_CASE("independence gives MC zero on constructed product joints") {
    Rng rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        const int ra = rng.uniform_int(2, 5), rb = rng.uniform_int(2, 5);
        Eigen::VectorXd pa(ra), pb(rb);
        for (int i = 0; i < ra; ++i) pa[i] = 0.2 + rng.uniform01();
        for (int j = 0; j < rb; ++j) pb[j] = 0.2 + rng.uniform01();
        pa /= pa.sum();
        pb /= pb.sum();
        PairwiseJoint pj = pairwise_from_pmf(pa * pb.transpose());
        REQUIRE(bivariate_mc_svd(pj).value == Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("binary symmetric pair with flip probability 0.1") {
    Eigen::MatrixXd pmf(2, 2);
    pmf << 0.45, 0.05, 0.05, 0.45;
    PairwiseJoint pj = pairwise_from_pmf(pmf);
    // Q = [[0.9, 0.1], [0.1, 0.9]], singular values {1, 0.8}
    BivariateMc mc = bivariate_mc_svd(pj);
    REQUIRE(mc.value == Approx(0.8).margin(1e-12));
    REQUIRE(mc.value == Approx(oracle::power_sigma2(pj.q)).margin(1e-10));
}

TEST_CASE("degenerate one-letter alphabet gives MC zero with a zero transform") {
    Eigen::MatrixXd pmf(1, 3);
    pmf << 0.2, 0.3, 0.5;
    PairwiseJoint pj = pairwise_from_pmf(pmf);
    BivariateMc mc = bivariate_mc_svd(pj);
    REQUIRE(mc.value == 0.0);
    REQUIRE(mc.phi_a.isZero());
    REQUIRE(mc.phi_b.isZero());
}

TEST_CASE("empirical_joint rejects bad variable pairs") {
    Dataset d = make_dataset({{0, 1}, {1, 0}});
    REQUIRE_THROWS_AS(empirical_joint(d, 0, 0), invalid_input);
    REQUIRE_THROWS_AS(empirical_joint(d, 0, 5), invalid_input);
}

TEST_CASE("marginal floor over explicit joints") {
    Eigen::MatrixXd pmf(2, 2);
    pmf << 0.45, 0.45, 0.05, 0.05;
    REQUIRE(marginal_floor(std::vector<PairwiseJoint>{pairwise_from_pmf(pmf)}) == Approx(0.1));
}
