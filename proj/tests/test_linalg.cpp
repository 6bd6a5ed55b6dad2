#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "oracles.hpp"
#include "panelgap/linalg.hpp"

using namespace panelgap;

namespace {

Eigen::MatrixXd random_matrix(int m, int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd a(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
    return a;
}

Eigen::MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(n, n, rng));
    return qr.householderQ();
}

}  // namespace

TEST_CASE("svd: identity and diagonal closed forms") {
    auto r = svd(Eigen::MatrixXd::Identity(3, 3));
    for (int k = 0; k < 3; ++k) CHECK(r.s[k] == doctest::Approx(1.0).epsilon(1e-12));

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    auto r2 = svd(d);
    CHECK(r2.s[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r2.s[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("svd: contract on random 6x4 matrices, Jacobi oracle agreement") {
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::MatrixXd a = random_matrix(6, 4, rng);
        auto r = svd(a);
        CHECK((r.u.transpose() * r.u - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-10);
        CHECK((r.v.transpose() * r.v - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-10);
        Eigen::MatrixXd rec = r.u * r.s.asDiagonal() * r.v.transpose();
        CHECK((rec - a).norm() / a.norm() < 1e-8);
        for (int k = 1; k < r.s.size(); ++k) CHECK(r.s[k] <= r.s[k - 1]);

        auto oracle = oracles::jacobi_svd(a);
        CHECK((r.s - oracle.s).lpNorm<Eigen::Infinity>() < 1e-8);
    }
}

TEST_CASE("svd: rejects non-finite input") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    a(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(svd(a), std::invalid_argument);
}

TEST_CASE("svt: closed forms") {
    CHECK(svt(Eigen::MatrixXd::Zero(3, 2), 7.0).norm() == 0.0);

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    Eigen::MatrixXd r = svt(d, 1.0);
    CHECK(r(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(r(1, 1)) < 1e-12);
    CHECK(std::abs(r(0, 1)) < 1e-12);

    CHECK_THROWS_AS(svt(d, -0.5), std::invalid_argument);
}

TEST_CASE("svt: perturbation-oracle minimality of the prox objective") {
    std::mt19937_64 rng(5);
    Eigen::MatrixXd m = random_matrix(5, 5, rng);
    const double threshold = 0.5;
    Eigen::MatrixXd x = svt(m, threshold);
    auto prox_obj = [&](const Eigen::MatrixXd& z) {
        return 0.5 * (z - m).squaredNorm() + threshold * nuclear_norm(z);
    };
    const double at_x = prox_obj(x);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> scale(0.0, 0.1);
    for (int rep = 0; rep < 10000; ++rep) {
        Eigen::MatrixXd delta = random_matrix(5, 5, rng);
        delta *= scale(rng) / delta.norm();
        CHECK(prox_obj(x + delta) >= at_x - 1e-12);
    }
}

TEST_CASE("svt: shrinkage and kill-all properties") {
    std::mt19937_64 rng(77);
    Eigen::MatrixXd m = random_matrix(6, 5, rng);
    CHECK((svt(m, 0.0) - m).norm() < 1e-8);

    auto rank_of = [](const Eigen::MatrixXd& a) {
        auto s = svd(a).s;
        return (s.array() > 1e-9).count();
    };
    double smax = svd(m).s[0];
    long prev_rank = rank_of(m);
    for (double lam : {0.1, 0.5, 1.0, 2.0, smax * 1.01}) {
        long r = rank_of(svt(m, lam));
        CHECK(r <= prev_rank);
        prev_rank = r;
    }
    CHECK(svt(m, smax * 1.01).norm() == 0.0);
}

TEST_CASE("nuclear_norm: closed forms and eigen-oracle") {
    CHECK(nuclear_norm(Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(3.0));

    std::mt19937_64 rng(3);
    Eigen::VectorXd a = random_matrix(4, 1, rng);
    Eigen::VectorXd b = random_matrix(6, 1, rng);
    Eigen::MatrixXd outer = a * b.transpose();
    CHECK(nuclear_norm(outer) == doctest::Approx(a.norm() * b.norm()).epsilon(1e-10));

    // trace of sqrt(M'M) via eigen-decomposition
    Eigen::MatrixXd m = random_matrix(4, 4, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.transpose() * m);
    double trace_sqrt = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    CHECK(nuclear_norm(m) == doctest::Approx(trace_sqrt).epsilon(1e-8));
}

TEST_CASE("nuclear_norm: unitary invariance") {
    std::mt19937_64 rng(9);
    Eigen::MatrixXd m = random_matrix(5, 4, rng);
    for (int rep = 0; rep < 5; ++rep) {
        Eigen::MatrixXd q = random_orthogonal(5, rng);
        Eigen::MatrixXd r = random_orthogonal(4, rng);
        CHECK(nuclear_norm(q * m * r) == doctest::Approx(nuclear_norm(m)).epsilon(1e-8));
    }
}
