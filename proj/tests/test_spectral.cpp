#include "doctest.h"

#include "heatgraph/errors.hpp"
#include "heatgraph/graphs.hpp"
#include "heatgraph/rng.hpp"
#include "heatgraph/spectral.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace heatgraph;

namespace {

Eigen::MatrixXd random_symmetric(Index n, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd a(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.normal();
    return a;
}

Eigen::MatrixXd random_matrix(Index n, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd a(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) a(i, j) = rng.normal();
    return a;
}

} // namespace

TEST_CASE("eig_sym") {
    const EigenDecomposition id = eig_sym(Eigen::MatrixXd::Identity(4, 4));
    CHECK(id.values().isApprox(Eigen::VectorXd::Ones(4)));

    const EigenDecomposition d = eig_sym(Eigen::Vector3d(3, 1, 2).asDiagonal().toDenseMatrix());
    CHECK(d.values().isApprox(Eigen::Vector3d(1, 2, 3)));

    const Eigen::MatrixXd a = random_symmetric(6, 1);
    const EigenDecomposition e = eig_sym(a);
    const Eigen::MatrixXd &v = e.vectors();
    CHECK((v.transpose() * v - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-9);
    CHECK((v * e.values().asDiagonal() * v.transpose() - a).norm() / a.norm() < 1e-10);
    for (Index i = 1; i < 6; ++i) CHECK(e.values()(i - 1) <= e.values()(i));

    Eigen::MatrixXd bad = a;
    bad(0, 1) += 1e-6;
    CHECK_THROWS_AS(eig_sym(bad), InvalidArgument);
}

TEST_CASE("heat_kernel") {
    const Laplacian l = random_valid_laplacian(8, 4);
    const EigenDecomposition e = eig_sym(l.matrix());
    CHECK((heat_kernel(e, 0.0) - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((heat_kernel(e, 1e3) - Eigen::MatrixXd::Constant(8, 8, 1.0 / 8.0)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((heat_kernel(e, 2.5) - oracle::expm_taylor(-2.5 * l.matrix())).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((heat_kernel(e, 2.5) * Eigen::VectorXd::Ones(8) - Eigen::VectorXd::Ones(8)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((heat_kernel(e, 1.2) * heat_kernel(e, 0.7) - heat_kernel(e, 1.9)).cwiseAbs().maxCoeff() < 1e-9);
    const Eigen::VectorXd ev = eig_sym(heat_kernel(e, 0.8)).values();
    CHECK(ev.minCoeff() > 0.0);
    CHECK(ev.maxCoeff() <= 1.0 + 1e-12);
    CHECK_THROWS_AS(heat_kernel(e, -0.1), InvalidArgument);
}

TEST_CASE("divided_difference_matrix") {
    const Eigen::MatrixXd b0 = divided_difference_matrix(Eigen::Vector2d(0.0, 0.0));
    CHECK((b0 - Eigen::MatrixXd::Ones(2, 2)).cwiseAbs().maxCoeff() < 1e-15);

    const Eigen::MatrixXd b1 = divided_difference_matrix(Eigen::Vector2d(0.0, std::log(2.0)));
    CHECK(b1(0, 1) == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-14));
    CHECK(b1(1, 0) == b1(0, 1));
    CHECK(b1(1, 1) == doctest::Approx(2.0).epsilon(1e-15));

    Rng rng(5);
    Eigen::VectorXd lambda(6);
    for (Index i = 0; i < 6; ++i) lambda(i) = 4.0 * rng.uniform() - 2.0;
    const Eigen::MatrixXd b = divided_difference_matrix(lambda);
    for (Index i = 0; i < 6; ++i) {
        CHECK(b(i, i) == doctest::Approx(std::exp(lambda(i))).epsilon(1e-15));
        for (Index j = 0; j < 6; ++j) {
            CHECK(b(i, j) == b(j, i));
            if (i != j)
                CHECK(b(i, j) ==
                      doctest::Approx((std::exp(lambda(i)) - std::exp(lambda(j))) / (lambda(i) - lambda(j))).epsilon(1e-12));
        }
    }
    Eigen::VectorXd close = lambda;
    close(3) = close(2) + 1e-13;
    const Eigen::MatrixXd bc = divided_difference_matrix(close);
    Eigen::VectorXd closer = close;
    closer(3) += 1e-13;
    CHECK((divided_difference_matrix(closer) - bc).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(bc(2, 3) == doctest::Approx(std::exp(close(2))).epsilon(1e-12));
}

TEST_CASE("grad_trace_exp") {
    const Laplacian l = random_valid_laplacian(6, 8);
    const EigenDecomposition e = eig_sym(l.matrix());

    const Eigen::MatrixXd gi = grad_trace_exp(Eigen::MatrixXd::Identity(6, 6), e, -1.5);
    CHECK((gi + 1.5 * heat_kernel(e, 1.5)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(grad_trace_exp(random_matrix(6, 1), e, 0.0).isZero(0.0));

    const Eigen::MatrixXd a = random_matrix(6, 2);
    const double nu = -2.5;
    const Eigen::MatrixXd g = grad_trace_exp(a, e, nu);
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    auto f = [&](const Eigen::MatrixXd &m) { return (a * oracle::expm_taylor(nu * m)).trace(); };
    for (std::uint64_t k = 0; k < 10; ++k) {
        const Eigen::MatrixXd dir = oracle::random_symmetric_direction(6, 100 + k);
        const double fd = oracle::central_difference(f, l.matrix(), dir, 1e-5);
        const double an = (g.cwiseProduct(dir)).sum();
        CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("grad_trace_exp first-order expansion has a second-order residual") {
    const Laplacian l = random_valid_laplacian(7, 12);
    const EigenDecomposition e = eig_sym(l.matrix());
    const Eigen::MatrixXd a = random_matrix(7, 3);
    const double nu = -1.7;
    const Eigen::MatrixXd g = grad_trace_exp(a, e, nu);
    const Eigen::MatrixXd dir = oracle::random_symmetric_direction(7, 4);
    const double base = (a * oracle::expm_taylor(nu * l.matrix())).trace();
    std::vector<double> ratios;
    for (double t : {1e-2, 1e-3, 1e-4}) {
        const Eigen::MatrixXd delta = t * dir;
        const double actual = (a * oracle::expm_taylor(nu * (l.matrix() + delta))).trace() - base;
        const double residual = std::abs(actual - g.cwiseProduct(delta).sum());
        ratios.push_back(residual / (t * t));
    }
    for (double r : ratios) CHECK(r < 10.0 * ratios.front() + 1e-3);
    CHECK(ratios.back() < 2.0 * ratios.front());
}
