#include "doctest.h"

#include "heatgraph/dictionary.hpp"
#include "heatgraph/errors.hpp"
#include "heatgraph/graphs.hpp"
#include "heatgraph/rng.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

using namespace heatgraph;

namespace {

Eigen::MatrixXd random_matrix(Index r, Index c, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd a(r, c);
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < c; ++j) a(i, j) = rng.normal();
    return a;
}

HeatDictionary rbf_dictionary(std::uint64_t seed, TauVector taus = {2.5, 4.0}) {
    const Laplacian l = normalize_trace(laplacian_from_weights(generate_rbf_graph(20, 0.5, 0.75, seed).weights));
    return HeatDictionary(eig_sym(l.matrix()), std::move(taus));
}

} // namespace

TEST_CASE("tau vector validation") {
    CHECK_THROWS_AS(TauVector(std::vector<double>{}), InvalidArgument);
    CHECK_THROWS_AS(TauVector({1.0, -0.5}), InvalidArgument);
    const TauVector t{0.5, 3.0};
    CHECK(t.size() == 2);
    CHECK(t.max() == 3.0);
}

TEST_CASE("build_dictionary") {
    const Laplacian l = random_valid_laplacian(6, 1);
    const HeatDictionary id = build_dictionary(eig_sym(l.matrix()), TauVector{0.0});
    CHECK((id.atoms() - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);

    const HeatDictionary d = rbf_dictionary(2);
    CHECK(d.atoms().rows() == 20);
    CHECK(d.atoms().cols() == 40);
    for (Index s = 0; s < 2; ++s) {
        const Eigen::MatrixXd k = d.kernel(s);
        CHECK((k - k.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues().minCoeff() > -1e-12);
        CHECK((k.rowwise().sum() - Eigen::VectorXd::Ones(20)).cwiseAbs().maxCoeff() < 1e-8);
    }
    CHECK(d.atoms().colwise().norm().maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("apply") {
    const HeatDictionary d = rbf_dictionary(3);
    CHECK(apply(d, SparseCodes::zeros(20, 2, 4)).isZero(0.0));

    const Laplacian l = random_valid_laplacian(5, 2);
    const HeatDictionary id(eig_sym(l.matrix()), TauVector{0.0});
    const Eigen::MatrixXd h = random_matrix(5, 3, 4);
    CHECK((apply(id, SparseCodes(h, 1)) - h).cwiseAbs().maxCoeff() < 1e-12);

    const Eigen::MatrixXd h1 = random_matrix(40, 6, 5), h2 = random_matrix(40, 6, 6);
    CHECK((apply(d, SparseCodes(h1, 2)) - d.atoms() * h1).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::MatrixXd lin = apply(d, SparseCodes(2.0 * h1 - 3.0 * h2, 2));
    CHECK((lin - 2.0 * apply(d, SparseCodes(h1, 2)) + 3.0 * apply(d, SparseCodes(h2, 2))).cwiseAbs().maxCoeff() < 1e-10);

    CHECK_THROWS_AS(apply(d, SparseCodes(random_matrix(30, 2, 1), 2)), InvalidArgument);
}

TEST_CASE("gram fast path equals the explicit product") {
    const Laplacian l = random_valid_laplacian(5, 3);
    CHECK((gram(HeatDictionary(eig_sym(l.matrix()), TauVector{0.0})) - Eigen::MatrixXd::Identity(5, 5)).norm() < 1e-12);
    for (Index s = 1; s <= 3; ++s) {
        std::vector<double> taus;
        for (Index k = 0; k < s; ++k) taus.push_back(0.7 + 1.3 * static_cast<double>(k));
        const HeatDictionary d(eig_sym(l.matrix()), TauVector(taus));
        const Eigen::MatrixXd g = gram(d);
        CHECK((g - d.atoms().transpose() * d.atoms()).norm() < 1e-9);
        CHECK((g - g.transpose()).norm() < 1e-12);
        CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().minCoeff() > -1e-10);
        CHECK(gram_spectral_norm(d) ==
              doctest::Approx(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().maxCoeff()).epsilon(1e-10));
        if (s >= 2) CHECK((g.block(0, 5, 5, 5) - heat_kernel(d.eig(), taus[0] + taus[1])).norm() < 1e-9);
    }
}

TEST_CASE("generate_synthetic_signals") {
    const HeatDictionary d = rbf_dictionary(4);
    const SyntheticSignals one = generate_synthetic_signals(d, 1, 3, 0.0, 1);
    CHECK(one.x == apply(d, one.h));

    const SyntheticSignals s = generate_synthetic_signals(d, 100, 3, 0.0, 2);
    CHECK(s.x.cols() == 100);
    CHECK(s.h.matrix().rows() == 40);
    for (Index j = 0; j < 100; ++j) CHECK((s.h.matrix().col(j).array() != 0.0).count() == 3);

    const SyntheticSignals again = generate_synthetic_signals(d, 100, 3, 0.1, 2);
    const SyntheticSignals same = generate_synthetic_signals(d, 100, 3, 0.1, 2);
    CHECK(again.x == same.x);
    CHECK(again.h.matrix() == s.h.matrix());

    CHECK_THROWS_AS(generate_synthetic_signals(d, 10, 41, 0.0, 1), InvalidArgument);
}

// The noise level that gives about 13 dB on these signals. The quoted noise
// variance of 0.02 does not; see the SNR check below.
TEST_CASE("noise with std 0.02 gives an SNR of about 13 dB") {
    double snr_sum = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const HeatDictionary d = rbf_dictionary(seed);
        const SyntheticSignals clean = generate_synthetic_signals(d, 100, 3, 0.0, seed + 50);
        const SyntheticSignals noisy = generate_synthetic_signals(d, 100, 3, 0.02, seed + 50);
        snr_sum += 10.0 * std::log10(clean.x.squaredNorm() / (noisy.x - clean.x).squaredNorm());
    }
    CHECK(std::abs(snr_sum / 10.0 - 13.0) < 2.0);
}

TEST_CASE("noise with variance 0.02 gives an SNR far below 13 dB") {
    double snr_sum = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const HeatDictionary d = rbf_dictionary(seed);
        const SyntheticSignals clean = generate_synthetic_signals(d, 100, 3, 0.0, seed + 50);
        const SyntheticSignals noisy = generate_synthetic_signals(d, 100, 3, std::sqrt(0.02), seed + 50);
        snr_sum += 10.0 * std::log10(clean.x.squaredNorm() / (noisy.x - clean.x).squaredNorm());
    }
    MESSAGE("mean SNR at variance 0.02: " << snr_sum / 10.0 << " dB");
    CHECK(snr_sum / 10.0 < 0.0);
}
