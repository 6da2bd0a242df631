#include "doctest.h"

#include "heatgraph/errors.hpp"
#include "heatgraph/graphs.hpp"
#include "heatgraph/rng.hpp"
#include "heatgraph/solver.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace heatgraph;

namespace {

Eigen::MatrixXd random_matrix(Index r, Index c, std::uint64_t seed, double scale = 1.0) {
    Rng rng(seed);
    Eigen::MatrixXd a(r, c);
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < c; ++j) a(i, j) = scale * rng.normal();
    return a;
}

struct Instance {
    Eigen::MatrixXd x;
    SolverState state;
};

Instance random_instance(Index n, std::vector<double> taus, Index m, std::uint64_t seed) {
    const Index s = static_cast<Index>(taus.size());
    const Laplacian l = random_valid_laplacian(n, seed);
    SparseCodes h(random_matrix(n * s, m, seed + 1), s);
    return {random_matrix(n, m, seed + 2), make_state(l, std::move(h), TauVector(std::move(taus)))};
}

} // namespace

TEST_CASE("solver config validation") {
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.gamma2 = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SolverConfig{};
    cfg.eta = 0.9;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SolverConfig{};
    cfg.alpha = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK(SolverConfig{}.eta == 1.1);
    CHECK(SolverConfig{}.max_outer_iter == 1000);
    CHECK(SolverConfig{}.obj_tol == 1e-4);
    CHECK(SolverConfig{}.laplacian_threshold == 1e-4);
}

TEST_CASE("objective") {
    Instance inst = random_instance(5, {1.0, 2.0}, 3, 1);
    SolverConfig cfg;
    cfg.alpha = 0.3;
    cfg.beta = 0.2;
    const Eigen::MatrixXd zero_x = Eigen::MatrixXd::Zero(5, 3);
    SolverState zero_h = make_state(inst.state.l, SparseCodes::zeros(5, 2, 3), inst.state.taus());
    CHECK(objective(zero_x, zero_h, cfg) == doctest::Approx(0.2 * inst.state.l.matrix().squaredNorm()).epsilon(1e-14));

    const double expected = oracle::data_fit_explicit(inst.x, inst.state.l.matrix(), {1.0, 2.0}, inst.state.h.matrix()) +
                            0.3 * inst.state.h.matrix().cwiseAbs().sum() + 0.2 * inst.state.l.matrix().squaredNorm();
    CHECK(std::abs(objective(inst.x, inst.state, cfg) - expected) < 1e-10 * std::max(1.0, expected));

    SolverConfig plain;
    plain.alpha = plain.beta = 0.0;
    const Eigen::MatrixXd exact = apply(inst.state.dict, inst.state.h);
    CHECK(objective(exact, inst.state, plain) < 1e-20);
}

TEST_CASE("grad_h") {
    Instance inst = random_instance(6, {0.5, 2.0}, 4, 2);
    const Eigen::MatrixXd exact = apply(inst.state.dict, inst.state.h);
    CHECK(grad_h(exact, inst.state.dict, inst.state.h).cwiseAbs().maxCoeff() < 1e-10);
    const SparseCodes zero = SparseCodes::zeros(6, 2, 4);
    CHECK((grad_h(inst.x, inst.state.dict, zero) + 2.0 * inst.state.dict.atoms().transpose() * inst.x)
              .cwiseAbs()
              .maxCoeff() < 1e-12);

    const Eigen::MatrixXd g = grad_h(inst.x, inst.state.dict, inst.state.h);
    auto f = [&](const Eigen::MatrixXd &h) { return data_fit(inst.x, inst.state.dict, SparseCodes(h, 2)); };
    for (std::uint64_t k = 0; k < 5; ++k) {
        const Eigen::MatrixXd dir = random_matrix(12, 4, 50 + k);
        const double fd = oracle::central_difference(f, inst.state.h.matrix(), dir, 1e-6);
        CHECK(std::abs(fd - g.cwiseProduct(dir).sum()) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("step_h on a one-column identity dictionary") {
    Eigen::MatrixXd l(2, 2);
    l << 1, -1, -1, 1;
    SolverState st = make_state(Laplacian(l), SparseCodes::zeros(2, 1, 1), TauVector{0.0});
    Eigen::MatrixXd x(2, 1);
    x << 1.0, 0.0;
    SolverConfig cfg;
    cfg.alpha = 0.1;
    // D = I: ||2 D^T D||_F = 2 sqrt(2), c = gamma1 * that, gradient -2x.
    const double c = 1.1 * 2.0 * std::sqrt(2.0);
    const SparseCodes h1 = step_h(st, x, cfg);
    CHECK(h1.matrix()(0, 0) == doctest::Approx(2.0 / c - 0.1 / c).epsilon(1e-14));
    CHECK(h1.matrix()(1, 0) == 0.0);

    cfg.alpha = 2.0;
    CHECK(step_h(st, x, cfg).matrix()(0, 0) == 0.0);
    cfg.alpha = 0.0;
    CHECK(step_h(st, x, cfg).matrix()(0, 0) == doctest::Approx(2.0 / c).epsilon(1e-14));
}

TEST_CASE("step_h decreases its surrogate") {
    Instance inst = random_instance(6, {1.0, 3.0}, 5, 3);
    SolverConfig cfg;
    cfg.alpha = 0.2;
    const double before = objective(inst.x, inst.state, cfg);
    SolverState next = inst.state;
    next.h = step_h(inst.state, inst.x, cfg);
    CHECK(objective(inst.x, next, cfg) <= before + 1e-12);
}

TEST_CASE("grad_l") {
    Instance inst = random_instance(6, {0.8, 2.0}, 4, 4);
    SolverState zero = make_state(inst.state.l, SparseCodes::zeros(6, 2, 4), inst.state.taus());
    CHECK(grad_l(inst.x, zero).isZero(0.0));
    SolverState tau0 = make_state(inst.state.l, SparseCodes(random_matrix(6, 4, 9), 1), TauVector{0.0});
    CHECK(grad_l(inst.x, tau0).cwiseAbs().maxCoeff() < 1e-14);

    const Eigen::MatrixXd g = grad_l(inst.x, inst.state);
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    auto f = [&](const Eigen::MatrixXd &l) {
        return oracle::data_fit_explicit(inst.x, l, {0.8, 2.0}, inst.state.h.matrix());
    };
    for (std::uint64_t k = 0; k < 20; ++k) {
        const Eigen::MatrixXd dir = oracle::random_symmetric_direction(6, 300 + k);
        const double fd = oracle::central_difference(f, inst.state.l.matrix(), dir, 1e-5);
        CHECK(std::abs(fd - g.cwiseProduct(dir).sum()) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("step_l") {
    Instance inst = random_instance(6, {1.0, 2.5}, 5, 5);
    SolverConfig cfg;
    inst.state.c2 = 0.01;
    const LStepResult r = step_l(inst.state, inst.x, cfg);
    CHECK(r.check.lhs <= r.check.rhs + 1e-12 * std::max(1.0, std::abs(r.check.rhs)));
    CHECK(r.backtracks > 0);
    // Trial k multiplies C2 by eta^k.
    CHECK(r.c2 == doctest::Approx(0.01 * std::pow(1.1, r.backtracks * (r.backtracks + 1) / 2)).epsilon(1e-12));
    CHECK((r.dict.atoms() - HeatDictionary(eig_sym(r.l.matrix()), inst.state.taus()).atoms()).cwiseAbs().maxCoeff() <
          1e-12);
    const double lhs = data_fit(inst.x, r.dict, inst.state.h);
    CHECK(lhs == doctest::Approx(r.check.lhs).epsilon(1e-12));

    SolverState no_data = make_state(inst.state.l, SparseCodes::zeros(6, 2, 5), inst.state.taus());
    no_data.c2 = 1.0;
    const LStepResult r0 = step_l(no_data, inst.x, cfg);
    CHECK(r0.backtracks == 0);

    cfg.max_backtracks = 1;
    inst.state.c2 = 1e-8;
    CHECK_THROWS_AS(step_l(inst.state, inst.x, cfg), NumericalFailure);
}

TEST_CASE("grad_tau") {
    Instance inst = random_instance(6, {0.7, 1.9, 3.0}, 4, 6);
    SolverState zero = make_state(inst.state.l, SparseCodes::zeros(6, 3, 4), inst.state.taus());
    CHECK(grad_tau(inst.x, zero).isZero(0.0));

    SolverState one = make_state(inst.state.l, SparseCodes(random_matrix(6, 4, 3), 1), TauVector{1.5});
    CHECK(grad_tau(apply(one.dict, one.h), one).cwiseAbs().maxCoeff() < 1e-12);

    const Eigen::VectorXd g = grad_tau(inst.x, inst.state);
    for (Index s = 0; s < 3; ++s) {
        auto f = [&](double t) {
            std::vector<double> taus = inst.state.taus().values();
            taus[static_cast<std::size_t>(s)] = t;
            return oracle::data_fit_explicit(inst.x, inst.state.l.matrix(), taus, inst.state.h.matrix());
        };
        const double t0 = inst.state.taus()[s];
        const double fd = (f(t0 + 1e-6) - f(t0 - 1e-6)) / 2e-6;
        CHECK(std::abs(fd - g(s)) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("explicit tau Hessian oracle agrees with differences of grad_tau") {
    Instance inst = random_instance(5, {0.6, 1.4}, 3, 7);
    const Eigen::MatrixXd hess =
        oracle::tau_hessian(inst.x, inst.state.l.matrix(), {0.6, 1.4}, inst.state.h.matrix());
    for (Index t = 0; t < 2; ++t) {
        std::vector<double> up = {0.6, 1.4}, down = up;
        up[static_cast<std::size_t>(t)] += 1e-5;
        down[static_cast<std::size_t>(t)] -= 1e-5;
        const Eigen::VectorXd gu = grad_tau(inst.x, make_state(inst.state.l, inst.state.h, TauVector(up)));
        const Eigen::VectorXd gd = grad_tau(inst.x, make_state(inst.state.l, inst.state.h, TauVector(down)));
        const Eigen::VectorXd col = (gu - gd) / 2e-5;
        for (Index s = 0; s < 2; ++s) CHECK(std::abs(col(s) - hess(s, t)) <= 1e-5 * std::max(1.0, std::abs(hess(s, t))));
    }
}

TEST_CASE("step_tau") {
    Instance inst = random_instance(6, {1.0, 2.0}, 4, 8);
    SolverConfig cfg;
    SolverState fit = make_state(inst.state.l, SparseCodes(random_matrix(6, 4, 3), 1), TauVector{1.5});
    CHECK(step_tau(fit, apply(fit.dict, fit.h), cfg).values()[0] == doctest::Approx(1.5).epsilon(1e-12));

    cfg.learn_tau = false;
    CHECK(step_tau(inst.state, inst.x, cfg) == inst.state.taus());

    // Signals far stronger than the model pull tau towards zero, where the clamp applies.
    cfg.learn_tau = true;
    cfg.gamma3 = 1.0000001;
    SolverState big = make_state(inst.state.l, SparseCodes(1e-3 * random_matrix(12, 4, 4), 2), TauVector{1e-3, 2e-3});
    const Eigen::MatrixXd x = 1e3 * apply(big.dict, big.h);
    const TauVector next = step_tau(big, x, cfg);
    for (double t : next.values()) CHECK(t >= 0.0);
}

TEST_CASE("C1 and C3 bounds") {
    Instance inst = random_instance(6, {0.9, 2.2}, 4, 9);
    const double c1 = h_lipschitz(inst.state.dict);
    for (std::uint64_t k = 0; k < 20; ++k) {
        const SparseCodes h1(random_matrix(12, 4, 500 + k), 2), h2(random_matrix(12, 4, 600 + k), 2);
        const double lhs =
            (grad_h(inst.x, inst.state.dict, h1) - grad_h(inst.x, inst.state.dict, h2)).norm();
        CHECK(lhs <= c1 * (h1.matrix() - h2.matrix()).norm() * (1.0 + 1e-12));
    }
    const Eigen::MatrixXd hess =
        oracle::tau_hessian(inst.x, inst.state.l.matrix(), {0.9, 2.2}, inst.state.h.matrix());
    CHECK(hess.cwiseAbs().rowwise().sum().maxCoeff() <= tau_lipschitz_bound(inst.x, inst.state));
}

TEST_CASE("learn") {
    const Laplacian truth = normalize_trace(laplacian_from_weights(generate_rbf_graph(12, 0.5, 0.75, 1).weights));
    const HeatDictionary d(eig_sym(truth.matrix()), TauVector{2.5, 4.0});
    const SyntheticSignals sig = generate_synthetic_signals(d, 40, 3, 0.0, 2);

    SolverConfig cfg;
    cfg.max_outer_iter = 50;
    cfg.obj_tol = 0.0;
    int calls = 0;
    const LearnResult r = learn(sig.x, cfg, std::nullopt, [&](const SolverState &) { ++calls; });
    CHECK(calls == 50);
    CHECK(r.iterations == 50);
    CHECK(r.objective_history.size() == 51);
    for (std::size_t t = 1; t < r.objective_history.size(); ++t)
        CHECK(r.objective_history[t] <= r.objective_history[t - 1] + 1e-9);
    for (const auto &c : r.descent_checks) CHECK(c.lhs <= c.rhs + 1e-12 * std::max(1.0, std::abs(c.rhs)));
    CHECK(r.descent_checks.size() == 50);
    CHECK((r.l.matrix() - threshold_laplacian(r.l_raw, cfg.laplacian_threshold).matrix()).cwiseAbs().maxCoeff() == 0.0);

    cfg.learn_tau = false;
    const LearnResult fixed = learn(sig.x, cfg);
    CHECK(fixed.taus == cfg.tau_init);

    const LearnResult a = learn(sig.x, SolverConfig{});
    const LearnResult b = learn(sig.x, SolverConfig{});
    CHECK(a.l.matrix() == b.l.matrix());
    CHECK(a.converged);

    CHECK_THROWS_AS(learn(Eigen::MatrixXd(12, 0), SolverConfig{}), InvalidArgument);
    CHECK_THROWS_AS(learn(sig.x, SolverConfig{}, random_valid_laplacian(5, 1)), InvalidArgument);
}
