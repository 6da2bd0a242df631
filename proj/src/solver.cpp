#include "heatgraph/solver.hpp"

#include "heatgraph/errors.hpp"

#include <cmath>
#include <string>

namespace heatgraph {

namespace {

void require_shapes(const SignalMatrix &x, const HeatDictionary &dict, const SparseCodes &h) {
    if (x.rows() != dict.vertices() || h.vertices() != dict.vertices() || h.scales() != dict.scales() ||
        h.signals() != x.cols())
        throw InvalidArgument("solver: signal, dictionary and code shapes disagree");
}

Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd &z, double threshold) {
    return z.unaryExpr([threshold](double v) {
        const double mag = std::abs(v) - threshold;
        return mag > 0.0 ? std::copysign(mag, v) : 0.0;
    });
}

// Spectral coordinates of X and of each code block: V^T X and V^T H_s.
struct EigenbasisData {
    Eigen::MatrixXd x;
    std::vector<Eigen::MatrixXd> h;
};

EigenbasisData to_eigenbasis(const SignalMatrix &x, const SolverState &state) {
    const Eigen::MatrixXd &v = state.eig().vectors();
    EigenbasisData out;
    out.x = v.transpose() * x;
    for (Eigen::Index s = 0; s < state.h.scales(); ++s) out.h.push_back(v.transpose() * state.h.block(s));
    return out;
}

} // namespace

void SolverConfig::validate() const {
    if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ConfigError("solver: alpha and beta must be non-negative");
    if (!(gamma1 > 1.0) || !(gamma2 > 1.0) || !(gamma3 > 1.0)) throw ConfigError("solver: gamma factors must exceed 1");
    if (!(eta > 1.0)) throw ConfigError("solver: eta must exceed 1");
    if (max_outer_iter < 1) throw ConfigError("solver: max_outer_iter must be positive");
    if (!(obj_tol >= 0.0) || !(laplacian_threshold >= 0.0)) throw ConfigError("solver: tolerances must be non-negative");
    if (max_backtracks < 1) throw ConfigError("solver: max_backtracks must be positive");
}

SolverState make_state(Laplacian l, SparseCodes h, const TauVector &taus) {
    HeatDictionary dict(eig_sym(l.matrix()), taus);
    return SolverState{std::move(l), std::move(h), std::move(dict), 1.0, {}, 0};
}

double data_fit(const SignalMatrix &x, const HeatDictionary &dict, const SparseCodes &h) {
    require_shapes(x, dict, h);
    return (x - dict.atoms() * h.matrix()).squaredNorm();
}

double objective(const SignalMatrix &x, const SolverState &state, const SolverConfig &cfg) {
    return data_fit(x, state.dict, state.h) + cfg.alpha * state.h.matrix().cwiseAbs().sum() +
           cfg.beta * state.l.matrix().squaredNorm();
}

Eigen::MatrixXd grad_h(const SignalMatrix &x, const HeatDictionary &dict, const SparseCodes &h) {
    require_shapes(x, dict, h);
    return -2.0 * dict.atoms().transpose() * (x - dict.atoms() * h.matrix());
}

double h_lipschitz(const HeatDictionary &dict) { return 2.0 * gram(dict).norm(); }

SparseCodes step_h(const SolverState &state, const SignalMatrix &x, const SolverConfig &cfg) {
    const double c = cfg.gamma1 * h_lipschitz(state.dict);
    const Eigen::MatrixXd z = state.h.matrix() - grad_h(x, state.dict, state.h) / c;
    return SparseCodes(soft_threshold(z, cfg.alpha / c), state.h.scales());
}

Eigen::MatrixXd grad_l(const SignalMatrix &x, const SolverState &state) {
    require_shapes(x, state.dict, state.h);
    const Eigen::Index n = state.dict.vertices();
    const Eigen::Index scales = state.dict.scales();
    const Eigen::VectorXd &lambda = state.eig().values();
    const EigenbasisData spec = to_eigenbasis(x, state);

    // Each trace term contributes nu * (sym(V^T A^T V) o B(nu Lambda)) in the eigenbasis.
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    auto add_term = [&](const Eigen::MatrixXd &c, double nu, double weight) {
        if (nu == 0.0) return;
        const Eigen::MatrixXd csym = 0.5 * (c + c.transpose());
        acc += (weight * nu) * csym.cwiseProduct(divided_difference_matrix(nu * lambda));
    };
    for (Eigen::Index s = 0; s < scales; ++s) {
        const double tau_s = state.taus()[s];
        // -2 grad tr(H_s X^T e^{-tau_s L}); (H_s X^T)^T in the eigenbasis is (V^T X)(V^T H_s)^T.
        add_term(spec.x * spec.h[s].transpose(), -tau_s, -2.0);
        for (Eigen::Index t = 0; t < scales; ++t) {
            // grad tr(H_t H_s^T e^{-(tau_s+tau_t) L}); transpose is H_s H_t^T.
            add_term(spec.h[s] * spec.h[t].transpose(), -(tau_s + state.taus()[t]), 1.0);
        }
    }
    const Eigen::MatrixXd &v = state.eig().vectors();
    Eigen::MatrixXd g = v * acc * v.transpose();
    return 0.5 * (g + g.transpose());
}

double initial_c2_guess(const HeatDictionary &dict) {
    const double tmax = dict.taus().max();
    return std::max(1.0, h_lipschitz(dict) * tmax * tmax);
}

LStepResult step_l(const SolverState &state, const SignalMatrix &x, const SolverConfig &cfg) {
    const Eigen::MatrixXd g = grad_l(x, state);
    const double z0 = data_fit(x, state.dict, state.h);
    // Absorbs round-off in Z when the step is vanishingly small.
    const double slack = 1e-12 * std::max(1.0, std::abs(z0));
    const Eigen::MatrixXd &l0 = state.l.matrix();

    double c2 = state.c2;
    for (int k = 1;; ++k) {
        QpResult qp = solve_laplacian_qp(g, l0, cfg.gamma2 * c2, cfg.beta, cfg.qp);
        HeatDictionary dict(eig_sym(qp.l.matrix()), state.taus());
        const Eigen::MatrixXd delta = qp.l.matrix() - l0;
        DescentCheck check;
        check.lhs = data_fit(x, dict, state.h);
        check.rhs = z0 + g.cwiseProduct(delta).sum() + 0.5 * c2 * delta.squaredNorm();
        if (check.lhs <= check.rhs + slack) return LStepResult{std::move(qp.l), std::move(dict), c2, k - 1, check};
        if (k >= cfg.max_backtracks)
            throw NumericalFailure("step_l: backtracking did not satisfy the descent condition after " +
                                       std::to_string(cfg.max_backtracks) + " trials",
                                   check.lhs - check.rhs);
        c2 *= std::pow(cfg.eta, k);
    }
}

Eigen::VectorXd grad_tau(const SignalMatrix &x, const SolverState &state) {
    require_shapes(x, state.dict, state.h);
    const Eigen::Index scales = state.dict.scales();
    const Eigen::VectorXd &lambda = state.eig().values();
    const EigenbasisData spec = to_eigenbasis(x, state);

    // tr(A L e^{-t L}) = sum_i lambda_i e^{-t lambda_i} (V^T A V)_ii.
    auto weighted_trace = [&](const Eigen::MatrixXd &p, const Eigen::MatrixXd &q, double t) {
        const Eigen::VectorXd diag = p.cwiseProduct(q).rowwise().sum();
        double acc = 0.0;
        for (Eigen::Index i = 0; i < lambda.size(); ++i) acc += lambda(i) * std::exp(-t * lambda(i)) * diag(i);
        return acc;
    };
    Eigen::VectorXd grad(scales);
    for (Eigen::Index s = 0; s < scales; ++s) {
        const double tau_s = state.taus()[s];
        double value = 2.0 * weighted_trace(spec.h[s], spec.x, tau_s);
        for (Eigen::Index t = 0; t < scales; ++t)
            value -= 2.0 * weighted_trace(spec.h[t], spec.h[s], tau_s + state.taus()[t]);
        grad(s) = value;
    }
    return grad;
}

double tau_lipschitz_bound(const SignalMatrix &x, const SolverState &state) {
    require_shapes(x, state.dict, state.h);
    const Eigen::Index scales = state.dict.scales();
    const double l_norm = state.eig().values().cwiseAbs().maxCoeff();
    const double x_norm = x.norm();
    std::vector<double> h_norm(static_cast<std::size_t>(scales));
    double h_sum = 0.0;
    for (Eigen::Index s = 0; s < scales; ++s) {
        h_norm[static_cast<std::size_t>(s)] = state.h.block(s).norm();
        h_sum += h_norm[static_cast<std::size_t>(s)];
    }
    double best = 0.0;
    for (double hs : h_norm) best = std::max(best, 2.0 * hs * x_norm + 4.0 * hs * h_sum);
    return l_norm * l_norm * best;
}

TauVector step_tau(const SolverState &state, const SignalMatrix &x, const SolverConfig &cfg) {
    if (!cfg.learn_tau) return state.taus();
    const double e = cfg.gamma3 * tau_lipschitz_bound(x, state);
    if (!(e > 0.0)) return state.taus();
    const Eigen::VectorXd g = grad_tau(x, state);
    std::vector<double> next(static_cast<std::size_t>(g.size()));
    for (Eigen::Index s = 0; s < g.size(); ++s)
        next[static_cast<std::size_t>(s)] = std::max(state.taus()[s] - g(s) / e, 0.0);
    return TauVector(std::move(next));
}

LearnResult learn(const SignalMatrix &x, const SolverConfig &cfg, std::optional<Laplacian> l_init,
                  const IterationObserver &observer) {
    cfg.validate();
    if (x.rows() < 2) throw InvalidArgument("learn: at least two vertices are required");
    if (x.cols() < 1) throw InvalidArgument("learn: at least one signal is required");
    if (!x.allFinite()) throw InvalidArgument("learn: signal matrix has non-finite entries");
    const Eigen::Index n = x.rows();
    if (l_init && l_init->size() != n) throw InvalidArgument("learn: initial Laplacian has the wrong size");

    Laplacian l0 = l_init ? std::move(*l_init) : random_valid_laplacian(n, cfg.rng_seed);
    SolverState state = make_state(std::move(l0), SparseCodes::zeros(n, cfg.scales(), x.cols()), cfg.tau_init);
    state.c2 = initial_c2_guess(state.dict);
    state.objective_history.push_back(objective(x, state, cfg));

    LearnResult result{state.l, state.l, state.h, state.taus(), {}, {}, 0, false};
    while (state.iteration < cfg.max_outer_iter) {
        state.h = step_h(state, x, cfg);

        if (state.iteration > 0) state.c2 /= cfg.eta;
        LStepResult ls = step_l(state, x, cfg);
        state.l = std::move(ls.l);
        state.dict = std::move(ls.dict);
        state.c2 = ls.c2;
        result.descent_checks.push_back(ls.check);

        if (cfg.learn_tau) {
            TauVector taus = step_tau(state, x, cfg);
            if (!(taus == state.taus())) state.dict = HeatDictionary(state.dict.eig(), std::move(taus));
        }

        ++state.iteration;
        const double obj = objective(x, state, cfg);
        const double previous = state.objective_history.back();
        state.objective_history.push_back(obj);
        if (observer) observer(state);
        if (std::abs(obj - previous) < cfg.obj_tol) {
            result.converged = true;
            break;
        }
    }

    result.l = threshold_laplacian(state.l, cfg.laplacian_threshold);
    result.l_raw = state.l;
    result.h = state.h;
    result.taus = state.taus();
    result.objective_history = std::move(state.objective_history);
    result.iterations = state.iteration;
    return result;
}

} // namespace heatgraph
