#pragma once

#include "heatgraph/dictionary.hpp"
#include "heatgraph/graphs.hpp"
#include "heatgraph/qp_laplacian.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace heatgraph {

struct SolverConfig {
    double alpha = 1e-2;  ///< weight of the l1 penalty on H
    double beta = 1e-1;   ///< weight of ||L||_F^2
    TauVector tau_init{1.0, 3.0};
    double gamma1 = 1.1;  ///< safety factor on the H step constant
    double gamma2 = 1.1;  ///< safety factor on the L step constant
    double gamma3 = 1.1;  ///< safety factor on the tau step constant
    double eta = 1.1;     ///< backtracking growth factor
    int max_outer_iter = 1000;
    double obj_tol = 1e-4;
    double laplacian_threshold = 1e-4;
    bool learn_tau = true;
    std::uint64_t rng_seed = 0;
    int max_backtracks = 100;
    QpOptions qp{};

    Eigen::Index scales() const { return tau_init.size(); }

    /// Throws ConfigError when a field is out of range.
    void validate() const;
};

/// Iterates of the alternating scheme. `dict` always matches (l, taus).
struct SolverState {
    Laplacian l;
    SparseCodes h;
    HeatDictionary dict;
    double c2 = 1.0;
    std::vector<double> objective_history;
    int iteration = 0;

    const TauVector &taus() const { return dict.taus(); }
    const EigenDecomposition &eig() const { return dict.eig(); }
};

SolverState make_state(Laplacian l, SparseCodes h, const TauVector &taus);

/// ||X - D H||_F^2.
double data_fit(const SignalMatrix &x, const HeatDictionary &dict, const SparseCodes &h);

/// ||X - D H||_F^2 + alpha sum |H| + beta ||L||_F^2.
double objective(const SignalMatrix &x, const SolverState &state, const SolverConfig &cfg);

/// -2 D^T (X - D H).
Eigen::MatrixXd grad_h(const SignalMatrix &x, const HeatDictionary &dict, const SparseCodes &h);

/// ||2 D^T D||_F, a Lipschitz constant of grad_h in H.
double h_lipschitz(const HeatDictionary &dict);

/// Proximal gradient step on H with step 1/c, c = gamma1 * h_lipschitz.
SparseCodes step_h(const SolverState &state, const SignalMatrix &x, const SolverConfig &cfg);

/// Gradient of ||X - D H||_F^2 in L (symmetric), assembled in the eigenbasis of L.
Eigen::MatrixXd grad_l(const SignalMatrix &x, const SolverState &state);

/// Both sides of the descent-lemma test for an accepted L step.
struct DescentCheck {
    double lhs = 0.0;  ///< Z(L_new)
    double rhs = 0.0;  ///< Z(L) + <grad, L_new - L> + (C2/2)||L_new - L||^2
};

struct LStepResult {
    Laplacian l;
    HeatDictionary dict;
    double c2 = 0.0;
    int backtracks = 0;
    DescentCheck check;
};

/// Proximal L step with backtracking on the Lipschitz estimate, starting from state.c2.
/// Throws NumericalFailure after cfg.max_backtracks rejected trials.
LStepResult step_l(const SolverState &state, const SignalMatrix &x, const SolverConfig &cfg);

/// Gradient of ||X - D H||_F^2 in tau, evaluated from the spectrum.
Eigen::VectorXd grad_tau(const SignalMatrix &x, const SolverState &state);

/// max_s' ||L||_2^2 (2||H_s'|| ||X|| + 4 sum_s ||H_s'|| ||H_s||), an upper bound
/// on the largest absolute row sum of the tau Hessian.
double tau_lipschitz_bound(const SignalMatrix &x, const SolverState &state);

/// Closed-form projected gradient step on tau (unchanged when learn_tau is off).
TauVector step_tau(const SolverState &state, const SignalMatrix &x, const SolverConfig &cfg);

/// Starting Lipschitz guess for the L step: ||2 D^T D||_F * max tau^2, at least 1.
double initial_c2_guess(const HeatDictionary &dict);

struct LearnResult {
    Laplacian l;  ///< thresholded
    Laplacian l_raw;
    SparseCodes h;
    TauVector taus;
    std::vector<double> objective_history;  ///< entry 0 is the initial objective
    std::vector<DescentCheck> descent_checks;
    int iterations = 0;
    bool converged = false;
};

using IterationObserver = std::function<void(const SolverState &)>;

/// Alternating H, L, tau updates until |obj_t - obj_{t-1}| < obj_tol or
/// max_outer_iter. H starts at zero; L at `l_init` or a seeded random valid Laplacian.
LearnResult learn(const SignalMatrix &x, const SolverConfig &cfg, std::optional<Laplacian> l_init = std::nullopt,
                  const IterationObserver &observer = {});

} // namespace heatgraph
