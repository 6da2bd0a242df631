#pragma once

#include "heatgraph/graphs.hpp"

#include <Eigen/Dense>

namespace heatgraph {

/// Upper-triangular off-diagonal weights w_ij = -L_ij (i < j), row-major order.
///
/// The set {w >= 0, sum(w) = n/2} is in bijection with the trace-n Laplacians.
class WeightVector {
public:
    WeightVector(Index n, Eigen::VectorXd w);

    Index vertices() const { return n_; }
    const Eigen::VectorXd &values() const { return w_; }

private:
    Index n_;
    Eigen::VectorXd w_;
};

inline Index pair_count(Index n) { return n * (n - 1) / 2; }

WeightVector laplacian_to_weights(const Laplacian &l);
Laplacian weights_to_laplacian(const WeightVector &w);

/// Euclidean projection onto {w >= 0, sum(w) = total} (sort-and-threshold).
Eigen::VectorXd project_scaled_simplex(const Eigen::VectorXd &v, double total);

struct QpOptions {
    double tol = 1e-8;
    int max_iter = 5000;
};

struct QpResult {
    Laplacian l;
    int iterations = 0;
    double residual = 0.0;
};

/// Value of <L - P, G> + (d_t/2)||L - P||_F^2 + beta ||L||_F^2.
double laplacian_qp_objective(const Eigen::MatrixXd &grad_l, const Eigen::MatrixXd &l_prev, double d_t, double beta,
                              const Eigen::MatrixXd &l);

/// Minimizes laplacian_qp_objective over valid Laplacians with trace n.
///
/// Solved in weight space, where the feasible set is the scaled simplex and the
/// objective is a strongly convex quadratic with Hessian (d_t + 2 beta) Q,
/// Q = 2I + B^T B for the unsigned incidence matrix B of the complete graph.
/// lambda_max(Q) = 2n gives the step size exactly. Accelerated projected
/// gradient, restarted whenever a step fails to decrease the objective, started from the projection of
/// `l_prev`, so the returned objective never exceeds the starting one.
///
/// Throws NumericalFailure when the fixed-point residual is still above
/// tol * max(1, ||w||) after max_iter iterations.
QpResult solve_laplacian_qp(const Eigen::MatrixXd &grad_l, const Eigen::MatrixXd &l_prev, double d_t, double beta,
                            const QpOptions &options = {});

} // namespace heatgraph
