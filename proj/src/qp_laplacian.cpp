#include "heatgraph/qp_laplacian.hpp"

#include "heatgraph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace heatgraph {

namespace {

// Edge-space view of the symmetric linear map w -> L(w).
struct PairIndex {
    explicit PairIndex(Index n) : n(n) {
        first.reserve(static_cast<std::size_t>(pair_count(n)));
        second.reserve(static_cast<std::size_t>(pair_count(n)));
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j) {
                first.push_back(i);
                second.push_back(j);
            }
    }
    Index n;
    std::vector<Index> first;
    std::vector<Index> second;
};

// <L(w), M> = sum_e w_e (M_ii + M_jj - 2 M_ij) for symmetric M.
Eigen::VectorXd pair_pullback(const PairIndex &pairs, const Eigen::MatrixXd &m) {
    Eigen::VectorXd out(static_cast<Index>(pairs.first.size()));
    for (std::size_t e = 0; e < pairs.first.size(); ++e) {
        const Index i = pairs.first[e], j = pairs.second[e];
        out(static_cast<Index>(e)) = m(i, i) + m(j, j) - m(i, j) - m(j, i);
    }
    return out;
}

// Q w with Q = 2I + B^T B; ||L(w)||_F^2 = w^T Q w.
void apply_q(const PairIndex &pairs, const Eigen::VectorXd &w, Eigen::VectorXd &degree, Eigen::VectorXd &out) {
    degree.setZero(pairs.n);
    for (std::size_t e = 0; e < pairs.first.size(); ++e) {
        const double we = w(static_cast<Index>(e));
        degree(pairs.first[e]) += we;
        degree(pairs.second[e]) += we;
    }
    out.resize(w.size());
    for (std::size_t e = 0; e < pairs.first.size(); ++e)
        out(static_cast<Index>(e)) = 2.0 * w(static_cast<Index>(e)) + degree(pairs.first[e]) + degree(pairs.second[e]);
}

} // namespace

WeightVector::WeightVector(Index n, Eigen::VectorXd w) : n_(n), w_(std::move(w)) {
    if (n_ < 1 || w_.size() != pair_count(n_)) throw InvalidArgument("WeightVector: expected n(n-1)/2 entries");
    if ((w_.array() < 0.0).any()) throw InvalidArgument("WeightVector: negative weight");
}

WeightVector laplacian_to_weights(const Laplacian &l) {
    const Index n = l.size();
    Eigen::VectorXd w(pair_count(n));
    Index e = 0;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) w(e++) = -l(i, j) == 0.0 ? 0.0 : -l(i, j);
    return WeightVector(n, std::move(w));
}

Laplacian weights_to_laplacian(const WeightVector &w) {
    const Index n = w.vertices();
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    Index e = 0;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const double we = w.values()(e++);
            l(i, j) = l(j, i) = we == 0.0 ? 0.0 : -we;
            l(i, i) += we;
            l(j, j) += we;
        }
    return Laplacian(std::move(l));
}

Eigen::VectorXd project_scaled_simplex(const Eigen::VectorXd &v, double total) {
    if (!(total > 0.0)) throw InvalidArgument("project_scaled_simplex: total must be positive");
    if (v.size() == 0) throw InvalidArgument("project_scaled_simplex: empty vector");
    std::vector<double> sorted(v.data(), v.data() + v.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        cumulative += sorted[k];
        const double candidate = (cumulative - total) / static_cast<double>(k + 1);
        if (sorted[k] - candidate > 0.0) theta = candidate;
    }
    return (v.array() - theta).max(0.0).matrix();
}

double laplacian_qp_objective(const Eigen::MatrixXd &grad_l, const Eigen::MatrixXd &l_prev, double d_t, double beta,
                              const Eigen::MatrixXd &l) {
    const Eigen::MatrixXd diff = l - l_prev;
    return diff.cwiseProduct(grad_l).sum() + 0.5 * d_t * diff.squaredNorm() + beta * l.squaredNorm();
}

QpResult solve_laplacian_qp(const Eigen::MatrixXd &grad_l, const Eigen::MatrixXd &l_prev, double d_t, double beta,
                            const QpOptions &options) {
    const Index n = l_prev.rows();
    if (n < 2 || l_prev.cols() != n || grad_l.rows() != n || grad_l.cols() != n)
        throw InvalidArgument("solve_laplacian_qp: dimension mismatch");
    if (!(d_t > 0.0)) throw InvalidArgument("solve_laplacian_qp: d_t must be positive");
    if (!(beta >= 0.0)) throw InvalidArgument("solve_laplacian_qp: beta must be non-negative");

    const PairIndex pairs(n);
    const double total = 0.5 * static_cast<double>(n);
    const double curvature = d_t + 2.0 * beta;
    const double lipschitz = 2.0 * static_cast<double>(n) * curvature;

    // f(w) = linear.w + (curvature/2) w^T Q w, up to a constant.
    const Eigen::VectorXd linear = pair_pullback(pairs, grad_l) - d_t * pair_pullback(pairs, l_prev);

    Eigen::VectorXd degree, qw;
    auto gradient = [&](const Eigen::VectorXd &w, Eigen::VectorXd &g) {
        apply_q(pairs, w, degree, qw);
        g = linear + curvature * qw;
    };
    // f(x + delta) - f(x), formed from the step so that tiny decreases stay resolvable.
    auto change = [&](const Eigen::VectorXd &grad_x, const Eigen::VectorXd &delta) {
        apply_q(pairs, delta, degree, qw);
        return grad_x.dot(delta) + 0.5 * curvature * delta.dot(qw);
    };

    Eigen::VectorXd start(pair_count(n));
    for (std::size_t e = 0; e < pairs.first.size(); ++e) {
        const Index i = pairs.first[e], j = pairs.second[e];
        start(static_cast<Index>(e)) = -0.5 * (l_prev(i, j) + l_prev(j, i));
    }
    Eigen::VectorXd x = project_scaled_simplex(start, total);
    Eigen::VectorXd x_prev = x, y(x.size()), gx(x.size()), gy(x.size()), x_next(x.size()), delta(x.size());
    double momentum = 1.0;
    double residual = 0.0;
    int iter = 0;
    bool converged = false;
    for (; iter < options.max_iter; ++iter) {
        gradient(x, gx);
        residual = (x - project_scaled_simplex(x - gx / lipschitz, total)).norm();
        if (residual <= options.tol * std::max(1.0, x.norm())) {
            converged = true;
            break;
        }

        const double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        y = x + ((momentum - 1.0) / momentum_next) * (x - x_prev);
        gradient(y, gy);
        x_next = project_scaled_simplex(y - gy / lipschitz, total);
        delta = x_next - x;
        if (change(gx, delta) > 0.0) {
            // Restart with a plain projected gradient step, which cannot increase f.
            x_next = project_scaled_simplex(x - gx / lipschitz, total);
            delta = x_next - x;
            momentum = 1.0;
            if (change(gx, delta) > 0.0) {
                // No representable descent left: x is optimal to working precision.
                converged = true;
                break;
            }
        } else {
            momentum = momentum_next;
        }
        x_prev = x;
        x = x_next;
    }
    if (!converged)
        throw NumericalFailure("solve_laplacian_qp: no convergence in " + std::to_string(options.max_iter) + " iterations",
                               residual);
    return QpResult{weights_to_laplacian(WeightVector(n, x)), iter, residual};
}

} // namespace heatgraph
