#include "heatgraph/spectral.hpp"

#include "heatgraph/errors.hpp"

#include <cmath>

namespace heatgraph {

namespace {

double sinch(double x) { return x == 0.0 ? 1.0 : std::sinh(x) / x; }

} // namespace

EigenDecomposition::EigenDecomposition(Eigen::MatrixXd vectors, Eigen::VectorXd values)
    : vectors_(std::move(vectors)), values_(std::move(values)) {
    if (vectors_.rows() != vectors_.cols() || vectors_.rows() != values_.size())
        throw InvalidArgument("EigenDecomposition: inconsistent shapes");
}

EigenDecomposition eig_sym(const Eigen::MatrixXd &a) {
    if (a.rows() != a.cols()) throw InvalidArgument("eig_sym: matrix is not square");
    if (!a.allFinite()) throw InvalidArgument("eig_sym: non-finite entry");
    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9) throw InvalidArgument("eig_sym: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success) throw NumericalFailure("eig_sym: eigensolver did not converge", asym);
    return EigenDecomposition(solver.eigenvectors(), solver.eigenvalues());
}

Eigen::MatrixXd heat_kernel(const EigenDecomposition &eig, double tau) {
    if (!(tau >= 0.0)) throw InvalidArgument("heat_kernel: tau must be non-negative");
    return eig.apply([tau](double lambda) { return std::exp(-tau * lambda); });
}

Eigen::MatrixXd divided_difference_matrix(const Eigen::VectorXd &lambda) {
    const Eigen::Index n = lambda.size();
    Eigen::MatrixXd b(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        b(i, i) = std::exp(lambda(i));
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double half_gap = 0.5 * (lambda(i) - lambda(j));
            double value;
            if (std::abs(half_gap) < 0.5)
                value = std::exp(0.5 * (lambda(i) + lambda(j))) * sinch(half_gap);
            else
                value = (std::exp(lambda(i)) - std::exp(lambda(j))) / (lambda(i) - lambda(j));
            b(i, j) = b(j, i) = value;
        }
    }
    return b;
}

Eigen::MatrixXd grad_trace_exp(const Eigen::MatrixXd &a, const EigenDecomposition &eig, double nu) {
    const Eigen::Index n = eig.size();
    if (a.rows() != n || a.cols() != n) throw InvalidArgument("grad_trace_exp: dimension mismatch");
    if (nu == 0.0) return Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd &v = eig.vectors();
    Eigen::MatrixXd c = v.transpose() * a.transpose() * v;
    c = (0.5 * (c + c.transpose())).eval();
    const Eigen::MatrixXd b = divided_difference_matrix(nu * eig.values());
    Eigen::MatrixXd g = nu * (v * c.cwiseProduct(b) * v.transpose());
    return 0.5 * (g + g.transpose());
}

} // namespace heatgraph
