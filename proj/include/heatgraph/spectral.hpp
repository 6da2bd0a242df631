#pragma once

#include <Eigen/Dense>

namespace heatgraph {

/// Orthonormal eigendecomposition a = V diag(lambda) V^T of a symmetric matrix,
/// eigenvalues in nondecreasing order. Immutable once built.
class EigenDecomposition {
public:
    EigenDecomposition(Eigen::MatrixXd vectors, Eigen::VectorXd values);

    Eigen::Index size() const { return values_.size(); }
    const Eigen::MatrixXd &vectors() const { return vectors_; }
    const Eigen::VectorXd &values() const { return values_; }

    /// V diag(f(lambda)) V^T for an elementwise spectral function.
    template <typename F>
    Eigen::MatrixXd apply(F &&f) const {
        const Eigen::VectorXd mapped = values_.unaryExpr(f);
        return vectors_ * mapped.asDiagonal() * vectors_.transpose();
    }

private:
    Eigen::MatrixXd vectors_;
    Eigen::VectorXd values_;
};

/// Symmetric eigensolver. Throws InvalidArgument when `a` is not symmetric within 1e-9.
EigenDecomposition eig_sym(const Eigen::MatrixXd &a);

/// e^{-tau L} = V e^{-tau Lambda} V^T. Throws InvalidArgument for tau < 0.
Eigen::MatrixXd heat_kernel(const EigenDecomposition &eig, double tau);

/// First divided differences of exp on the spectrum:
/// b(i,j) = (e^{l_i} - e^{l_j}) / (l_i - l_j), with b(i,i) = e^{l_i}.
///
/// Pairs closer than one unit use e^{(l_i+l_j)/2} sinh(d)/d, d = (l_i-l_j)/2,
/// which is the same quantity without the cancellation.
Eigen::MatrixXd divided_difference_matrix(const Eigen::VectorXd &lambda);

/// Gradient of L -> tr(A e^{nu L}) over symmetric perturbations of L:
///   nu * V ((V^T sym(A)^T V) o B(nu Lambda)) V^T.
Eigen::MatrixXd grad_trace_exp(const Eigen::MatrixXd &a, const EigenDecomposition &eig, double nu);

} // namespace heatgraph
