#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace heatgraph {

using Index = Eigen::Index;

/// Dense symmetric non-negative edge weights with zero diagonal.
class WeightMatrix {
public:
    /// Validates symmetry, non-negativity and the zero diagonal; throws InvalidArgument.
    explicit WeightMatrix(Eigen::MatrixXd w);

    static WeightMatrix zeros(Index n);

    Index size() const { return w_.rows(); }
    const Eigen::MatrixXd &matrix() const { return w_; }
    double operator()(Index i, Index j) const { return w_(i, j); }

    /// Number of unordered pairs with non-zero weight.
    Index edge_count() const;

private:
    Eigen::MatrixXd w_;
};

/// Combinatorial graph Laplacian L = D - W.
///
/// Construction checks symmetry (1e-9), non-positive off-diagonals and zero
/// row sums (1e-9 absolute). Together these imply diagonal dominance and hence
/// positive semidefiniteness, so no eigensolve is needed to validate.
class Laplacian {
public:
    explicit Laplacian(Eigen::MatrixXd l);

    Index size() const { return l_.rows(); }
    const Eigen::MatrixXd &matrix() const { return l_; }
    double operator()(Index i, Index j) const { return l_(i, j); }
    double trace() const { return l_.trace(); }

private:
    Eigen::MatrixXd l_;
};

Laplacian laplacian_from_weights(const WeightMatrix &w);
WeightMatrix weights_from_laplacian(const Laplacian &l);

/// Rescales so that tr(L) = n. Throws DegenerateGraphError on a zero-trace input.
Laplacian normalize_trace(const Laplacian &l);

/// Zeroes off-diagonal entries with |value| < eps and rebuilds the diagonal.
Laplacian threshold_laplacian(const Laplacian &l, double eps = 1e-4);

/// True when the support graph of `w` is connected (n == 1 counts as connected).
bool is_connected(const WeightMatrix &w);

enum class Connectivity { allow_disconnected, require_connected };

/// Attempts made before a generator gives up on drawing a connected graph.
inline constexpr int kMaxConnectivityAttempts = 100;

struct RbfGraph {
    WeightMatrix weights;
    /// 2 x n vertex coordinates in the unit square.
    Eigen::Matrix2Xd coordinates;
};

/// Thresholded Gaussian kernel graph on uniform random points in the unit square.
RbfGraph generate_rbf_graph(Index n, double sigma = 0.5, double kappa = 0.75, std::uint64_t seed = 0,
                            Connectivity connectivity = Connectivity::require_connected);

/// Erdos-Renyi G(n, p) with unit weights.
WeightMatrix generate_er_graph(Index n, double p = 0.2, std::uint64_t seed = 0,
                               Connectivity connectivity = Connectivity::require_connected);

/// Barabasi-Albert preferential attachment grown from a complete graph on
/// `m_attach` vertices. Always connected.
WeightMatrix generate_ba_graph(Index n, Index m_attach = 1, std::uint64_t seed = 0);

/// Connected ER(0.5) graph with uniform(0,1) weights, trace-normalized.
Laplacian random_valid_laplacian(Index n, std::uint64_t seed);

} // namespace heatgraph
