#include "heatgraph/graphs.hpp"

#include "heatgraph/errors.hpp"
#include "heatgraph/rng.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace heatgraph {

namespace {

constexpr double kSymmetryTol = 1e-9;
constexpr double kRowSumTol = 1e-9;

void require_square(const Eigen::MatrixXd &m, const char *what) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw InvalidArgument(std::string(what) + ": expected a non-empty square matrix");
    if (!m.allFinite())
        throw InvalidArgument(std::string(what) + ": non-finite entry");
}

// Draws until the sample is connected or the attempt budget is spent.
WeightMatrix draw_connected(Connectivity connectivity, const char *model,
                            const std::function<WeightMatrix(int)> &draw) {
    if (connectivity == Connectivity::allow_disconnected) return draw(0);
    for (int attempt = 0; attempt < kMaxConnectivityAttempts; ++attempt) {
        WeightMatrix w = draw(attempt);
        if (is_connected(w)) return w;
    }
    throw DegenerateGraphError(std::string(model) + ": no connected sample in " +
                               std::to_string(kMaxConnectivityAttempts) + " attempts");
}

} // namespace

WeightMatrix::WeightMatrix(Eigen::MatrixXd w) : w_(std::move(w)) {
    require_square(w_, "WeightMatrix");
    const Index n = w_.rows();
    for (Index i = 0; i < n; ++i) {
        if (w_(i, i) != 0.0) throw InvalidArgument("WeightMatrix: non-zero diagonal");
        for (Index j = i + 1; j < n; ++j) {
            if (w_(i, j) < 0.0 || w_(j, i) < 0.0) throw InvalidArgument("WeightMatrix: negative weight");
            if (std::abs(w_(i, j) - w_(j, i)) > kSymmetryTol) throw InvalidArgument("WeightMatrix: not symmetric");
        }
    }
}

WeightMatrix WeightMatrix::zeros(Index n) { return WeightMatrix(Eigen::MatrixXd::Zero(n, n)); }

Index WeightMatrix::edge_count() const {
    Index count = 0;
    for (Index i = 0; i < size(); ++i)
        for (Index j = i + 1; j < size(); ++j)
            if (w_(i, j) != 0.0) ++count;
    return count;
}

Laplacian::Laplacian(Eigen::MatrixXd l) : l_(std::move(l)) {
    require_square(l_, "Laplacian");
    const Index n = l_.rows();
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            if (l_(i, j) > 0.0 || l_(j, i) > 0.0) throw InvalidArgument("Laplacian: positive off-diagonal entry");
            if (std::abs(l_(i, j) - l_(j, i)) > kSymmetryTol) throw InvalidArgument("Laplacian: not symmetric");
        }
        if (std::abs(l_.row(i).sum()) > kRowSumTol) throw InvalidArgument("Laplacian: row sum is not zero");
    }
}

Laplacian laplacian_from_weights(const WeightMatrix &w) {
    Eigen::MatrixXd l = -w.matrix();
    l.diagonal() = w.matrix().rowwise().sum();
    return Laplacian(std::move(l));
}

WeightMatrix weights_from_laplacian(const Laplacian &l) {
    Eigen::MatrixXd w = -l.matrix();
    w.diagonal().setZero();
    // Validation tolerates 1e-9 asymmetry; the weight matrix is made exactly symmetric.
    w = (0.5 * (w + w.transpose())).eval();
    return WeightMatrix(std::move(w));
}

Laplacian normalize_trace(const Laplacian &l) {
    const double tr = l.trace();
    if (!(tr > 0.0)) throw DegenerateGraphError("normalize_trace: graph has zero volume");
    return Laplacian(l.matrix() * (static_cast<double>(l.size()) / tr));
}

Laplacian threshold_laplacian(const Laplacian &l, double eps) {
    if (eps < 0.0) throw InvalidArgument("threshold_laplacian: eps must be non-negative");
    Eigen::MatrixXd out = l.matrix();
    const Index n = out.rows();
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (i != j && std::abs(out(i, j)) < eps) out(i, j) = 0.0;
    for (Index i = 0; i < n; ++i) {
        out(i, i) = 0.0;
        out(i, i) = -out.row(i).sum();
    }
    return Laplacian(std::move(out));
}

bool is_connected(const WeightMatrix &w) {
    const Index n = w.size();
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Index> stack{0};
    seen[0] = 1;
    Index visited = 1;
    while (!stack.empty()) {
        const Index v = stack.back();
        stack.pop_back();
        for (Index u = 0; u < n; ++u) {
            if (!seen[static_cast<std::size_t>(u)] && w(v, u) > 0.0) {
                seen[static_cast<std::size_t>(u)] = 1;
                ++visited;
                stack.push_back(u);
            }
        }
    }
    return visited == n;
}

RbfGraph generate_rbf_graph(Index n, double sigma, double kappa, std::uint64_t seed, Connectivity connectivity) {
    if (n < 1) throw InvalidArgument("generate_rbf_graph: n must be positive");
    if (!(sigma > 0.0) || !(kappa > 0.0)) throw InvalidArgument("generate_rbf_graph: sigma and kappa must be positive");
    const Rng root(seed);
    Eigen::Matrix2Xd coords(2, n);
    WeightMatrix w = draw_connected(connectivity, "generate_rbf_graph", [&](int attempt) {
        Rng rng = root.split(static_cast<std::uint64_t>(attempt));
        for (Index i = 0; i < n; ++i) {
            coords(0, i) = rng.uniform();
            coords(1, i) = rng.uniform();
        }
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                const double dist = (coords.col(i) - coords.col(j)).norm();
                if (dist <= kappa) m(i, j) = m(j, i) = std::exp(-dist * dist / (2.0 * sigma * sigma));
            }
        }
        return WeightMatrix(std::move(m));
    });
    return RbfGraph{std::move(w), coords};
}

WeightMatrix generate_er_graph(Index n, double p, std::uint64_t seed, Connectivity connectivity) {
    if (n < 1) throw InvalidArgument("generate_er_graph: n must be positive");
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("generate_er_graph: p must lie in (0, 1)");
    const Rng root(seed);
    return draw_connected(connectivity, "generate_er_graph", [&](int attempt) {
        Rng rng = root.split(static_cast<std::uint64_t>(attempt));
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j)
                if (rng.uniform() < p) m(i, j) = m(j, i) = 1.0;
        return WeightMatrix(std::move(m));
    });
}

WeightMatrix generate_ba_graph(Index n, Index m_attach, std::uint64_t seed) {
    if (m_attach < 1 || m_attach >= n) throw InvalidArgument("generate_ba_graph: need 1 <= m_attach < n");
    Rng rng(seed);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> degree(static_cast<std::size_t>(n), 0.0);
    for (Index i = 0; i < m_attach; ++i) {
        for (Index j = i + 1; j < m_attach; ++j) {
            m(i, j) = m(j, i) = 1.0;
            degree[static_cast<std::size_t>(i)] += 1.0;
            degree[static_cast<std::size_t>(j)] += 1.0;
        }
    }
    std::vector<Index> targets;
    for (Index v = m_attach; v < n; ++v) {
        targets.clear();
        // Sequential sampling without replacement, proportional to current degree.
        // A seed clique of one vertex has zero total degree; fall back to uniform.
        for (Index k = 0; k < m_attach; ++k) {
            double total = 0.0;
            for (Index u = 0; u < v; ++u)
                if (m(v, u) == 0.0) total += degree[static_cast<std::size_t>(u)];
            Index chosen = -1;
            if (total > 0.0) {
                double r = rng.uniform() * total;
                for (Index u = 0; u < v; ++u) {
                    if (m(v, u) != 0.0) continue;
                    const double d = degree[static_cast<std::size_t>(u)];
                    if (d <= 0.0) continue;
                    chosen = u;
                    if (r < d) break;
                    r -= d;
                }
            } else {
                std::vector<Index> free;
                for (Index u = 0; u < v; ++u)
                    if (m(v, u) == 0.0) free.push_back(u);
                chosen = free[rng.below(free.size())];
            }
            m(v, chosen) = m(chosen, v) = 1.0;
            targets.push_back(chosen);
        }
        for (Index u : targets) degree[static_cast<std::size_t>(u)] += 1.0;
        degree[static_cast<std::size_t>(v)] += static_cast<double>(m_attach);
    }
    return WeightMatrix(std::move(m));
}

Laplacian random_valid_laplacian(Index n, std::uint64_t seed) {
    if (n < 2) throw InvalidArgument("random_valid_laplacian: n must be at least 2");
    const Rng root(seed);
    WeightMatrix w = draw_connected(Connectivity::require_connected, "random_valid_laplacian", [&](int attempt) {
        Rng rng = root.split(static_cast<std::uint64_t>(attempt));
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                const bool edge = rng.uniform() < 0.5;
                const double weight = rng.uniform();
                if (edge && weight > 0.0) m(i, j) = m(j, i) = weight;
            }
        }
        return WeightMatrix(std::move(m));
    });
    return normalize_trace(laplacian_from_weights(w));
}

} // namespace heatgraph
