#pragma once

#include "heatgraph/dictionary.hpp"
#include "heatgraph/graphs.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace heatgraph {

struct IstaConfig {
    double alpha = 1e-1;
    int max_iter = 1000;
    /// Defaults to 1 / ||2 D^T D||_2.
    std::optional<double> step;
    double tol = 1e-6;
};

/// ||x - D h||^2 + alpha ||h||_1.
double sparse_coding_objective(const Eigen::VectorXd &x, const HeatDictionary &dict, const Eigen::VectorXd &h,
                               double alpha);

/// Plain ISTA for the l1-regularized least squares code of one signal.
/// Stops when ||h_k - h_{k-1}|| < tol * max(1, ||h_k||) or after max_iter.
/// When `objective_trace` is given, the objective after every iteration is appended.
Eigen::VectorXd ista_recover(const Eigen::VectorXd &x, const HeatDictionary &dict, const IstaConfig &cfg,
                             std::vector<double> *objective_trace = nullptr);

/// Column-by-column ista_recover sharing one Gram matrix.
Eigen::MatrixXd ista_recover_all(const Eigen::MatrixXd &x, const HeatDictionary &dict, const IstaConfig &cfg);

/// Indices of the `count` largest |h| entries, ties to the lower index, in ascending order.
std::vector<Index> top_magnitude_indices(const Eigen::VectorXd &h, Index count);

struct SourceRecovery {
    std::vector<Index> sources;
    /// The recovered code was all zeros, so `sources` is only the tie-break order.
    bool degenerate = false;
};

/// Vertices of the s_true strongest recovered sources of `x`. With several
/// scales, atom k maps to vertex k mod N.
SourceRecovery recover_sources(const Eigen::VectorXd &x, const HeatDictionary &dict, Index s_true,
                               const IstaConfig &cfg);

struct SweepOptions {
    std::vector<double> taus;
    Index n_test = 1000;
    Index s_sources = 3;
    std::vector<double> alphas;
    std::uint64_t seed = 0;
    int ista_max_iter = 1000;
    double ista_tol = 1e-6;
};

/// tau = 10^-1, 10^-0.5, ..., 10^1.5.
std::vector<double> default_localization_taus();
/// alpha = 10^0.5, 10^0, ..., 10^-3.
std::vector<double> default_localization_alphas();

struct SweepRow {
    double tau = 0.0;
    Index instance = 0;
    double support_f_measure = 0.0;
    double mean_sources_recovered = 0.0;
    double best_alpha = 0.0;
    /// Fraction of test signals whose recovered code was all zeros at best_alpha.
    double degenerate_fraction = 0.0;
};

/// For each tau and learned graph: draw test signals on the true graph, recover
/// them on the learned graph, and keep the alpha with the best mean support
/// F-measure (ties go to more recovered sources, then to the earlier alpha).
std::vector<SweepRow> localization_sweep(const Laplacian &truth, const std::vector<Laplacian> &learned,
                                         const SweepOptions &options);

/// Mean support F-measure per tau, in sweep order.
std::vector<std::pair<double, double>> mean_f_by_tau(const std::vector<SweepRow> &rows);

/// CSV with header tau,instance,support_f_measure,mean_sources_recovered,best_alpha,
/// followed by '#' footer lines with the per-tau means and the trend check.
std::string sweep_to_csv(const std::vector<SweepRow> &rows);

} // namespace heatgraph
