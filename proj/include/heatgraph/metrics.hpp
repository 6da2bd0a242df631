#pragma once

#include "heatgraph/graphs.hpp"

#include <set>
#include <string>
#include <utility>

namespace heatgraph {

/// Unordered vertex pairs (i < j).
using EdgeSet = std::set<std::pair<Index, Index>>;

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
};

struct EdgeRecoveryReport {
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
    double nmi = 0.0;
    double l2_weight_error = 0.0;
};

/// Pairs (i < j) with |l(i,j)| >= eps.
EdgeSet edge_sets(const Laplacian &l, double eps = 1e-4);

/// Empty learned set scores precision 0; empty truth scores recall 0; F = 0 if both are 0.
PrecisionRecall precision_recall_f(const EdgeSet &learned, const EdgeSet &truth);

/// NMI = I(A;B) / sqrt(H(A) H(B)) between the edge / non-edge labelings of all
/// n(n-1)/2 pairs. A single-class labeling has zero entropy and scores 0,
/// except two identical single-class labelings, which score 1.
double nmi_edge_partition(const EdgeSet &learned, const EdgeSet &truth, Index n);

/// Same quantity from a 2x2 contingency table counts[a][b], a = learned label, b = true label.
double nmi_from_contingency(const double (&counts)[2][2]);

/// Frobenius norm of W_learned - W_truth after trace-normalizing both graphs.
/// A zero-trace graph is compared as is.
double l2_weight_error(const Laplacian &learned, const Laplacian &truth);

EdgeRecoveryReport evaluate_recovery(const Laplacian &learned, const Laplacian &truth, double eps = 1e-4);

/// {"precision":..,"recall":..,"f_measure":..,"nmi":..,"l2_weight_error":..}
std::string to_json(const EdgeRecoveryReport &report);

} // namespace heatgraph
