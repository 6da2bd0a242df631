#include "heatgraph/metrics.hpp"

#include "heatgraph/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>

namespace heatgraph {

EdgeSet edge_sets(const Laplacian &l, double eps) {
    if (eps < 0.0) throw InvalidArgument("edge_sets: eps must be non-negative");
    EdgeSet edges;
    for (Index i = 0; i < l.size(); ++i)
        for (Index j = i + 1; j < l.size(); ++j)
            if (std::abs(l(i, j)) >= eps && l(i, j) != 0.0) edges.emplace(i, j);
    return edges;
}

PrecisionRecall precision_recall_f(const EdgeSet &learned, const EdgeSet &truth) {
    std::size_t overlap = 0;
    for (const auto &e : learned) overlap += truth.count(e);
    PrecisionRecall out;
    if (!learned.empty()) out.precision = static_cast<double>(overlap) / static_cast<double>(learned.size());
    if (!truth.empty()) out.recall = static_cast<double>(overlap) / static_cast<double>(truth.size());
    if (out.precision + out.recall > 0.0)
        out.f_measure = 2.0 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

double nmi_from_contingency(const double (&counts)[2][2]) {
    const double total = counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
    if (!(total > 0.0)) return 0.0;
    const double row[2] = {counts[0][0] + counts[0][1], counts[1][0] + counts[1][1]};
    const double col[2] = {counts[0][0] + counts[1][0], counts[0][1] + counts[1][1]};
    auto entropy = [total](const double (&marginal)[2]) {
        double h = 0.0;
        for (double c : marginal)
            if (c > 0.0) h -= (c / total) * std::log(c / total);
        return h;
    };
    const double h_row = entropy(row);
    const double h_col = entropy(col);
    if (h_row == 0.0 || h_col == 0.0) {
        // Both labelings single-class and equal.
        const bool same = (row[0] == total && col[0] == total) || (row[1] == total && col[1] == total);
        return same ? 1.0 : 0.0;
    }
    double mutual = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            if (counts[a][b] > 0.0)
                mutual += (counts[a][b] / total) * std::log(counts[a][b] * total / (row[a] * col[b]));
    return std::clamp(mutual / std::sqrt(h_row * h_col), 0.0, 1.0);
}

double nmi_edge_partition(const EdgeSet &learned, const EdgeSet &truth, Index n) {
    if (n < 2) throw InvalidArgument("nmi_edge_partition: n must be at least 2");
    std::size_t both = 0;
    for (const auto &e : learned) both += truth.count(e);
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    const double learned_only = static_cast<double>(learned.size() - both);
    const double truth_only = static_cast<double>(truth.size() - both);
    const double counts[2][2] = {
        {pairs - static_cast<double>(both) - learned_only - truth_only, truth_only},
        {learned_only, static_cast<double>(both)},
    };
    return nmi_from_contingency(counts);
}

double l2_weight_error(const Laplacian &learned, const Laplacian &truth) {
    if (learned.size() != truth.size()) throw InvalidArgument("l2_weight_error: size mismatch");
    auto normalized_weights = [](const Laplacian &l) {
        const Laplacian scaled = l.trace() > 0.0 ? normalize_trace(l) : l;
        return weights_from_laplacian(scaled).matrix();
    };
    return (normalized_weights(learned) - normalized_weights(truth)).norm();
}

EdgeRecoveryReport evaluate_recovery(const Laplacian &learned, const Laplacian &truth, double eps) {
    if (learned.size() != truth.size()) throw InvalidArgument("evaluate_recovery: size mismatch");
    const EdgeSet a = edge_sets(learned, eps);
    const EdgeSet b = edge_sets(truth, eps);
    const PrecisionRecall pr = precision_recall_f(a, b);
    return EdgeRecoveryReport{pr.precision, pr.recall, pr.f_measure, nmi_edge_partition(a, b, learned.size()),
                              l2_weight_error(learned, truth)};
}

std::string to_json(const EdgeRecoveryReport &report) {
    nlohmann::ordered_json j;
    j["precision"] = report.precision;
    j["recall"] = report.recall;
    j["f_measure"] = report.f_measure;
    j["nmi"] = report.nmi;
    j["l2_weight_error"] = report.l2_weight_error;
    return j.dump(2);
}

} // namespace heatgraph
