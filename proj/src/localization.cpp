#include "heatgraph/localization.hpp"

#include "heatgraph/errors.hpp"
#include "heatgraph/metrics.hpp"
#include "heatgraph/rng.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

namespace heatgraph {

namespace {

// Shared pieces of the ISTA iteration for one dictionary.
struct IstaProblem {
    IstaProblem(const HeatDictionary &dict, const IstaConfig &cfg) : atoms(dict.atoms()), gram_matrix(gram(dict)) {
        if (!(cfg.alpha >= 0.0)) throw InvalidArgument("ista: alpha must be non-negative");
        if (cfg.max_iter < 1) throw InvalidArgument("ista: max_iter must be positive");
        step = cfg.step ? *cfg.step : 1.0 / (2.0 * gram_spectral_norm(dict));
        if (!(step > 0.0)) throw InvalidArgument("ista: step must be positive");
        threshold = step * cfg.alpha;
    }

    Eigen::VectorXd solve(const Eigen::VectorXd &x, const IstaConfig &cfg, std::vector<double> *trace,
                          const HeatDictionary *dict) const {
        if (x.size() != atoms.rows()) throw InvalidArgument("ista: signal length does not match the dictionary");
        const Eigen::VectorXd dtx = atoms.transpose() * x;
        Eigen::VectorXd h = Eigen::VectorXd::Zero(atoms.cols());
        Eigen::VectorXd next(h.size());
        for (int k = 0; k < cfg.max_iter; ++k) {
            next = h - step * 2.0 * (gram_matrix * h - dtx);
            for (Index i = 0; i < next.size(); ++i) {
                const double mag = std::abs(next(i)) - threshold;
                next(i) = mag > 0.0 ? std::copysign(mag, next(i)) : 0.0;
            }
            const double change = (next - h).norm();
            h.swap(next);
            if (trace) trace->push_back(sparse_coding_objective(x, *dict, h, cfg.alpha));
            if (change < cfg.tol * std::max(1.0, h.norm())) break;
        }
        return h;
    }

    const Eigen::MatrixXd &atoms;
    Eigen::MatrixXd gram_matrix;
    double step = 0.0;
    double threshold = 0.0;
};

std::set<Index> support_of(const Eigen::VectorXd &h) {
    std::set<Index> s;
    for (Index i = 0; i < h.size(); ++i)
        if (h(i) != 0.0) s.insert(i);
    return s;
}

double support_f(const std::set<Index> &recovered, const std::set<Index> &truth) {
    std::size_t overlap = 0;
    for (Index i : recovered) overlap += truth.count(i);
    if (overlap == 0) return 0.0;
    const double p = static_cast<double>(overlap) / static_cast<double>(recovered.size());
    const double r = static_cast<double>(overlap) / static_cast<double>(truth.size());
    return 2.0 * p * r / (p + r);
}

std::vector<double> log_grid(double hi_exp, double lo_exp, double step) {
    std::vector<double> out;
    const int count = static_cast<int>(std::lround((hi_exp - lo_exp) / step)) + 1;
    for (int k = 0; k < count; ++k) out.push_back(std::pow(10.0, hi_exp - step * k));
    return out;
}

} // namespace

double sparse_coding_objective(const Eigen::VectorXd &x, const HeatDictionary &dict, const Eigen::VectorXd &h,
                               double alpha) {
    return (x - dict.atoms() * h).squaredNorm() + alpha * h.lpNorm<1>();
}

Eigen::VectorXd ista_recover(const Eigen::VectorXd &x, const HeatDictionary &dict, const IstaConfig &cfg,
                             std::vector<double> *objective_trace) {
    const IstaProblem problem(dict, cfg);
    return problem.solve(x, cfg, objective_trace, &dict);
}

Eigen::MatrixXd ista_recover_all(const Eigen::MatrixXd &x, const HeatDictionary &dict, const IstaConfig &cfg) {
    const IstaProblem problem(dict, cfg);
    Eigen::MatrixXd h(dict.atoms().cols(), x.cols());
    for (Index j = 0; j < x.cols(); ++j) h.col(j) = problem.solve(x.col(j), cfg, nullptr, nullptr);
    return h;
}

std::vector<Index> top_magnitude_indices(const Eigen::VectorXd &h, Index count) {
    if (count < 0 || count > h.size()) throw InvalidArgument("top_magnitude_indices: count out of range");
    std::vector<Index> order(static_cast<std::size_t>(h.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return std::abs(h(a)) > std::abs(h(b)); });
    order.resize(static_cast<std::size_t>(count));
    std::sort(order.begin(), order.end());
    return order;
}

SourceRecovery recover_sources(const Eigen::VectorXd &x, const HeatDictionary &dict, Index s_true,
                               const IstaConfig &cfg) {
    if (s_true < 1) throw InvalidArgument("recover_sources: s_true must be positive");
    const Eigen::VectorXd h = ista_recover(x, dict, cfg);
    SourceRecovery out;
    out.degenerate = h.isZero(0.0);
    std::set<Index> vertices;
    for (Index k : top_magnitude_indices(h, std::min(s_true, h.size()))) vertices.insert(k % dict.vertices());
    out.sources.assign(vertices.begin(), vertices.end());
    return out;
}

std::vector<double> default_localization_taus() { return log_grid(-1.0, 1.5, -0.5); }

std::vector<double> default_localization_alphas() { return log_grid(0.5, -3.0, 0.5); }

std::vector<SweepRow> localization_sweep(const Laplacian &truth, const std::vector<Laplacian> &learned,
                                         const SweepOptions &options) {
    if (learned.empty()) throw InvalidArgument("localization_sweep: no learned graphs");
    if (options.taus.empty() || options.alphas.empty()) throw InvalidArgument("localization_sweep: empty grid");
    if (options.s_sources < 1 || options.n_test < 1) throw InvalidArgument("localization_sweep: bad test sizes");
    for (const auto &l : learned)
        if (l.size() != truth.size()) throw InvalidArgument("localization_sweep: graph size mismatch");

    const EigenDecomposition truth_eig = eig_sym(truth.matrix());
    std::vector<EigenDecomposition> learned_eig;
    for (const auto &l : learned) learned_eig.push_back(eig_sym(l.matrix()));

    const Rng root(options.seed);
    std::vector<SweepRow> rows;
    for (std::size_t t = 0; t < options.taus.size(); ++t) {
        const double tau = options.taus[t];
        const HeatDictionary truth_dict(truth_eig, TauVector{tau});
        for (std::size_t inst = 0; inst < learned.size(); ++inst) {
            const std::uint64_t cell_seed = root.split(t).split(inst).next_u64();
            const SyntheticSignals test =
                generate_synthetic_signals(truth_dict, options.n_test, options.s_sources, 0.0, cell_seed);
            const HeatDictionary learned_dict(learned_eig[inst], TauVector{tau});

            SweepRow best{tau, static_cast<Index>(inst), -1.0, -1.0, 0.0, 0.0};
            for (double alpha : options.alphas) {
                IstaConfig cfg{alpha, options.ista_max_iter, std::nullopt, options.ista_tol};
                const Eigen::MatrixXd h = ista_recover_all(test.x, learned_dict, cfg);
                double f_sum = 0.0, hits = 0.0, zeros = 0.0;
                for (Index j = 0; j < options.n_test; ++j) {
                    if (h.col(j).isZero(0.0)) zeros += 1.0;
                    const std::set<Index> true_support = support_of(test.h.matrix().col(j));
                    f_sum += support_f(support_of(h.col(j)), true_support);
                    for (Index v : top_magnitude_indices(h.col(j), options.s_sources)) hits += static_cast<double>(true_support.count(v));
                }
                const double mean_f = f_sum / static_cast<double>(options.n_test);
                const double mean_hits = hits / static_cast<double>(options.n_test);
                if (mean_f > best.support_f_measure ||
                    (mean_f == best.support_f_measure && mean_hits > best.mean_sources_recovered)) {
                    best.support_f_measure = mean_f;
                    best.mean_sources_recovered = mean_hits;
                    best.best_alpha = alpha;
                    best.degenerate_fraction = zeros / static_cast<double>(options.n_test);
                }
            }
            rows.push_back(best);
        }
    }
    return rows;
}

std::vector<std::pair<double, double>> mean_f_by_tau(const std::vector<SweepRow> &rows) {
    std::vector<std::pair<double, double>> out;
    std::vector<double> counts;
    for (const auto &row : rows) {
        if (out.empty() || out.back().first != row.tau) {
            out.emplace_back(row.tau, 0.0);
            counts.push_back(0.0);
        }
        out.back().second += row.support_f_measure;
        counts.back() += 1.0;
    }
    for (std::size_t k = 0; k < out.size(); ++k) out[k].second /= counts[k];
    return out;
}

std::string sweep_to_csv(const std::vector<SweepRow> &rows) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "tau,instance,support_f_measure,mean_sources_recovered,best_alpha\n";
    for (const auto &r : rows)
        os << r.tau << ',' << r.instance << ',' << r.support_f_measure << ',' << r.mean_sources_recovered << ','
           << r.best_alpha << '\n';
    const auto means = mean_f_by_tau(rows);
    for (const auto &[tau, f] : means) os << "# mean_support_f_measure tau=" << tau << " f=" << f << '\n';
    if (means.size() >= 2) {
        const bool decreasing = means.front().second > means.back().second;
        os << "# trend first_tau_f_greater_than_last_tau_f=" << (decreasing ? "true" : "false") << '\n';
    }
    return os.str();
}

} // namespace heatgraph
