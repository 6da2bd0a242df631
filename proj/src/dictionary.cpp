#include "heatgraph/dictionary.hpp"

#include "heatgraph/errors.hpp"
#include "heatgraph/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace heatgraph {

TauVector::TauVector(std::vector<double> taus) : taus_(std::move(taus)) {
    if (taus_.empty()) throw InvalidArgument("TauVector: at least one scale is required");
    for (double t : taus_)
        if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("TauVector: scales must be finite and non-negative");
}

double TauVector::max() const { return *std::max_element(taus_.begin(), taus_.end()); }

SparseCodes::SparseCodes(Eigen::MatrixXd h, Eigen::Index scales) : h_(std::move(h)), scales_(scales) {
    if (scales_ < 1 || h_.rows() % scales_ != 0)
        throw InvalidArgument("SparseCodes: row count must be a multiple of the scale count");
}

SparseCodes SparseCodes::zeros(Eigen::Index n, Eigen::Index scales, Eigen::Index m) {
    return SparseCodes(Eigen::MatrixXd::Zero(n * scales, m), scales);
}

HeatDictionary::HeatDictionary(EigenDecomposition eig, TauVector taus)
    : eig_(std::move(eig)), taus_(std::move(taus)) {
    const Eigen::Index n = eig_.size();
    atoms_.resize(n, n * taus_.size());
    for (Eigen::Index s = 0; s < taus_.size(); ++s) atoms_.middleCols(s * n, n) = heat_kernel(eig_, taus_[s]);
}

HeatDictionary build_dictionary(EigenDecomposition eig, TauVector taus) {
    return HeatDictionary(std::move(eig), std::move(taus));
}

SignalMatrix apply(const HeatDictionary &dict, const SparseCodes &h) {
    if (h.vertices() != dict.vertices() || h.scales() != dict.scales())
        throw InvalidArgument("apply: sparse codes do not match the dictionary shape");
    return dict.atoms() * h.matrix();
}

Eigen::MatrixXd gram(const HeatDictionary &dict) {
    const Eigen::Index n = dict.vertices();
    const Eigen::Index s_count = dict.scales();
    Eigen::MatrixXd g(n * s_count, n * s_count);
    for (Eigen::Index s = 0; s < s_count; ++s) {
        for (Eigen::Index t = s; t < s_count; ++t) {
            const Eigen::MatrixXd block = heat_kernel(dict.eig(), dict.taus()[s] + dict.taus()[t]);
            g.block(s * n, t * n, n, n) = block;
            if (t != s) g.block(t * n, s * n, n, n) = block;
        }
    }
    return g;
}

double gram_spectral_norm(const HeatDictionary &dict) {
    const Eigen::VectorXd &lambda = dict.eig().values();
    double best = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        double sum = 0.0;
        for (double tau : dict.taus().values()) sum += std::exp(-2.0 * tau * lambda(i));
        best = std::max(best, sum);
    }
    return best;
}

SyntheticSignals generate_synthetic_signals(const HeatDictionary &dict, Eigen::Index m,
                                            Eigen::Index atoms_per_signal, double noise_std,
                                            std::uint64_t seed) {
    const Eigen::Index n = dict.vertices();
    const Eigen::Index k = n * dict.scales();
    if (m < 1) throw InvalidArgument("generate_synthetic_signals: m must be positive");
    if (atoms_per_signal < 0 || atoms_per_signal > k)
        throw InvalidArgument("generate_synthetic_signals: atoms_per_signal exceeds the dictionary size");
    if (!(noise_std >= 0.0)) throw InvalidArgument("generate_synthetic_signals: noise_std must be non-negative");

    const Rng root(seed);
    SparseCodes h = SparseCodes::zeros(n, dict.scales(), m);
    Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(n, m);
    std::vector<Eigen::Index> pool(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < m; ++j) {
        Rng rng = root.split(static_cast<std::uint64_t>(j));
        // Partial Fisher-Yates: the first atoms_per_signal slots are a uniform draw without replacement.
        std::iota(pool.begin(), pool.end(), Eigen::Index{0});
        for (Eigen::Index a = 0; a < atoms_per_signal; ++a) {
            const auto pick = static_cast<std::size_t>(a) + rng.below(static_cast<std::size_t>(k - a));
            std::swap(pool[static_cast<std::size_t>(a)], pool[pick]);
            h.matrix()(pool[static_cast<std::size_t>(a)], j) = rng.normal();
        }
        if (noise_std > 0.0)
            for (Eigen::Index i = 0; i < n; ++i) noise(i, j) = noise_std * rng.normal();
    }
    SignalMatrix x = apply(dict, h);
    if (noise_std > 0.0) x += noise;
    return SyntheticSignals{std::move(x), std::move(h)};
}

} // namespace heatgraph
