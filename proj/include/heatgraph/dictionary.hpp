#pragma once

#include "heatgraph/spectral.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace heatgraph {

/// Observations, one column per signal, one row per vertex.
using SignalMatrix = Eigen::MatrixXd;

/// Diffusion scales tau_1..tau_S, all non-negative, S >= 1.
class TauVector {
public:
    explicit TauVector(std::vector<double> taus);
    TauVector(std::initializer_list<double> taus) : TauVector(std::vector<double>(taus)) {}

    Eigen::Index size() const { return static_cast<Eigen::Index>(taus_.size()); }
    double operator[](Eigen::Index s) const { return taus_[static_cast<std::size_t>(s)]; }
    const std::vector<double> &values() const { return taus_; }
    double max() const;

    friend bool operator==(const TauVector &, const TauVector &) = default;

private:
    std::vector<double> taus_;
};

/// (N*S) x M coefficients; rows s*N .. s*N+N-1 form the block for scale s.
class SparseCodes {
public:
    SparseCodes(Eigen::MatrixXd h, Eigen::Index scales);
    static SparseCodes zeros(Eigen::Index n, Eigen::Index scales, Eigen::Index m);

    Eigen::Index vertices() const { return h_.rows() / scales_; }
    Eigen::Index scales() const { return scales_; }
    Eigen::Index signals() const { return h_.cols(); }

    const Eigen::MatrixXd &matrix() const { return h_; }
    Eigen::MatrixXd &matrix() { return h_; }

    auto block(Eigen::Index s) const { return h_.middleRows(s * vertices(), vertices()); }
    auto block(Eigen::Index s) { return h_.middleRows(s * vertices(), vertices()); }

private:
    Eigen::MatrixXd h_;
    Eigen::Index scales_;
};

/// D = [e^{-tau_1 L} ... e^{-tau_S L}] built on a cached eigendecomposition of L.
class HeatDictionary {
public:
    HeatDictionary(EigenDecomposition eig, TauVector taus);

    Eigen::Index vertices() const { return eig_.size(); }
    Eigen::Index scales() const { return taus_.size(); }
    const EigenDecomposition &eig() const { return eig_; }
    const TauVector &taus() const { return taus_; }

    /// N x (N*S) atom matrix.
    const Eigen::MatrixXd &atoms() const { return atoms_; }
    auto kernel(Eigen::Index s) const { return atoms_.middleCols(s * vertices(), vertices()); }

private:
    EigenDecomposition eig_;
    TauVector taus_;
    Eigen::MatrixXd atoms_;
};

HeatDictionary build_dictionary(EigenDecomposition eig, TauVector taus);

/// X = sum_s e^{-tau_s L} H_s.
SignalMatrix apply(const HeatDictionary &dict, const SparseCodes &h);

/// D^T D, assembled blockwise as e^{-(tau_s + tau_s') L}.
Eigen::MatrixXd gram(const HeatDictionary &dict);

/// ||D^T D||_2 = max_i sum_s e^{-2 tau_s lambda_i}, read off the spectrum.
double gram_spectral_norm(const HeatDictionary &dict);

struct SyntheticSignals {
    SignalMatrix x;
    SparseCodes h;
};

/// Each column of H gets `atoms_per_signal` distinct random atoms with N(0,1)
/// coefficients; X = D H plus i.i.d. N(0, noise_std^2) noise.
SyntheticSignals generate_synthetic_signals(const HeatDictionary &dict, Eigen::Index m,
                                            Eigen::Index atoms_per_signal, double noise_std,
                                            std::uint64_t seed);

} // namespace heatgraph
