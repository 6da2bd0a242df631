#pragma once

#include "heatgraph/dictionary.hpp"
#include "heatgraph/graphs.hpp"
#include "heatgraph/metrics.hpp"
#include "heatgraph/solver.hpp"

#include "json.hpp"

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace heatgraph {

enum class GraphModel { rbf, er, ba, from_file };

GraphModel parse_graph_model(const std::string &name);
std::string to_string(GraphModel model);

/// 10^1, 10^0.5, ..., 10^-6.
std::vector<double> default_alpha_grid();
/// 10^0, 10^-1, 10^-2.
std::vector<double> default_beta_grid();
/// (2.5, 4) for rbf, er and from_file; (1, 4) for ba.
TauVector default_taus_true(GraphModel model);
/// S evenly spaced starting scales on [1, 3]; {1} when S = 1.
TauVector default_tau_init(Index scales);

struct ExperimentConfig {
    GraphModel graph_model = GraphModel::rbf;
    Index n = 20;
    std::optional<TauVector> taus_true;
    Index m_signals = 100;
    Index atoms_per_signal = 3;
    double noise_std = 0.0;
    std::vector<double> alpha_grid = default_alpha_grid();
    std::vector<double> beta_grid = default_beta_grid();
    SolverConfig solver{};
    std::vector<std::uint64_t> seeds{0};
    std::filesystem::path output_dir = "heatgraph_out";
    int jobs = 1;
    /// Write a checkpoint every this many outer iterations; 0 disables.
    int checkpoint_every = 0;

    double rbf_sigma = 0.5;
    double rbf_kappa = 0.75;
    double er_p = 0.2;
    Index ba_m = 1;

    /// Laplacian CSV used as the ground-truth graph when graph_model is from_file.
    std::filesystem::path graph_path;
    /// Ground-truth Laplacian CSV for learn and localize.
    std::filesystem::path truth_path;
    /// Learned Laplacian CSVs, or directories searched for laplacian.csv, for localize.
    std::vector<std::filesystem::path> learned_paths;

    std::vector<double> localization_taus;
    std::vector<double> localization_alphas;
    Index n_test = 1000;
    Index s_sources = 3;

    /// Sparsity ladder for the approximation-error report in from_file mode.
    std::vector<double> approximation_alphas;

    TauVector resolved_taus_true() const;
    /// Throws ConfigError.
    void validate() const;
};

/// Fields present in `j` override `base`. Unknown keys are a ConfigError.
ExperimentConfig config_from_json(const nlohmann::json &j, ExperimentConfig base = {});
nlohmann::ordered_json config_to_json(const ExperimentConfig &cfg);
ExperimentConfig load_config(const std::filesystem::path &path, ExperimentConfig base = {});

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<std::filesystem::path> output;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<std::vector<double>> fix_tau;
    std::optional<Index> s_scales;
};

/// Applies flags on top of `cfg`, then HEATGRAPH_JOBS if `env_jobs` is set.
ExperimentConfig apply_overrides(ExperimentConfig cfg, const CliOverrides &flags,
                                 const char *env_jobs = std::getenv("HEATGRAPH_JOBS"));

std::string version_string();

struct GeneratedData {
    Laplacian truth;
    HeatDictionary dict;
    SyntheticSignals signals;
};

/// Ground-truth graph and signals for one seed, without touching the disk.
GeneratedData generate_data(const ExperimentConfig &cfg, std::uint64_t seed);

/// Writes <output_dir>/seed_<s>/{graph_edges,laplacian,signals,codes}.csv and manifest.json
/// for every seed. Returns the seed directories.
std::vector<std::filesystem::path> cmd_generate(const ExperimentConfig &cfg);

struct CellSummary {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<std::uint64_t> seeds;
    std::vector<EdgeRecoveryReport> reports;
    std::vector<double> final_objectives;
    EdgeRecoveryReport mean{};
    int failures = 0;
};

struct LearnSummary {
    std::vector<CellSummary> cells;
    /// Index into cells of the best mean F-measure; empty without ground truth.
    std::optional<std::size_t> best;
    std::filesystem::path summary_path;
};

/// Runs the (alpha, beta, seed) grid on the signals CSV. Cells whose result.json
/// already exists are loaded instead of recomputed.
LearnSummary cmd_learn(const std::filesystem::path &signals_path, const ExperimentConfig &cfg);

/// Writes <output_dir>/localization.csv and returns its path.
std::filesystem::path cmd_localize(const ExperimentConfig &cfg);

EdgeRecoveryReport cmd_eval(const std::filesystem::path &learned_path, const std::filesystem::path &truth_path,
                            double eps = 1e-4);

} // namespace heatgraph
