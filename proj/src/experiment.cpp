#include "heatgraph/experiment.hpp"

#include "heatgraph/csv_io.hpp"
#include "heatgraph/errors.hpp"
#include "heatgraph/localization.hpp"
#include "heatgraph/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

namespace heatgraph {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::vector<double> decade_grid(double hi_exp, double lo_exp, double step) {
    std::vector<double> out;
    const int count = static_cast<int>(std::lround((hi_exp - lo_exp) / step)) + 1;
    for (int k = 0; k < count; ++k) out.push_back(std::pow(10.0, hi_exp - step * k));
    return out;
}

std::string cell_name(std::size_t a, std::size_t b) {
    std::ostringstream os;
    os << "alpha_" << std::setw(2) << std::setfill('0') << a << "_beta_" << std::setw(2) << std::setfill('0') << b;
    return os.str();
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t stream) { return Rng(seed).split(stream).next_u64(); }

ordered_json report_json(const EdgeRecoveryReport &r) { return ordered_json::parse(to_json(r)); }

EdgeRecoveryReport report_from_json(const json &j) {
    EdgeRecoveryReport r;
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.f_measure = j.at("f_measure").get<double>();
    r.nmi = j.at("nmi").get<double>();
    r.l2_weight_error = j.at("l2_weight_error").get<double>();
    return r;
}

ordered_json manifest(const ExperimentConfig &cfg, ordered_json extra) {
    ordered_json m;
    m["tool"] = "heatgraph";
    m["version"] = version_string();
    m["config"] = config_to_json(cfg);
    for (auto &[key, value] : extra.items()) m[key] = value;
    return m;
}

void write_json(const fs::path &path, const ordered_json &j) { write_text_file(path, j.dump(2) + "\n"); }

template <typename T>
void read_field(const json &j, const char *key, T &out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception &e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
}

// Runs task(i) for i in [0, count) on `jobs` threads. The first exception is rethrown.
template <typename Task>
void run_pool(std::size_t count, int jobs, Task task) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(jobs), count));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
        for (auto &t : threads) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

struct CellResult {
    bool failed = false;
    std::optional<EdgeRecoveryReport> report;
    double final_objective = 0.0;
};

CellResult load_cell(const fs::path &result_path) {
    const json j = json::parse(read_text_file(result_path));
    CellResult r;
    r.failed = j.value("status", "ok") != "ok";
    if (j.contains("report")) r.report = report_from_json(j.at("report"));
    r.final_objective = j.value("final_objective", 0.0);
    return r;
}

std::vector<fs::path> collect_learned(const std::vector<fs::path> &paths) {
    std::vector<fs::path> out;
    for (const auto &p : paths) {
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto &entry : fs::recursive_directory_iterator(p))
                if (entry.is_regular_file() && entry.path().filename() == "laplacian.csv") found.push_back(entry.path());
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else if (fs::is_regular_file(p)) {
            out.push_back(p);
        } else {
            throw IoError("learned graph not found: " + p.string());
        }
    }
    return out;
}

} // namespace

GraphModel parse_graph_model(const std::string &name) {
    if (name == "rbf") return GraphModel::rbf;
    if (name == "er") return GraphModel::er;
    if (name == "ba") return GraphModel::ba;
    if (name == "from_file") return GraphModel::from_file;
    throw ConfigError("unknown graph_model '" + name + "' (expected rbf, er, ba or from_file)");
}

std::string to_string(GraphModel model) {
    switch (model) {
    case GraphModel::rbf: return "rbf";
    case GraphModel::er: return "er";
    case GraphModel::ba: return "ba";
    case GraphModel::from_file: return "from_file";
    }
    return "unknown";
}

std::vector<double> default_alpha_grid() { return decade_grid(1.0, -6.0, 0.5); }

std::vector<double> default_beta_grid() { return decade_grid(0.0, -2.0, 1.0); }

TauVector default_taus_true(GraphModel model) {
    return model == GraphModel::ba ? TauVector{1.0, 4.0} : TauVector{2.5, 4.0};
}

TauVector default_tau_init(Index scales) {
    if (scales < 1) throw ConfigError("number of scales must be positive");
    if (scales == 1) return TauVector{1.0};
    std::vector<double> taus;
    for (Index s = 0; s < scales; ++s) taus.push_back(1.0 + 2.0 * static_cast<double>(s) / static_cast<double>(scales - 1));
    return TauVector(std::move(taus));
}

TauVector ExperimentConfig::resolved_taus_true() const {
    return taus_true ? *taus_true : default_taus_true(graph_model);
}

void ExperimentConfig::validate() const {
    if (n < 2) throw ConfigError("n must be at least 2");
    if (m_signals < 1) throw ConfigError("m_signals must be positive");
    if (atoms_per_signal < 1) throw ConfigError("atoms_per_signal must be positive");
    if (!(noise_std >= 0.0)) throw ConfigError("noise_std must be non-negative");
    if (alpha_grid.empty() || beta_grid.empty()) throw ConfigError("alpha_grid and beta_grid must be non-empty");
    for (double a : alpha_grid)
        if (!(a >= 0.0)) throw ConfigError("alpha_grid values must be non-negative");
    for (double b : beta_grid)
        if (!(b >= 0.0)) throw ConfigError("beta_grid values must be non-negative");
    if (seeds.empty()) throw ConfigError("seeds must be non-empty");
    if (jobs < 1) throw ConfigError("jobs must be positive");
    if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be non-negative");
    if (n_test < 1 || s_sources < 1) throw ConfigError("n_test and s_sources must be positive");
    if (!(er_p > 0.0 && er_p < 1.0)) throw ConfigError("er_p must lie in (0, 1)");
    if (!(rbf_sigma > 0.0)) throw ConfigError("rbf_sigma must be positive");
    if (ba_m < 1) throw ConfigError("ba_m must be positive");
    solver.validate();
}

ExperimentConfig config_from_json(const json &j, ExperimentConfig cfg) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::vector<std::string> known = {
        "graph_model", "n", "taus_true", "m_signals", "atoms_per_signal", "noise_std", "alpha_grid", "beta_grid",
        "solver", "seeds", "output_dir", "jobs", "checkpoint_every", "rbf_sigma", "rbf_kappa", "er_p", "ba_m",
        "graph_path", "truth_path", "learned_paths", "localization_taus", "localization_alphas", "n_test",
        "s_sources", "approximation_alphas"};
    for (const auto &[key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown config field '" + key + "'");

    if (j.contains("graph_model")) {
        std::string name;
        read_field(j, "graph_model", name);
        cfg.graph_model = parse_graph_model(name);
    }
    read_field(j, "n", cfg.n);
    if (j.contains("taus_true")) {
        std::vector<double> taus;
        read_field(j, "taus_true", taus);
        try {
            cfg.taus_true = TauVector(std::move(taus));
        } catch (const InvalidArgument &e) {
            throw ConfigError(std::string("taus_true: ") + e.what());
        }
    }
    read_field(j, "m_signals", cfg.m_signals);
    read_field(j, "atoms_per_signal", cfg.atoms_per_signal);
    read_field(j, "noise_std", cfg.noise_std);
    read_field(j, "alpha_grid", cfg.alpha_grid);
    read_field(j, "beta_grid", cfg.beta_grid);
    read_field(j, "seeds", cfg.seeds);
    std::string path;
    if (j.contains("output_dir")) {
        read_field(j, "output_dir", path);
        cfg.output_dir = path;
    }
    read_field(j, "jobs", cfg.jobs);
    read_field(j, "checkpoint_every", cfg.checkpoint_every);
    read_field(j, "rbf_sigma", cfg.rbf_sigma);
    read_field(j, "rbf_kappa", cfg.rbf_kappa);
    read_field(j, "er_p", cfg.er_p);
    read_field(j, "ba_m", cfg.ba_m);
    if (j.contains("graph_path")) {
        read_field(j, "graph_path", path);
        cfg.graph_path = path;
    }
    if (j.contains("truth_path")) {
        read_field(j, "truth_path", path);
        cfg.truth_path = path;
    }
    if (j.contains("learned_paths")) {
        std::vector<std::string> paths;
        read_field(j, "learned_paths", paths);
        cfg.learned_paths.assign(paths.begin(), paths.end());
    }
    read_field(j, "localization_taus", cfg.localization_taus);
    read_field(j, "localization_alphas", cfg.localization_alphas);
    read_field(j, "n_test", cfg.n_test);
    read_field(j, "s_sources", cfg.s_sources);
    read_field(j, "approximation_alphas", cfg.approximation_alphas);

    if (j.contains("solver")) {
        const json &s = j.at("solver");
        if (!s.is_object()) throw ConfigError("solver must be a JSON object");
        static const std::vector<std::string> solver_known = {
            "alpha", "beta", "tau_init", "gamma1", "gamma2", "gamma3", "eta", "max_outer_iter", "obj_tol",
            "laplacian_threshold", "learn_tau", "rng_seed", "max_backtracks", "qp_tol", "qp_max_iter"};
        for (const auto &[key, value] : s.items())
            if (std::find(solver_known.begin(), solver_known.end(), key) == solver_known.end())
                throw ConfigError("unknown solver field '" + key + "'");
        SolverConfig &sc = cfg.solver;
        read_field(s, "alpha", sc.alpha);
        read_field(s, "beta", sc.beta);
        if (s.contains("tau_init")) {
            std::vector<double> taus;
            read_field(s, "tau_init", taus);
            try {
                sc.tau_init = TauVector(std::move(taus));
            } catch (const InvalidArgument &e) {
                throw ConfigError(std::string("solver.tau_init: ") + e.what());
            }
        }
        read_field(s, "gamma1", sc.gamma1);
        read_field(s, "gamma2", sc.gamma2);
        read_field(s, "gamma3", sc.gamma3);
        read_field(s, "eta", sc.eta);
        read_field(s, "max_outer_iter", sc.max_outer_iter);
        read_field(s, "obj_tol", sc.obj_tol);
        read_field(s, "laplacian_threshold", sc.laplacian_threshold);
        read_field(s, "learn_tau", sc.learn_tau);
        read_field(s, "rng_seed", sc.rng_seed);
        read_field(s, "max_backtracks", sc.max_backtracks);
        read_field(s, "qp_tol", sc.qp.tol);
        read_field(s, "qp_max_iter", sc.qp.max_iter);
    }
    return cfg;
}

ordered_json config_to_json(const ExperimentConfig &cfg) {
    ordered_json j;
    j["graph_model"] = to_string(cfg.graph_model);
    j["n"] = cfg.n;
    j["taus_true"] = cfg.resolved_taus_true().values();
    j["m_signals"] = cfg.m_signals;
    j["atoms_per_signal"] = cfg.atoms_per_signal;
    j["noise_std"] = cfg.noise_std;
    j["alpha_grid"] = cfg.alpha_grid;
    j["beta_grid"] = cfg.beta_grid;
    const SolverConfig &s = cfg.solver;
    j["solver"] = ordered_json{{"alpha", s.alpha},
                               {"beta", s.beta},
                               {"tau_init", s.tau_init.values()},
                               {"gamma1", s.gamma1},
                               {"gamma2", s.gamma2},
                               {"gamma3", s.gamma3},
                               {"eta", s.eta},
                               {"max_outer_iter", s.max_outer_iter},
                               {"obj_tol", s.obj_tol},
                               {"laplacian_threshold", s.laplacian_threshold},
                               {"learn_tau", s.learn_tau},
                               {"rng_seed", s.rng_seed},
                               {"max_backtracks", s.max_backtracks},
                               {"qp_tol", s.qp.tol},
                               {"qp_max_iter", s.qp.max_iter}};
    j["seeds"] = cfg.seeds;
    j["output_dir"] = cfg.output_dir.string();
    j["jobs"] = cfg.jobs;
    j["checkpoint_every"] = cfg.checkpoint_every;
    j["rbf_sigma"] = cfg.rbf_sigma;
    j["rbf_kappa"] = cfg.rbf_kappa;
    j["er_p"] = cfg.er_p;
    j["ba_m"] = cfg.ba_m;
    j["graph_path"] = cfg.graph_path.string();
    j["truth_path"] = cfg.truth_path.string();
    std::vector<std::string> learned;
    for (const auto &p : cfg.learned_paths) learned.push_back(p.string());
    j["learned_paths"] = learned;
    j["localization_taus"] = cfg.localization_taus;
    j["localization_alphas"] = cfg.localization_alphas;
    j["n_test"] = cfg.n_test;
    j["s_sources"] = cfg.s_sources;
    j["approximation_alphas"] = cfg.approximation_alphas;
    return j;
}

ExperimentConfig load_config(const fs::path &path, ExperimentConfig base) {
    const std::string text = read_text_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j, std::move(base));
}

ExperimentConfig apply_overrides(ExperimentConfig cfg, const CliOverrides &flags, const char *env_jobs) {
    if (flags.seed) cfg.seeds = {*flags.seed};
    if (flags.jobs) cfg.jobs = *flags.jobs;
    if (flags.output) cfg.output_dir = *flags.output;
    if (flags.alpha) cfg.alpha_grid = {*flags.alpha};
    if (flags.beta) cfg.beta_grid = {*flags.beta};
    if (flags.fix_tau) {
        if (flags.s_scales && static_cast<std::size_t>(*flags.s_scales) != flags.fix_tau->size())
            throw ConfigError("--fix-tau gives " + std::to_string(flags.fix_tau->size()) +
                              " scales but --s-scales is " + std::to_string(*flags.s_scales));
        try {
            cfg.solver.tau_init = TauVector(*flags.fix_tau);
        } catch (const InvalidArgument &e) {
            throw ConfigError(std::string("--fix-tau: ") + e.what());
        }
        cfg.solver.learn_tau = false;
    } else if (flags.s_scales) {
        cfg.solver.tau_init = default_tau_init(*flags.s_scales);
    }
    if (env_jobs && *env_jobs) {
        try {
            std::size_t used = 0;
            const int jobs = std::stoi(env_jobs, &used);
            if (used != std::string(env_jobs).size()) throw std::invalid_argument("trailing characters");
            cfg.jobs = jobs;
        } catch (const std::exception &) {
            throw ConfigError(std::string("HEATGRAPH_JOBS must be an integer, got '") + env_jobs + "'");
        }
    }
    return cfg;
}

std::string version_string() { return HEATGRAPH_VERSION; }

GeneratedData generate_data(const ExperimentConfig &cfg, std::uint64_t seed) {
    const std::uint64_t graph_seed = derived_seed(seed, 0);
    Laplacian truth = [&] {
        switch (cfg.graph_model) {
        case GraphModel::rbf:
            return laplacian_from_weights(generate_rbf_graph(cfg.n, cfg.rbf_sigma, cfg.rbf_kappa, graph_seed).weights);
        case GraphModel::er: return laplacian_from_weights(generate_er_graph(cfg.n, cfg.er_p, graph_seed));
        case GraphModel::ba: return laplacian_from_weights(generate_ba_graph(cfg.n, cfg.ba_m, graph_seed));
        case GraphModel::from_file:
            if (cfg.graph_path.empty()) throw ConfigError("graph_model from_file requires graph_path");
            return read_laplacian_csv(cfg.graph_path);
        }
        throw ConfigError("unknown graph model");
    }();
    truth = normalize_trace(truth);
    HeatDictionary dict(eig_sym(truth.matrix()), cfg.resolved_taus_true());
    SyntheticSignals signals =
        generate_synthetic_signals(dict, cfg.m_signals, cfg.atoms_per_signal, cfg.noise_std, derived_seed(seed, 1));
    return {std::move(truth), std::move(dict), std::move(signals)};
}

std::vector<fs::path> cmd_generate(const ExperimentConfig &cfg) {
    cfg.validate();
    std::vector<fs::path> dirs;
    for (std::uint64_t seed : cfg.seeds) {
        const GeneratedData data = generate_data(cfg, seed);
        const fs::path dir = cfg.output_dir / ("seed_" + std::to_string(seed));
        write_edge_list_csv(dir / "graph_edges.csv", weights_from_laplacian(data.truth));
        write_matrix_csv(dir / "laplacian.csv", data.truth.matrix());
        write_matrix_csv(dir / "signals.csv", data.signals.x);
        write_matrix_csv(dir / "codes.csv", data.signals.h.matrix());
        ordered_json extra;
        extra["command"] = "generate";
        extra["seed"] = seed;
        extra["graph_seed"] = derived_seed(seed, 0);
        extra["signal_seed"] = derived_seed(seed, 1);
        extra["taus_true"] = data.dict.taus().values();
        extra["files"] = {"graph_edges.csv", "laplacian.csv", "signals.csv", "codes.csv"};
        write_json(dir / "manifest.json", manifest(cfg, extra));
        dirs.push_back(dir);
    }
    return dirs;
}

LearnSummary cmd_learn(const fs::path &signals_path, const ExperimentConfig &cfg) {
    cfg.validate();
    const SignalMatrix x = read_matrix_csv(signals_path);
    const bool real_data = cfg.graph_model == GraphModel::from_file;
    std::optional<Laplacian> truth;
    if (!real_data && !cfg.truth_path.empty()) {
        truth = read_laplacian_csv(cfg.truth_path);
        if (truth->size() != x.rows())
            throw InvalidArgument("signals have " + std::to_string(x.rows()) + " rows but the ground truth has " +
                                  std::to_string(truth->size()) + " vertices");
    }
    const std::vector<double> ladder =
        cfg.approximation_alphas.empty() ? default_localization_alphas() : cfg.approximation_alphas;

    struct Job {
        std::size_t a, b, s;
    };
    std::vector<Job> jobs;
    for (std::size_t a = 0; a < cfg.alpha_grid.size(); ++a)
        for (std::size_t b = 0; b < cfg.beta_grid.size(); ++b)
            for (std::size_t s = 0; s < cfg.seeds.size(); ++s) jobs.push_back({a, b, s});

    const fs::path cells_dir = cfg.output_dir / "cells";
    std::vector<CellResult> results(jobs.size());

    run_pool(jobs.size(), cfg.jobs, [&](std::size_t k) {
        const Job &job = jobs[k];
        const std::uint64_t seed = cfg.seeds[job.s];
        const fs::path dir = cells_dir / cell_name(job.a, job.b) / ("seed_" + std::to_string(seed));
        const fs::path result_path = dir / "result.json";
        if (fs::exists(result_path)) {
            results[k] = load_cell(result_path);
            return;
        }
        SolverConfig sc = cfg.solver;
        sc.alpha = cfg.alpha_grid[job.a];
        sc.beta = cfg.beta_grid[job.b];
        sc.rng_seed = seed;

        IterationObserver observer;
        if (cfg.checkpoint_every > 0) {
            observer = [&, dir](const SolverState &state) {
                if (state.iteration % cfg.checkpoint_every != 0) return;
                write_matrix_csv(dir / "checkpoint_laplacian.csv", state.l.matrix());
                write_matrix_csv(dir / "checkpoint_codes.csv", state.h.matrix());
                ordered_json cp;
                cp["iteration"] = state.iteration;
                cp["objective_history"] = state.objective_history;
                cp["taus"] = state.taus().values();
                cp["laplacian_csv_path"] = "checkpoint_laplacian.csv";
                cp["sparse_codes_csv_path"] = "checkpoint_codes.csv";
                write_json(dir / "checkpoint.json", cp);
            };
        }

        ordered_json result;
        result["alpha"] = sc.alpha;
        result["beta"] = sc.beta;
        result["seed"] = seed;
        CellResult cell;
        try {
            const LearnResult r = learn(x, sc, std::nullopt, observer);
            write_matrix_csv(dir / "laplacian.csv", r.l.matrix());
            write_matrix_csv(dir / "codes.csv", r.h.matrix());
            write_text_file(dir / "objective_history.csv", format_vector_csv(r.objective_history));
            result["status"] = "ok";
            result["taus"] = r.taus.values();
            result["iterations"] = r.iterations;
            result["converged"] = r.converged;
            cell.final_objective = r.objective_history.back();
            result["final_objective"] = cell.final_objective;
            if (truth) {
                cell.report = evaluate_recovery(r.l, *truth, sc.laplacian_threshold);
                result["report"] = report_json(*cell.report);
            }
            if (real_data) {
                const HeatDictionary dict(eig_sym(r.l.matrix()), r.taus);
                std::ostringstream csv;
                csv << std::setprecision(17) << "alpha,nonzeros,approximation_error\n";
                for (double alpha : ladder) {
                    const Eigen::MatrixXd h = ista_recover_all(x, dict, IstaConfig{alpha, 1000, std::nullopt, 1e-6});
                    const double err = (x - dict.atoms() * h).squaredNorm();
                    csv << alpha << ',' << (h.array() != 0.0).count() << ',' << err << '\n';
                }
                write_text_file(dir / "approximation.csv", csv.str());
            }
        } catch (const NumericalFailure &e) {
            cell.failed = true;
            result["status"] = "numerical_failure";
            result["error"] = e.what();
        }
        write_json(result_path, result);
        results[k] = cell;
    });

    LearnSummary summary;
    ordered_json cells_json = ordered_json::array();
    for (std::size_t a = 0; a < cfg.alpha_grid.size(); ++a) {
        for (std::size_t b = 0; b < cfg.beta_grid.size(); ++b) {
            CellSummary cell;
            cell.alpha = cfg.alpha_grid[a];
            cell.beta = cfg.beta_grid[b];
            for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
                const CellResult &r = results[(a * cfg.beta_grid.size() + b) * cfg.seeds.size() + s];
                if (r.failed) {
                    ++cell.failures;
                    continue;
                }
                cell.seeds.push_back(cfg.seeds[s]);
                cell.final_objectives.push_back(r.final_objective);
                if (r.report) cell.reports.push_back(*r.report);
            }
            for (const auto &r : cell.reports) {
                const double w = 1.0 / static_cast<double>(cell.reports.size());
                cell.mean.precision += w * r.precision;
                cell.mean.recall += w * r.recall;
                cell.mean.f_measure += w * r.f_measure;
                cell.mean.nmi += w * r.nmi;
                cell.mean.l2_weight_error += w * r.l2_weight_error;
            }
            ordered_json cj;
            cj["alpha"] = cell.alpha;
            cj["beta"] = cell.beta;
            cj["directory"] = (fs::path("cells") / cell_name(a, b)).string();
            cj["seeds"] = cell.seeds;
            cj["failures"] = cell.failures;
            cj["final_objectives"] = cell.final_objectives;
            if (truth) {
                cj["mean"] = report_json(cell.mean);
                std::vector<double> fs_;
                for (const auto &r : cell.reports) fs_.push_back(r.f_measure);
                cj["f_measure_per_seed"] = fs_;
            }
            cells_json.push_back(cj);
            summary.cells.push_back(std::move(cell));
        }
    }
    if (truth) {
        for (std::size_t c = 0; c < summary.cells.size(); ++c) {
            if (summary.cells[c].reports.empty()) continue;
            if (!summary.best || summary.cells[c].mean.f_measure > summary.cells[*summary.best].mean.f_measure)
                summary.best = c;
        }
    }
    bool any_ok = false;
    for (const auto &c : summary.cells) any_ok = any_ok || !c.seeds.empty();
    if (!any_ok) throw NumericalFailure("every grid cell failed", 0.0);

    ordered_json sj = manifest(cfg, ordered_json{{"command", "learn"}, {"signals_path", signals_path.string()}});
    sj["ground_truth"] = truth.has_value();
    sj["cells"] = cells_json;
    if (summary.best) {
        const CellSummary &best = summary.cells[*summary.best];
        ordered_json bj = report_json(best.mean);
        bj["alpha"] = best.alpha;
        bj["beta"] = best.beta;
        sj["best"] = bj;
    } else {
        sj["best"] = nullptr;
    }
    summary.summary_path = cfg.output_dir / "summary.json";
    write_json(summary.summary_path, sj);
    return summary;
}

fs::path cmd_localize(const ExperimentConfig &cfg) {
    cfg.validate();
    if (cfg.truth_path.empty()) throw ConfigError("localize requires truth_path");
    if (cfg.learned_paths.empty()) throw IoError("missing learned-graph artifacts: no learned_paths given");
    const std::vector<fs::path> learned_files = collect_learned(cfg.learned_paths);
    if (learned_files.empty()) throw IoError("missing learned-graph artifacts: no laplacian.csv found");

    const Laplacian truth = read_laplacian_csv(cfg.truth_path);
    std::vector<Laplacian> learned;
    for (const auto &p : learned_files) learned.push_back(read_laplacian_csv(p));

    SweepOptions options;
    options.taus = cfg.localization_taus.empty() ? default_localization_taus() : cfg.localization_taus;
    options.alphas = cfg.localization_alphas.empty() ? default_localization_alphas() : cfg.localization_alphas;
    options.n_test = cfg.n_test;
    options.s_sources = cfg.s_sources;
    options.seed = cfg.seeds.front();
    const std::vector<SweepRow> rows = localization_sweep(truth, learned, options);

    const fs::path out = cfg.output_dir / "localization.csv";
    write_text_file(out, sweep_to_csv(rows));
    std::vector<std::string> names;
    for (const auto &p : learned_files) names.push_back(p.string());
    write_json(cfg.output_dir / "manifest.json",
               manifest(cfg, ordered_json{{"command", "localize"}, {"learned_files", names}}));
    return out;
}

EdgeRecoveryReport cmd_eval(const fs::path &learned_path, const fs::path &truth_path, double eps) {
    const Laplacian learned = read_laplacian_csv(learned_path);
    const Laplacian truth = read_laplacian_csv(truth_path);
    if (learned.size() != truth.size())
        throw InvalidArgument("learned graph has " + std::to_string(learned.size()) + " vertices, ground truth has " +
                              std::to_string(truth.size()));
    return evaluate_recovery(threshold_laplacian(learned, eps), truth, eps);
}

} // namespace heatgraph
