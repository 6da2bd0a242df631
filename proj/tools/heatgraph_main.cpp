#include "heatgraph/errors.hpp"
#include "heatgraph/experiment.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kNumericalFailure = 3, kIoError = 4 };

std::vector<double> parse_tau_list(const std::string &text) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string field;
    while (std::getline(is, field, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(field, &used));
            if (used != field.size()) throw std::invalid_argument(field);
        } catch (const std::exception &) {
            throw heatgraph::ConfigError("--fix-tau: cannot parse '" + field + "'");
        }
    }
    if (out.empty()) throw heatgraph::ConfigError("--fix-tau needs at least one value");
    return out;
}

} // namespace

int main(int argc, char **argv) {
    using namespace heatgraph;

    CLI::App app{"Learn graph topologies from signals generated by heat diffusion."};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);

    std::string config_path;
    CliOverrides flags;
    std::string fix_tau;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string output;
    double alpha = 0.0, beta = 0.0;
    Index s_scales = 0;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Run a single seed");
        sub->add_option("--jobs", jobs, "Worker threads (HEATGRAPH_JOBS overrides)");
        sub->add_option("--output", output, "Output directory");
    };

    CLI::App *gen = app.add_subcommand("generate", "Generate a ground-truth graph and signals");
    add_common(gen);

    CLI::App *lrn = app.add_subcommand("learn", "Learn graphs over the (alpha, beta) grid");
    add_common(lrn);
    std::string signals_path, truth_path;
    lrn->add_option("signals", signals_path, "Signals CSV (N rows, M columns)")->required();
    lrn->add_option("--truth", truth_path, "Ground-truth Laplacian CSV");
    lrn->add_option("--alpha", alpha, "Single alpha instead of the grid");
    lrn->add_option("--beta", beta, "Single beta instead of the grid");
    lrn->add_option("--fix-tau", fix_tau, "Fixed scales, e.g. \"2.5,4\"");
    lrn->add_option("--s-scales", s_scales, "Number of scales")->check(CLI::PositiveNumber);

    CLI::App *loc = app.add_subcommand("localize", "Source localization sweep over tau");
    add_common(loc);
    std::vector<std::string> learned_paths;
    loc->add_option("--truth", truth_path, "Ground-truth Laplacian CSV");
    loc->add_option("--learned", learned_paths, "Learned Laplacian CSVs or directories holding laplacian.csv");

    CLI::App *evl = app.add_subcommand("eval", "Compare a learned Laplacian with the ground truth");
    std::string eval_learned, eval_truth, eval_output;
    double eval_eps = 1e-4;
    evl->add_option("learned", eval_learned, "Learned Laplacian CSV")->required();
    evl->add_option("truth", eval_truth, "Ground-truth Laplacian CSV")->required();
    evl->add_option("--threshold", eval_eps, "Edge threshold");
    evl->add_option("--output", eval_output, "Write the report JSON to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (evl->parsed()) {
            const EdgeRecoveryReport report = cmd_eval(eval_learned, eval_truth, eval_eps);
            const std::string text = to_json(report);
            if (!eval_output.empty()) {
                std::ofstream out(eval_output);
                if (!(out << text << '\n')) throw IoError("cannot write " + eval_output);
            }
            std::cout << text << '\n';
            return kOk;
        }

        CLI::App *sub = gen->parsed() ? gen : lrn->parsed() ? lrn : loc;
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        if (sub->count("--seed")) flags.seed = seed;
        if (sub->count("--jobs")) flags.jobs = jobs;
        if (sub->count("--output")) flags.output = output;
        if (sub == lrn) {
            if (lrn->count("--alpha")) flags.alpha = alpha;
            if (lrn->count("--beta")) flags.beta = beta;
            if (lrn->count("--fix-tau")) flags.fix_tau = parse_tau_list(fix_tau);
            if (lrn->count("--s-scales")) flags.s_scales = s_scales;
        }
        if (!truth_path.empty()) cfg.truth_path = truth_path;
        if (!learned_paths.empty()) cfg.learned_paths.assign(learned_paths.begin(), learned_paths.end());
        cfg = apply_overrides(std::move(cfg), flags);

        if (sub == gen) {
            for (const auto &dir : cmd_generate(cfg)) std::cout << dir.string() << '\n';
        } else if (sub == lrn) {
            const LearnSummary summary = cmd_learn(signals_path, cfg);
            std::cout << summary.summary_path.string() << '\n';
            if (summary.best) {
                const CellSummary &best = summary.cells[*summary.best];
                std::cout << "best alpha=" << best.alpha << " beta=" << best.beta
                          << " f_measure=" << best.mean.f_measure << '\n';
            }
        } else {
            std::cout << cmd_localize(cfg).string() << '\n';
        }
        return kOk;
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InvalidArgument &e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kConfigError;
    } catch (const DegenerateGraphError &e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kConfigError;
    } catch (const NumericalFailure &e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const IoError &e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    }
}
