#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "runcount/app.hpp"
#include "runcount/error.hpp"

using namespace runcount;

namespace {

struct Overrides {
    std::string config_path;
    std::vector<double> taus;
    std::vector<std::string> methods;
    std::optional<std::size_t> max_runs;
    std::optional<std::size_t> initial_runs;
    std::optional<std::size_t> resamples;
    std::optional<std::size_t> repetitions;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::vector<std::size_t> dims;
    std::vector<std::string> problems;
    std::optional<std::size_t> instances;
    std::optional<std::size_t> configs;
    std::optional<std::size_t> runs;
    std::optional<std::size_t> budget_per_dim;
    std::optional<std::size_t> stagnation_iters;
    std::optional<double> target_error;
};

void add_experiment_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON experiment config; flags override its keys")->check(CLI::ExistingFile);
    cmd->add_option("--tau", o.taus, "Skewness threshold(s)")->delimiter(',');
    cmd->add_option("--outlier-method", o.methods, "IQR, Percentile and/or MAD")->delimiter(',');
    cmd->add_option("--max-runs", o.max_runs, "Run cap per estimate");
    cmd->add_option("--initial-runs", o.initial_runs, "Runs before the first symmetry check");
    cmd->add_option("--bootstrap-resamples", o.resamples, "Bootstrap resamples M");
    cmd->add_option("--repetitions", o.repetitions, "Bootstrap repetitions per cell");
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--threads", o.threads, "Worker threads");
    cmd->add_option("--dims", o.dims, "Problem dimensions")->delimiter(',');
    cmd->add_option("--problems", o.problems, "Problem names")->delimiter(',');
    cmd->add_option("--instances", o.instances, "Instances per problem");
    cmd->add_option("--configs", o.configs, "Number of sampled DE configurations");
    cmd->add_option("--runs", o.runs, "Runs per triplet");
    cmd->add_option("--budget-per-dim", o.budget_per_dim, "Evaluation budget per dimension");
    cmd->add_option("--stagnation-iters", o.stagnation_iters, "Generations without improvement before stopping");
    cmd->add_option("--target-error", o.target_error, "Error at which a run counts as solved");
}

app::ExperimentConfig resolve(const Overrides& o) {
    app::ExperimentConfig c = o.config_path.empty() ? app::ExperimentConfig{} : app::load_config(o.config_path);
    if (o.config_path.empty()) c.threads = std::max(1u, std::thread::hardware_concurrency());
    if (!o.taus.empty()) c.taus = o.taus;
    if (!o.methods.empty()) {
        c.outlier_methods.clear();
        for (const auto& m : o.methods) c.outlier_methods.push_back(parse_outlier_method(m));
    }
    if (o.max_runs) c.max_runs = *o.max_runs;
    if (o.initial_runs) c.initial_runs = *o.initial_runs;
    if (o.resamples) c.bootstrap_resamples = *o.resamples;
    if (o.repetitions) c.repetitions = *o.repetitions;
    if (o.seed) c.master_seed = *o.seed;
    if (o.threads) c.threads = *o.threads;
    if (!o.dims.empty()) c.dimensions = o.dims;
    if (!o.problems.empty()) {
        c.problems.clear();
        for (const auto& p : o.problems) c.problems.push_back(parse_problem_id(p));
    }
    if (o.instances) c.instances_per_problem = *o.instances;
    if (o.configs) c.de_config_count = *o.configs;
    if (o.runs) c.runs_per_triplet = *o.runs;
    if (o.budget_per_dim) c.evals_per_dimension = *o.budget_per_dim;
    if (o.stagnation_iters) c.stagnation_iters = *o.stagnation_iters;
    if (o.target_error) c.target_error = *o.target_error;
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Adaptive run-count estimation for stochastic optimizers"};
    cli.require_subcommand(1);

    Overrides bench_opts;
    std::string bench_out = "runs.csv";
    auto* bench = cli.add_subcommand("benchmark", "Run seeded DE configurations on the problem suite");
    add_experiment_flags(bench, bench_opts);
    bench->add_option("--out", bench_out, "Run-data CSV to write (manifest goes next to it)");

    std::string est_input;
    double est_tau = 0.05;
    std::string est_method = "MAD";
    std::size_t est_max_runs = 50;
    std::size_t est_initial_runs = 5;
    auto* est = cli.add_subcommand("estimate", "Online stopping decisions for values read one per line");
    est->add_option("input", est_input, "File with one value per line (default: standard input)");
    est->add_option("--tau", est_tau, "Skewness threshold");
    est->add_option("--outlier-method", est_method, "IQR, Percentile or MAD");
    est->add_option("--max-runs", est_max_runs, "Run cap");
    est->add_option("--initial-runs", est_initial_runs, "Runs before the first symmetry check");

    Overrides eval_opts;
    std::string eval_input;
    std::string eval_out = "evaluation";
    auto* eval = cli.add_subcommand("evaluate", "Evaluate run-count estimates against 50-run ground truths");
    eval->add_option("runs_csv", eval_input, "Run-data CSV")->required();
    add_experiment_flags(eval, eval_opts);
    eval->add_option("--out", eval_out, "Output directory for records.csv and accuracy.csv");

    std::string report_input;
    std::string report_out = "report";
    std::size_t report_runs = 50;
    auto* report = cli.add_subcommand("report", "Savings accounting from a records CSV");
    report->add_option("records_csv", report_input, "Records CSV from 'evaluate'")->required();
    report->add_option("--runs", report_runs, "Runs per triplet of the full budget");
    report->add_option("--out", report_out, "Output directory for savings.csv and savings.json");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*bench) {
            app::cmd_benchmark(resolve(bench_opts), bench_out);
        } else if (*est) {
            EstimatorConfig cfg;
            cfg.tau = est_tau;
            cfg.outlier_method = parse_outlier_method(est_method);
            cfg.max_runs = est_max_runs;
            cfg.initial_runs = est_initial_runs;
            cfg.validate();
            if (est_input.empty() || est_input == "-") {
                app::estimate_stream(std::cin, std::cout, cfg);
            } else {
                std::ifstream in(est_input);
                if (!in) throw Error(ErrorKind::IoError, "cannot read " + est_input);
                app::estimate_stream(in, std::cout, cfg);
            }
        } else if (*eval) {
            app::cmd_evaluate(eval_input, resolve(eval_opts), eval_out);
        } else if (*report) {
            app::cmd_report(report_input, report_runs, report_out);
        }
    } catch (const Error& e) {
        std::cerr << "runcount: " << e.what() << '\n';
        return app::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "runcount: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
