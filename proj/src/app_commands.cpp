#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "runcount/app.hpp"
#include "runcount/error.hpp"
#include "runcount/parallel.hpp"
#include "runcount/rng.hpp"

namespace runcount::app {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
    return in;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

std::uint64_t run_seed(std::uint64_t master_seed, std::string_view algorithm_id, const Triplet& triplet,
                       std::size_t run_index) {
    return derive_seed({hash_string("de-run"), master_seed, hash_string(algorithm_id),
                        static_cast<std::uint64_t>(triplet.problem), static_cast<std::uint64_t>(triplet.instance_id),
                        triplet.dimension, run_index});
}

std::string algorithm_id_for(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "de-%03zu", index);
    return buf;
}

std::vector<Triplet> triplets_of(const ExperimentConfig& config) {
    std::vector<Triplet> out;
    for (auto d : config.dimensions)
        for (auto p : config.problems)
            for (std::size_t i = 1; i <= config.instances_per_problem; ++i)
                out.push_back({p, static_cast<int>(i), d});
    return out;
}

BenchmarkOutput run_benchmark(const ExperimentConfig& config) {
    config.validate();
    const auto configs = sample_config_space(config.de_config_count, config.master_seed);
    const auto triplets = triplets_of(config);

    std::vector<ProblemInstance> instances;
    instances.reserve(triplets.size());
    for (const auto& t : triplets) instances.push_back(make_instance(t.problem, t.instance_id, t.dimension));

    for (const auto& c : configs) {
        for (auto d : config.dimensions) {
            if (c.resolved_population(d) < min_population(c.strategy)) {
                throw Error(ErrorKind::BadConfig, "dimension " + std::to_string(d) + " is too small for " +
                                                      std::string(to_string(c.strategy)));
            }
        }
    }

    BudgetSpec budget;
    budget.evals_per_dimension = config.evals_per_dimension;
    budget.stagnation_iters = config.stagnation_iters;
    budget.target_error = config.target_error;

    const std::size_t runs = config.runs_per_triplet;
    const std::size_t per_config = triplets.size() * runs;
    std::vector<RunDataRow> rows(configs.size() * per_config);
    std::vector<std::uint64_t> seeds(rows.size());

    parallel_for(rows.size(), config.threads, [&](std::size_t idx) {
        const std::size_t c = idx / per_config;
        const std::size_t t = (idx % per_config) / runs;
        const std::size_t run_index = idx % runs + 1;
        const std::string alg = algorithm_id_for(c);
        const std::uint64_t seed = run_seed(config.master_seed, alg, triplets[t], run_index);
        const RunResult res = de_run(instances[t], configs[c], budget, seed);
        rows[idx] = {alg, std::string(to_string(triplets[t].problem)), triplets[t].instance_id, triplets[t].dimension,
                     run_index, res.best_error};
        seeds[idx] = seed;
    });

    BenchmarkOutput out;
    out.manifest["config"] = config_to_json(config);
    out.manifest["seed_derivation"] =
        "splitmix64 fold over (fnv1a64(\"de-run\"), master_seed, fnv1a64(algorithm_id), problem index, instance_id, "
        "dimension, run_index)";
    nlohmann::json algorithms = nlohmann::json::array();
    for (std::size_t c = 0; c < configs.size(); ++c) {
        algorithms.push_back({{"algorithm_id", algorithm_id_for(c)},
                              {"strategy", to_string(configs[c].strategy)},
                              {"f", configs[c].f},
                              {"cr", configs[c].cr},
                              {"population_size", "dimension"}});
    }
    out.manifest["algorithms"] = algorithms;
    nlohmann::json seed_table = nlohmann::json::array();
    for (std::size_t cell = 0; cell * runs < rows.size(); ++cell) {
        const auto& first = rows[cell * runs];
        seed_table.push_back({{"algorithm_id", first.algorithm_id},
                              {"problem_id", first.problem_id},
                              {"instance_id", first.instance_id},
                              {"dimension", first.dimension},
                              {"run_seeds", std::vector<std::uint64_t>(seeds.begin() + static_cast<std::ptrdiff_t>(cell * runs),
                                                                       seeds.begin() + static_cast<std::ptrdiff_t>((cell + 1) * runs))}});
    }
    out.manifest["runs"] = seed_table;
    out.manifest["total_runs"] = rows.size();

    canonical_sort(rows);
    out.rows = std::move(rows);
    return out;
}

EvaluationOutput run_evaluation_on(const std::vector<RunDataRow>& rows, const ExperimentConfig& config) {
    config.validate();
    const auto truths = group_ground_truth(rows, config.runs_per_triplet);
    if (truths.empty()) throw Error(ErrorKind::EmptyInput, "run data has no rows");

    EvaluationPlan plan;
    plan.taus = config.taus;
    plan.methods = config.outlier_methods;
    plan.repetitions = config.repetitions;
    plan.resamples = config.bootstrap_resamples;
    plan.master_seed = config.master_seed;
    plan.initial_runs = config.initial_runs;
    plan.max_runs = config.max_runs;
    plan.threads = config.threads;

    EvaluationOutput out;
    out.records = run_evaluation(truths, plan);
    out.accuracy = aggregate_accuracy(out.records);
    return out;
}

void estimate_stream(std::istream& in, std::ostream& out, const EstimatorConfig& config) {
    EstimatorState state(config);
    std::string line;
    std::size_t line_no = 0;
    std::size_t values = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty()) continue;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": not a number: '" +
                                                   std::string(text) + "'");
        }
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::NonFiniteValue, "line " + std::to_string(line_no) + ": value is not finite");
        }
        ++values;
        state = observe(std::move(state), v);

        if (state.phase() == EstimatorPhase::Stopped) {
            out << "STOP n=" << state.runs() << '\n';
            return;
        }
        if (state.phase() == EstimatorPhase::Exhausted) {
            out << "EXHAUSTED n=" << state.runs() << '\n';
            return;
        }
        if (const auto& a = state.last_assessment(); a && state.runs() >= config.initial_runs) {
            char skew[64];
            if (a->computable()) {
                std::snprintf(skew, sizeof skew, "%.4f", a->skewness_value);
            } else {
                std::snprintf(skew, sizeof skew, "inf");
            }
            out << "CONTINUE skew=" << skew << " removed=" << a->outliers_removed << '\n';
        }
    }
    if (values == 0) throw Error(ErrorKind::EmptyInput, "no values on input");
}

void cmd_benchmark(const ExperimentConfig& config, const std::filesystem::path& out_csv) {
    const BenchmarkOutput result = run_benchmark(config);
    {
        auto out = open_out(out_csv);
        write_run_data(out, result.rows);
    }
    auto manifest_path = out_csv;
    manifest_path.replace_extension(".manifest.json");
    auto out = open_out(manifest_path);
    out << result.manifest.dump(2) << '\n';
}

void cmd_evaluate(const std::filesystem::path& runs_csv, const ExperimentConfig& config,
                  const std::filesystem::path& out_dir) {
    auto in = open_in(runs_csv);
    const auto rows = read_run_data(in);
    const EvaluationOutput result = run_evaluation_on(rows, config);
    {
        auto out = open_out(out_dir / "records.csv");
        write_records(out, result.records);
    }
    auto out = open_out(out_dir / "accuracy.csv");
    write_accuracy(out, result.accuracy);
}

void cmd_report(const std::filesystem::path& records_csv, std::size_t runs_per_triplet,
                const std::filesystem::path& out_dir) {
    auto in = open_in(records_csv);
    const auto records = read_records(in);
    if (records.empty()) throw Error(ErrorKind::EmptyInput, "records file has no rows");
    const auto reports = savings_report(records, runs_per_triplet);
    {
        auto out = open_out(out_dir / "savings.csv");
        write_savings(out, reports);
    }
    auto out = open_out(out_dir / "savings.json");
    out << savings_to_json(reports).dump(2) << '\n';
}

}  // namespace runcount::app
