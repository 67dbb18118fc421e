#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "runcount/de.hpp"
#include "runcount/error.hpp"
#include "runcount/evaluation.hpp"
#include "runcount/problems.hpp"
#include "runcount/stopping_rule.hpp"

namespace runcount::app {

/// Everything an experiment needs. Keys of the JSON config file match the
/// field names; missing keys keep the defaults below.
struct ExperimentConfig {
    std::vector<std::size_t> dimensions = {10};
    std::vector<ProblemId> problems = {kAllProblems.begin(), kAllProblems.end()};
    std::size_t instances_per_problem = 5;
    std::size_t de_config_count = 10;
    std::size_t runs_per_triplet = kGroundTruthRuns;
    std::vector<double> taus = {0.05, 0.10, 0.15, 0.20};
    std::vector<OutlierMethod> outlier_methods = {OutlierMethod::IQR, OutlierMethod::Percentile,
                                                  OutlierMethod::ModifiedZ};
    std::size_t repetitions = 10;
    std::size_t bootstrap_resamples = 1000;
    std::uint64_t master_seed = 1;
    unsigned threads = 1;
    std::size_t initial_runs = 5;
    std::size_t max_runs = kGroundTruthRuns;
    std::size_t evals_per_dimension = 10'000;
    std::size_t stagnation_iters = 100;
    double target_error = 1e-8;

    /// Throws BadConfig.
    void validate() const;
};

[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json config_to_json(const ExperimentConfig& c);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

struct RunDataRow {
    std::string algorithm_id;
    std::string problem_id;
    int instance_id = 1;
    std::size_t dimension = 0;
    std::size_t run_index = 1;
    double error = 0.0;

    friend bool operator==(const RunDataRow&, const RunDataRow&) = default;
};

/// Sorts by (algorithm_id, problem_id, instance_id, dimension, run_index).
void canonical_sort(std::vector<RunDataRow>& rows);

/// Shortest representation that parses back to the same double.
[[nodiscard]] std::string format_double(double v);

void write_run_data(std::ostream& out, const std::vector<RunDataRow>& rows);
/// Validates the header and every row. Throws SchemaError or ParseError.
[[nodiscard]] std::vector<RunDataRow> read_run_data(std::istream& in);

/// Groups rows into ground-truth sets of the first `runs_per_triplet` runs of
/// each cell, ordered by cell key. Throws InsufficientRuns or SchemaError.
[[nodiscard]] std::vector<GroundTruthSet> group_ground_truth(const std::vector<RunDataRow>& rows,
                                                             std::size_t runs_per_triplet);

void write_records(std::ostream& out, const std::vector<EvaluationRecord>& records);
[[nodiscard]] std::vector<EvaluationRecord> read_records(std::istream& in);
void write_accuracy(std::ostream& out, const AccuracyTable& table);
void write_savings(std::ostream& out, const std::vector<SavingsReport>& reports);
[[nodiscard]] nlohmann::json savings_to_json(const std::vector<SavingsReport>& reports);

struct BenchmarkOutput {
    std::vector<RunDataRow> rows;   // canonical order
    nlohmann::json manifest;
};

/// Seed of one optimizer run.
[[nodiscard]] std::uint64_t run_seed(std::uint64_t master_seed, std::string_view algorithm_id, const Triplet& triplet,
                                     std::size_t run_index);

/// "de-000", "de-001", ...
[[nodiscard]] std::string algorithm_id_for(std::size_t index);

[[nodiscard]] std::vector<Triplet> triplets_of(const ExperimentConfig& config);

/// Samples DE configurations, then executes runs_per_triplet seeded runs for
/// every configuration and triplet.
[[nodiscard]] BenchmarkOutput run_benchmark(const ExperimentConfig& config);

struct EvaluationOutput {
    std::vector<EvaluationRecord> records;
    AccuracyTable accuracy;
};

[[nodiscard]] EvaluationOutput run_evaluation_on(const std::vector<RunDataRow>& rows, const ExperimentConfig& config);

/// Online mode: reads one value per line, prints one decision line per value
/// from the initial_runs-th onward. Returns once the estimator stops, is
/// exhausted, or the input ends. Throws ParseError (with line number),
/// NonFiniteValue or EmptyInput.
void estimate_stream(std::istream& in, std::ostream& out, const EstimatorConfig& config);

/// File-level wrappers used by the CLI.
void cmd_benchmark(const ExperimentConfig& config, const std::filesystem::path& out_csv);
void cmd_evaluate(const std::filesystem::path& runs_csv, const ExperimentConfig& config,
                  const std::filesystem::path& out_dir);
void cmd_report(const std::filesystem::path& records_csv, std::size_t runs_per_triplet,
                const std::filesystem::path& out_dir);

/// Exit code for an error kind: 2 usage/config, 3 data/schema, 4 runtime.
[[nodiscard]] int exit_code_for(ErrorKind kind) noexcept;

}  // namespace runcount::app
