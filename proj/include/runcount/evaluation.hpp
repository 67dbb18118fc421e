#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "runcount/problems.hpp"
#include "runcount/stats.hpp"
#include "runcount/stopping_rule.hpp"

namespace runcount {

inline constexpr std::size_t kGroundTruthRuns = 50;

/// Reference run set for one (algorithm, triplet) cell.
struct GroundTruthSet {
    Triplet triplet;
    std::string algorithm_id;
    RunSample runs;

    /// Throws BadParameters unless there are exactly kGroundTruthRuns
    /// finite, non-negative values.
    void validate() const;
};

/// Outcome classes, ordered from best to worst. The Le* bands are post-hoc
/// relative-error thresholds of 0.5, 1, 5, 10, 15 and 20 percent.
enum class VerdictBand { True, Le0_5, Le1, Le5, Le10, Le15, Le20, Fail };

inline constexpr std::size_t kBandColumns = 7;   // every band except Fail
inline constexpr std::array<double, 6> kPostHocThresholds = {0.005, 0.01, 0.05, 0.10, 0.15, 0.20};

std::string_view to_string(VerdictBand band) noexcept;
VerdictBand parse_verdict_band(std::string_view text);

struct EvaluationRecord {
    Triplet triplet;
    std::string algorithm_id;
    double tau = 0.0;
    OutlierMethod outlier_method = OutlierMethod::ModifiedZ;
    std::size_t repetition = 0;
    std::uint64_t bootstrap_seed = 0;
    std::size_t n = 0;
    bool converged = false;
    std::size_t m_e = 0;   // outliers removed from the estimated sample
    std::size_t m_t = 0;   // outliers removed from the ground truth
    ConfidenceInterval ci;
    bool ci_contains_zero = false;
    std::optional<bool> bca_contains_zero;   // empty when BCa was not needed
    VerdictBand verdict_band = VerdictBand::Fail;
    /// Share of bootstrap resamples whose estimated-side mean falls within each
    /// post-hoc threshold of the ground-truth bootstrap mean. Diagnostic only.
    std::array<double, 6> posthoc_frequency{};
    std::string diagnostic;
};

/// Smallest threshold (as a fraction, ascending list) with
/// |estimate - truth| <= threshold * |truth|. A zero truth mean only passes
/// when |estimate - truth| <= 1e-12, which is reported as the first band.
[[nodiscard]] VerdictBand post_hoc_band(double estimate_mean, double truth_mean,
                                        std::span<const double> thresholds = kPostHocThresholds);

/// Bootstrap judgment of the first `n` runs of `gt` against all of them:
/// outlier removal on both sides, percentile CI, BCa when the percentile CI
/// excludes zero, post-hoc band when both do.
[[nodiscard]] EvaluationRecord evaluate_prefix(const GroundTruthSet& gt, std::size_t n, const EstimatorConfig& config,
                                               std::size_t resamples, std::uint64_t bootstrap_seed);

/// Estimates n with the stopping rule replayed over gt.runs, then judges that
/// prefix with evaluate_prefix().
[[nodiscard]] EvaluationRecord evaluate_triplet(const GroundTruthSet& gt, const EstimatorConfig& config,
                                                std::size_t resamples, std::uint64_t bootstrap_seed);

struct AccuracyRow {
    double tau = 0.0;
    OutlierMethod outlier_method = OutlierMethod::ModifiedZ;
    /// Cumulative percentages: True, <=0.5%, <=1%, <=5%, <=10%, <=15%, <=20%.
    std::array<double, kBandColumns> pct{};
};

struct AccuracyTable {
    std::vector<AccuracyRow> rows;   // sorted by (tau, method)

    [[nodiscard]] const AccuracyRow* find(double tau, OutlierMethod method) const;
};

/// Per (algorithm, tau, method): percentage of triplets per repetition,
/// averaged over repetitions; then averaged over algorithms.
[[nodiscard]] AccuracyTable aggregate_accuracy(std::span<const EvaluationRecord> records);

struct SavingsReport {
    double tau = 0.0;
    OutlierMethod outlier_method = OutlierMethod::ModifiedZ;
    std::uint64_t total_runs = 0;
    std::uint64_t estimated_runs = 0;
    std::uint64_t saved_runs = 0;
    double pct_estimated = 0.0;
    double pct_saved = 0.0;
    double pct_accurate = 0.0;
    double expected_saved_runs = 0.0;
    double pct_expected_saved = 0.0;

    /// Derives every other field from the three counts.
    static SavingsReport from_counts(std::uint64_t total_runs, std::uint64_t estimated_runs, double pct_accurate);
};

/// One report per (tau, method) present in `records`, sorted by (tau, method).
/// Each distinct (algorithm, triplet) cell counts once, whatever the number of
/// repetitions; its n comes from its lowest repetition.
[[nodiscard]] std::vector<SavingsReport> savings_report(std::span<const EvaluationRecord> records,
                                                        std::size_t runs_per_triplet = kGroundTruthRuns);

struct EvaluationPlan {
    std::vector<double> taus;
    std::vector<OutlierMethod> methods;
    std::size_t repetitions = 10;
    std::size_t resamples = 1000;
    std::uint64_t master_seed = 0;
    std::size_t initial_runs = 5;
    std::size_t max_runs = kGroundTruthRuns;
    unsigned threads = 1;
};

/// Bootstrap seed of one evaluation cell. It depends on the repetition but not
/// on tau or the outlier method, so every (tau, method) row of a repetition
/// sees the same resampling stream.
[[nodiscard]] std::uint64_t bootstrap_seed_for(std::uint64_t master_seed, std::string_view algorithm_id,
                                               const Triplet& triplet, std::size_t repetition);

/// evaluate_triplet over every ground truth x tau x method x repetition.
/// Output is in that nesting order regardless of the thread count.
[[nodiscard]] std::vector<EvaluationRecord> run_evaluation(std::span<const GroundTruthSet> truths,
                                                           const EvaluationPlan& plan);

}  // namespace runcount
