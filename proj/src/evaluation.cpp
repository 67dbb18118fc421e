#include "runcount/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "runcount/error.hpp"
#include "runcount/parallel.hpp"
#include "runcount/rng.hpp"

namespace runcount {

namespace {

constexpr double kLevel = 0.95;
constexpr double kZeroTruthTolerance = 1e-12;

constexpr std::array<std::string_view, 8> kBandNames = {"True", "Le0_5", "Le1", "Le5", "Le10", "Le15", "Le20", "Fail"};

bool within(double estimate, double truth, double threshold) {
    const double gap = std::abs(estimate - truth);
    if (truth == 0.0) return gap <= kZeroTruthTolerance;
    return gap <= threshold * std::abs(truth);
}

std::size_t band_rank(VerdictBand band) { return static_cast<std::size_t>(band); }

}  // namespace

std::string_view to_string(VerdictBand band) noexcept { return kBandNames[band_rank(band)]; }

VerdictBand parse_verdict_band(std::string_view text) {
    for (std::size_t i = 0; i < kBandNames.size(); ++i)
        if (kBandNames[i] == text) return static_cast<VerdictBand>(i);
    throw Error(ErrorKind::ParseError, "unknown verdict band '" + std::string(text) + "'");
}

void GroundTruthSet::validate() const {
    if (runs.size() != kGroundTruthRuns) {
        throw Error(ErrorKind::BadParameters, "ground truth for " + algorithm_id + " has " +
                                                  std::to_string(runs.size()) + " runs, expected " +
                                                  std::to_string(kGroundTruthRuns));
    }
    for (double v : runs.values())
        if (v < 0.0) throw Error(ErrorKind::BadParameters, "ground truth errors must be non-negative");
}

VerdictBand post_hoc_band(double estimate_mean, double truth_mean, std::span<const double> thresholds) {
    if (thresholds.size() > kPostHocThresholds.size()) {
        throw Error(ErrorKind::BadParameters, "at most six post-hoc thresholds are supported");
    }
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (within(estimate_mean, truth_mean, thresholds[i])) return static_cast<VerdictBand>(i + 1);
    }
    return VerdictBand::Fail;
}

EvaluationRecord evaluate_prefix(const GroundTruthSet& gt, std::size_t n, const EstimatorConfig& config,
                                 std::size_t resamples, std::uint64_t bootstrap_seed) {
    gt.validate();
    if (n < 3 || n > gt.runs.size()) throw Error(ErrorKind::BadParameters, "prefix length out of range");

    EvaluationRecord rec;
    rec.triplet = gt.triplet;
    rec.algorithm_id = gt.algorithm_id;
    rec.tau = config.tau;
    rec.outlier_method = config.outlier_method;
    rec.bootstrap_seed = bootstrap_seed;
    rec.n = n;

    const RunSample estimated = gt.runs.prefix(n);
    const OutlierReport est_report = detect_outliers(estimated.values(), config.outlier_method);
    const OutlierReport truth_report = detect_outliers(gt.runs.values(), config.outlier_method);
    rec.m_e = est_report.flagged_count();
    rec.m_t = truth_report.flagged_count();
    const auto clean_est = remove_flagged(estimated.values(), est_report);
    const auto clean_truth = remove_flagged(gt.runs.values(), truth_report);

    if (clean_est.empty() || clean_truth.empty()) {
        rec.verdict_band = VerdictBand::Fail;
        rec.diagnostic = "CleanedSampleEmpty";
        return rec;
    }

    const BootstrapResult boot =
        bootstrap_mean_diff_ci(clean_est, clean_truth, resamples, gt.runs.size(), kLevel, bootstrap_seed);
    rec.ci = boot.ci;
    rec.ci_contains_zero = boot.ci.contains(0.0);

    const double truth_mean = boot.mean_of_means_b;
    for (std::size_t k = 0; k < kPostHocThresholds.size(); ++k) {
        const auto hits = std::count_if(boot.means_a.begin(), boot.means_a.end(),
                                        [&](double m) { return within(m, truth_mean, kPostHocThresholds[k]); });
        rec.posthoc_frequency[k] = static_cast<double>(hits) / static_cast<double>(boot.means_a.size());
    }

    if (rec.ci_contains_zero) {
        rec.verdict_band = VerdictBand::True;
        return rec;
    }
    rec.bca_contains_zero = bca_ci(boot.diffs, clean_est, clean_truth, kLevel).contains(0.0);
    rec.verdict_band = *rec.bca_contains_zero ? VerdictBand::True : post_hoc_band(boot.mean_of_means_a, truth_mean);
    return rec;
}

EvaluationRecord evaluate_triplet(const GroundTruthSet& gt, const EstimatorConfig& config, std::size_t resamples,
                                  std::uint64_t bootstrap_seed) {
    gt.validate();
    if (config.max_runs > gt.runs.size()) {
        throw Error(ErrorKind::BadConfig, "max_runs exceeds the ground-truth size");
    }
    const RunCountEstimate est = estimate_from_prefixes(gt.runs.values(), config);
    EvaluationRecord rec = evaluate_prefix(gt, est.n, config, resamples, bootstrap_seed);
    rec.converged = est.converged;
    return rec;
}

const AccuracyRow* AccuracyTable::find(double tau, OutlierMethod method) const {
    for (const auto& row : rows)
        if (row.tau == tau && row.outlier_method == method) return &row;
    return nullptr;
}

AccuracyTable aggregate_accuracy(std::span<const EvaluationRecord> records) {
    if (records.empty()) throw Error(ErrorKind::EmptyInput, "no evaluation records to aggregate");

    using Counts = std::array<std::size_t, kBandColumns + 1>;   // per-column hits, then total
    // (tau, method) -> algorithm -> repetition -> counts
    std::map<std::tuple<double, OutlierMethod>, std::map<std::string, std::map<std::size_t, Counts>>> groups;
    for (const auto& r : records) {
        Counts& c = groups[{r.tau, r.outlier_method}][r.algorithm_id][r.repetition];
        for (std::size_t k = 0; k < kBandColumns; ++k)
            if (band_rank(r.verdict_band) <= k) ++c[k];
        ++c[kBandColumns];
    }

    AccuracyTable table;
    for (const auto& [key, by_algorithm] : groups) {
        AccuracyRow row;
        row.tau = std::get<0>(key);
        row.outlier_method = std::get<1>(key);
        for (const auto& [algorithm, by_rep] : by_algorithm) {
            std::array<double, kBandColumns> algo_pct{};
            for (const auto& [rep, counts] : by_rep) {
                for (std::size_t k = 0; k < kBandColumns; ++k)
                    algo_pct[k] += 100.0 * static_cast<double>(counts[k]) / static_cast<double>(counts[kBandColumns]);
            }
            for (std::size_t k = 0; k < kBandColumns; ++k)
                row.pct[k] += algo_pct[k] / static_cast<double>(by_rep.size());
        }
        for (double& p : row.pct) p /= static_cast<double>(by_algorithm.size());
        table.rows.push_back(row);
    }
    return table;
}

SavingsReport SavingsReport::from_counts(std::uint64_t total_runs, std::uint64_t estimated_runs, double pct_accurate) {
    if (total_runs == 0 || estimated_runs > total_runs) {
        throw Error(ErrorKind::BadParameters, "estimated runs must lie in [0, total runs] with total > 0");
    }
    SavingsReport s;
    s.total_runs = total_runs;
    s.estimated_runs = estimated_runs;
    s.saved_runs = total_runs - estimated_runs;
    const auto total = static_cast<double>(total_runs);
    s.pct_estimated = 100.0 * static_cast<double>(estimated_runs) / total;
    s.pct_saved = 100.0 * static_cast<double>(s.saved_runs) / total;
    s.pct_accurate = pct_accurate;
    s.expected_saved_runs = static_cast<double>(s.saved_runs) * pct_accurate / 100.0;
    s.pct_expected_saved = 100.0 * s.expected_saved_runs / total;
    return s;
}

std::vector<SavingsReport> savings_report(std::span<const EvaluationRecord> records, std::size_t runs_per_triplet) {
    if (records.empty()) throw Error(ErrorKind::EmptyInput, "no evaluation records to report");
    if (runs_per_triplet == 0) throw Error(ErrorKind::BadParameters, "runs_per_triplet must be positive");

    using CellKey = std::tuple<std::string, Triplet>;
    std::map<std::tuple<double, OutlierMethod>, std::map<CellKey, const EvaluationRecord*>> groups;
    for (const auto& r : records) {
        auto& slot = groups[{r.tau, r.outlier_method}][{r.algorithm_id, r.triplet}];
        if (slot == nullptr || r.repetition < slot->repetition) slot = &r;
    }
    const AccuracyTable accuracy = aggregate_accuracy(records);

    std::vector<SavingsReport> out;
    for (const auto& [key, cells] : groups) {
        std::uint64_t estimated = 0;
        for (const auto& [cell, rec] : cells) estimated += rec->n;
        const auto total = static_cast<std::uint64_t>(cells.size()) * runs_per_triplet;
        const auto& [tau, method] = key;
        SavingsReport s = SavingsReport::from_counts(total, estimated, accuracy.find(tau, method)->pct[0]);
        s.tau = tau;
        s.outlier_method = method;
        out.push_back(s);
    }
    return out;
}

std::uint64_t bootstrap_seed_for(std::uint64_t master_seed, std::string_view algorithm_id, const Triplet& triplet,
                                 std::size_t repetition) {
    return derive_seed({hash_string("bootstrap"), master_seed, hash_string(algorithm_id),
                        static_cast<std::uint64_t>(triplet.problem), static_cast<std::uint64_t>(triplet.instance_id),
                        triplet.dimension, repetition});
}

std::vector<EvaluationRecord> run_evaluation(std::span<const GroundTruthSet> truths, const EvaluationPlan& plan) {
    if (plan.taus.empty() || plan.methods.empty() || plan.repetitions == 0) {
        throw Error(ErrorKind::BadConfig, "evaluation plan needs taus, methods and repetitions");
    }
    const std::size_t per_truth = plan.taus.size() * plan.methods.size() * plan.repetitions;
    std::vector<EvaluationRecord> records(truths.size() * per_truth);

    parallel_for(records.size(), plan.threads, [&](std::size_t idx) {
        const GroundTruthSet& gt = truths[idx / per_truth];
        std::size_t rest = idx % per_truth;
        const std::size_t rep = rest % plan.repetitions;
        rest /= plan.repetitions;
        const OutlierMethod method = plan.methods[rest % plan.methods.size()];
        const double tau = plan.taus[rest / plan.methods.size()];

        EstimatorConfig cfg;
        cfg.tau = tau;
        cfg.outlier_method = method;
        cfg.initial_runs = plan.initial_runs;
        cfg.max_runs = plan.max_runs;

        const std::uint64_t seed = bootstrap_seed_for(plan.master_seed, gt.algorithm_id, gt.triplet, rep);
        records[idx] = evaluate_triplet(gt, cfg, plan.resamples, seed);
        records[idx].repetition = rep;
    });
    return records;
}

}  // namespace runcount
