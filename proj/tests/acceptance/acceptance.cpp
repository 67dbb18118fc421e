// Acceptance suite: one PASS/FAIL line per criterion. Criteria can be
// selected by name on the command line; with no arguments all of them run.

#include <algorithm>
#include <deque>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "runcount/app.hpp"
#include "runcount/evaluation.hpp"
#include "runcount/stats.hpp"
#include "runcount/stopping_rule.hpp"

using namespace runcount;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string fmt(const char* pattern, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

constexpr OutlierMethod kMethods[] = {OutlierMethod::IQR, OutlierMethod::Percentile, OutlierMethod::ModifiedZ};

// --- statistics oracles ------------------------------------------------------

Outcome statistics_oracles() {
    Outcome out;
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<std::size_t> len(5, 50);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = gen::run_sequence(rng(), len(rng));
        const double got = skewness(x);
        const double want = oracle::skewness(x);
        worst = std::max(worst, std::abs(got - want));
    }
    out.require(worst <= 1e-12, fmt("max skewness deviation %.3g", worst));

    const std::vector<double> small = {1, 2, 3, 4, 100};
    const std::vector<double> flat = {5, 5, 5, 5, 5};
    using Flags = std::vector<std::size_t>;
    out.require(detect_outliers(small, OutlierMethod::IQR).flagged_indices == Flags{4}, "IQR flags");
    out.require(detect_outliers(small, OutlierMethod::ModifiedZ).flagged_indices == Flags{4}, "modified-z flags");
    out.require(detect_outliers(flat, OutlierMethod::ModifiedZ).flagged_indices.empty(), "constant-sample flags");
    out.require(detect_outliers(small, OutlierMethod::Percentile).flagged_indices == Flags({0, 4}), "percentile flags");
    if (out.detail.empty()) out.detail = fmt("1000 samples, max skewness deviation %.3g; 4 flag sets exact", worst);
    return out;
}

// --- stopping-rule properties ------------------------------------------------

std::vector<EstimatorPhase> decision_trace(const std::vector<double>& values, const EstimatorConfig& cfg) {
    std::vector<EstimatorPhase> out;
    EstimatorState s(cfg);
    for (double v : values) {
        s = observe(std::move(s), v);
        out.push_back(s.phase());
        if (!s.collecting()) break;
    }
    return out;
}

Outcome stopping_rule_properties() {
    Outcome out;
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> scale(0.01, 100.0), offset(-1000.0, 1000.0);
    const double taus[] = {0.05, 0.10, 0.15, 0.20};
    std::size_t monotone_bad = 0, affine_bad = 0, stream_bad = 0, bounds_bad = 0, checks = 0;
    constexpr int kSequences = 1000;

    for (int t = 0; t < kSequences; ++t) {
        const auto x = gen::run_sequence(rng());
        const double a = scale(rng), b = offset(rng);
        std::vector<double> y(x.size());
        std::transform(x.begin(), x.end(), y.begin(), [&](double v) { return a * v + b; });

        for (auto method : kMethods) {
            std::size_t previous = kGroundTruthRuns + 1;
            for (double tau : taus) {
                EstimatorConfig cfg;
                cfg.tau = tau;
                cfg.outlier_method = method;
                ++checks;

                const auto batch = estimate_from_prefixes(x, cfg);
                bounds_bad += batch.n < cfg.initial_runs || batch.n > cfg.max_runs;
                monotone_bad += batch.n > previous;
                previous = batch.n;

                EstimatorState s(cfg);
                for (std::size_t i = 0; i < x.size() && s.collecting(); ++i) s = observe(std::move(s), x[i]);
                stream_bad += s.runs() != batch.n || (s.phase() == EstimatorPhase::Stopped) != batch.converged;

                affine_bad += decision_trace(x, cfg) != decision_trace(y, cfg);
            }
        }
    }
    out.require(monotone_bad == 0, fmt("%zu tau-monotonicity violations", monotone_bad));
    out.require(affine_bad == 0, fmt("%zu affine-trace mismatches", affine_bad));
    out.require(stream_bad == 0, fmt("%zu streaming/batch mismatches", stream_bad));
    out.require(bounds_bad == 0, fmt("%zu out-of-bounds n", bounds_bad));
    if (out.detail.empty()) out.detail = fmt("%d sequences, %zu (sequence, method, tau) cases", kSequences, checks);
    return out;
}

// --- bootstrap coverage ------------------------------------------------------

Outcome bootstrap_coverage() {
    Outcome out;
    constexpr int kTrials = 200;
    int same = 0, half = 0;
    EstimatorConfig cfg;
    cfg.outlier_method = OutlierMethod::ModifiedZ;
    for (int trial = 0; trial < kTrials; ++trial) {
        std::mt19937_64 rng(90000 + trial);
        GroundTruthSet gt{Triplet{ProblemId::Sphere, 1, 10}, "normal", RunSample(gen::normal_sample(rng, 50, 10.0, 2.0))};
        const std::uint64_t seed = derive_seed({hash_string("coverage"), static_cast<std::uint64_t>(trial)});
        same += evaluate_prefix(gt, 50, cfg, 1000, seed).verdict_band == VerdictBand::True;
        half += evaluate_prefix(gt, 25, cfg, 1000, seed).verdict_band == VerdictBand::True;
    }
    const double same_pct = 100.0 * same / kTrials;
    const double half_pct = 100.0 * half / kTrials;
    out.require(same_pct >= 95.0, fmt("identical samples True %.1f%% < 95%%", same_pct));
    out.require(half_pct >= 85.0, fmt("first-25 prefix True %.1f%% < 85%%", half_pct));
    if (out.detail.empty()) out.detail = fmt("identical samples %.1f%% True, first 25 draws %.1f%% True", same_pct, half_pct);
    return out;
}

// --- savings fixture ---------------------------------------------------------

Outcome savings_fixture() {
    Outcome out;
    const auto s = SavingsReport::from_counts(5'616'000, 3'184'780, 86.16);
    out.require(s.saved_runs == 2'431'220, fmt("saved %llu", static_cast<unsigned long long>(s.saved_runs)));
    out.require(std::round(s.pct_saved * 100.0) / 100.0 == 43.29, fmt("pct_saved %.4f", s.pct_saved));
    out.require(s.expected_saved_runs == static_cast<double>(s.saved_runs) * s.pct_accurate / 100.0,
                "expected_saved identity");
    out.require(std::abs(s.pct_estimated + s.pct_saved - 100.0) <= 0.01, "percentages do not add to 100");
    if (out.detail.empty()) out.detail = fmt("saved %llu, pct_saved %.2f, expected_saved %.2f",
                                             static_cast<unsigned long long>(s.saved_runs), s.pct_saved,
                                             s.expected_saved_runs);
    return out;
}

// --- desk-scale replication and determinism ----------------------------------

struct PipelineOutput {
    std::string runs_csv;
    std::string records_csv;
    std::string accuracy_csv;
    std::string savings_csv;
    std::vector<EvaluationRecord> records;
    AccuracyTable accuracy;
    std::vector<SavingsReport> savings;
};

app::ExperimentConfig desk_config(unsigned threads) {
    app::ExperimentConfig c;   // 10 configs x 8 problems x 5 instances x D=10 x 50 runs
    c.evals_per_dimension = 2000;
    c.taus = {0.05, 0.20};
    c.outlier_methods = {OutlierMethod::ModifiedZ};
    c.repetitions = 10;
    c.bootstrap_resamples = 1000;
    c.master_seed = 2024;
    c.threads = threads;
    return c;
}

PipelineOutput run_pipeline(unsigned threads) {
    const auto config = desk_config(threads);
    PipelineOutput p;
    const auto bench = app::run_benchmark(config);
    std::ostringstream runs;
    app::write_run_data(runs, bench.rows);
    p.runs_csv = runs.str();

    auto eval = app::run_evaluation_on(bench.rows, config);
    p.records = std::move(eval.records);
    p.accuracy = std::move(eval.accuracy);
    p.savings = savings_report(p.records, config.runs_per_triplet);

    std::ostringstream records, accuracy, savings;
    app::write_records(records, p.records);
    app::write_accuracy(accuracy, p.accuracy);
    app::write_savings(savings, p.savings);
    p.records_csv = records.str();
    p.accuracy_csv = accuracy.str();
    p.savings_csv = savings.str();
    return p;
}

// Shared between the replication and determinism criteria.
std::deque<PipelineOutput> g_pipelines;

const PipelineOutput& pipeline(std::size_t i) {
    static const unsigned kThreads[] = {8, 8, 1};
    while (g_pipelines.size() <= i) g_pipelines.push_back(run_pipeline(kThreads[g_pipelines.size()]));
    return g_pipelines[i];
}

Outcome desk_replication() {
    Outcome out;
    const auto& p = pipeline(0);
    const AccuracyRow* low = p.accuracy.find(0.05, OutlierMethod::ModifiedZ);
    const AccuracyRow* high = p.accuracy.find(0.20, OutlierMethod::ModifiedZ);
    if (low == nullptr || high == nullptr) {
        out.require(false, "missing accuracy rows");
        return out;
    }
    out.require(low->pct[0] >= 70.0, fmt("(a) accuracy at tau=0.05 is %.2f%% < 70%%", low->pct[0]));
    out.require(low->pct[0] > high->pct[0],
                fmt("(b) accuracy %.2f%% at 0.05 not above %.2f%% at 0.20", low->pct[0], high->pct[0]));
    for (const auto& row : p.accuracy.rows) {
        const bool monotone = std::is_sorted(row.pct.begin(), row.pct.end());
        out.require(monotone, fmt("(c) row tau=%.2f not monotone", row.tau));
    }
    const SavingsReport* saving = nullptr;
    for (const auto& s : p.savings)
        if (s.tau == 0.05 && s.outlier_method == OutlierMethod::ModifiedZ) saving = &s;
    if (saving == nullptr) {
        out.require(false, "missing savings row");
        return out;
    }
    out.require(saving->pct_saved >= 25.0 && saving->pct_saved <= 70.0,
                fmt("(d) pct_saved %.2f%% outside [25, 70]", saving->pct_saved));

    double sum_low = 0.0, sum_high = 0.0;
    std::size_t count_low = 0, count_high = 0;
    for (const auto& r : p.records) {
        if (r.tau == 0.05) {
            sum_low += static_cast<double>(r.n);
            ++count_low;
        } else if (r.tau == 0.20) {
            sum_high += static_cast<double>(r.n);
            ++count_high;
        }
    }
    const double mean_low = sum_low / static_cast<double>(count_low);
    const double mean_high = sum_high / static_cast<double>(count_high);
    out.require(mean_high < mean_low, fmt("(e) mean n %.2f at 0.20 not below %.2f at 0.05", mean_high, mean_low));

    const std::size_t run_rows = static_cast<std::size_t>(std::count(p.runs_csv.begin(), p.runs_csv.end(), '\n')) - 1;
    out.require(run_rows == 20'000, fmt("%zu run rows instead of 20000", run_rows));

    std::string table;
    for (const auto& row : p.accuracy.rows) {
        table += fmt(" | tau=%.2f:", row.tau);
        for (double v : row.pct) table += fmt(" %.2f", v);
    }
    const std::string summary =
        fmt("accuracy %.2f%% (0.05) vs %.2f%% (0.20); pct_saved %.2f%%; mean n %.2f vs %.2f", low->pct[0],
            high->pct[0], saving->pct_saved, mean_low, mean_high) +
        table;
    out.detail = out.detail.empty() ? summary : out.detail + " [" + summary + "]";
    return out;
}

Outcome determinism() {
    Outcome out;
    const auto& a = pipeline(0);
    const auto& b = pipeline(1);
    const auto& c = pipeline(2);
    out.require(a.runs_csv == b.runs_csv, "runs CSV differs between executions");
    out.require(a.records_csv == b.records_csv, "records CSV differs between executions");
    out.require(a.accuracy_csv == b.accuracy_csv, "accuracy CSV differs between executions");
    out.require(a.savings_csv == b.savings_csv, "savings CSV differs between executions");
    out.require(a.runs_csv == c.runs_csv, "runs CSV differs between 8 and 1 threads");
    out.require(a.records_csv == c.records_csv, "records CSV differs between 8 and 1 threads");
    out.require(a.accuracy_csv == c.accuracy_csv, "accuracy CSV differs between 8 and 1 threads");
    out.require(a.savings_csv == c.savings_csv, "savings CSV differs between 8 and 1 threads");
    if (out.detail.empty()) {
        out.detail = fmt("4 CSVs byte-identical over 2 executions (8 threads) and 1 thread; %zu + %zu bytes",
                         a.runs_csv.size(), a.records_csv.size());
    }
    return out;
}

struct Criterion {
    const char* name;
    double time_limit_s;   // <= 0: no limit
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {"statistics-oracles", 5.0, statistics_oracles},
        {"stopping-rule-properties", 30.0, stopping_rule_properties},
        {"bootstrap-coverage", 120.0, bootstrap_coverage},
        {"savings-fixture", 0.0, savings_fixture},
        {"desk-scale-replication", 0.0, desk_replication},
        {"determinism", 0.0, determinism},
    };
    std::set<std::string> selected(argv + 1, argv + argc);

    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.contains(c.name)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome result = c.run();
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit_s > 0.0) result.require(seconds < c.time_limit_s, fmt("took %.1f s, limit %.0f s", seconds, c.time_limit_s));
        failures += !result.pass;
        std::printf("%s %s (%.1f s): %s\n", result.pass ? "PASS" : "FAIL", c.name, seconds, result.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
