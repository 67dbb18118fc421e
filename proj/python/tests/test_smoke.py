import math
import random

import pytest

import runcount as rc


def test_skewness_and_quantiles():
    assert rc.skewness([1, 2, 3, 4, 5]) == 0.0
    assert rc.skewness([1, 2, 3, 2, 1]) == pytest.approx(0.144 / 0.56**1.5)
    assert rc.skewness([7, 7, 7]) == 0.0
    assert rc.quantile([1, 2, 3, 4, 100], 0.25) == 2.0
    assert rc.median([3, 1, 2]) == 2.0


def test_outlier_examples():
    sample = [1, 2, 3, 4, 100]
    assert rc.detect_outliers(sample, rc.OutlierMethod.IQR).flagged_indices == [4]
    assert rc.detect_outliers(sample, rc.OutlierMethod.ModifiedZ).flagged_indices == [4]
    assert rc.detect_outliers(sample, rc.OutlierMethod.Percentile).flagged_indices == [0, 4]
    assert rc.detect_outliers([5] * 5, rc.OutlierMethod.ModifiedZ).flagged_count == 0
    assert rc.parse_outlier_method("MAD") == rc.OutlierMethod.ModifiedZ


def test_online_estimator():
    cfg = rc.EstimatorConfig(tau=0.05, outlier_method=rc.OutlierMethod.IQR)
    est = rc.Estimator(cfg)
    phases = [est.observe(v) for v in [1, 2, 3, 2, 1, 3]]
    assert phases[4] == rc.EstimatorPhase.Collecting
    assert est.last_assessment is not None
    assert phases[-1] == rc.EstimatorPhase.Stopped
    assert est.runs == 6
    with pytest.raises(rc.RuncountError) as info:
        est.observe(1.0)
    assert info.value.kind == "AlreadyStopped"

    batch = rc.estimate_from_prefixes([1, 2, 3, 4, 5] + [9] * 45, cfg)
    assert (batch.n, batch.converged) == (5, True)


def test_bad_config_raises():
    with pytest.raises(rc.RuncountError) as info:
        rc.EstimatorConfig(tau=0.0)
    assert info.value.kind == "BadConfig"


def test_bootstrap_and_bca():
    rng = random.Random(3)
    a = [rng.gauss(10, 1) for _ in range(30)]
    b = [rng.gauss(10, 1) for _ in range(50)]
    boot = rc.bootstrap_mean_diff_ci(a, b, resamples=500, resample_size=50, seed=9)
    assert boot.ci.low <= boot.ci.high
    assert len(boot.diffs) == 500
    again = rc.bootstrap_mean_diff_ci(a, b, resamples=500, resample_size=50, seed=9)
    assert (again.ci.low, again.ci.high) == (boot.ci.low, boot.ci.high)
    bca = rc.bca_ci(boot.diffs, a, b)
    assert min(boot.diffs) <= bca.low <= bca.high <= max(boot.diffs)
    assert rc.normal_quantile(0.975) == pytest.approx(1.959963984540054)


def test_problems_and_de():
    inst = rc.make_instance(rc.ProblemId.rastrigin, 2, 10)
    assert inst(inst.shift) == pytest.approx(inst.f_opt, abs=1e-12)
    assert len(inst.rotation) == 10
    sphere = rc.canonical_instance(rc.ProblemId.sphere, 10)
    assert sphere([1.0] + [0.0] * 9) == 1.0

    cfg = rc.DEConfig(rc.DEStrategy.Rand1Bin, 0.5, 0.9)
    budget = rc.BudgetSpec(evals_per_dimension=300)
    first = rc.de_run(sphere, cfg, budget, seed=42)
    assert first == rc.de_run(sphere, cfg, budget, seed=42)
    assert first.best_error >= 0
    assert first.evals_used <= 3000

    configs = rc.sample_config_space(104, 1)
    assert len(configs) == 104
    assert all(0 < c.f < 1 and 0 < c.cr < 1 for c in configs)


def test_evaluation_and_savings():
    cfg = rc.EstimatorConfig(tau=0.05)
    rec = rc.evaluate_triplet([2.5] * 50, cfg, resamples=200, seed=1)
    assert rec.n == 5
    assert rec.verdict_band == rc.VerdictBand.True_
    assert rc.post_hoc_band(10.0, 10.4) == rc.VerdictBand.Le5
    assert rc.post_hoc_band(13.0, 10.0) == rc.VerdictBand.Fail

    rows = rc.aggregate_accuracy([rec])
    assert rows[0].pct == [100.0] * 7
    report = rc.savings_report([rec])[0]
    assert (report.total_runs, report.estimated_runs, report.saved_runs) == (50, 5, 45)

    fixture = rc.SavingsReport.from_counts(5_616_000, 3_184_780, 86.16)
    assert fixture.saved_runs == 2_431_220
    assert round(fixture.pct_saved, 2) == 43.29


def test_run_benchmark_csv():
    config = '{"problems": ["sphere"], "instances_per_problem": 1, "de_config_count": 1, "evals_per_dimension": 100}'
    text = rc.run_benchmark(config)
    lines = text.strip().split("\n")
    assert lines[0] == "algorithm_id,problem_id,instance_id,dimension,run_index,error"
    assert len(lines) == 51
    assert text == rc.run_benchmark(config)
    assert all(math.isfinite(float(line.split(",")[-1])) for line in lines[1:])
