#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "runcount/app.hpp"
#include "runcount/de.hpp"
#include "runcount/error.hpp"
#include "runcount/evaluation.hpp"
#include "runcount/problems.hpp"
#include "runcount/stats.hpp"
#include "runcount/stopping_rule.hpp"

namespace py = pybind11;
using namespace runcount;

namespace {

using Values = std::vector<double>;

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Adaptive run-count estimation for stochastic optimizers";

    static py::exception<Error> error_type(m, "RuncountError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::handle(error_type.ptr())(e.what());
            exc.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    // --- statistics --------------------------------------------------------

    py::enum_<OutlierMethod>(m, "OutlierMethod")
        .value("IQR", OutlierMethod::IQR)
        .value("Percentile", OutlierMethod::Percentile)
        .value("ModifiedZ", OutlierMethod::ModifiedZ);
    m.def("parse_outlier_method", [](const std::string& s) { return parse_outlier_method(s); });

    py::class_<OutlierReport>(m, "OutlierReport")
        .def_readonly("flagged_indices", &OutlierReport::flagged_indices)
        .def_readonly("retained_count", &OutlierReport::retained_count)
        .def_property_readonly("flagged_count", &OutlierReport::flagged_count);

    py::class_<ConfidenceInterval>(m, "ConfidenceInterval")
        .def_readonly("low", &ConfidenceInterval::low)
        .def_readonly("high", &ConfidenceInterval::high)
        .def_readonly("level", &ConfidenceInterval::level)
        .def_property_readonly("method",
                               [](const ConfidenceInterval& ci) {
                                   return ci.method == IntervalMethod::BCa ? "BCa" : "Percentile";
                               })
        .def("contains", &ConfidenceInterval::contains)
        .def("__repr__", [](const ConfidenceInterval& ci) {
            return "ConfidenceInterval(" + app::format_double(ci.low) + ", " + app::format_double(ci.high) + ")";
        });

    py::class_<BootstrapResult>(m, "BootstrapResult")
        .def_readonly("ci", &BootstrapResult::ci)
        .def_readonly("diffs", &BootstrapResult::diffs)
        .def_readonly("mean_of_means_a", &BootstrapResult::mean_of_means_a)
        .def_readonly("mean_of_means_b", &BootstrapResult::mean_of_means_b);

    m.def("mean", [](const Values& x) { return mean(x); }, py::arg("sample"));
    m.def("skewness", [](const Values& x) { return skewness(x); }, py::arg("sample"));
    m.def("quantile", [](const Values& x, double q) { return quantile(x, q); }, py::arg("sample"), py::arg("q"));
    m.def("median", [](const Values& x) { return median(x); }, py::arg("sample"));
    m.def("detect_outliers", [](const Values& x, OutlierMethod method) { return detect_outliers(x, method); },
          py::arg("sample"), py::arg("method"));
    m.def(
        "bootstrap_mean_diff_ci",
        [](const Values& a, const Values& b, std::size_t resamples, std::size_t resample_size, double level,
           std::uint64_t seed) { return bootstrap_mean_diff_ci(a, b, resamples, resample_size, level, seed); },
        py::arg("a"), py::arg("b"), py::arg("resamples") = 1000, py::arg("resample_size") = 50,
        py::arg("level") = 0.95, py::arg("seed") = 0);
    m.def(
        "bca_ci", [](const Values& diffs, const Values& a, const Values& b, double level) {
            return bca_ci(diffs, a, b, level);
        },
        py::arg("diffs"), py::arg("a"), py::arg("b"), py::arg("level") = 0.95);
    m.def("normal_quantile", &normal_quantile, py::arg("p"));

    // --- stopping rule -----------------------------------------------------

    py::class_<EstimatorConfig>(m, "EstimatorConfig")
        .def(py::init([](double tau, std::size_t initial_runs, std::size_t max_runs, OutlierMethod method,
                         std::size_t min_retained) {
                 EstimatorConfig c{tau, initial_runs, max_runs, method, min_retained};
                 c.validate();
                 return c;
             }),
             py::arg("tau") = 0.05, py::arg("initial_runs") = 5, py::arg("max_runs") = 50,
             py::arg("outlier_method") = OutlierMethod::ModifiedZ, py::arg("min_retained") = 3)
        .def_readonly("tau", &EstimatorConfig::tau)
        .def_readonly("initial_runs", &EstimatorConfig::initial_runs)
        .def_readonly("max_runs", &EstimatorConfig::max_runs)
        .def_readonly("outlier_method", &EstimatorConfig::outlier_method)
        .def_readonly("min_retained", &EstimatorConfig::min_retained);

    py::class_<SymmetryAssessment>(m, "SymmetryAssessment")
        .def_readonly("skewness", &SymmetryAssessment::skewness_value)
        .def_readonly("outliers_removed", &SymmetryAssessment::outliers_removed)
        .def_readonly("retained", &SymmetryAssessment::retained)
        .def_readonly("symmetric", &SymmetryAssessment::symmetric)
        .def_property_readonly("computable", &SymmetryAssessment::computable);

    m.def("assess", [](const Values& x, const EstimatorConfig& c) { return assess(x, c); }, py::arg("sample"),
          py::arg("config"));

    py::enum_<EstimatorPhase>(m, "EstimatorPhase")
        .value("Collecting", EstimatorPhase::Collecting)
        .value("Stopped", EstimatorPhase::Stopped)
        .value("Exhausted", EstimatorPhase::Exhausted);

    // Python side holds a mutable wrapper; each observe() replaces the state.
    struct Estimator {
        EstimatorState state;
    };
    py::class_<Estimator>(m, "Estimator")
        .def(py::init([](const EstimatorConfig& c) { return Estimator{EstimatorState(c)}; }), py::arg("config"))
        .def(
            "observe",
            [](Estimator& e, double value) {
                e.state = observe(std::move(e.state), value);
                return e.state.phase();
            },
            py::arg("value"))
        .def_property_readonly("phase", [](const Estimator& e) { return e.state.phase(); })
        .def_property_readonly("collecting", [](const Estimator& e) { return e.state.collecting(); })
        .def_property_readonly("runs", [](const Estimator& e) { return e.state.runs(); })
        .def_property_readonly("last_assessment", [](const Estimator& e) { return e.state.last_assessment(); });

    py::class_<RunCountEstimate>(m, "RunCountEstimate")
        .def_readonly("n", &RunCountEstimate::n)
        .def_readonly("converged", &RunCountEstimate::converged);
    m.def("estimate_from_prefixes", [](const Values& x, const EstimatorConfig& c) { return estimate_from_prefixes(x, c); },
          py::arg("runs"), py::arg("config"));

    // --- problems and DE ---------------------------------------------------

    py::enum_<ProblemId> problem_enum(m, "ProblemId");
    for (ProblemId id : kAllProblems) problem_enum.value(std::string(to_string(id)).c_str(), id);
    m.def("parse_problem_id", [](const std::string& s) { return parse_problem_id(s); });

    py::class_<ProblemInstance>(m, "ProblemInstance")
        .def_readonly("problem", &ProblemInstance::problem)
        .def_readonly("instance_id", &ProblemInstance::instance_id)
        .def_readonly("dimension", &ProblemInstance::dimension)
        .def_readonly("shift", &ProblemInstance::shift)
        .def_readonly("f_opt", &ProblemInstance::f_opt)
        .def_property_readonly("rotation",
                               [](const ProblemInstance& p) {
                                   std::vector<std::vector<double>> rows(p.dimension);
                                   for (std::size_t r = 0; r < p.dimension; ++r)
                                       for (std::size_t c = 0; c < p.dimension; ++c) rows[r].push_back(p.rotation(r, c));
                                   return rows;
                               })
        .def("__call__", [](const ProblemInstance& p, const Values& x) { return evaluate(p, x); }, py::arg("x"))
        .def("error_to_optimum", &error_to_optimum);
    m.def("make_instance", &make_instance, py::arg("problem"), py::arg("instance_id"), py::arg("dimension"));
    m.def("canonical_instance", &canonical_instance, py::arg("problem"), py::arg("dimension"));

    py::enum_<DEStrategy> strategy_enum(m, "DEStrategy");
    strategy_enum.value("Rand1Bin", DEStrategy::Rand1Bin)
        .value("Rand1Exp", DEStrategy::Rand1Exp)
        .value("Rand2Bin", DEStrategy::Rand2Bin)
        .value("Rand2Exp", DEStrategy::Rand2Exp)
        .value("Best1Bin", DEStrategy::Best1Bin)
        .value("Best1Exp", DEStrategy::Best1Exp)
        .value("Best2Bin", DEStrategy::Best2Bin)
        .value("Best2Exp", DEStrategy::Best2Exp)
        .value("Best3Bin", DEStrategy::Best3Bin)
        .value("RandRandBin", DEStrategy::RandRandBin)
        .value("RandToBest1Bin", DEStrategy::RandToBest1Bin)
        .value("RandToBest1Exp", DEStrategy::RandToBest1Exp);

    py::class_<DEConfig>(m, "DEConfig")
        .def(py::init([](DEStrategy s, double f, double cr, std::size_t np) { return DEConfig{s, f, cr, np}; }),
             py::arg("strategy") = DEStrategy::Rand1Bin, py::arg("f") = 0.5, py::arg("cr") = 0.9,
             py::arg("population_size") = 0)
        .def_readonly("strategy", &DEConfig::strategy)
        .def_readonly("f", &DEConfig::f)
        .def_readonly("cr", &DEConfig::cr)
        .def_readonly("population_size", &DEConfig::population_size)
        .def("__eq__", [](const DEConfig& a, const DEConfig& b) { return a == b; });

    py::class_<BudgetSpec>(m, "BudgetSpec")
        .def(py::init([](std::size_t max_evals, std::size_t per_dim, std::size_t stagnation, double target) {
                 return BudgetSpec{max_evals, per_dim, stagnation, target};
             }),
             py::arg("max_evals") = 0, py::arg("evals_per_dimension") = 10'000, py::arg("stagnation_iters") = 100,
             py::arg("target_error") = 1e-8)
        .def_readonly("max_evals", &BudgetSpec::max_evals)
        .def_readonly("evals_per_dimension", &BudgetSpec::evals_per_dimension)
        .def_readonly("stagnation_iters", &BudgetSpec::stagnation_iters)
        .def_readonly("target_error", &BudgetSpec::target_error);

    py::enum_<Termination>(m, "Termination")
        .value("BudgetExhausted", Termination::BudgetExhausted)
        .value("Stagnation", Termination::Stagnation)
        .value("TargetReached", Termination::TargetReached);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("best_error", &RunResult::best_error)
        .def_readonly("evals_used", &RunResult::evals_used)
        .def_readonly("termination", &RunResult::termination)
        .def_readonly("seed", &RunResult::seed)
        .def_readonly("generations", &RunResult::generations)
        .def_readonly("best_error_trace", &RunResult::best_error_trace)
        .def("__eq__", [](const RunResult& a, const RunResult& b) { return a == b; });

    m.def(
        "de_run",
        [](const ProblemInstance& inst, const DEConfig& cfg, const BudgetSpec& budget, std::uint64_t seed,
           bool record_trace) {
            py::gil_scoped_release release;
            return de_run(inst, cfg, budget, seed, {.record_trace = record_trace});
        },
        py::arg("instance"), py::arg("config"), py::arg("budget") = BudgetSpec{}, py::arg("seed") = 0,
        py::arg("record_trace") = false);
    m.def("sample_config_space", &sample_config_space, py::arg("count"), py::arg("seed"));

    // --- evaluation --------------------------------------------------------

    py::enum_<VerdictBand>(m, "VerdictBand")
        .value("True_", VerdictBand::True)
        .value("Le0_5", VerdictBand::Le0_5)
        .value("Le1", VerdictBand::Le1)
        .value("Le5", VerdictBand::Le5)
        .value("Le10", VerdictBand::Le10)
        .value("Le15", VerdictBand::Le15)
        .value("Le20", VerdictBand::Le20)
        .value("Fail", VerdictBand::Fail);

    py::class_<Triplet>(m, "Triplet")
        .def(py::init([](ProblemId p, int instance, std::size_t d) { return Triplet{p, instance, d}; }),
             py::arg("problem") = ProblemId::Sphere, py::arg("instance_id") = 1, py::arg("dimension") = 10)
        .def_readonly("problem", &Triplet::problem)
        .def_readonly("instance_id", &Triplet::instance_id)
        .def_readonly("dimension", &Triplet::dimension);

    py::class_<EvaluationRecord>(m, "EvaluationRecord")
        .def_readonly("triplet", &EvaluationRecord::triplet)
        .def_readonly("algorithm_id", &EvaluationRecord::algorithm_id)
        .def_readonly("tau", &EvaluationRecord::tau)
        .def_readonly("outlier_method", &EvaluationRecord::outlier_method)
        .def_readonly("repetition", &EvaluationRecord::repetition)
        .def_readonly("bootstrap_seed", &EvaluationRecord::bootstrap_seed)
        .def_readonly("n", &EvaluationRecord::n)
        .def_readonly("converged", &EvaluationRecord::converged)
        .def_readonly("m_e", &EvaluationRecord::m_e)
        .def_readonly("m_t", &EvaluationRecord::m_t)
        .def_readonly("ci", &EvaluationRecord::ci)
        .def_readonly("ci_contains_zero", &EvaluationRecord::ci_contains_zero)
        .def_readonly("bca_contains_zero", &EvaluationRecord::bca_contains_zero)
        .def_readonly("verdict_band", &EvaluationRecord::verdict_band)
        .def_readonly("posthoc_frequency", &EvaluationRecord::posthoc_frequency)
        .def_readonly("diagnostic", &EvaluationRecord::diagnostic);

    auto make_truth = [](const Values& runs, const Triplet& triplet, const std::string& algorithm) {
        GroundTruthSet gt{triplet, algorithm, RunSample(runs)};
        gt.validate();
        return gt;
    };
    m.def(
        "evaluate_triplet",
        [make_truth](const Values& runs, const EstimatorConfig& cfg, std::size_t resamples, std::uint64_t seed,
                     const Triplet& triplet, const std::string& algorithm) {
            const auto gt = make_truth(runs, triplet, algorithm);
            py::gil_scoped_release release;
            return evaluate_triplet(gt, cfg, resamples, seed);
        },
        py::arg("runs"), py::arg("config"), py::arg("resamples") = 1000, py::arg("seed") = 0,
        py::arg("triplet") = Triplet{}, py::arg("algorithm_id") = "algorithm");
    m.def(
        "evaluate_prefix",
        [make_truth](const Values& runs, std::size_t n, const EstimatorConfig& cfg, std::size_t resamples,
                     std::uint64_t seed) {
            const auto gt = make_truth(runs, Triplet{}, "algorithm");
            py::gil_scoped_release release;
            return evaluate_prefix(gt, n, cfg, resamples, seed);
        },
        py::arg("runs"), py::arg("n"), py::arg("config"), py::arg("resamples") = 1000, py::arg("seed") = 0);
    m.def(
        "post_hoc_band", [](double estimate, double truth) { return post_hoc_band(estimate, truth); },
        py::arg("estimate_mean"), py::arg("truth_mean"));

    py::class_<AccuracyRow>(m, "AccuracyRow")
        .def_readonly("tau", &AccuracyRow::tau)
        .def_readonly("outlier_method", &AccuracyRow::outlier_method)
        .def_readonly("pct", &AccuracyRow::pct);
    m.def("aggregate_accuracy", [](const std::vector<EvaluationRecord>& r) { return aggregate_accuracy(r).rows; },
          py::arg("records"));

    py::class_<SavingsReport>(m, "SavingsReport")
        .def_static("from_counts", &SavingsReport::from_counts, py::arg("total_runs"), py::arg("estimated_runs"),
                    py::arg("pct_accurate"))
        .def_readonly("tau", &SavingsReport::tau)
        .def_readonly("outlier_method", &SavingsReport::outlier_method)
        .def_readonly("total_runs", &SavingsReport::total_runs)
        .def_readonly("estimated_runs", &SavingsReport::estimated_runs)
        .def_readonly("saved_runs", &SavingsReport::saved_runs)
        .def_readonly("pct_estimated", &SavingsReport::pct_estimated)
        .def_readonly("pct_saved", &SavingsReport::pct_saved)
        .def_readonly("pct_accurate", &SavingsReport::pct_accurate)
        .def_readonly("expected_saved_runs", &SavingsReport::expected_saved_runs)
        .def_readonly("pct_expected_saved", &SavingsReport::pct_expected_saved);
    m.def(
        "savings_report",
        [](const std::vector<EvaluationRecord>& r, std::size_t runs) { return savings_report(r, runs); },
        py::arg("records"), py::arg("runs_per_triplet") = kGroundTruthRuns);

    // --- experiment pipeline -----------------------------------------------

    m.def(
        "run_benchmark",
        [](const std::string& config_json) {
            const auto config = app::config_from_json(nlohmann::json::parse(config_json));
            config.validate();
            app::BenchmarkOutput out;
            {
                py::gil_scoped_release release;
                out = app::run_benchmark(config);
            }
            std::ostringstream csv;
            app::write_run_data(csv, out.rows);
            return csv.str();
        },
        py::arg("config_json") = "{}",
        "Runs the benchmark described by a JSON config and returns the run-data CSV text.");
}
