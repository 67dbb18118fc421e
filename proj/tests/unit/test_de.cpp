#include <doctest.h>

#include <algorithm>
#include <set>
#include <thread>
#include <vector>

#include "runcount/de.hpp"
#include "runcount/error.hpp"
#include "runcount/parallel.hpp"

using namespace runcount;

namespace {

BudgetSpec small_budget(std::size_t evals_per_dim = 500) {
    BudgetSpec b;
    b.evals_per_dimension = evals_per_dim;
    return b;
}

constexpr DEStrategy kAll[] = {
    DEStrategy::Rand1Bin, DEStrategy::Rand1Exp,  DEStrategy::Rand2Bin,    DEStrategy::Rand2Exp,
    DEStrategy::Best1Bin, DEStrategy::Best1Exp,  DEStrategy::Best2Bin,    DEStrategy::Best2Exp,
    DEStrategy::Best3Bin, DEStrategy::RandRandBin, DEStrategy::RandToBest1Bin, DEStrategy::RandToBest1Exp,
};

}  // namespace

TEST_CASE("strategy names round-trip") {
    for (DEStrategy s : kAll) CHECK(parse_strategy(to_string(s)) == s);
    CHECK(parse_strategy("Rand/1/Bin") == DEStrategy::Rand1Bin);
    CHECK_THROWS_AS((void)parse_strategy("current/1/bin"), Error);
    CHECK(min_population(DEStrategy::Rand1Bin) == 4);
    CHECK(min_population(DEStrategy::Rand2Exp) == 7);
    CHECK(min_population(DEStrategy::Best3Bin) == 7);
}

TEST_CASE("contract bounds for every strategy") {
    const auto sphere = canonical_instance(ProblemId::Sphere, 10);
    for (DEStrategy s : kAll) {
        const DEConfig cfg{s, 0.5, 0.9, 0};
        const auto budget = small_budget(200);
        const auto r = de_run(sphere, cfg, budget, 1);
        CHECK(r.best_error >= 0.0);
        CHECK(r.evals_used <= budget.resolved_max_evals(10));
        CHECK(r.seed == 1);
        if (r.termination == Termination::TargetReached) CHECK(r.best_error <= budget.target_error);
        if (r.best_error <= budget.target_error) CHECK(r.termination == Termination::TargetReached);
    }
}

TEST_CASE("DE solves the sphere") {
    // with a population of only D members, F = 0.5 tends to stall; 0.8 keeps enough spread
    const auto inst = make_instance(ProblemId::Sphere, 1, 10);
    const auto r = de_run(inst, {DEStrategy::Rand1Bin, 0.8, 0.9, 0}, BudgetSpec{}, 42);
    CHECK(r.termination == Termination::TargetReached);
    CHECK(r.best_error <= 1e-8);
    CHECK(r.evals_used < 100'000);
}

TEST_CASE("runs are bit-identical across executions and threads") {
    const auto inst = canonical_instance(ProblemId::Sphere, 10);
    const DEConfig cfg{DEStrategy::Rand1Bin, 0.5, 0.9, 0};
    const auto first = de_run(inst, cfg, BudgetSpec{}, 42, {.record_trace = true});
    CHECK(first == de_run(inst, cfg, BudgetSpec{}, 42, {.record_trace = true}));

    std::vector<RunResult> results(8);
    parallel_for(results.size(), 4, [&](std::size_t i) {
        results[i] = de_run(inst, cfg, BudgetSpec{}, 42, {.record_trace = true});
    });
    for (const auto& r : results) CHECK(r == first);

    CHECK(de_run(inst, cfg, BudgetSpec{}, 43) != de_run(inst, cfg, BudgetSpec{}, 42));
}

TEST_CASE("best error is non-increasing across generations") {
    for (DEStrategy s : kAll) {
        const auto inst = make_instance(ProblemId::Rastrigin, 2, 10);
        const auto r = de_run(inst, {s, 0.7, 0.3, 0}, small_budget(300), 5, {.record_trace = true});
        REQUIRE(!r.best_error_trace.empty());
        CHECK(std::is_sorted(r.best_error_trace.rbegin(), r.best_error_trace.rend()));
        CHECK(r.best_error <= r.best_error_trace.back());
    }
}

TEST_CASE("stagnation fires after exactly stagnation_iters flat generations") {
    // F and Cr tiny on a multimodal function: progress stalls quickly.
    const auto inst = make_instance(ProblemId::Schaffers, 1, 10);
    BudgetSpec budget;
    budget.stagnation_iters = 5;
    int seen = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto r = de_run(inst, {DEStrategy::Best1Bin, 0.05, 0.05, 0}, budget, seed, {.record_trace = true});
        if (r.termination != Termination::Stagnation) continue;
        ++seen;
        const auto& t = r.best_error_trace;
        REQUIRE(t.size() >= 5);
        CHECK(r.generations == t.size());
        // the last five generations failed to improve on the one before them
        const std::size_t k = t.size();
        if (k > 5)
            for (std::size_t g = k - 5; g < k; ++g) CHECK(t[g] == t[k - 6]);
        // and no earlier window of five flat generations exists
        std::size_t stale = 0;
        for (std::size_t g = 1; g + 1 < k; ++g) {
            stale = t[g] < t[g - 1] ? 0 : stale + 1;
            CHECK(stale < 5);
        }
    }
    CHECK(seen > 0);
}

TEST_CASE("budget exhaustion stops exactly at max_evals") {
    const auto inst = make_instance(ProblemId::Rastrigin, 1, 10);
    BudgetSpec budget;
    budget.max_evals = 137;
    const auto r = de_run(inst, {DEStrategy::Rand1Exp, 0.5, 0.5, 0}, budget, 9);
    CHECK(r.termination == Termination::BudgetExhausted);
    CHECK(r.evals_used == 137);
}

TEST_CASE("configuration errors") {
    const auto inst = canonical_instance(ProblemId::Sphere, 10);
    auto kind_of = [&](DEConfig cfg, BudgetSpec budget, const ProblemInstance& pi) {
        try {
            (void)de_run(pi, cfg, budget, 1);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::EmptyInput;   // sentinel: nothing thrown
    };
    CHECK(kind_of({DEStrategy::Rand1Bin, 0.0, 0.5, 0}, {}, inst) == ErrorKind::BadConfig);
    CHECK(kind_of({DEStrategy::Rand1Bin, 1.0, 0.5, 0}, {}, inst) == ErrorKind::BadConfig);
    CHECK(kind_of({DEStrategy::Rand1Bin, 0.5, 0.0, 0}, {}, inst) == ErrorKind::BadConfig);
    CHECK(kind_of({DEStrategy::Rand1Bin, 0.5, 1.0, 0}, {}, inst) == ErrorKind::BadConfig);
    CHECK(kind_of({DEStrategy::Rand1Bin, 0.5, 0.5, 3}, {}, inst) == ErrorKind::BadConfig);
    CHECK(kind_of({DEStrategy::Best2Bin, 0.5, 0.5, 6}, {}, inst) == ErrorKind::BadConfig);

    const auto small = canonical_instance(ProblemId::Sphere, 5);
    CHECK(kind_of({DEStrategy::Rand2Bin, 0.5, 0.5, 0}, {}, small) == ErrorKind::BadConfig);
    CHECK(kind_of({DEStrategy::Rand1Bin, 0.5, 0.5, 0}, small_budget(10), small) == ErrorKind::EmptyInput);

    BudgetSpec no_stagnation;
    no_stagnation.stagnation_iters = 0;
    CHECK(kind_of({DEStrategy::Rand1Bin, 0.5, 0.5, 0}, no_stagnation, inst) == ErrorKind::BadBudget);
    BudgetSpec no_target;
    no_target.target_error = 0.0;
    CHECK(kind_of({DEStrategy::Rand1Bin, 0.5, 0.5, 0}, no_target, inst) == ErrorKind::BadBudget);

    auto broken = inst;
    broken.shift.pop_back();
    CHECK(kind_of({DEStrategy::Rand1Bin, 0.5, 0.5, 0}, {}, broken) == ErrorKind::DimensionMismatch);
}

TEST_CASE("config space sampling") {
    const auto configs = sample_config_space(104, 2024);
    CHECK(configs.size() == 104);
    for (const auto& c : configs) {
        CHECK(c.f > 0.0);
        CHECK(c.f < 1.0);
        CHECK(c.cr > 0.0);
        CHECK(c.cr < 1.0);
        CHECK(c.population_size == 0);
    }
    CHECK(sample_config_space(1, 8) == sample_config_space(1, 8));
    CHECK(sample_config_space(104, 2024) == configs);

    std::set<DEStrategy> seen;
    for (const auto& c : sample_config_space(1000, 3)) seen.insert(c.strategy);
    CHECK(seen.size() == kStrategyCount);
}

TEST_CASE("binomial crossover always takes at least one mutant coordinate") {
    Rng rng(1);
    for (int k = 0; k < 2000; ++k) {
        std::vector<double> trial(10, 0.0);
        const std::vector<double> mutant(10, 1.0);
        const double cr = k % 2 ? 1e-9 : rng.uniform_open01();
        const auto copied = binomial_crossover(trial, mutant, cr, rng);
        CHECK(copied >= 1);
        CHECK(copied == static_cast<std::size_t>(std::count(trial.begin(), trial.end(), 1.0)));
    }
}

TEST_CASE("exponential crossover copies one contiguous circular block") {
    Rng rng(2);
    for (int k = 0; k < 2000; ++k) {
        const std::size_t d = 2 + k % 9;
        std::vector<double> trial(d, 0.0);
        const std::vector<double> mutant(d, 1.0);
        const auto copied = exponential_crossover(trial, mutant, rng.uniform_open01(), rng);
        REQUIRE(copied >= 1);
        REQUIRE(copied <= d);
        CHECK(copied == static_cast<std::size_t>(std::count(trial.begin(), trial.end(), 1.0)));
        // a circular block has at most one 0 -> 1 transition
        std::size_t rises = 0;
        for (std::size_t j = 0; j < d; ++j) rises += trial[j] == 0.0 && trial[(j + 1) % d] == 1.0;
        CHECK(rises <= 1);
    }
}
