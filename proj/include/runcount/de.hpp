#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "runcount/problems.hpp"
#include "runcount/rng.hpp"

namespace runcount {

enum class DEStrategy {
    Rand1Bin,
    Rand1Exp,
    Rand2Bin,
    Rand2Exp,
    Best1Bin,
    Best1Exp,
    Best2Bin,
    Best2Exp,
    Best3Bin,
    RandRandBin,
    RandToBest1Bin,
    RandToBest1Exp,
};

inline constexpr std::size_t kStrategyCount = 12;

std::string_view to_string(DEStrategy strategy) noexcept;
DEStrategy parse_strategy(std::string_view text);

/// Smallest population the strategy can draw its distinct parents from.
std::size_t min_population(DEStrategy strategy) noexcept;

struct DEConfig {
    DEStrategy strategy = DEStrategy::Rand1Bin;
    double f = 0.5;                   // scaling factor, (0, 1)
    double cr = 0.9;                  // crossover probability, (0, 1)
    std::size_t population_size = 0;  // 0: use the problem dimension

    [[nodiscard]] std::size_t resolved_population(std::size_t dimension) const noexcept {
        return population_size == 0 ? dimension : population_size;
    }
    friend bool operator==(const DEConfig&, const DEConfig&) = default;
};

struct BudgetSpec {
    std::size_t max_evals = 0;          // 0: dimension * evals_per_dimension
    std::size_t evals_per_dimension = 10'000;
    std::size_t stagnation_iters = 100;
    double target_error = 1e-8;

    [[nodiscard]] std::size_t resolved_max_evals(std::size_t dimension) const noexcept {
        return max_evals == 0 ? dimension * evals_per_dimension : max_evals;
    }
};

enum class Termination { BudgetExhausted, Stagnation, TargetReached };

std::string_view to_string(Termination t) noexcept;

struct RunResult {
    double best_error = 0.0;
    std::size_t evals_used = 0;
    Termination termination = Termination::BudgetExhausted;
    std::uint64_t seed = 0;
    std::size_t generations = 0;
    std::vector<double> best_error_trace;   // best error after each generation, when requested

    friend bool operator==(const RunResult&, const RunResult&) = default;
};

struct DERunOptions {
    bool record_trace = false;
};

/// One seeded run of classic DE/x/y/z: uniform initialisation in the box,
/// mutation per strategy with mutually distinct parents (also distinct from
/// the target), binomial or exponential crossover, clamping to the box and
/// greedy one-to-one selection. Stops at the first of: evaluation budget
/// spent, stagnation_iters generations without strict improvement of the best
/// error, best error <= target_error.
[[nodiscard]] RunResult de_run(const ProblemInstance& instance, const DEConfig& config, const BudgetSpec& budget,
                               std::uint64_t seed, DERunOptions options = {});

/// `count` configurations with strategy, F and Cr drawn uniformly.
[[nodiscard]] std::vector<DEConfig> sample_config_space(std::size_t count, std::uint64_t seed);

/// Crossover building blocks, exposed for testing. Both write into `trial`
/// (which starts as the target) and return the number of mutant coordinates
/// copied.
std::size_t binomial_crossover(std::span<double> trial, std::span<const double> mutant, double cr, Rng& rng);
std::size_t exponential_crossover(std::span<double> trial, std::span<const double> mutant, double cr, Rng& rng);

}  // namespace runcount
