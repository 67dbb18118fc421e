#include "runcount/de.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>
#include <string>

#include "runcount/error.hpp"

namespace runcount {

namespace {

struct StrategyInfo {
    DEStrategy strategy;
    std::string_view name;
    std::size_t random_parents;   // distinct members drawn besides the target
    bool exponential;
};

constexpr std::array<StrategyInfo, kStrategyCount> kStrategies = {{
    {DEStrategy::Rand1Bin, "rand/1/bin", 3, false},
    {DEStrategy::Rand1Exp, "rand/1/exp", 3, true},
    {DEStrategy::Rand2Bin, "rand/2/bin", 5, false},
    {DEStrategy::Rand2Exp, "rand/2/exp", 5, true},
    {DEStrategy::Best1Bin, "best/1/bin", 2, false},
    {DEStrategy::Best1Exp, "best/1/exp", 2, true},
    {DEStrategy::Best2Bin, "best/2/bin", 4, false},
    {DEStrategy::Best2Exp, "best/2/exp", 4, true},
    {DEStrategy::Best3Bin, "best/3/bin", 6, false},
    {DEStrategy::RandRandBin, "rand/rand/bin", 3, false},
    {DEStrategy::RandToBest1Bin, "randtobest/1/bin", 2, false},
    {DEStrategy::RandToBest1Exp, "randtobest/1/exp", 2, true},
}};

const StrategyInfo& info(DEStrategy s) { return kStrategies[static_cast<std::size_t>(s)]; }

std::size_t difference_pairs(DEStrategy s) {
    switch (s) {
        case DEStrategy::Rand2Bin:
        case DEStrategy::Rand2Exp:
        case DEStrategy::Best2Bin:
        case DEStrategy::Best2Exp:
            return 2;
        case DEStrategy::Best3Bin:
            return 3;
        default:
            return 1;
    }
}

/// Working state of a single run. Population rows are contiguous.
class Engine {
public:
    Engine(const ProblemInstance& instance, const DEConfig& config, const BudgetSpec& budget, std::uint64_t seed,
           DERunOptions options)
        : inst_(instance),
          cfg_(config),
          dim_(instance.dimension),
          np_(config.resolved_population(instance.dimension)),
          max_evals_(budget.resolved_max_evals(instance.dimension)),
          stagnation_limit_(budget.stagnation_iters),
          target_(budget.target_error),
          rng_(seed),
          options_(options),
          pop_(np_ * dim_),
          next_(np_ * dim_),
          fitness_(np_),
          next_fitness_(np_),
          mutant_(dim_),
          trial_(dim_),
          scratch_(2 * dim_) {
        result_.seed = seed;
    }

    RunResult run() {
        if (initialise()) return finish();
        std::size_t stale = 0;
        for (;;) {
            const double before = best_error_;
            if (generation()) return finish();
            ++result_.generations;
            if (options_.record_trace) result_.best_error_trace.push_back(best_error_);
            stale = best_error_ < before ? 0 : stale + 1;
            if (stale >= stagnation_limit_) {
                result_.termination = Termination::Stagnation;
                return finish();
            }
        }
    }

private:
    std::span<double> row(std::vector<double>& m, std::size_t i) { return {m.data() + i * dim_, dim_}; }

    /// Evaluates x and updates the best-so-far error. Returns true when a
    /// termination criterion fired.
    bool evaluate_point(std::span<const double> x, double& out_f) {
        out_f = evaluate(inst_, x, scratch_);
        ++evals_;
        const double err = error_to_optimum(inst_, out_f);
        if (err < best_error_) best_error_ = err;
        if (best_error_ <= target_) {
            result_.termination = Termination::TargetReached;
            return true;
        }
        if (evals_ >= max_evals_) {
            result_.termination = Termination::BudgetExhausted;
            return true;
        }
        return false;
    }

    bool initialise() {
        for (std::size_t i = 0; i < np_; ++i) {
            auto x = row(pop_, i);
            for (double& v : x) v = rng_.uniform(kLowerBound, kUpperBound);
        }
        // Rows not reached before a stop keep +inf fitness and never win selection.
        std::fill(fitness_.begin(), fitness_.end(), std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < np_; ++i) {
            if (evaluate_point(row(pop_, i), fitness_[i])) return true;
        }
        return false;
    }

    /// Draws `count` members distinct from each other and from `target`.
    void pick_parents(std::size_t target, std::size_t count) {
        for (std::size_t k = 0; k < count; ++k) {
            std::size_t r;
            bool clash;
            do {
                r = rng_.index(np_);
                clash = r == target || std::find(parents_.begin(), parents_.begin() + k, r) != parents_.begin() + k;
            } while (clash);
            parents_[k] = r;
        }
    }

    void build_mutant(std::size_t target, std::size_t best) {
        const DEStrategy s = cfg_.strategy;
        pick_parents(target, info(s).random_parents);
        const double f = cfg_.f;
        const auto x = [&](std::size_t member, std::size_t j) { return pop_[member * dim_ + j]; };

        for (std::size_t j = 0; j < dim_; ++j) {
            double v = 0.0;
            switch (s) {
                case DEStrategy::Rand1Bin:
                case DEStrategy::Rand1Exp:
                case DEStrategy::RandRandBin:
                case DEStrategy::Rand2Bin:
                case DEStrategy::Rand2Exp: {
                    v = x(parents_[0], j);
                    for (std::size_t p = 0; p < difference_pairs(s); ++p)
                        v += f * (x(parents_[1 + 2 * p], j) - x(parents_[2 + 2 * p], j));
                    break;
                }
                case DEStrategy::Best1Bin:
                case DEStrategy::Best1Exp:
                case DEStrategy::Best2Bin:
                case DEStrategy::Best2Exp:
                case DEStrategy::Best3Bin: {
                    v = x(best, j);
                    for (std::size_t p = 0; p < difference_pairs(s); ++p)
                        v += f * (x(parents_[2 * p], j) - x(parents_[2 * p + 1], j));
                    break;
                }
                case DEStrategy::RandToBest1Bin:
                case DEStrategy::RandToBest1Exp: {
                    const double xi = x(target, j);
                    v = xi + f * (x(best, j) - xi) + f * (x(parents_[0], j) - x(parents_[1], j));
                    break;
                }
            }
            mutant_[j] = v;
        }
    }

    bool generation() {
        const auto best = static_cast<std::size_t>(std::min_element(fitness_.begin(), fitness_.end()) - fitness_.begin());
        for (std::size_t i = 0; i < np_; ++i) {
            build_mutant(i, best);
            const auto target = row(pop_, i);
            std::copy(target.begin(), target.end(), trial_.begin());
            if (info(cfg_.strategy).exponential) {
                exponential_crossover(trial_, mutant_, cfg_.cr, rng_);
            } else {
                binomial_crossover(trial_, mutant_, cfg_.cr, rng_);
            }
            for (double& v : trial_) v = std::clamp(v, kLowerBound, kUpperBound);

            double f_trial = 0.0;
            const bool stop = evaluate_point(trial_, f_trial);
            auto dest = row(next_, i);
            if (f_trial <= fitness_[i]) {
                std::copy(trial_.begin(), trial_.end(), dest.begin());
                next_fitness_[i] = f_trial;
            } else {
                std::copy(target.begin(), target.end(), dest.begin());
                next_fitness_[i] = fitness_[i];
            }
            if (stop) return true;
        }
        pop_.swap(next_);
        fitness_.swap(next_fitness_);
        return false;
    }

    RunResult finish() {
        result_.best_error = best_error_;
        result_.evals_used = evals_;
        return std::move(result_);
    }

    const ProblemInstance& inst_;
    const DEConfig& cfg_;
    std::size_t dim_;
    std::size_t np_;
    std::size_t max_evals_;
    std::size_t stagnation_limit_;
    double target_;
    Rng rng_;
    DERunOptions options_;

    std::vector<double> pop_;
    std::vector<double> next_;
    std::vector<double> fitness_;
    std::vector<double> next_fitness_;
    std::vector<double> mutant_;
    std::vector<double> trial_;
    std::vector<double> scratch_;
    std::array<std::size_t, 6> parents_{};

    std::size_t evals_ = 0;
    double best_error_ = std::numeric_limits<double>::infinity();
    RunResult result_;
};

}  // namespace

std::string_view to_string(DEStrategy strategy) noexcept { return info(strategy).name; }

DEStrategy parse_strategy(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (const auto& s : kStrategies)
        if (s.name == lower) return s.strategy;
    throw Error(ErrorKind::BadConfig, "unknown DE strategy '" + std::string(text) + "'");
}

std::size_t min_population(DEStrategy strategy) noexcept { return difference_pairs(strategy) > 1 ? 7 : 4; }

std::string_view to_string(Termination t) noexcept {
    switch (t) {
        case Termination::BudgetExhausted: return "BudgetExhausted";
        case Termination::Stagnation: return "Stagnation";
        case Termination::TargetReached: return "TargetReached";
    }
    return "?";
}

std::size_t binomial_crossover(std::span<double> trial, std::span<const double> mutant, double cr, Rng& rng) {
    const std::size_t forced = rng.index(trial.size());
    std::size_t copied = 0;
    for (std::size_t j = 0; j < trial.size(); ++j) {
        if (j == forced || rng.uniform01() < cr) {
            trial[j] = mutant[j];
            ++copied;
        }
    }
    return copied;
}

std::size_t exponential_crossover(std::span<double> trial, std::span<const double> mutant, double cr, Rng& rng) {
    const std::size_t d = trial.size();
    std::size_t j = rng.index(d);
    std::size_t copied = 0;
    do {
        trial[j] = mutant[j];
        j = (j + 1) % d;
        ++copied;
    } while (copied < d && rng.uniform01() < cr);
    return copied;
}

RunResult de_run(const ProblemInstance& instance, const DEConfig& config, const BudgetSpec& budget,
                 std::uint64_t seed, DERunOptions options) {
    if (!(config.f > 0.0 && config.f < 1.0)) throw Error(ErrorKind::BadConfig, "F must lie in (0, 1)");
    if (!(config.cr > 0.0 && config.cr < 1.0)) throw Error(ErrorKind::BadConfig, "Cr must lie in (0, 1)");
    const std::size_t np = config.resolved_population(instance.dimension);
    if (np < min_population(config.strategy)) {
        throw Error(ErrorKind::BadConfig, "population of " + std::to_string(np) + " is too small for " +
                                              std::string(to_string(config.strategy)) + " (needs " +
                                              std::to_string(min_population(config.strategy)) + ")");
    }
    if (budget.resolved_max_evals(instance.dimension) == 0 || budget.stagnation_iters == 0 ||
        !(budget.target_error > 0.0)) {
        throw Error(ErrorKind::BadBudget, "budget limits must all be positive");
    }
    if (instance.shift.size() != instance.dimension ||
        instance.rotation.entries.size() != instance.dimension * instance.dimension) {
        throw Error(ErrorKind::DimensionMismatch, "instance data does not match its dimension");
    }
    return Engine(instance, config, budget, seed, options).run();
}

std::vector<DEConfig> sample_config_space(std::size_t count, std::uint64_t seed) {
    Rng rng(derive_seed({hash_string("de-config-space"), seed}));
    std::vector<DEConfig> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        DEConfig c;
        c.strategy = static_cast<DEStrategy>(rng.index(kStrategyCount));
        c.f = rng.uniform_open01();
        c.cr = rng.uniform_open01();
        out.push_back(c);
    }
    return out;
}

}  // namespace runcount
