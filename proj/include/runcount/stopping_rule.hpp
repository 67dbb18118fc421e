#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>

#include "runcount/stats.hpp"

namespace runcount {

struct EstimatorConfig {
    double tau = 0.05;              // symmetric skewness band [-tau, tau]
    std::size_t initial_runs = 5;
    std::size_t max_runs = 50;
    OutlierMethod outlier_method = OutlierMethod::ModifiedZ;
    std::size_t min_retained = 3;   // fewer retained values than this fails the check

    /// Throws BadConfig when the parameters are inconsistent.
    void validate() const;
};

struct SymmetryAssessment {
    double skewness_value = 0.0;    // +inf when fewer than min_retained values survive filtering
    std::size_t outliers_removed = 0;
    std::size_t retained = 0;
    bool symmetric = false;

    [[nodiscard]] bool computable() const noexcept { return skewness_value != std::numeric_limits<double>::infinity(); }
};

/// Filter outliers, then test -tau <= skewness <= tau on what remains.
[[nodiscard]] SymmetryAssessment assess(std::span<const double> sample, const EstimatorConfig& config);

enum class EstimatorPhase { Collecting, Stopped, Exhausted };

std::string_view to_string(EstimatorPhase phase) noexcept;

/// Accumulated runs of the online estimator. Updated functionally through
/// observe(); the phase only ever moves Collecting -> Stopped | Exhausted.
class EstimatorState {
public:
    explicit EstimatorState(EstimatorConfig config);

    [[nodiscard]] const EstimatorConfig& config() const noexcept { return config_; }
    [[nodiscard]] const RunSample& observed() const noexcept { return observed_; }
    [[nodiscard]] EstimatorPhase phase() const noexcept { return phase_; }
    [[nodiscard]] bool collecting() const noexcept { return phase_ == EstimatorPhase::Collecting; }
    /// Number of runs the estimate settled on; only meaningful once not collecting.
    [[nodiscard]] std::size_t runs() const noexcept { return observed_.size(); }
    /// Result of the most recent symmetry check, if one has run.
    [[nodiscard]] const std::optional<SymmetryAssessment>& last_assessment() const noexcept { return last_; }

    friend EstimatorState observe(EstimatorState state, double value);

private:
    EstimatorConfig config_;
    RunSample observed_;
    EstimatorPhase phase_ = EstimatorPhase::Collecting;
    std::optional<SymmetryAssessment> last_;
};

/// Adds one run result and re-runs the full check from scratch on all runs so
/// far (outliers are re-detected on every prefix). Throws AlreadyStopped or
/// NonFiniteValue.
[[nodiscard]] EstimatorState observe(EstimatorState state, double value);

struct RunCountEstimate {
    std::size_t n = 0;
    bool converged = false;   // false when max_runs (or the end of `full`) was hit first

    friend bool operator==(const RunCountEstimate&, const RunCountEstimate&) = default;
};

/// Replays observe() over the prefixes of an already collected run set.
[[nodiscard]] RunCountEstimate estimate_from_prefixes(std::span<const double> full, const EstimatorConfig& config);

}  // namespace runcount
