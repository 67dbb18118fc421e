#include "runcount/stopping_rule.hpp"

#include <cmath>
#include <utility>

#include "runcount/error.hpp"

namespace runcount {

void EstimatorConfig::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorKind::BadConfig, "tau must be positive");
    if (initial_runs < 3) throw Error(ErrorKind::BadConfig, "initial_runs must be at least 3");
    if (max_runs < initial_runs) throw Error(ErrorKind::BadConfig, "max_runs must be >= initial_runs");
    if (min_retained < 3) throw Error(ErrorKind::BadConfig, "min_retained must be at least 3");
}

SymmetryAssessment assess(std::span<const double> sample, const EstimatorConfig& config) {
    if (sample.size() < config.initial_runs || sample.size() < 3) {
        throw Error(ErrorKind::SampleTooSmall, "assessment needs at least initial_runs values");
    }
    const OutlierReport report = detect_outliers(sample, config.outlier_method);

    SymmetryAssessment out;
    out.outliers_removed = report.flagged_count();
    out.retained = report.retained_count;
    if (out.retained < config.min_retained) {
        out.skewness_value = std::numeric_limits<double>::infinity();
        out.symmetric = false;
        return out;
    }
    const auto kept = remove_flagged(sample, report);
    out.skewness_value = skewness(kept);
    out.symmetric = -config.tau <= out.skewness_value && out.skewness_value <= config.tau;
    return out;
}

std::string_view to_string(EstimatorPhase phase) noexcept {
    switch (phase) {
        case EstimatorPhase::Collecting: return "Collecting";
        case EstimatorPhase::Stopped: return "Stopped";
        case EstimatorPhase::Exhausted: return "Exhausted";
    }
    return "?";
}

EstimatorState::EstimatorState(EstimatorConfig config) : config_(config) { config_.validate(); }

EstimatorState observe(EstimatorState state, double value) {
    if (!state.collecting()) throw Error(ErrorKind::AlreadyStopped, "estimator already reached a decision");
    state.observed_.push_back(value);

    const std::size_t p = state.observed_.size();
    if (p < state.config_.initial_runs) return state;

    state.last_ = assess(state.observed_.values(), state.config_);
    if (state.last_->symmetric) {
        state.phase_ = EstimatorPhase::Stopped;
    } else if (p >= state.config_.max_runs) {
        state.phase_ = EstimatorPhase::Exhausted;
    }
    return state;
}

RunCountEstimate estimate_from_prefixes(std::span<const double> full, const EstimatorConfig& config) {
    config.validate();
    if (full.size() < config.initial_runs) {
        throw Error(ErrorKind::SampleTooSmall, "run set is shorter than initial_runs");
    }
    EstimatorState state(config);
    for (double x : full) {
        state = observe(std::move(state), x);
        if (!state.collecting()) break;
    }
    return {state.runs(), state.phase() == EstimatorPhase::Stopped};
}

}  // namespace runcount
