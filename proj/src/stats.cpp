#include "runcount/stats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "runcount/error.hpp"
#include "runcount/rng.hpp"

namespace runcount {

namespace {

void require_finite(double v) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteValue, "run values must be finite");
}

void require_non_empty(std::span<const double> sample) {
    if (sample.empty()) throw Error(ErrorKind::EmptySample, "sample has no values");
}

std::vector<double> sorted_copy(std::span<const double> sample) {
    std::vector<double> out(sample.begin(), sample.end());
    std::sort(out.begin(), out.end());
    return out;
}

// Fence comparisons allow this much slack relative to the sample's largest
// magnitude, so a value sitting on a fence is still retained after the
// rounding introduced by rescaling or shifting the sample.
constexpr double kFenceSlack = 1e-12;

double fence_slack(std::span<const double> sample) {
    double biggest = 0.0;
    for (double v : sample) biggest = std::max(biggest, std::abs(v));
    return kFenceSlack * biggest;
}

OutlierReport flag_outside(std::span<const double> sample, double lo, double hi) {
    const double slack = fence_slack(sample);
    lo -= slack;
    hi += slack;
    OutlierReport report;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (sample[i] < lo || sample[i] > hi) report.flagged_indices.push_back(i);
    }
    report.retained_count = sample.size() - report.flagged_indices.size();
    return report;
}

constexpr double kModifiedZScale = 0.6745;
constexpr double kModifiedZCutoff = 3.5;

OutlierReport modified_z(std::span<const double> sample) {
    const double med = median(sample);
    std::vector<double> deviations(sample.size());
    std::transform(sample.begin(), sample.end(), deviations.begin(),
                   [med](double x) { return std::abs(x - med); });

    double spread = median(deviations);
    if (spread == 0.0) spread = mean(deviations);

    OutlierReport report;
    if (spread > 0.0) {
        // |0.6745 (x - median) / spread| > 3.5, rearranged into distance space
        const double limit = kModifiedZCutoff * spread / kModifiedZScale + fence_slack(sample);
        for (std::size_t i = 0; i < sample.size(); ++i) {
            if (deviations[i] > limit) report.flagged_indices.push_back(i);
        }
    }
    report.retained_count = sample.size() - report.flagged_indices.size();
    return report;
}

void check_level(double level) {
    if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::BadParameters, "confidence level must lie in (0, 1)");
}

}  // namespace

RunSample::RunSample(std::vector<double> values) : values_(std::move(values)) {
    std::for_each(values_.begin(), values_.end(), require_finite);
}

RunSample::RunSample(std::initializer_list<double> values) : RunSample(std::vector<double>(values)) {}

void RunSample::push_back(double value) {
    require_finite(value);
    values_.push_back(value);
}

RunSample RunSample::prefix(std::size_t count) const {
    count = std::min(count, values_.size());
    RunSample out;
    out.values_.assign(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(count));
    return out;
}

std::string_view to_string(OutlierMethod method) noexcept {
    switch (method) {
        case OutlierMethod::IQR: return "IQR";
        case OutlierMethod::Percentile: return "Percentile";
        case OutlierMethod::ModifiedZ: return "MAD";
    }
    return "?";
}

OutlierMethod parse_outlier_method(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "iqr") return OutlierMethod::IQR;
    if (lower == "percentile") return OutlierMethod::Percentile;
    if (lower == "mad" || lower == "modifiedz" || lower == "modified_z") return OutlierMethod::ModifiedZ;
    throw Error(ErrorKind::BadParameters, "unknown outlier method '" + std::string(text) + "'");
}

double mean(std::span<const double> sample) {
    require_non_empty(sample);
    return std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(sample.size());
}

CenteredSample center(std::span<const double> sample) {
    const double m = mean(sample);
    CenteredSample out;
    out.values.reserve(sample.size());
    for (double x : sample) out.values.push_back(x - m);
    return out;
}

double skewness(std::span<const double> sample) {
    if (sample.size() < 3) throw Error(ErrorKind::SampleTooSmall, "skewness needs at least 3 values");
    const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
    if (*lo == *hi) return 0.0;

    const double m = mean(sample);
    double m2 = 0.0;
    double m3 = 0.0;
    for (double x : sample) {
        const double d = x - m;
        m2 += d * d;
        m3 += d * d * d;
    }
    const auto n = static_cast<double>(sample.size());
    m2 /= n;
    m3 /= n;
    return m3 / std::pow(m2, 1.5);
}

double quantile_sorted(std::span<const double> sorted, double q) {
    require_non_empty(sorted);
    if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorKind::QOutOfRange, "quantile level must lie in [0, 1]");
    const double h = static_cast<double>(sorted.size() - 1) * q;
    const double floor_h = std::floor(h);
    const auto lo = static_cast<std::size_t>(floor_h);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - floor_h) * (sorted[hi] - sorted[lo]);
}

double quantile(std::span<const double> sample, double q) {
    require_non_empty(sample);
    return quantile_sorted(sorted_copy(sample), q);
}

double median(std::span<const double> sample) { return quantile(sample, 0.5); }

OutlierReport detect_outliers(std::span<const double> sample, OutlierMethod method) {
    if (sample.size() < 3) throw Error(ErrorKind::SampleTooSmall, "outlier detection needs at least 3 values");
    switch (method) {
        case OutlierMethod::IQR: {
            const auto sorted = sorted_copy(sample);
            const double q1 = quantile_sorted(sorted, 0.25);
            const double q3 = quantile_sorted(sorted, 0.75);
            const double iqr = q3 - q1;
            return flag_outside(sample, q1 - 1.5 * iqr, q3 + 1.5 * iqr);
        }
        case OutlierMethod::Percentile: {
            const auto sorted = sorted_copy(sample);
            return flag_outside(sample, quantile_sorted(sorted, 0.025), quantile_sorted(sorted, 0.975));
        }
        case OutlierMethod::ModifiedZ:
            return modified_z(sample);
    }
    return {};
}

std::vector<double> remove_flagged(std::span<const double> sample, const OutlierReport& report) {
    std::vector<double> kept;
    kept.reserve(sample.size());
    auto flag = report.flagged_indices.begin();
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (flag != report.flagged_indices.end() && *flag == i) {
            ++flag;
            continue;
        }
        kept.push_back(sample[i]);
    }
    return kept;
}

BootstrapResult bootstrap_mean_diff_ci(std::span<const double> a, std::span<const double> b, std::size_t resamples,
                                       std::size_t resample_size, double level, std::uint64_t rng_seed) {
    require_non_empty(a);
    require_non_empty(b);
    if (resamples < 100) throw Error(ErrorKind::BadParameters, "at least 100 bootstrap resamples are required");
    if (resample_size < 1) throw Error(ErrorKind::BadParameters, "resample size must be positive");
    check_level(level);

    Rng rng(rng_seed);
    BootstrapResult out;
    out.diffs.reserve(resamples);
    out.means_a.reserve(resamples);
    out.means_b.reserve(resamples);

    const auto draw_mean = [&](std::span<const double> source) {
        double sum = 0.0;
        for (std::size_t k = 0; k < resample_size; ++k) sum += source[rng.index(source.size())];
        return sum / static_cast<double>(resample_size);
    };

    double total_a = 0.0;
    double total_b = 0.0;
    for (std::size_t r = 0; r < resamples; ++r) {
        const double ma = draw_mean(a);
        const double mb = draw_mean(b);
        out.means_a.push_back(ma);
        out.means_b.push_back(mb);
        out.diffs.push_back(ma - mb);
        total_a += ma;
        total_b += mb;
    }
    out.mean_of_means_a = total_a / static_cast<double>(resamples);
    out.mean_of_means_b = total_b / static_cast<double>(resamples);

    const auto sorted = sorted_copy(out.diffs);
    const double tail = (1.0 - level) / 2.0;
    out.ci = {quantile_sorted(sorted, tail), quantile_sorted(sorted, 1.0 - tail), level, IntervalMethod::Percentile};
    return out;
}

double jackknife_acceleration(std::span<const double> a, std::span<const double> b) {
    // Influence values U_i = (n - 1)(mean of leave-one-out stats - leave-one-out stat_i)
    // per sample, combined as in the multi-sample jackknife.
    const double mean_b = mean(b);
    const double mean_a = mean(a);
    double num = 0.0;
    double den = 0.0;

    const auto accumulate_side = [&](std::span<const double> side, double side_sum, double sign, double other_mean) {
        const auto n = static_cast<double>(side.size());
        if (side.size() < 2) return;
        std::vector<double> loo(side.size());
        for (std::size_t i = 0; i < side.size(); ++i) {
            const double without = (side_sum - side[i]) / (n - 1.0);
            loo[i] = sign * (without - other_mean);  // a: without - mean(b); b: mean(a) - without
        }
        const double loo_mean = std::accumulate(loo.begin(), loo.end(), 0.0) / n;
        double s2 = 0.0;
        double s3 = 0.0;
        for (double t : loo) {
            const double u = (n - 1.0) * (loo_mean - t);
            s2 += u * u;
            s3 += u * u * u;
        }
        num += s3 / (n * n * n);
        den += s2 / (n * n);
    };

    accumulate_side(a, std::accumulate(a.begin(), a.end(), 0.0), 1.0, mean_b);
    accumulate_side(b, std::accumulate(b.begin(), b.end(), 0.0), -1.0, mean_a);
    if (den <= 0.0) return 0.0;
    return num / (6.0 * std::pow(den, 1.5));
}

ConfidenceInterval bca_ci(std::span<const double> diffs, std::span<const double> a, std::span<const double> b,
                          double level) {
    require_non_empty(diffs);
    require_non_empty(a);
    require_non_empty(b);
    check_level(level);

    const auto sorted = sorted_copy(diffs);
    if (sorted.front() == sorted.back()) return {sorted.front(), sorted.front(), level, IntervalMethod::BCa};

    const double observed = mean(a) - mean(b);
    const auto m = static_cast<double>(sorted.size());
    const auto below = static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), observed) - sorted.begin());
    // A share of exactly 0 or 1 would put the bias correction at infinity.
    const double share = std::clamp(below / m, 0.5 / m, 1.0 - 0.5 / m);
    const double z0 = normal_quantile(share);
    const double accel = jackknife_acceleration(a, b);

    const auto adjusted = [&](double tail_prob) {
        const double z = normal_quantile(tail_prob);
        const double denom = 1.0 - accel * (z0 + z);
        if (denom <= 0.0) return z0 + z > 0.0 ? 1.0 : 0.0;
        return std::clamp(normal_cdf(z0 + (z0 + z) / denom), 0.0, 1.0);
    };

    const double tail = (1.0 - level) / 2.0;
    const double lo = quantile_sorted(sorted, adjusted(tail));
    const double hi = quantile_sorted(sorted, adjusted(1.0 - tail));
    return {std::min(lo, hi), std::max(lo, hi), level, IntervalMethod::BCa};
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::BadParameters, "normal quantile needs p in (0, 1)");
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace runcount
