#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace runcount {

/// Objective errors from repeated runs of one algorithm on one problem
/// instance, in run order. Construction rejects NaN and infinities.
class RunSample {
public:
    RunSample() = default;
    explicit RunSample(std::vector<double> values);
    RunSample(std::initializer_list<double> values);

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

    /// Appends one run; throws NonFiniteValue.
    void push_back(double value);

    /// First `count` runs.
    [[nodiscard]] RunSample prefix(std::size_t count) const;

    operator std::span<const double>() const noexcept { return values_; }  // NOLINT(google-explicit-constructor)

    friend bool operator==(const RunSample&, const RunSample&) = default;

private:
    std::vector<double> values_;
};

/// Deviations of each run from the sample mean.
struct CenteredSample {
    std::vector<double> values;
};

enum class OutlierMethod { IQR, Percentile, ModifiedZ };

std::string_view to_string(OutlierMethod method) noexcept;
/// Accepts "IQR", "Percentile", "MAD"/"ModifiedZ" (case-insensitive).
OutlierMethod parse_outlier_method(std::string_view text);

struct OutlierReport {
    std::vector<std::size_t> flagged_indices;  // ascending
    std::size_t retained_count = 0;

    [[nodiscard]] std::size_t flagged_count() const noexcept { return flagged_indices.size(); }
};

enum class IntervalMethod { Percentile, BCa };

struct ConfidenceInterval {
    double low = 0.0;
    double high = 0.0;
    double level = 0.95;
    IntervalMethod method = IntervalMethod::Percentile;

    [[nodiscard]] bool contains(double x) const noexcept { return low <= x && x <= high; }
};

[[nodiscard]] double mean(std::span<const double> sample);
[[nodiscard]] CenteredSample center(std::span<const double> sample);

/// Moment skewness g1 = m3 / m2^(3/2) with m_k = (1/n) sum (x_i - mean)^k.
/// A sample whose values are all identical has skewness exactly 0.
[[nodiscard]] double skewness(std::span<const double> sample);

/// Linear-interpolation quantile: h = (n-1) q on the sorted sample.
[[nodiscard]] double quantile(std::span<const double> sample, double q);
[[nodiscard]] double median(std::span<const double> sample);

/// Same rule as quantile() on data that is already sorted ascending.
[[nodiscard]] double quantile_sorted(std::span<const double> sorted, double q);

/// Flags extreme runs. Fences are strict: a value exactly on a fence is kept.
///   IQR        outside [q25 - 1.5 IQR, q75 + 1.5 IQR]
///   Percentile outside [q0.025, q0.975]
///   ModifiedZ  |0.6745 (x - median) / MAD| > 3.5, with the mean absolute
///              deviation from the median standing in when MAD is 0
[[nodiscard]] OutlierReport detect_outliers(std::span<const double> sample, OutlierMethod method);

/// Values whose index is not in report.flagged_indices, in original order.
[[nodiscard]] std::vector<double> remove_flagged(std::span<const double> sample, const OutlierReport& report);

struct BootstrapResult {
    ConfidenceInterval ci;
    std::vector<double> diffs;       // mean(resample of a) - mean(resample of b), one per resample
    double mean_of_means_a = 0.0;    // average over resamples of mean(resample of a)
    double mean_of_means_b = 0.0;
    std::vector<double> means_a;     // per-resample means, same order as diffs
    std::vector<double> means_b;
};

/// Percentile bootstrap interval for mean(a) - mean(b). The two sides are
/// resampled independently from one generator seeded with rng_seed: each
/// resample draws `resample_size` indices for a, then for b.
[[nodiscard]] BootstrapResult bootstrap_mean_diff_ci(std::span<const double> a, std::span<const double> b,
                                                     std::size_t resamples, std::size_t resample_size,
                                                     double level, std::uint64_t rng_seed);

/// Bias-corrected and accelerated interval over bootstrap differences.
/// Bias correction from the share of diffs below mean(a) - mean(b);
/// acceleration from the two-sample jackknife of the mean difference.
[[nodiscard]] ConfidenceInterval bca_ci(std::span<const double> diffs, std::span<const double> a,
                                        std::span<const double> b, double level);

/// Jackknife acceleration estimate for mean(a) - mean(b).
[[nodiscard]] double jackknife_acceleration(std::span<const double> a, std::span<const double> b);

[[nodiscard]] double normal_cdf(double z);
[[nodiscard]] double normal_quantile(double p);

}  // namespace runcount
