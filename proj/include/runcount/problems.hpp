#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace runcount {

/// Base functions of the desk-scale suite, in BBOB style.
enum class ProblemId {
    Sphere,
    LinearSlope,
    Ellipsoid,
    Rastrigin,
    Rosenbrock,
    AttractiveSector,
    DifferentPowers,
    Schaffers,
};

inline constexpr std::array<ProblemId, 8> kAllProblems = {
    ProblemId::Sphere,           ProblemId::LinearSlope,     ProblemId::Ellipsoid, ProblemId::Rastrigin,
    ProblemId::Rosenbrock,       ProblemId::AttractiveSector, ProblemId::DifferentPowers, ProblemId::Schaffers,
};

std::string_view to_string(ProblemId id) noexcept;
ProblemId parse_problem_id(std::string_view text);

/// Whether the instance generator applies a random rotation to this function.
bool is_rotated(ProblemId id) noexcept;

inline constexpr double kLowerBound = -5.0;
inline constexpr double kUpperBound = 5.0;

/// Row-major D x D orthogonal matrix.
struct Rotation {
    std::size_t dimension = 0;
    std::vector<double> entries;

    static Rotation identity(std::size_t dimension);
    [[nodiscard]] double operator()(std::size_t row, std::size_t col) const { return entries[row * dimension + col]; }
    /// max |(R^T R - I)_ij|
    [[nodiscard]] double orthogonality_error() const;

    friend bool operator==(const Rotation&, const Rotation&) = default;
};

struct ProblemInstance {
    ProblemId problem = ProblemId::Sphere;
    int instance_id = 1;
    std::size_t dimension = 2;
    std::vector<double> shift;   // location of the optimum
    Rotation rotation;
    double f_opt = 0.0;

    friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;
};

/// Instance with shift 0, identity rotation and f_opt 0.
[[nodiscard]] ProblemInstance canonical_instance(ProblemId problem, std::size_t dimension);

/// Deterministic instance for (problem, instance_id, dimension).
[[nodiscard]] ProblemInstance make_instance(ProblemId problem, int instance_id, std::size_t dimension);

/// f(z) + f_opt, z = rotation * (x - shift).
[[nodiscard]] double evaluate(const ProblemInstance& instance, std::span<const double> x);

/// Allocation-free variant; `scratch` must hold at least 2 * dimension values.
[[nodiscard]] double evaluate(const ProblemInstance& instance, std::span<const double> x, std::span<double> scratch);

/// max(f - f_opt, 0).
[[nodiscard]] double error_to_optimum(const ProblemInstance& instance, double f);

struct Triplet {
    ProblemId problem = ProblemId::Sphere;
    int instance_id = 1;
    std::size_t dimension = 10;

    friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

}  // namespace runcount
