#include "runcount/problems.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <utility>

#include "runcount/error.hpp"
#include "runcount/rng.hpp"

namespace runcount {

namespace {

constexpr double kShiftRange = 4.0;
constexpr double kFoptRange = 100.0;
constexpr double kSlopeVertex = 5.0;

struct NamedProblem {
    ProblemId id;
    std::string_view name;
};

constexpr std::array<NamedProblem, 8> kNames = {{
    {ProblemId::Sphere, "sphere"},
    {ProblemId::LinearSlope, "linear_slope"},
    {ProblemId::Ellipsoid, "ellipsoid"},
    {ProblemId::Rastrigin, "rastrigin"},
    {ProblemId::Rosenbrock, "rosenbrock"},
    {ProblemId::AttractiveSector, "attractive_sector"},
    {ProblemId::DifferentPowers, "different_powers"},
    {ProblemId::Schaffers, "schaffers"},
}};

/// Per-coordinate constants that depend only on (problem, dimension):
/// base^(scale * i / (D - 1)) for i = 0..D-1.
const std::vector<double>& ramp(double base, double scale, std::size_t dimension) {
    thread_local std::map<std::tuple<double, double, std::size_t>, std::vector<double>> cache;
    auto [it, inserted] = cache.try_emplace({base, scale, dimension});
    if (inserted) {
        it->second.resize(dimension);
        for (std::size_t i = 0; i < dimension; ++i) {
            const double t = dimension > 1 ? static_cast<double>(i) / static_cast<double>(dimension - 1) : 0.0;
            it->second[i] = std::pow(base, scale * t);
        }
    }
    return it->second;
}

double sphere(std::span<const double> z) {
    double s = 0.0;
    for (double v : z) s += v * v;
    return s;
}

double ellipsoid(std::span<const double> z) {
    const auto& w = ramp(10.0, 6.0, z.size());
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) s += w[i] * z[i] * z[i];
    return s;
}

double rastrigin(std::span<const double> z) {
    double cos_sum = 0.0;
    double sq_sum = 0.0;
    for (double v : z) {
        cos_sum += std::cos(2.0 * std::numbers::pi * v);
        sq_sum += v * v;
    }
    return 10.0 * (static_cast<double>(z.size()) - cos_sum) + sq_sum;
}

double rosenbrock(std::span<const double> z) {
    const double scale = std::max(1.0, std::sqrt(static_cast<double>(z.size())) / 8.0);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
        const double a = scale * z[i] + 1.0;
        const double b = scale * z[i + 1] + 1.0;
        s += 100.0 * (a * a - b) * (a * a - b) + (a - 1.0) * (a - 1.0);
    }
    return s;
}

double linear_slope(std::span<const double> x, std::span<const double> vertex) {
    const auto& w = ramp(10.0, 1.0, x.size());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double slope = std::copysign(w[i], vertex[i]);
        const double zi = x[i] * vertex[i] < kSlopeVertex * kSlopeVertex ? x[i] : vertex[i];
        s += kSlopeVertex * w[i] - slope * zi;
    }
    return s;
}

double attractive_sector(std::span<const double> z, std::span<const double> shift) {
    const auto& w = ramp(10.0, 0.5, z.size());
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double y = w[i] * z[i];
        const double sector = y * shift[i] > 0.0 ? 100.0 : 1.0;
        s += (sector * y) * (sector * y);
    }
    return std::pow(s, 0.9);
}

double different_powers(std::span<const double> z) {
    const std::size_t d = z.size();
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double e = 2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(d - 1);
        s += std::pow(std::abs(z[i]), e);
    }
    return std::sqrt(s);
}

double schaffers(std::span<const double> z) {
    const auto& w = ramp(10.0, 0.5, z.size());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
        const double y0 = w[i] * z[i];
        const double y1 = w[i + 1] * z[i + 1];
        const double si = std::sqrt(y0 * y0 + y1 * y1);
        const double root = std::sqrt(si);
        const double wave = std::sin(50.0 * std::pow(si, 0.2));
        s += root + root * wave * wave;
    }
    const double avg = s / static_cast<double>(z.size() - 1);
    return avg * avg;
}

/// Q factor of a QR decomposition of a Gaussian matrix, via modified
/// Gram-Schmidt with one re-orthogonalisation pass. Gram-Schmidt yields the
/// factorisation whose R has a positive diagonal, which makes Q unique.
Rotation random_rotation(std::size_t d, Rng& rng) {
    std::vector<std::vector<double>> cols(d, std::vector<double>(d));
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) cols[c][r] = rng.normal();

    for (std::size_t c = 0; c < d; ++c) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < c; ++k) {
                double dot = 0.0;
                for (std::size_t r = 0; r < d; ++r) dot += cols[k][r] * cols[c][r];
                for (std::size_t r = 0; r < d; ++r) cols[c][r] -= dot * cols[k][r];
            }
        }
        double norm = 0.0;
        for (double v : cols[c]) norm += v * v;
        norm = std::sqrt(norm);
        for (double& v : cols[c]) v /= norm;
    }

    Rotation rot;
    rot.dimension = d;
    rot.entries.resize(d * d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) rot.entries[r * d + c] = cols[c][r];
    return rot;
}

}  // namespace

std::string_view to_string(ProblemId id) noexcept {
    for (const auto& [pid, name] : kNames)
        if (pid == id) return name;
    return "?";
}

ProblemId parse_problem_id(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (const auto& [pid, name] : kNames)
        if (name == lower) return pid;
    throw Error(ErrorKind::BadParameters, "unknown problem '" + std::string(text) + "'");
}

bool is_rotated(ProblemId id) noexcept {
    switch (id) {
        case ProblemId::AttractiveSector:
        case ProblemId::DifferentPowers:
        case ProblemId::Schaffers:
            return true;
        default:
            return false;
    }
}

Rotation Rotation::identity(std::size_t dimension) {
    Rotation rot;
    rot.dimension = dimension;
    rot.entries.assign(dimension * dimension, 0.0);
    for (std::size_t i = 0; i < dimension; ++i) rot.entries[i * dimension + i] = 1.0;
    return rot;
}

double Rotation::orthogonality_error() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < dimension; ++i) {
        for (std::size_t j = 0; j < dimension; ++j) {
            double dot = 0.0;
            for (std::size_t k = 0; k < dimension; ++k) dot += (*this)(k, i) * (*this)(k, j);
            worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
        }
    }
    return worst;
}

ProblemInstance canonical_instance(ProblemId problem, std::size_t dimension) {
    if (dimension < 2) throw Error(ErrorKind::BadDimension, "dimension must be at least 2");
    ProblemInstance inst;
    inst.problem = problem;
    inst.instance_id = 1;
    inst.dimension = dimension;
    inst.shift.assign(dimension, 0.0);
    inst.rotation = Rotation::identity(dimension);
    inst.f_opt = 0.0;
    return inst;
}

ProblemInstance make_instance(ProblemId problem, int instance_id, std::size_t dimension) {
    if (dimension < 2) throw Error(ErrorKind::BadDimension, "dimension must be at least 2");
    if (instance_id < 1) throw Error(ErrorKind::BadParameters, "instance_id must be at least 1");

    Rng rng(derive_seed({hash_string("problem-instance"), static_cast<std::uint64_t>(problem),
                         static_cast<std::uint64_t>(instance_id), dimension}));
    ProblemInstance inst;
    inst.problem = problem;
    inst.instance_id = instance_id;
    inst.dimension = dimension;
    inst.shift.resize(dimension);
    if (problem == ProblemId::LinearSlope) {
        for (double& s : inst.shift) s = rng.uniform01() < 0.5 ? -kSlopeVertex : kSlopeVertex;
    } else {
        for (double& s : inst.shift) s = rng.uniform(-kShiftRange, kShiftRange);
    }
    inst.f_opt = rng.uniform(-kFoptRange, kFoptRange);
    inst.rotation = is_rotated(problem) ? random_rotation(dimension, rng) : Rotation::identity(dimension);
    return inst;
}

double evaluate(const ProblemInstance& instance, std::span<const double> x, std::span<double> scratch) {
    const std::size_t d = instance.dimension;
    if (x.size() != d) throw Error(ErrorKind::DimensionMismatch, "point dimension does not match the instance");
    if (instance.problem == ProblemId::LinearSlope) return linear_slope(x, instance.shift) + instance.f_opt;

    std::span<double> diff = scratch.subspan(0, d);
    for (std::size_t i = 0; i < d; ++i) diff[i] = x[i] - instance.shift[i];

    std::span<double> z = scratch.subspan(d, d);
    const double* row = instance.rotation.entries.data();
    for (std::size_t r = 0; r < d; ++r, row += d) {
        double acc = 0.0;
        for (std::size_t c = 0; c < d; ++c) acc += row[c] * diff[c];
        z[r] = acc;
    }

    double f = 0.0;
    switch (instance.problem) {
        case ProblemId::Sphere: f = sphere(z); break;
        case ProblemId::Ellipsoid: f = ellipsoid(z); break;
        case ProblemId::Rastrigin: f = rastrigin(z); break;
        case ProblemId::Rosenbrock: f = rosenbrock(z); break;
        case ProblemId::AttractiveSector: f = attractive_sector(z, instance.shift); break;
        case ProblemId::DifferentPowers: f = different_powers(z); break;
        case ProblemId::Schaffers: f = schaffers(z); break;
        case ProblemId::LinearSlope: break;
    }
    return f + instance.f_opt;
}

double evaluate(const ProblemInstance& instance, std::span<const double> x) {
    std::vector<double> scratch(2 * instance.dimension);
    return evaluate(instance, x, scratch);
}

double error_to_optimum(const ProblemInstance& instance, double f) { return std::max(f - instance.f_opt, 0.0); }

}  // namespace runcount
