#include <fstream>

#include "runcount/app.hpp"
#include "runcount/error.hpp"

namespace runcount::app {

namespace {

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::BadConfig, std::string("config key '") + key + "': " + e.what());
    }
}

const std::vector<std::string> kKnownKeys = {
    "dimensions",     "problems",   "instances_per_problem", "de_config_count",     "runs_per_triplet",
    "taus",           "outlier_methods", "repetitions",      "bootstrap_resamples", "master_seed",
    "threads",        "initial_runs", "max_runs",            "evals_per_dimension", "stagnation_iters",
    "target_error",
};

}  // namespace

void ExperimentConfig::validate() const {
    const auto fail = [](const std::string& what) { throw Error(ErrorKind::BadConfig, what); };
    if (dimensions.empty()) fail("dimensions must not be empty");
    for (auto d : dimensions)
        if (d < 2) fail("every dimension must be at least 2");
    if (problems.empty()) fail("problems must not be empty");
    if (instances_per_problem == 0) fail("instances_per_problem must be positive");
    if (de_config_count == 0) fail("de_config_count must be positive");
    if (runs_per_triplet != kGroundTruthRuns) fail("runs_per_triplet must be 50");
    if (taus.empty()) fail("taus must not be empty");
    for (double t : taus)
        if (!(t > 0.0)) fail("taus must be positive");
    if (outlier_methods.empty()) fail("outlier_methods must not be empty");
    if (repetitions == 0) fail("repetitions must be positive");
    if (bootstrap_resamples < 100) fail("bootstrap_resamples must be at least 100");
    if (threads == 0) fail("threads must be positive");
    if (initial_runs < 3 || max_runs < initial_runs || max_runs > runs_per_triplet) {
        fail("need 3 <= initial_runs <= max_runs <= runs_per_triplet");
    }
    if (evals_per_dimension == 0 || stagnation_iters == 0 || !(target_error > 0.0)) {
        fail("budget settings must be positive");
    }
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorKind::BadConfig, "config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
            throw Error(ErrorKind::BadConfig, "unknown config key '" + key + "'");
        }
    }
    ExperimentConfig c;
    read_key(j, "dimensions", c.dimensions);
    if (j.contains("problems")) {
        std::vector<std::string> names;
        read_key(j, "problems", names);
        c.problems.clear();
        try {
            for (const auto& n : names) c.problems.push_back(parse_problem_id(n));
        } catch (const Error& e) {
            throw Error(ErrorKind::BadConfig, e.detail());
        }
    }
    read_key(j, "instances_per_problem", c.instances_per_problem);
    read_key(j, "de_config_count", c.de_config_count);
    read_key(j, "runs_per_triplet", c.runs_per_triplet);
    read_key(j, "taus", c.taus);
    if (j.contains("outlier_methods")) {
        std::vector<std::string> names;
        read_key(j, "outlier_methods", names);
        c.outlier_methods.clear();
        try {
            for (const auto& n : names) c.outlier_methods.push_back(parse_outlier_method(n));
        } catch (const Error& e) {
            throw Error(ErrorKind::BadConfig, e.detail());
        }
    }
    read_key(j, "repetitions", c.repetitions);
    read_key(j, "bootstrap_resamples", c.bootstrap_resamples);
    read_key(j, "master_seed", c.master_seed);
    read_key(j, "threads", c.threads);
    read_key(j, "initial_runs", c.initial_runs);
    read_key(j, "max_runs", c.max_runs);
    read_key(j, "evals_per_dimension", c.evals_per_dimension);
    read_key(j, "stagnation_iters", c.stagnation_iters);
    read_key(j, "target_error", c.target_error);
    return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["dimensions"] = c.dimensions;
    std::vector<std::string> problems;
    for (auto p : c.problems) problems.emplace_back(to_string(p));
    j["problems"] = problems;
    j["instances_per_problem"] = c.instances_per_problem;
    j["de_config_count"] = c.de_config_count;
    j["runs_per_triplet"] = c.runs_per_triplet;
    j["taus"] = c.taus;
    std::vector<std::string> methods;
    for (auto m : c.outlier_methods) methods.emplace_back(to_string(m));
    j["outlier_methods"] = methods;
    j["repetitions"] = c.repetitions;
    j["bootstrap_resamples"] = c.bootstrap_resamples;
    j["master_seed"] = c.master_seed;
    j["threads"] = c.threads;
    j["initial_runs"] = c.initial_runs;
    j["max_runs"] = c.max_runs;
    j["evals_per_dimension"] = c.evals_per_dimension;
    j["stagnation_iters"] = c.stagnation_iters;
    j["target_error"] = c.target_error;
    return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open config file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::BadConfig, "config file " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::BadConfig:
        case ErrorKind::BadParameters:
        case ErrorKind::BadBudget:
        case ErrorKind::BadDimension:
            return 2;
        case ErrorKind::ParseError:
        case ErrorKind::SchemaError:
        case ErrorKind::InsufficientRuns:
        case ErrorKind::NonFiniteValue:
        case ErrorKind::EmptyInput:
        case ErrorKind::EmptySample:
        case ErrorKind::SampleTooSmall:
        case ErrorKind::DimensionMismatch:
            return 3;
        default:
            return 4;
    }
}

}  // namespace runcount::app
