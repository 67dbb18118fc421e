#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>

#include "runcount/app.hpp"
#include "runcount/error.hpp"

namespace runcount::app {

namespace {

const std::vector<std::string> kRunColumns = {"algorithm_id", "problem_id", "instance_id",
                                              "dimension",    "run_index",  "error"};

const std::vector<std::string> kRecordColumns = {
    "algorithm_id", "problem_id", "instance_id",      "dimension",   "tau",         "outlier_method",
    "repetition",   "bootstrap_seed", "n",            "converged",   "m_e",         "m_t",
    "ci_low",       "ci_high",    "ci_contains_zero", "bca_applied", "bca_contains_zero", "verdict_band",
};

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string_view trim_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

/// Maps each expected column to its position in the header line.
class Table {
public:
    Table(std::istream& in, const std::vector<std::string>& expected, std::string_view what) : in_(in), what_(what) {
        std::string header;
        if (!std::getline(in_, header)) throw Error(ErrorKind::SchemaError, std::string(what_) + ": missing header");
        line_no_ = 1;
        const auto cols = split(trim_cr(header));
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const std::string name(cols[i]);
            if (std::find(expected.begin(), expected.end(), name) == expected.end()) {
                throw Error(ErrorKind::SchemaError, std::string(what_) + ": unknown column '" + name + "'");
            }
            if (!positions_.emplace(name, i).second) {
                throw Error(ErrorKind::SchemaError, std::string(what_) + ": duplicate column '" + name + "'");
            }
        }
        for (const auto& name : expected) {
            if (!positions_.contains(name)) {
                throw Error(ErrorKind::SchemaError, std::string(what_) + ": missing column '" + name + "'");
            }
        }
    }

    bool next() {
        std::string raw;
        while (std::getline(in_, raw)) {
            ++line_no_;
            line_ = std::string(trim_cr(raw));
            if (line_.empty()) continue;
            fields_ = split(line_);
            if (fields_.size() != positions_.size()) fail("expected " + std::to_string(positions_.size()) + " fields");
            return true;
        }
        return false;
    }

    [[nodiscard]] std::string_view text(const std::string& column) const { return fields_[positions_.at(column)]; }

    template <typename T>
    [[nodiscard]] T number(const std::string& column) const {
        const auto s = text(column);
        T value{};
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc() || ptr != s.data() + s.size()) fail("bad value '" + std::string(s) + "' in " + column);
        return value;
    }

    [[nodiscard]] bool boolean(const std::string& column) const {
        const auto s = text(column);
        if (s == "true") return true;
        if (s == "false") return false;
        fail("bad boolean '" + std::string(s) + "' in " + column);
    }

    [[noreturn]] void fail(const std::string& why) const {
        throw Error(ErrorKind::ParseError, std::string(what_) + " line " + std::to_string(line_no_) + ": " + why);
    }

private:
    std::istream& in_;
    std::string_view what_;
    std::map<std::string, std::size_t> positions_;
    std::string line_;
    std::vector<std::string_view> fields_;
    std::size_t line_no_ = 0;
};

void write_row(std::ostream& out, std::initializer_list<std::string> fields) {
    bool first = true;
    for (const auto& f : fields) {
        if (!first) out << ',';
        out << f;
        first = false;
    }
    out << '\n';
}

void write_header(std::ostream& out, const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

void check_identifier(const std::string& id) {
    if (id.empty() || id.find_first_of(",\n\r") != std::string::npos) {
        throw Error(ErrorKind::SchemaError, "identifier '" + id + "' is empty or contains a separator");
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, ptr};
}

void canonical_sort(std::vector<RunDataRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const RunDataRow& a, const RunDataRow& b) {
        return std::tie(a.algorithm_id, a.problem_id, a.instance_id, a.dimension, a.run_index) <
               std::tie(b.algorithm_id, b.problem_id, b.instance_id, b.dimension, b.run_index);
    });
}

void write_run_data(std::ostream& out, const std::vector<RunDataRow>& rows) {
    write_header(out, kRunColumns);
    for (const auto& r : rows) {
        check_identifier(r.algorithm_id);
        write_row(out, {r.algorithm_id, r.problem_id, std::to_string(r.instance_id), std::to_string(r.dimension),
                        std::to_string(r.run_index), format_double(r.error)});
    }
}

std::vector<RunDataRow> read_run_data(std::istream& in) {
    Table t(in, kRunColumns, "run data");
    std::vector<RunDataRow> rows;
    while (t.next()) {
        RunDataRow r;
        r.algorithm_id = std::string(t.text("algorithm_id"));
        r.problem_id = std::string(t.text("problem_id"));
        if (r.algorithm_id.empty() || r.problem_id.empty()) t.fail("empty identifier");
        r.instance_id = t.number<int>("instance_id");
        r.dimension = t.number<std::size_t>("dimension");
        r.run_index = t.number<std::size_t>("run_index");
        r.error = t.number<double>("error");
        if (!std::isfinite(r.error) || r.error < 0.0) t.fail("error must be finite and non-negative");
        if (r.run_index == 0) t.fail("run_index starts at 1");
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<GroundTruthSet> group_ground_truth(const std::vector<RunDataRow>& rows, std::size_t runs_per_triplet) {
    using Key = std::tuple<std::string, std::string, int, std::size_t>;
    std::map<Key, std::map<std::size_t, double>> cells;
    for (const auto& r : rows) {
        auto& runs = cells[{r.algorithm_id, r.problem_id, r.instance_id, r.dimension}];
        if (!runs.emplace(r.run_index, r.error).second) {
            throw Error(ErrorKind::SchemaError, "duplicate run " + std::to_string(r.run_index) + " for " +
                                                    r.algorithm_id + "/" + r.problem_id);
        }
    }

    std::vector<GroundTruthSet> out;
    for (const auto& [key, runs] : cells) {
        const auto& [algorithm, problem, instance, dimension] = key;
        if (runs.rbegin()->first != runs.size()) {
            throw Error(ErrorKind::SchemaError, "run_index is not dense from 1 for " + algorithm + "/" + problem);
        }
        if (runs.size() < runs_per_triplet) {
            throw Error(ErrorKind::InsufficientRuns, algorithm + "/" + problem + "/" + std::to_string(instance) + "/" +
                                                         std::to_string(dimension) + " has " +
                                                         std::to_string(runs.size()) + " runs, need " +
                                                         std::to_string(runs_per_triplet));
        }
        GroundTruthSet gt;
        gt.algorithm_id = algorithm;
        try {
            gt.triplet = {parse_problem_id(problem), instance, dimension};
        } catch (const Error& e) {
            throw Error(ErrorKind::SchemaError, e.detail());
        }
        std::vector<double> values;
        for (const auto& [idx, err] : runs) {
            if (values.size() == runs_per_triplet) break;
            values.push_back(err);
        }
        gt.runs = RunSample(std::move(values));
        out.push_back(std::move(gt));
    }
    return out;
}

void write_records(std::ostream& out, const std::vector<EvaluationRecord>& records) {
    write_header(out, kRecordColumns);
    for (const auto& r : records) {
        check_identifier(r.algorithm_id);
        write_row(out, {r.algorithm_id, std::string(to_string(r.triplet.problem)), std::to_string(r.triplet.instance_id),
                        std::to_string(r.triplet.dimension), format_double(r.tau),
                        std::string(to_string(r.outlier_method)), std::to_string(r.repetition),
                        std::to_string(r.bootstrap_seed), std::to_string(r.n), yes_no(r.converged),
                        std::to_string(r.m_e), std::to_string(r.m_t), format_double(r.ci.low),
                        format_double(r.ci.high), yes_no(r.ci_contains_zero), yes_no(r.bca_contains_zero.has_value()),
                        r.bca_contains_zero ? yes_no(*r.bca_contains_zero) : "NA",
                        std::string(to_string(r.verdict_band))});
    }
}

std::vector<EvaluationRecord> read_records(std::istream& in) {
    Table t(in, kRecordColumns, "records");
    std::vector<EvaluationRecord> out;
    while (t.next()) {
        EvaluationRecord r;
        try {
            r.algorithm_id = std::string(t.text("algorithm_id"));
            r.triplet.problem = parse_problem_id(t.text("problem_id"));
            r.outlier_method = parse_outlier_method(t.text("outlier_method"));
            r.verdict_band = parse_verdict_band(t.text("verdict_band"));
        } catch (const Error& e) {
            t.fail(e.detail());
        }
        r.triplet.instance_id = t.number<int>("instance_id");
        r.triplet.dimension = t.number<std::size_t>("dimension");
        r.tau = t.number<double>("tau");
        r.repetition = t.number<std::size_t>("repetition");
        r.bootstrap_seed = t.number<std::uint64_t>("bootstrap_seed");
        r.n = t.number<std::size_t>("n");
        r.converged = t.boolean("converged");
        r.m_e = t.number<std::size_t>("m_e");
        r.m_t = t.number<std::size_t>("m_t");
        r.ci.low = t.number<double>("ci_low");
        r.ci.high = t.number<double>("ci_high");
        r.ci_contains_zero = t.boolean("ci_contains_zero");
        if (t.boolean("bca_applied")) r.bca_contains_zero = t.boolean("bca_contains_zero");
        out.push_back(std::move(r));
    }
    return out;
}

void write_accuracy(std::ostream& out, const AccuracyTable& table) {
    write_header(out, {"tau", "outlier_method", "true", "le_0_5", "le_1", "le_5", "le_10", "le_15", "le_20"});
    for (const auto& row : table.rows) {
        out << format_double(row.tau) << ',' << to_string(row.outlier_method);
        for (double p : row.pct) out << ',' << format_double(p);
        out << '\n';
    }
}

void write_savings(std::ostream& out, const std::vector<SavingsReport>& reports) {
    write_header(out, {"tau", "outlier_method", "total_runs", "estimated_runs", "pct_estimated_runs", "saved_runs",
                       "pct_saved_runs", "pct_accurate_estimation", "expected_saved_runs",
                       "pct_expected_saved_runs"});
    for (const auto& s : reports) {
        write_row(out, {format_double(s.tau), std::string(to_string(s.outlier_method)), std::to_string(s.total_runs),
                        std::to_string(s.estimated_runs), format_double(s.pct_estimated), std::to_string(s.saved_runs),
                        format_double(s.pct_saved), format_double(s.pct_accurate),
                        format_double(s.expected_saved_runs), format_double(s.pct_expected_saved)});
    }
}

nlohmann::json savings_to_json(const std::vector<SavingsReport>& reports) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : reports) {
        rows.push_back({
            {"tau", s.tau},
            {"outlier_method", to_string(s.outlier_method)},
            {"total_runs", s.total_runs},
            {"estimated_runs", s.estimated_runs},
            {"pct_estimated_runs", s.pct_estimated},
            {"saved_runs", s.saved_runs},
            {"pct_saved_runs", s.pct_saved},
            {"pct_accurate_estimation", s.pct_accurate},
            {"expected_saved_runs", s.expected_saved_runs},
            {"pct_expected_saved_runs", s.pct_expected_saved},
        });
    }
    return rows;
}

}  // namespace runcount::app
