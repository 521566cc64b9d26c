#include "io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ttsvd/errors.hpp"

namespace ttsvd::harness {

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string rep_label(const ResultRow& r) { return r.aggregate() ? "mean" : std::to_string(r.rep); }

std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    return line;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double to_double(const std::string& s, const char* what) {
    if (s.empty()) return std::nan("");
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw FormatError(std::string("csv: bad number in column ") + what + ": '" + s + "'");
    }
}

std::vector<std::string> key_cells(const ResultRow& r) {
    return {r.experiment, r.solver, std::to_string(r.n), std::to_string(r.k), r.param_name, num(r.param),
            rep_label(r)};
}

void expect_header(std::istream& in, const std::vector<std::string>& columns, const char* file) {
    std::string line;
    if (!std::getline(in, line) || line != join(columns)) {
        throw FormatError(std::string(file) + ": header does not match the documented column order");
    }
}

}  // namespace

const std::vector<std::string>& results_columns() {
    static const std::vector<std::string> cols{
        "experiment", "solver", "N", "K", "param_name", "param", "rep", "sweeps", "residual", "residual_std",
        "spectrum_error", "spectrum_error_std", "max_rank_v", "termination", "seed"};
    return cols;
}

const std::vector<std::string>& timings_columns() {
    static const std::vector<std::string> cols{"experiment", "solver", "N", "K", "param_name", "param", "rep",
                                               "seconds", "seconds_std", "construct_seconds"};
    return cols;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << join(results_columns()) << '\n';
    for (const ResultRow& r : rows) {
        std::vector<std::string> cells = key_cells(r);
        cells.push_back(num(r.sweeps));
        cells.push_back(num(r.residual));
        cells.push_back(r.aggregate() ? num(r.residual_std) : "");
        cells.push_back(r.spectrum_error ? num(*r.spectrum_error) : "");
        cells.push_back(r.aggregate() && r.spectrum_error ? num(r.spectrum_error_std) : "");
        cells.push_back(num(r.max_rank_v));
        cells.push_back(r.termination);
        cells.push_back(std::to_string(r.seed));
        out << join(cells) << '\n';
    }
}

void write_timings_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << join(timings_columns()) << '\n';
    for (const ResultRow& r : rows) {
        std::vector<std::string> cells = key_cells(r);
        cells.push_back(num(r.seconds));
        cells.push_back(r.aggregate() ? num(r.seconds_std) : "");
        cells.push_back(num(r.construct_seconds));
        out << join(cells) << '\n';
    }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
    expect_header(in, results_columns(), "results.csv");
    std::vector<ResultRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> c = split(line);
        if (c.size() != results_columns().size()) throw FormatError("results.csv: wrong number of cells: " + line);
        ResultRow r;
        r.experiment = c[0];
        r.solver = c[1];
        r.n = static_cast<int>(to_double(c[2], "N"));
        r.k = static_cast<Index>(to_double(c[3], "K"));
        r.param_name = c[4];
        r.param = to_double(c[5], "param");
        r.rep = c[6] == "mean" ? -1 : static_cast<int>(to_double(c[6], "rep"));
        r.sweeps = to_double(c[7], "sweeps");
        r.residual = to_double(c[8], "residual");
        if (!c[9].empty()) r.residual_std = to_double(c[9], "residual_std");
        if (!c[10].empty()) r.spectrum_error = to_double(c[10], "spectrum_error");
        if (!c[11].empty()) r.spectrum_error_std = to_double(c[11], "spectrum_error_std");
        r.max_rank_v = to_double(c[12], "max_rank_v");
        r.termination = c[13];
        r.seed = std::stoull(c[14]);
        if (!std::isfinite(r.residual) || r.residual < 0.0) throw FormatError("results.csv: invalid residual");
        rows.push_back(std::move(r));
    }
    return rows;
}

void merge_timings_csv(std::istream& in, std::vector<ResultRow>& rows) {
    expect_header(in, timings_columns(), "timings.csv");
    std::string line;
    std::size_t i = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> c = split(line);
        if (c.size() != timings_columns().size() || i >= rows.size()) {
            throw FormatError("timings.csv: does not line up with results.csv");
        }
        ResultRow& r = rows[i++];
        if (c[0] != r.experiment || c[1] != r.solver || c[2] != std::to_string(r.n) || c[6] != rep_label(r)) {
            throw FormatError("timings.csv: row " + std::to_string(i) + " does not match results.csv");
        }
        r.seconds = to_double(c[7], "seconds");
        if (!c[8].empty()) r.seconds_std = to_double(c[8], "seconds_std");
        r.construct_seconds = to_double(c[9], "construct_seconds");
    }
    if (i != rows.size()) throw FormatError("timings.csv: fewer rows than results.csv");
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

}  // namespace ttsvd::harness
