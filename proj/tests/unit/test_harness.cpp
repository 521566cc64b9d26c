#include <gtest/gtest.h>

#include <sstream>

#include "harness/config.hpp"
#include "harness/experiment.hpp"
#include "harness/io.hpp"
#include "harness/report.hpp"
#include "ttsvd/errors.hpp"

using namespace ttsvd;
using namespace ttsvd::harness;

namespace {

RunConfig small_prescribed() {
    return parse_config(R"({
        "schema_version": 1,
        "experiment": "prescribed_svd",
        "n_values": [6, 7],
        "solvers": ["als_svd", "mals_svd"],
        "repetitions": 2,
        "seed": 3,
        "generator": {"beta": [0.5], "k0": 8, "rank": 3},
        "solver": {"k": 4, "epsilon": 1e-8}
    })");
}

std::string results_text(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    write_results_csv(out, rows);
    return out.str();
}

}  // namespace

TEST(Config, ParsesAndDefaults) {
    RunConfig c = small_prescribed();
    EXPECT_EQ(c.experiment, Experiment::prescribed_svd);
    EXPECT_EQ(c.n_values, (std::vector<int>{6, 7}));
    EXPECT_EQ(c.solver.k, 4);
    EXPECT_EQ(c.generator.k0, 8);
    EXPECT_EQ(c.generator.hilbert_max_n, 22);
    EXPECT_EQ(c.out_dir, "out");
    EXPECT_NO_THROW(validate(c));
}

TEST(Config, Errors) {
    EXPECT_THROW(parse_config(R"({"schema_version": 1, "experiment": "hilbert", "bogus": 1})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"schema_version": 2, "experiment": "hilbert"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"experiment": "hilbert"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"schema_version": 1, "experiment": "nope"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"schema_version": 1, "experiment": "hilbert", "solver": {"kk": 2}})"),
                 ConfigError);
    EXPECT_THROW(parse_config(R"({"schema_version": 1, "experiment": "hilbert", "n_values": "x"})"), ConfigError);
    EXPECT_THROW(parse_config("{not json"), ConfigError);
    RunConfig c = small_prescribed();
    c.solvers.clear();
    EXPECT_THROW(validate(c), ConfigError);
    c = small_prescribed();
    c.solvers = {"svd_magic"};
    EXPECT_THROW(validate(c), ConfigError);
    c = small_prescribed();
    c.repetitions = 0;
    EXPECT_THROW(validate(c), ConfigError);
    EXPECT_EQ(parse_solver_list("als_svd,mals_eig"), (std::vector<std::string>{"als_svd", "mals_eig"}));
    EXPECT_THROW(parse_solver_list("als_svd,,"), ConfigError);
}

TEST(Experiment, RowsAndAggregates) {
    RunOutcome out = run_experiment(small_prescribed());
    EXPECT_EQ(out.failures, 0);
    EXPECT_EQ(out.unconverged, 0);
    int runs = 0, aggregates = 0;
    for (const ResultRow& r : out.rows) {
        if (r.aggregate()) {
            ++aggregates;
            continue;
        }
        ++runs;
        EXPECT_EQ(r.param_name, "beta");
        ASSERT_TRUE(r.spectrum_error.has_value());
        EXPECT_LT(*r.spectrum_error, 1e-6);
        EXPECT_LT(r.residual, 1e-8);
        EXPECT_EQ(r.seed, 3u + static_cast<std::uint64_t>(r.rep));
    }
    EXPECT_EQ(runs, 2 * 2 * 2);
    EXPECT_EQ(aggregates, 2 * 2);
}

TEST(Experiment, DeterministicResultsCsv) {
    RunConfig c = small_prescribed();
    c.n_values = {6};
    const std::string first = results_text(run_experiment(c).rows);
    const std::string second = results_text(run_experiment(c).rows);
    EXPECT_EQ(first, second);
    EXPECT_NE(first.find("mean"), std::string::npos);
}

TEST(Io, CsvRoundTrip) {
    RunConfig c = small_prescribed();
    c.n_values = {6};
    c.solvers = {"als_svd"};
    std::vector<ResultRow> rows = run_experiment(c).rows;
    std::istringstream in(results_text(rows));
    std::vector<ResultRow> back = read_results_csv(in);
    ASSERT_EQ(back.size(), rows.size());
    EXPECT_EQ(results_text(back), results_text(rows));
    std::ostringstream timings;
    write_timings_csv(timings, rows);
    std::istringstream tin(timings.str());
    merge_timings_csv(tin, back);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_NEAR(back[i].seconds, rows[i].seconds, 1e-9 * (1.0 + rows[i].seconds));
    }
    std::istringstream bad("a,b,c\n1,2,3\n");
    EXPECT_THROW(read_results_csv(bad), FormatError);
}

TEST(Report, FitLine) {
    LinearFit f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
    EXPECT_NEAR(f.slope, 2.0, 1e-12);
    EXPECT_NEAR(f.intercept, 1.0, 1e-12);
    EXPECT_NEAR(f.r2, 1.0, 1e-12);
    LinearFit flat = fit_line({1, 2, 3}, {5, 5, 5});
    EXPECT_NEAR(flat.slope, 0.0, 1e-12);
    EXPECT_EQ(flat.r2, 1.0);
    EXPECT_THROW(fit_line({1}, {1}), InvalidArgument);
    EXPECT_THROW(fit_line({2, 2}, {1, 3}), InvalidArgument);
}

TEST(Report, ScalingFitPerSolver) {
    std::vector<ResultRow> rows;
    for (int n : {4, 6, 8}) {
        ResultRow r;
        r.experiment = "hilbert";
        r.solver = "als_svd";
        r.n = n;
        r.seconds = 0.5 * n;
        rows.push_back(r);
    }
    std::vector<ScalingFit> fits = scaling_report(rows);
    ASSERT_EQ(fits.size(), 1u);
    EXPECT_NEAR(fits[0].slope, 0.5, 1e-12);
    EXPECT_EQ(fits[0].n, (std::vector<int>{4, 6, 8}));
}

TEST(Experiment, ToeplitzCappedRanks) {
    RunConfig c = parse_config(R"({
        "schema_version": 1,
        "experiment": "toeplitz",
        "n_values": [6],
        "solvers": ["als_svd"],
        "repetitions": 1,
        "seed": 5,
        "generator": {"rank": 4, "rank_caps": [2, 4, 1000]},
        "solver": {"k": 4, "epsilon": 1e-8}
    })");
    RunOutcome capped = toeplitz_capped_rank_experiment(c);
    std::vector<const ResultRow*> runs;
    for (const ResultRow& r : capped.rows) {
        if (!r.aggregate()) runs.push_back(&r);
    }
    ASSERT_EQ(runs.size(), 3u);
    EXPECT_EQ(runs[0]->param_name, "R_max");
    EXPECT_LE(runs[0]->max_rank_v, 2.0);
    EXPECT_LE(runs[1]->max_rank_v, 4.0);
    EXPECT_GE(runs[0]->residual, runs[1]->residual - 1e-12);
    EXPECT_GE(runs[1]->residual, runs[2]->residual - 1e-12);

    c.generator.rank_caps.clear();
    RunOutcome free = run_experiment(c);
    const ResultRow* uncapped = nullptr;
    for (const ResultRow& r : free.rows) {
        if (!r.aggregate()) uncapped = &r;
    }
    ASSERT_NE(uncapped, nullptr);
    EXPECT_EQ(uncapped->residual, runs[2]->residual);
    EXPECT_EQ(uncapped->max_rank_v, runs[2]->max_rank_v);
}
