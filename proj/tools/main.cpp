#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "harness/acceptance.hpp"
#include "harness/config.hpp"
#include "harness/experiment.hpp"
#include "harness/io.hpp"
#include "harness/report.hpp"
#include "ttsvd/errors.hpp"
#include "ttsvd/report_json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitUnconverged = 3;

using namespace ttsvd;
using namespace ttsvd::harness;

struct RunFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> reps;
    std::optional<std::string> solvers;
    std::optional<int> max_n;
    bool strict = false;
    bool quiet = false;
};

int cmd_run(const RunFlags& f) {
    RunConfig cfg = load_config(f.config);
    if (f.seed) cfg.seed = *f.seed;
    if (f.out_dir) cfg.out_dir = *f.out_dir;
    if (f.reps) cfg.repetitions = *f.reps;
    if (f.solvers) cfg.solvers = parse_solver_list(*f.solvers);
    if (f.max_n) {
        std::vector<int> kept;
        for (int n : cfg.n_values) {
            if (n <= *f.max_n) kept.push_back(n);
        }
        if (kept.empty()) throw ConfigError("--max-n removes every N value");
        cfg.n_values = kept;
    }
    validate(cfg);
    ProgressSink progress;
    if (!f.quiet) progress = [](const std::string& line) { std::cerr << line << '\n'; };
    RunOutcome out = run_experiment(cfg, progress);

    std::ostringstream results, timings;
    write_results_csv(results, out.rows);
    write_timings_csv(timings, out.rows);
    write_text_file(cfg.out_dir / "results.csv", results.str());
    write_text_file(cfg.out_dir / "timings.csv", timings.str());
    write_report(cfg.out_dir, out.rows);
    std::cout << "wrote " << out.rows.size() << " rows to " << (cfg.out_dir / "results.csv").string() << '\n';
    if (out.failures > 0) std::cerr << out.failures << " solver runs failed\n";
    if (f.strict && (out.unconverged > 0 || out.failures > 0)) {
        std::cerr << out.unconverged << " runs hit the sweep limit\n";
        return kExitUnconverged;
    }
    return kExitOk;
}

int cmd_verify(const std::vector<int>& ids) {
    bool all = true;
    acceptance::run_criteria(ids, [&](const acceptance::CriterionResult& r) {
        std::cout << acceptance::format_line(r) << std::endl;
        all = all && r.passed;
    });
    return all ? kExitOk : kExitFailure;
}

int cmd_report(const std::string& rows_path, std::optional<std::string> timings_path, std::optional<std::string> out_dir) {
    std::ifstream rin(rows_path);
    if (!rin) throw ConfigError("cannot open " + rows_path);
    std::vector<ResultRow> rows = read_results_csv(rin);
    const std::filesystem::path base = std::filesystem::path(rows_path).parent_path();
    const std::filesystem::path tpath = timings_path ? std::filesystem::path(*timings_path) : base / "timings.csv";
    std::ifstream tin(tpath);
    if (!tin) throw ConfigError("cannot open " + tpath.string() + " (wall times live there)");
    merge_timings_csv(tin, rows);
    const std::filesystem::path dir = out_dir ? std::filesystem::path(*out_dir) : base;
    write_report(dir, rows);
    std::cout << scaling_json(scaling_report(rows)) << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dominant singular values of matrices in tensor-train format"};
    app.require_subcommand(1);

    RunFlags run;
    CLI::App* run_cmd = app.add_subcommand("run", "Run an experiment configuration");
    run_cmd->add_option("config", run.config, "JSON run configuration")->required();
    run_cmd->add_option("--seed", run.seed, "Base seed (repetition r uses seed + r)");
    run_cmd->add_option("--out-dir", run.out_dir, "Output directory");
    run_cmd->add_option("--reps", run.reps, "Repetitions per configuration");
    run_cmd->add_option("--solvers", run.solvers, "Comma-separated subset of als_svd,mals_svd,als_eig,mals_eig");
    run_cmd->add_option("--max-n", run.max_n, "Drop N values above this");
    run_cmd->add_flag("--strict", run.strict, "Exit with code 3 when a run does not converge");
    run_cmd->add_flag("--quiet", run.quiet, "No per-run progress on stderr");

    std::vector<int> criteria;
    CLI::App* verify_cmd = app.add_subcommand("verify", "Run the oracle and property checks");
    verify_cmd->add_option("--criterion", criteria, "Only these criteria (1-10)");

    std::string rows_path;
    std::optional<std::string> timings_path, report_dir;
    CLI::App* report_cmd = app.add_subcommand("report", "Scaling fits and plot data from results.csv");
    report_cmd->add_option("rows", rows_path, "results.csv")->required();
    report_cmd->add_option("--timings", timings_path, "timings.csv (default: next to results.csv)");
    report_cmd->add_option("--out-dir", report_dir, "Where report.json and plotdata/ go (default: next to results.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    try {
        if (*run_cmd) return cmd_run(run);
        if (*verify_cmd) return cmd_verify(criteria);
        if (*report_cmd) return cmd_report(rows_path, timings_path, report_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}
