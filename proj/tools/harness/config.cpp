#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ttsvd/errors.hpp"

namespace ttsvd::harness {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

template <class T>
void read_scalar_or_list(const json& obj, const char* key, std::vector<T>& out, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        if (it->is_array()) {
            out = it->get<std::vector<T>>();
        } else {
            out = {it->get<T>()};
        }
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

Experiment parse_experiment(const std::string& name) {
    if (name == "prescribed_svd") return Experiment::prescribed_svd;
    if (name == "hilbert") return Experiment::hilbert;
    if (name == "tridiagonal") return Experiment::tridiagonal;
    if (name == "toeplitz") return Experiment::toeplitz;
    if (name == "custom") return Experiment::custom;
    throw ConfigError("experiment: unknown kind '" + name + "'");
}

void parse_generator(const json& g, GeneratorParams& out) {
    check_keys(g, {"beta", "k0", "rank", "delta", "hilbert_max_n", "round_delta", "rank_caps", "matrix_path",
                   "truth_max_n"},
               "generator");
    read_scalar_or_list(g, "beta", out.betas, "generator");
    read(g, "k0", out.k0, "generator");
    read(g, "rank", out.rank, "generator");
    read(g, "delta", out.delta, "generator");
    read(g, "hilbert_max_n", out.hilbert_max_n, "generator");
    read(g, "round_delta", out.round_delta, "generator");
    read_scalar_or_list(g, "rank_caps", out.rank_caps, "generator");
    std::string path;
    read(g, "matrix_path", path, "generator");
    if (!path.empty()) out.matrix_path = path;
    read(g, "truth_max_n", out.truth_max_n, "generator");
}

void parse_solver(const json& s, SolverConfig& out) {
    check_keys(s, {"k", "epsilon", "delta0", "first_halfsweep_delta_factor", "max_sweeps", "max_restarts",
                   "restart_delta_factor", "local_tol", "local_max_iterations", "dense_crossover", "max_rank",
                   "residual_round_factor"},
               "solver");
    read(s, "k", out.k, "solver");
    read(s, "epsilon", out.epsilon, "solver");
    if (s.contains("delta0")) {
        double d = 0.0;
        read(s, "delta0", d, "solver");
        out.delta0 = d;
    }
    read(s, "first_halfsweep_delta_factor", out.first_halfsweep_delta_factor, "solver");
    read(s, "max_sweeps", out.max_sweeps, "solver");
    read(s, "max_restarts", out.max_restarts, "solver");
    read(s, "restart_delta_factor", out.restart_delta_factor, "solver");
    read(s, "local_tol", out.local_tol, "solver");
    read(s, "local_max_iterations", out.local_max_iterations, "solver");
    read(s, "dense_crossover", out.dense_crossover, "solver");
    read(s, "max_rank", out.max_rank, "solver");
    read(s, "residual_round_factor", out.residual_round_factor, "solver");
}

}  // namespace

const char* to_string(Experiment e) {
    switch (e) {
    case Experiment::prescribed_svd: return "prescribed_svd";
    case Experiment::hilbert: return "hilbert";
    case Experiment::tridiagonal: return "tridiagonal";
    case Experiment::toeplitz: return "toeplitz";
    case Experiment::custom: return "custom";
    }
    return "unknown";
}

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    check_keys(doc, {"schema_version", "experiment", "n_values", "solvers", "repetitions", "seed", "generator",
                     "solver", "output"},
               "config");
    RunConfig cfg;
    if (!doc.contains("schema_version")) throw ConfigError("config: schema_version is required");
    read(doc, "schema_version", cfg.schema_version, "config");
    if (cfg.schema_version != config_schema_version) {
        throw ConfigError("config: unsupported schema_version " + std::to_string(cfg.schema_version));
    }
    if (!doc.contains("experiment")) throw ConfigError("config: experiment is required");
    std::string experiment;
    read(doc, "experiment", experiment, "config");
    cfg.experiment = parse_experiment(experiment);
    read_scalar_or_list(doc, "n_values", cfg.n_values, "config");
    read(doc, "solvers", cfg.solvers, "config");
    read(doc, "repetitions", cfg.repetitions, "config");
    read(doc, "seed", cfg.seed, "config");
    if (doc.contains("generator")) parse_generator(doc["generator"], cfg.generator);
    if (doc.contains("solver")) parse_solver(doc["solver"], cfg.solver);
    if (doc.contains("output")) {
        check_keys(doc["output"], {"dir"}, "output");
        std::string dir;
        read(doc["output"], "dir", dir, "output");
        if (!dir.empty()) cfg.out_dir = dir;
    }
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void validate(const RunConfig& cfg) {
    if (cfg.solvers.empty()) throw ConfigError("config: the solver list is empty");
    for (const std::string& s : cfg.solvers) {
        const auto& known = known_solvers();
        if (std::find(known.begin(), known.end(), s) == known.end()) {
            throw ConfigError("config: unknown solver '" + s + "'");
        }
    }
    if (cfg.repetitions < 1) throw ConfigError("config: repetitions must be at least 1");
    if (cfg.n_values.empty()) throw ConfigError("config: n_values is empty");
    const GeneratorParams& g = cfg.generator;
    const bool custom = cfg.experiment == Experiment::custom;
    for (int n : cfg.n_values) {
        if (!custom && n < 2) throw ConfigError("config: every N must be at least 2");
        if (cfg.experiment == Experiment::hilbert && n > g.hilbert_max_n) {
            throw ConfigError("config: N = " + std::to_string(n) + " exceeds the Hilbert generator budget");
        }
        if (!custom && n > 40) throw ConfigError("config: N above 40 is outside the supported range");
    }
    if (cfg.experiment == Experiment::prescribed_svd) {
        if (g.betas.empty()) throw ConfigError("generator.beta: at least one value is required");
        for (double b : g.betas) {
            if (!(b > 0.0 && b < 1.0)) throw ConfigError("generator.beta: values must lie in (0, 1)");
        }
        if (cfg.solver.k > g.k0) throw ConfigError("solver.k: must not exceed generator.k0");
    }
    if (custom && g.matrix_path.empty()) throw ConfigError("generator.matrix_path: required for custom runs");
    if (g.rank < 1 || g.k0 < 1) throw ConfigError("generator: rank and k0 must be positive");
    for (Index cap : g.rank_caps) {
        if (cap < 1) throw ConfigError("generator.rank_caps: values must be positive");
    }
    if (!(g.delta >= 0.0) || !(g.round_delta >= 0.0)) throw ConfigError("generator: deltas must be nonnegative");
    const bool needs_als = std::any_of(cfg.solvers.begin(), cfg.solvers.end(),
                                       [](const std::string& s) { return s.rfind("als", 0) == 0; });
    ttsvd::validate(cfg.solver, 2, needs_als);
}

std::vector<std::string> parse_solver_list(const std::string& list) {
    std::vector<std::string> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw ConfigError("solver list '" + list + "' has an empty entry");
        out.push_back(item);
    }
    if (out.empty() || list.back() == ',') throw ConfigError("solver list '" + list + "' has an empty entry");
    return out;
}

}  // namespace ttsvd::harness
