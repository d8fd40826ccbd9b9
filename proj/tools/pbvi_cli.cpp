// pbvi: command-line front end over the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pbvi/pbvi.h"

namespace {

using json = nlohmann::json;

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitSizeLimit = 3;

constexpr const char* kBenchHeader = "round,beliefs,vectors,solve_seconds,mean_return,ci95,goal_rate,ger_error,density";

struct Failure {
    pbvi_status status;
    std::string message;
};

void check(pbvi_status s) {
    if (s != PBVI_OK) throw Failure{s, pbvi_last_error()};
}

int exit_code(pbvi_status s) { return s == PBVI_ERR_SIZE_LIMIT ? kExitSizeLimit : kExitInput; }

struct ModelDeleter {
    void operator()(pbvi_model* m) const { pbvi_model_free(m); }
};
struct PolicyDeleter {
    void operator()(pbvi_policy* p) const { pbvi_policy_free(p); }
};
struct SolutionDeleter {
    void operator()(pbvi_solution* s) const { pbvi_solution_free(s); }
};
using ModelPtr = std::unique_ptr<pbvi_model, ModelDeleter>;
using PolicyPtr = std::unique_ptr<pbvi_policy, PolicyDeleter>;
using SolutionPtr = std::unique_ptr<pbvi_solution, SolutionDeleter>;

/// Looks up `name` as given, then in each PBVI_MODEL_DIR entry with and
/// without the usual extensions.
std::string resolve_model_path(const std::string& name) {
    namespace fs = std::filesystem;
    if (fs::exists(name)) return name;
    if (const char* dirs = std::getenv("PBVI_MODEL_DIR")) {
        std::stringstream ss(dirs);
        for (std::string dir; std::getline(ss, dir, ':');) {
            if (dir.empty()) continue;
            for (const char* ext : {"", ".POMDP", ".pomdp"}) {
                const fs::path p = fs::path(dir) / (name + ext);
                if (fs::exists(p)) return p.string();
            }
        }
    }
    return name;
}

struct ModelSource {
    std::string path;
    std::string domain;

    void add_to(CLI::App* cmd) {
        auto* m = cmd->add_option("--model", path, "Model file (.pomdp); also searched in PBVI_MODEL_DIR");
        auto* d = cmd->add_option("--domain", domain, "Built-in domain")->check(CLI::IsMember({"1d", "tag"}));
        m->excludes(d);
        d->excludes(m);
    }

    ModelPtr load() const {
        pbvi_model* raw = nullptr;
        if (!domain.empty()) check(pbvi_model_from_domain(domain.c_str(), &raw));
        else if (!path.empty()) check(pbvi_model_load_file(resolve_model_path(path).c_str(), &raw));
        else throw Failure{PBVI_ERR_INVALID_ARGUMENT, "one of --model or --domain is required"};
        return ModelPtr(raw);
    }

    std::string label() const { return domain.empty() ? path : domain; }
};

struct Protocol {
    std::size_t runs = 251;
    std::size_t maxSteps = 251;
    bool resetOnGoal = false;
    std::uint64_t seed = 0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--runs", runs, "Episodes per evaluation")->check(CLI::PositiveNumber);
        cmd->add_option("--max-steps", maxSteps, "Step cap per episode")->check(CLI::PositiveNumber);
        cmd->add_flag("--reset-on-goal", resetOnGoal, "Keep running after a goal state is entered");
        cmd->add_option("--eval-seed", seed, "Seed for evaluation episodes");
    }

    pbvi_eval_protocol to_c(std::size_t threads) const { return {runs, maxSteps, resetOnGoal ? 1 : 0, seed, threads}; }
};

/// Parses "RUNSxSTEPS", e.g. "251x251".
std::optional<std::pair<std::size_t, std::size_t>> parse_eval_spec(const std::string& spec) {
    const auto x = spec.find('x');
    if (x == std::string::npos) return std::nullopt;
    try {
        std::size_t used = 0;
        const auto runs = std::stoull(spec.substr(0, x), &used);
        if (used != x) return std::nullopt;
        const std::string rest = spec.substr(x + 1);
        const auto steps = std::stoull(rest, &used);
        if (used != rest.size() || runs == 0 || steps == 0) return std::nullopt;
        return std::pair{static_cast<std::size_t>(runs), static_cast<std::size_t>(steps)};
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

struct SolveOptions {
    std::string strategy = "ger";
    std::size_t expansions = 0;
    std::size_t horizon = 0;
    double epsilon = 0.0;
    double greedyEpsilon = 0.1;
    std::uint64_t seed = 0;
    std::size_t maxBeliefs = 0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--strategy", strategy, "Belief expansion strategy")
            ->check(CLI::IsMember({"ra", "ssra", "ssga", "ssea", "ger"}));
        cmd->add_option("--expansions", expansions, "Expansion rounds N");
        auto* h = cmd->add_option("--horizon", horizon, "Backups per round T")->check(CLI::PositiveNumber);
        auto* e = cmd->add_option("--epsilon", epsilon, "Derive T from this error target")->check(CLI::PositiveNumber);
        h->excludes(e);
        e->excludes(h);
        cmd->add_option("--greedy-epsilon", greedyEpsilon, "Exploration rate for ssga")->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--seed", seed, "Solver seed");
        cmd->add_option("--max-beliefs", maxBeliefs, "Stop growing B at this size (0: no cap)");
    }

    pbvi_solve_config to_c(std::size_t threads, bool diagnostics) const {
        pbvi_solve_config c;
        pbvi_solve_config_default(&c);
        c.expansions = expansions;
        c.horizon = horizon;
        c.epsilon = epsilon;
        c.strategy = strategy.c_str();
        c.greedy_epsilon = greedyEpsilon;
        c.seed = seed;
        c.max_beliefs = maxBeliefs;
        c.threads = threads;
        c.diagnostics = diagnostics ? 1 : 0;
        return c;
    }
};

struct EvalHook {
    const pbvi_model* model;
    pbvi_eval_protocol protocol;
    pbvi_status status = PBVI_OK;
    std::string error;
};

int evaluate_round(size_t, const pbvi_policy* current, pbvi_eval_stats* out, void* user) {
    auto* hook = static_cast<EvalHook*>(user);
    if (hook->status != PBVI_OK) return 0;
    hook->status = pbvi_evaluate(hook->model, current, &hook->protocol, out);
    if (hook->status != PBVI_OK) {
        hook->error = pbvi_last_error();
        return 0;
    }
    return 1;
}

json stats_json(const pbvi_eval_stats& s) {
    return {{"mean_return", s.mean_return}, {"ci95", s.ci95}, {"goal_rate", s.goal_rate}, {"mean_steps", s.mean_steps}};
}

json trace_json(const pbvi_trace_record& r) {
    json j = {{"round", r.round}, {"beliefs", r.beliefs}, {"vectors", r.vectors}, {"solve_seconds", r.solve_seconds}};
    if (r.has_ger_error) j["ger_error"] = r.ger_error;
    if (r.has_density) j["density"] = r.density;
    if (r.has_eval) j["eval"] = stats_json(r.eval);
    return j;
}

std::vector<pbvi_trace_record> trace_of(const pbvi_solution* sol) {
    std::vector<pbvi_trace_record> out(pbvi_solution_trace_size(sol));
    for (std::size_t i = 0; i < out.size(); ++i) check(pbvi_solution_trace_record(sol, i, &out[i]));
    return out;
}

std::ofstream open_output(const std::string& path, std::ios::openmode mode = std::ios::trunc) {
    std::ofstream out(path, std::ios::out | mode);
    if (!out) throw Failure{PBVI_ERR_IO, "cannot open '" + path + "' for writing"};
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string action_label(const pbvi_model* model, std::size_t a) {
    const char* name = pbvi_model_action_name(model, a);
    return name ? std::string(name) : std::to_string(a);
}

std::size_t initial_action(const pbvi_model* model, const pbvi_policy* policy) {
    pbvi_model_info info;
    check(pbvi_model_get_info(model, &info));
    std::vector<double> b0(info.n_states);
    check(pbvi_model_initial_belief(model, b0.data(), b0.size()));
    std::size_t a = 0;
    check(pbvi_policy_action(policy, b0.data(), b0.size(), &a));
    return a;
}

SolutionPtr run_solver(const pbvi_model* model, const pbvi_solve_config& config, EvalHook* hook) {
    pbvi_solution* raw = nullptr;
    const pbvi_status s = pbvi_solve(model, &config, hook ? evaluate_round : nullptr, hook, &raw);
    if (hook && hook->status != PBVI_OK) {
        pbvi_solution_free(raw);
        throw Failure{hook->status, hook->error};
    }
    check(s);
    return SolutionPtr(raw);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Point-based value iteration for discrete POMDPs"};
    app.require_subcommand(1);
    app.fallthrough();
    std::size_t threads = 1;
    app.add_option("--threads", threads, "Worker threads (0: all hardware threads)");

    // solve
    auto* solve = app.add_subcommand("solve", "Run PBVI and write the policy");
    ModelSource solveModel;
    SolveOptions solveOpts;
    std::string policyOut, traceOut, evalEvery;
    bool solveJson = false;
    Protocol solveProtocol;
    solveModel.add_to(solve);
    solveOpts.add_to(solve);
    solve->add_option("--out", policyOut, "Policy file to write");
    solve->add_option("--trace", traceOut, "Line-delimited JSON trace file");
    solve->add_option("--eval-every", evalEvery, "Evaluate after every round, RUNSxSTEPS");
    solve->add_flag("--reset-on-goal", solveProtocol.resetOnGoal, "Evaluation keeps running after a goal");
    solve->add_option("--eval-seed", solveProtocol.seed, "Seed for evaluation episodes");
    solve->add_flag("--json", solveJson, "Print the summary as JSON");

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate a policy by simulation");
    ModelSource evalModel;
    Protocol evalProtocol;
    std::string policyIn, csvOut;
    bool useQmdp = false, evalJson = false;
    evalModel.add_to(eval);
    evalProtocol.add_to(eval);
    auto* pol = eval->add_option("--policy", policyIn, "Policy file");
    auto* qm = eval->add_flag("--qmdp", useQmdp, "Evaluate the QMDP baseline");
    pol->excludes(qm);
    qm->excludes(pol);
    eval->add_option("--seed", evalProtocol.seed, "Seed for evaluation episodes");
    eval->add_option("--csv", csvOut, "Append a result row to this CSV file");
    eval->add_flag("--json", evalJson, "Print the result as JSON");

    // bench
    auto* bench = app.add_subcommand("bench", "Anytime curve: one CSV row per expansion round");
    ModelSource benchModel;
    SolveOptions benchOpts;
    Protocol benchProtocol;
    std::string benchCsv, benchJson;
    benchModel.add_to(bench);
    benchOpts.add_to(bench);
    benchProtocol.add_to(bench);
    bench->add_option("--csv", benchCsv, "CSV output (default: standard output)");
    bench->add_option("--json", benchJson, "JSON mirror of the CSV rows");

    // exact
    auto* exact = app.add_subcommand("exact", "Exact value iteration (tiny models only)");
    ModelSource exactModel;
    std::size_t exactSteps = 1;
    std::uint64_t exactCap = 1'000'000;
    std::string exactOut;
    exactModel.add_to(exact);
    exact->add_option("--steps", exactSteps, "Number of exact backups");
    exact->add_option("--cap", exactCap, "Largest cross-sum allowed per backup");
    exact->add_option("--out", exactOut, "Policy file to write");

    // export
    auto* exportCmd = app.add_subcommand("export", "Write a model in .pomdp format");
    ModelSource exportModel;
    std::string exportOut;
    exportModel.add_to(exportCmd);
    exportCmd->add_option("--out", exportOut, "Destination file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*solve) {
            const ModelPtr model = solveModel.load();
            std::optional<EvalHook> hook;
            if (!evalEvery.empty()) {
                const auto spec = parse_eval_spec(evalEvery);
                if (!spec) throw Failure{PBVI_ERR_INVALID_ARGUMENT, "--eval-every expects RUNSxSTEPS, e.g. 251x251"};
                solveProtocol.runs = spec->first;
                solveProtocol.maxSteps = spec->second;
                hook = EvalHook{model.get(), solveProtocol.to_c(threads), PBVI_OK, {}};
            }
            const SolutionPtr sol = run_solver(model.get(), solveOpts.to_c(threads, false), hook ? &*hook : nullptr);
            const pbvi_policy* policy = pbvi_solution_policy(sol.get());
            if (!policyOut.empty()) check(pbvi_policy_write_file(policy, model.get(), policyOut.c_str()));
            const auto trace = trace_of(sol.get());
            if (!traceOut.empty()) {
                std::ofstream out = open_output(traceOut);
                for (const auto& r : trace) out << trace_json(r).dump() << '\n';
            }
            const std::size_t a0 = initial_action(model.get(), policy);
            const double seconds = trace.empty() ? 0.0 : trace.back().solve_seconds;
            if (solveJson) {
                json j = {{"beliefs", pbvi_solution_belief_count(sol.get())},
                          {"vectors", pbvi_policy_vector_count(policy)},
                          {"horizon", pbvi_solution_horizon(sol.get())},
                          {"rounds", trace.size()},
                          {"solve_seconds", seconds},
                          {"initial_action", action_label(model.get(), a0)}};
                if (!trace.empty() && trace.back().has_eval) j["eval"] = stats_json(trace.back().eval);
                std::cout << j.dump(2) << '\n';
            } else {
                std::cout << "beliefs " << pbvi_solution_belief_count(sol.get()) << "\n"
                          << "vectors " << pbvi_policy_vector_count(policy) << "\n"
                          << "horizon " << pbvi_solution_horizon(sol.get()) << "\n"
                          << "rounds " << trace.size() << "\n"
                          << "solve_seconds " << fmt(seconds) << "\n"
                          << "initial_action " << action_label(model.get(), a0) << "\n";
                if (!trace.empty() && trace.back().has_eval) {
                    const auto& e = trace.back().eval;
                    std::cout << "mean_return " << fmt(e.mean_return) << "\nci95 " << fmt(e.ci95) << "\ngoal_rate "
                              << fmt(e.goal_rate) << "\n";
                }
            }
        } else if (*eval) {
            const ModelPtr model = evalModel.load();
            pbvi_policy* raw = nullptr;
            if (useQmdp) check(pbvi_policy_qmdp(model.get(), &raw));
            else if (!policyIn.empty()) check(pbvi_policy_read_file(model.get(), policyIn.c_str(), &raw));
            else throw Failure{PBVI_ERR_INVALID_ARGUMENT, "one of --policy or --qmdp is required"};
            const PolicyPtr policy(raw);
            const pbvi_eval_protocol protocol = evalProtocol.to_c(threads);
            pbvi_eval_stats stats;
            check(pbvi_evaluate(model.get(), policy.get(), &protocol, &stats));
            if (evalJson) {
                std::cout << stats_json(stats).dump(2) << '\n';
            } else {
                std::cout << "mean_return " << fmt(stats.mean_return) << "\nci95 " << fmt(stats.ci95) << "\ngoal_rate "
                          << fmt(stats.goal_rate) << "\nmean_steps " << fmt(stats.mean_steps) << "\n";
            }
            if (!csvOut.empty()) {
                const bool fresh = !std::filesystem::exists(csvOut) || std::filesystem::file_size(csvOut) == 0;
                std::ofstream out = open_output(csvOut, std::ios::app);
                if (fresh) out << "model,policy,runs,max_steps,seed,mean_return,ci95,goal_rate,mean_steps\n";
                out << evalModel.label() << ',' << (useQmdp ? "qmdp" : policyIn) << ',' << protocol.n_runs << ','
                    << protocol.max_steps << ',' << protocol.seed << ',' << fmt(stats.mean_return) << ','
                    << fmt(stats.ci95) << ',' << fmt(stats.goal_rate) << ',' << fmt(stats.mean_steps) << '\n';
            }
        } else if (*bench) {
            const ModelPtr model = benchModel.load();
            EvalHook hook{model.get(), benchProtocol.to_c(threads), PBVI_OK, {}};
            const SolutionPtr sol = run_solver(model.get(), benchOpts.to_c(threads, true), &hook);
            const auto trace = trace_of(sol.get());
            std::ostringstream csv;
            csv << kBenchHeader << '\n';
            json rows = json::array();
            for (const auto& r : trace) {
                csv << r.round << ',' << r.beliefs << ',' << r.vectors << ',' << fmt(r.solve_seconds) << ','
                    << fmt(r.eval.mean_return) << ',' << fmt(r.eval.ci95) << ',' << fmt(r.eval.goal_rate) << ','
                    << (r.has_ger_error ? fmt(r.ger_error) : "") << ',' << (r.has_density ? fmt(r.density) : "")
                    << '\n';
                json j = {{"round", r.round},          {"beliefs", r.beliefs},
                          {"vectors", r.vectors},      {"solve_seconds", r.solve_seconds},
                          {"mean_return", r.eval.mean_return}, {"ci95", r.eval.ci95},
                          {"goal_rate", r.eval.goal_rate}};
                j["ger_error"] = r.has_ger_error ? json(r.ger_error) : json(nullptr);
                j["density"] = r.has_density ? json(r.density) : json(nullptr);
                rows.push_back(std::move(j));
            }
            if (benchCsv.empty()) std::cout << csv.str();
            else open_output(benchCsv) << csv.str();
            if (!benchJson.empty()) open_output(benchJson) << rows.dump(2) << '\n';
        } else if (*exact) {
            const ModelPtr model = exactModel.load();
            pbvi_policy* raw = nullptr;
            check(pbvi_solve_exact(model.get(), exactSteps, exactCap, &raw));
            const PolicyPtr policy(raw);
            if (!exactOut.empty()) check(pbvi_policy_write_file(policy.get(), model.get(), exactOut.c_str()));
            std::cout << "vectors " << pbvi_policy_vector_count(policy.get()) << "\n";
        } else if (*exportCmd) {
            const ModelPtr model = exportModel.load();
            check(pbvi_model_write_file(model.get(), exportOut.c_str()));
        }
    } catch (const Failure& f) {
        std::cerr << "pbvi: " << pbvi_status_name(f.status) << ": " << f.message << '\n';
        return exit_code(f.status);
    }
    return 0;
}
