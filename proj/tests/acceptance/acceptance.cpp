// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pbvi/domains.hpp"
#include "pbvi/exact_vi.hpp"
#include "pbvi/pbvi.h"
#include "pbvi/pomdp_file.hpp"
#include "pbvi/solver.hpp"
#include "random_model.hpp"

using namespace pbvi;

namespace {

constexpr std::uint64_t kSolveSeed = 0;
constexpr std::uint64_t kEvalSeed = 0;

std::string g_models = PBVI_DATA_DIR "/models";
std::size_t g_threads = 0;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

PomdpModel load(const std::string& name) { return load_pomdp_file(g_models + "/" + name + ".POMDP"); }

SolveResult solve_ger(const PomdpModel& m, std::size_t beliefs) {
    SolveConfig c;
    c.strategy = Strategy::GER;
    c.expansions = 64;
    c.maxBeliefs = beliefs;
    c.seed = kSolveSeed;
    c.threads = g_threads;
    return pbvi_main(m, c);
}

PolicyStats run(const PomdpModel& m, const Policy& p, std::size_t runs, std::size_t steps, bool resetOnGoal) {
    return evaluate(m, p, {runs, steps, resetOnGoal, kEvalSeed, g_threads});
}

std::string describe(const PolicyStats& s) {
    return "return " + fmt(s.meanDiscountedReturn) + " ± " + fmt(s.ci95) + ", goal rate " + fmt(s.goalRate, 3);
}

bool within(double x, double centre, double tol) { return std::abs(x - centre) <= tol; }

// 1: Hallway, GER to |B| = 64, 251 x 251.
Outcome hallway() {
    Outcome o;
    const PomdpModel m = load("hallway");
    const SolveResult r = solve_ger(m, 64);
    const PolicyStats s = run(m, greedy_policy(r.valueFunction), 251, 251, false);
    o.detail << "|B|=" << r.beliefs.size() << " T=" << r.horizon << " |Γ|=" << r.valueFunction.size()
             << " solve " << fmt(r.trace.back().solveSeconds, 1) << "s, " << describe(s) << " ";
    o.require(r.beliefs.size() == 64, "|B| = 64");
    o.require(s.meanDiscountedReturn >= 0.45, "return >= 0.45");
    o.require(s.goalRate >= 0.95, "goal rate >= 0.95");
    return o;
}

// 2: Hallway2, GER to |B| = 32, 251 x 251.
Outcome hallway2() {
    Outcome o;
    const PomdpModel m = load("hallway2");
    const SolveResult r = solve_ger(m, 32);
    const PolicyStats s = run(m, greedy_policy(r.valueFunction), 251, 251, false);
    o.detail << "|B|=" << r.beliefs.size() << " T=" << r.horizon << " |Γ|=" << r.valueFunction.size()
             << " solve " << fmt(r.trace.back().solveSeconds, 1) << "s, " << describe(s) << " ";
    o.require(r.beliefs.size() == 32, "|B| = 32");
    o.require(s.meanDiscountedReturn >= 0.31, "return >= 0.31");
    return o;
}

// 3: Tiger-grid, GER to |B| = 512, 151 x 500. Episodes continue past the goal.
Outcome tiger_grid() {
    Outcome o;
    const PomdpModel m = load("tiger-grid");
    const SolveResult r = solve_ger(m, 512);
    const PolicyStats s = run(m, greedy_policy(r.valueFunction), 151, 500, true);
    o.detail << "|B|=" << r.beliefs.size() << " T=" << r.horizon << " |Γ|=" << r.valueFunction.size()
             << " solve " << fmt(r.trace.back().solveSeconds, 1) << "s, " << describe(s) << " ";
    o.require(r.beliefs.size() == 512, "|B| = 512");
    o.require(s.meanDiscountedReturn >= 2.0, "return >= 2.0");
    return o;
}

// 4: QMDP baselines.
Outcome qmdp() {
    Outcome o;
    {
        const PomdpModel m = load("tiger-grid");
        const PolicyStats s = run(m, qmdp_policy(m), 151, 500, true);
        o.detail << "tiger-grid " << describe(s) << "; ";
        o.require(within(s.meanDiscountedReturn, 0.276, 0.1), "tiger-grid return 0.276 ± 0.1");
    }
    {
        const PomdpModel m = load("hallway");
        const PolicyStats s = run(m, qmdp_policy(m), 251, 251, false);
        o.detail << "hallway " << describe(s) << "; ";
        o.require(within(s.meanDiscountedReturn, 0.265, 0.05), "hallway return 0.265 ± 0.05");
        o.require(within(s.goalRate, 0.51, 0.1), "hallway goal rate 0.51 ± 0.1");
    }
    {
        const PomdpModel m = load("hallway2");
        const PolicyStats s = run(m, qmdp_policy(m), 251, 251, false);
        o.detail << "hallway2 " << describe(s) << " ";
        o.require(within(s.meanDiscountedReturn, 0.109, 0.05), "hallway2 return 0.109 ± 0.05");
        o.require(within(s.goalRate, 0.22, 0.1), "hallway2 goal rate 0.22 ± 0.1");
    }
    return o;
}

// 5: Tag, GER to |B| = 256 against QMDP, 1000 x 251.
Outcome tag() {
    Outcome o;
    const PomdpModel m = make_tag();
    const SolveResult r = solve_ger(m, 256);
    const PolicyStats pb = run(m, greedy_policy(r.valueFunction), 1000, 251, false);
    const PolicyStats q = run(m, qmdp_policy(m), 1000, 251, false);
    o.detail << "PBVI |B|=" << r.beliefs.size() << " |Γ|=" << r.valueFunction.size() << " solve "
             << fmt(r.trace.back().solveSeconds, 1) << "s " << describe(pb) << "; QMDP " << describe(q) << " ";
    o.require(r.beliefs.size() == 256, "|B| = 256");
    o.require(pb.meanDiscountedReturn >= -9.0, "PBVI return >= -9");
    o.require(pb.meanDiscountedReturn - q.meanDiscountedReturn >= 5.0, "PBVI beats QMDP by >= 5");
    o.require(within(q.meanDiscountedReturn, -16.62, 2.0), "QMDP return -16.62 ± 2");
    o.require(within(q.goalRate, 0.19, 0.05), "QMDP goal rate 0.19 ± 0.05");
    return o;
}

// 6: the 1D walkthrough.
Outcome golden_1d() {
    Outcome o;
    const PomdpModel m = make_1d();
    const Belief& b0 = m.initialBelief();
    using Edge = std::pair<std::size_t, std::size_t>;
    const Edge e1{k1dLeft, k1dNone}, e2{k1dLeft, k1dSeeGoal}, e3{k1dRight, k1dNone}, e4{k1dRight, k1dSeeGoal};
    auto succ = [&](Edge e) { return belief_update(m, b0, e.first, e.second); };
    const Belief b1 = succ(e1), b2 = succ(e2), b3 = succ(e3), b4 = succ(e4);

    o.require(within(l1_distance(b0, b1), 4.0 / 3, 1e-12), "|b0-b1| = 4/3");
    o.require(within(l1_distance(b0, b2), 2.0, 1e-12), "|b0-b2| = 2");
    o.require(within(l1_distance(b0, b3), 2.0 / 3, 1e-12), "|b0-b3| = 2/3");
    o.require(b2 == b4, "b2 = b4");
    for (std::size_t a : {k1dLeft, k1dRight})
        o.require(within(observation_probability(m, b0, a, k1dSeeGoal), 1.0 / 3, 1e-12), "Pr(goal|b0,a) = 1/3");

    const BeliefSet B({b0});
    constexpr int kTrials = 100000;
    auto frequencies = [&](const std::function<ExpansionResult(Rng&)>& once) {
        std::map<Edge, double> f;
        for (int t = 0; t < kTrials; ++t) {
            Rng rng(derive_seed(2024, static_cast<std::uint64_t>(t)));
            const ExpansionResult r = once(rng);
            f[{*r.added.at(0).action, *r.added.at(0).observation}] += 1.0 / kTrials;
        }
        return f;
    };
    double worst = 0.0;
    auto expect = [&](std::map<Edge, double>& f, const std::vector<std::pair<Edge, double>>& want, const char* name) {
        for (const auto& [edge, p] : want) {
            worst = std::max(worst, std::abs(f[edge] - p));
            o.require(within(f[edge], p, 0.01), std::string(name) + " frequency");
        }
    };
    auto ssra = frequencies([&](Rng& rng) { return expand_ssra(B, m, rng); });
    expect(ssra, {{e1, 0.5 * 2 / 3}, {e2, 0.5 / 3}, {e3, 0.5 * 2 / 3}, {e4, 0.5 / 3}}, "SSRA");
    const ValueFunction goLeft({AlphaVector{std::vector<double>(m.nStates(), 0.0), k1dLeft}});
    auto ssga = frequencies([&](Rng& rng) { return expand_ssga(B, goLeft, m, rng, 0.1); });
    expect(ssga, {{e1, 0.95 * 2 / 3}, {e2, 0.95 / 3}, {e3, 0.05 * 2 / 3}, {e4, 0.05 / 3}}, "SSGA");
    auto ssea = frequencies([&](Rng& rng) { return expand_ssea(B, m, rng); });
    expect(ssea, {{e1, 4.0 / 9}, {e2, 5.0 / 18}, {e3, 0.0}, {e4, 5.0 / 18}}, "SSEA");

    const ValueFunction vf = pbvi_main(m, SolveConfig{}).valueFunction;
    const double eps1 = ger_point_error(b1, B, vf, m), eps2 = ger_point_error(b2, B, vf, m);
    const double eps3 = ger_point_error(b3, B, vf, m), eps4 = ger_point_error(b4, B, vf, m);
    o.require(eps3 < eps1 && eps1 < eps2 && eps2 == eps4, "ε(b3) < ε(b1) < ε(b2) = ε(b4)");
    const ExpansionResult ger = expand_ger(B, vf, m);
    o.require(ger.added.size() == 1 && *ger.added[0].action == k1dLeft && *ger.added[0].observation == k1dNone &&
                  ger.beliefs[1] == b1,
              "GER selects b1 via (left, none)");
    o.detail << "ε = (" << fmt(eps1) << ", " << fmt(eps2) << ", " << fmt(eps3) << ", " << fmt(eps4)
             << "), worst frequency deviation " << fmt(worst) << " over " << kTrials << " trials ";
    return o;
}

struct RandomCase {
    PomdpModel model;
    ValueFunction previous;
    BeliefSet B;
};

std::vector<RandomCase> random_cases(std::size_t n) {
    Rng rng(2718);
    std::vector<RandomCase> out;
    while (out.size() < n) {
        PomdpModel m = testing::random_model(rng);
        ValueFunction prev = testing::random_value_function(m, 1 + rng.index(3), rng);
        BeliefSet B;
        const std::size_t want = 1 + rng.index(6);
        for (std::size_t k = 0; k < 50 * want && B.size() < want; ++k)
            B.insert(testing::random_belief(m.nStates(), rng));
        out.push_back({std::move(m), std::move(prev), std::move(B)});
    }
    return out;
}

// 7: point backup against exact enumeration.
Outcome oracle() {
    Outcome o;
    const auto cases = random_cases(150);
    double worst = 0.0;
    std::size_t beliefs = 0;
    for (const RandomCase& c : cases) {
        const ValueFunction point = point_backup(c.model, c.B, c.previous);
        const ExactBackupResult exact = exact_backup(c.model, c.previous);
        const auto expected = static_cast<std::uint64_t>(
            c.model.nActions() *
            std::pow(static_cast<double>(c.previous.size()), static_cast<double>(c.model.nObservations())));
        o.require(exact.generated == expected, "generated = |A||Γ|^|Z|");
        for (const Belief& b : c.B) {
            const double e = value_at(exact.valueFunction, b).value;
            worst = std::max(worst, std::abs(value_at(point, b).value - e));
            worst = std::max(worst, std::abs(point_backup_value(c.model, b, c.previous) - e));
            ++beliefs;
        }
    }
    o.require(worst <= 1e-9, "|point - exact| <= 1e-9");
    o.detail << cases.size() << " models, " << beliefs << " beliefs, max |Ĥ - H| = " << sci(worst) << " ";
    return o;
}

// 8: one-step error bound and the pessimistic lower bound.
Outcome bounds() {
    Outcome o;
    const auto cases = random_cases(150);
    double tightest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const RandomCase& c = cases[i];
        const ValueFunction point = point_backup(c.model, c.B, c.previous);
        const ValueFunction exact = exact_backup(c.model, c.previous).valueFunction;
        const std::vector<Belief> sample = sample_reachable_beliefs(c.model, 200, i, 6);
        const double density = estimate_density(c.B, sample);
        double err = 0.0;
        for (const Belief& b : sample)
            err = std::max(err, std::abs(value_at(exact, b).value - value_at(point, b).value));
        const double bound = theorem_bound(c.model, density).oneStep;
        tightest = std::min(tightest, bound - err);
        o.require(err <= bound + 1e-6, "one-step error within (Rmax-Rmin) δ / (1-γ)");
    }

    // Lower bound: PBVI from the pessimistic start never exceeds exact VI at the same horizon.
    Rng rng(3141);
    std::size_t checked = 0;
    double margin = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
        const PomdpModel m = testing::random_model(rng, {4, 2, 2});
        BeliefSet B;
        for (int k = 0; k < 4; ++k) B.insert(testing::random_belief(m.nStates(), rng));
        ValueFunction point = pessimistic_value_function(m), exact = point;
        for (int t = 0; t < 3; ++t) {
            point = point_backup(m, B, point);
            exact = exact_backup(m, exact, 200000).valueFunction;
            for (int k = 0; k < 100; ++k) {
                const Belief b = testing::random_belief(m.nStates(), rng);
                const double gap = value_at(exact, b).value - value_at(point, b).value;
                margin = std::min(margin, gap);
                o.require(gap >= -1e-6, "V_B <= V_exact");
                ++checked;
            }
        }
    }
    o.detail << "min slack of the one-step bound " << sci(tightest) << "; " << checked
             << " lower-bound checks, min gap " << sci(margin) << " ";
    return o;
}

// 9: two Hallway2 solves through the C API write identical policy files.
Outcome determinism() {
    Outcome o;
    namespace fs = std::filesystem;
    const std::string path = g_models + "/hallway2.POMDP";
    pbvi_model* model = nullptr;
    if (pbvi_model_load_file(path.c_str(), &model) != PBVI_OK) {
        o.require(false, std::string("load: ") + pbvi_last_error());
        return o;
    }
    std::vector<std::string> files;
    for (int k = 0; k < 2; ++k) {
        pbvi_solve_config c;
        pbvi_solve_config_default(&c);
        c.expansions = 64;
        c.max_beliefs = 32;
        c.seed = kSolveSeed;
        c.threads = k == 0 ? 1 : g_threads;
        pbvi_solution* sol = nullptr;
        const fs::path out = fs::temp_directory_path() / ("pbvi_acceptance_" + std::to_string(k) + ".policy");
        if (pbvi_solve(model, &c, nullptr, nullptr, &sol) != PBVI_OK ||
            pbvi_policy_write_file(pbvi_solution_policy(sol), model, out.string().c_str()) != PBVI_OK) {
            o.require(false, std::string("solve: ") + pbvi_last_error());
        } else {
            files.push_back(read_text_file(out.string()));
        }
        pbvi_solution_free(sol);
        fs::remove(out);
    }
    pbvi_model_free(model);
    if (files.size() == 2) {
        o.require(files[0] == files[1], "policy files are byte-identical");
        const PomdpModel m = load("hallway2");
        o.require(write_policy(solve_ger(m, 32).valueFunction, m) == files[0], "C API matches the core library");
        o.detail << "2 × " << files[0].size() << " bytes, single- vs multi-threaded ";
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    app.add_option("--only", only, "Run only these criteria")->delimiter(',')->check(CLI::Range(1, 9));
    app.add_option("--models", g_models, "Directory holding the benchmark .POMDP files");
    app.add_option("--threads", g_threads, "Worker threads (0: all hardware threads)");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
        {"Hallway PBVI+GER |B|=64", hallway},
        {"Hallway2 PBVI+GER |B|=32", hallway2},
        {"Tiger-grid PBVI+GER |B|=512", tiger_grid},
        {"QMDP baselines", qmdp},
        {"Tag PBVI+GER |B|=256 vs QMDP", tag},
        {"1D golden suite", golden_1d},
        {"point backup = exact backup on B", oracle},
        {"error bound and lower bound", bounds},
        {"bit-identical Hallway2 policies", determinism},
    };
    const std::set<int> selected(only.begin(), only.end());
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += o.pass ? 0 : 1;
        std::printf("%s %d %s: %s(%.1fs)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.str().c_str(),
                    secs);
        std::fflush(stdout);
    }
    return failures;
}
