#include <doctest.h>

#include <chrono>
#include <cmath>

#include "pbvi/domains.hpp"
#include "pbvi/errors.hpp"
#include "pbvi/exact_vi.hpp"
#include "pbvi/solver.hpp"
#include "random_model.hpp"

using namespace pbvi;
using pbvi::testing::random_belief;
using pbvi::testing::random_model;
using pbvi::testing::random_value_function;

namespace {

PomdpModel single_state(double reward, double gamma) {
    ModelData d;
    d.nStates = d.nActions = d.nObservations = 1;
    d.transition = {1.0};
    d.observation = {1.0};
    d.reward = {reward};
    d.discount = gamma;
    d.initialBelief = {1.0};
    return PomdpModel(std::move(d));
}

BeliefSet random_beliefs(const PomdpModel& m, std::size_t n, Rng& rng) {
    BeliefSet B;
    // Small models may not have n distinct beliefs within the dedup tolerance.
    for (std::size_t tries = 0; B.size() < n && tries < 50 * n; ++tries) B.insert(random_belief(m.nStates(), rng));
    return B;
}

}  // namespace

TEST_CASE("point backup agrees with the exact backup at every belief of B") {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const PomdpModel m = random_model(rng);
        const ValueFunction prev = random_value_function(m, 1 + rng.index(3), rng);
        const BeliefSet B = random_beliefs(m, 1 + rng.index(std::min<std::size_t>(6, m.nStates() + 2)), rng);
        const ValueFunction point = point_backup(m, B, prev);
        const ValueFunction exact = exact_backup(m, prev).valueFunction;
        CHECK(point.size() <= B.size());
        for (const Belief& b : B) {
            CHECK(std::abs(value_at(point, b).value - value_at(exact, b).value) <= 1e-9);
            CHECK(std::abs(point_backup_value(m, b, prev) - value_at(exact, b).value) <= 1e-9);
        }
    }
}

TEST_CASE("nearby beliefs sharing an optimum produce one vector") {
    ModelData d;
    d.nStates = 2;
    d.nActions = 1;
    d.nObservations = 1;
    d.transition = {1, 0, 0, 1};
    d.observation = {1, 1};
    d.reward = {1, 0};
    d.discount = 0.9;
    d.initialBelief = {0.5, 0.5};
    const PomdpModel m(d);
    const BeliefSet B({Belief({0.5, 0.5}), Belief({0.51, 0.49})});
    CHECK(point_backup(m, B, pessimistic_value_function(m)).size() == 1);
}

TEST_CASE("repeated backups on one state converge to R / (1 - gamma)") {
    const PomdpModel m = single_state(1.0, 0.5);
    SolveConfig c;
    c.horizon = 60;
    const SolveResult r = pbvi_main(m, c);
    CHECK(r.valueFunction[0].coeffs[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("no expansions means T backups on the initial set") {
    const PomdpModel m = make_1d();
    SolveConfig c;
    c.horizon = 7;
    const SolveResult r = pbvi_main(m, c);
    const BeliefSet B({m.initialBelief()});
    ValueFunction v = pessimistic_value_function(m);
    for (int t = 0; t < 7; ++t) v = point_backup(m, B, v);
    REQUIRE(r.valueFunction.size() == v.size());
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(r.valueFunction[i] == v[i]);
    CHECK(r.beliefs.size() == 1);
    CHECK(r.trace.size() == 1);
}

TEST_CASE("the first backup from the pessimistic start dominates it everywhere") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const PomdpModel m = random_model(rng);
        const BeliefSet B = random_beliefs(m, 1 + rng.index(6), rng);
        const ValueFunction v0 = pessimistic_value_function(m);
        const ValueFunction v1 = point_backup(m, B, v0);
        for (int k = 0; k < 50; ++k) {
            const Belief b = random_belief(m.nStates(), rng);
            CHECK(value_at(v1, b).value >= value_at(v0, b).value - 1e-9);
        }
    }
}

TEST_CASE("value at B is monotone on the 1D domain") {
    const PomdpModel m = make_1d();
    SolveConfig c;
    c.expansions = 5;
    const BeliefSet B = pbvi_main(m, c).beliefs;
    ValueFunction v = pessimistic_value_function(m);
    for (int t = 0; t < 40; ++t) {
        ValueFunction next = point_backup(m, B, v);
        for (const Belief& b : B) CHECK(value_at(next, b).value >= value_at(v, b).value - 1e-9);
        v = std::move(next);
    }
}

// Replacing Gamma each backup can lower V at beliefs outside B, which then
// lowers V at B one backup later. Every drop at B must have such a witness.
TEST_CASE("a drop at B is always preceded by a drop at a successor belief") {
    Rng rng(31);
    std::size_t drops = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const PomdpModel m = random_model(rng);
        const BeliefSet B = random_beliefs(m, 1 + rng.index(6), rng);
        ValueFunction older = pessimistic_value_function(m);
        ValueFunction v = point_backup(m, B, older);
        for (int t = 0; t < 20; ++t) {
            ValueFunction next = point_backup(m, B, v);
            for (const Belief& b : B) {
                if (value_at(next, b).value >= value_at(v, b).value - 1e-9) continue;
                ++drops;
                bool witness = false;
                for (std::size_t a = 0; a < m.nActions() && !witness; ++a)
                    for (const ObservationBranch& br : observation_branches(m, b, a)) {
                        const Belief succ = branch_belief(br, m.nStates());
                        if (value_at(v, succ).value < value_at(older, succ).value - 1e-12) {
                            witness = true;
                            break;
                        }
                    }
                CHECK(witness);
            }
            older = std::move(v);
            v = std::move(next);
        }
    }
    CHECK(drops > 0);
}

TEST_CASE("vectors stay within the reward bounds") {
    Rng rng(33);
    for (int trial = 0; trial < 30; ++trial) {
        const PomdpModel m = random_model(rng);
        SolveConfig c;
        c.expansions = 3;
        c.horizon = 30;
        c.strategy = Strategy::SSRA;
        c.seed = static_cast<std::uint64_t>(trial);
        const SolveResult r = pbvi_main(m, c);
        const double lo = m.rewardMin() / (1 - m.discount()) - 1e-6, hi = m.rewardMax() / (1 - m.discount()) + 1e-6;
        for (const AlphaVector& v : r.valueFunction)
            for (double x : v.coeffs) {
                CHECK(x >= lo);
                CHECK(x <= hi);
            }
    }
}

TEST_CASE("belief growth honors the cap and is non-decreasing") {
    const PomdpModel m = make_1d();
    SolveConfig c;
    c.expansions = 10;
    c.horizon = 5;
    c.maxBeliefs = 3;
    const SolveResult r = pbvi_main(m, c);
    CHECK(r.beliefs.size() == 3);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].beliefs >= r.trace[i - 1].beliefs);
}

TEST_CASE("horizon_for_epsilon") {
    ModelData d;
    d.nStates = 2;
    d.nActions = 1;
    d.nObservations = 1;
    d.transition = {1, 0, 0, 1};
    d.observation = {1, 1};
    d.reward = {0, 1};
    d.discount = 0.5;
    d.initialBelief = {0.5, 0.5};
    CHECK(horizon_for_epsilon(PomdpModel(d), 0.1) == 4);
    CHECK(horizon_for_epsilon(PomdpModel(d), 1.0) == 1);
    CHECK(horizon_for_epsilon(PomdpModel(d), 5.0) == 1);
    CHECK_THROWS_AS(horizon_for_epsilon(PomdpModel(d), 0.0), InvalidArgument);

    d.reward = {0, 110};
    d.discount = 0.95;
    CHECK(horizon_for_epsilon(PomdpModel(d), 1.0) == 92);

    d.discount = 0.0;
    CHECK(horizon_for_epsilon(PomdpModel(d), 1.0) == 1);

    SolveConfig c;
    c.horizon = 3;
    c.epsilon = 1e-9;
    CHECK(resolve_horizon(PomdpModel(d), c) == 3);
}

TEST_CASE("theorem_bound") {
    const PomdpModel m = make_1d();
    const ErrorBound zero = theorem_bound(m, 0.0);
    CHECK(zero.oneStep == 0.0);
    CHECK(zero.cumulative == 0.0);
    const ErrorBound b = theorem_bound(m, 2.0 / 3.0);
    CHECK(b.oneStep == doctest::Approx(8.0 / 3.0));
    CHECK(b.cumulative == doctest::Approx(32.0 / 3.0));
    CHECK(b.trivial == doctest::Approx(4.0));
}

TEST_CASE("density estimates") {
    const PomdpModel m = make_1d();
    const Belief& b0 = m.initialBelief();
    std::vector<Belief> successors;
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t z = 0; z < 2; ++z) successors.push_back(belief_update(m, b0, a, z));
    CHECK(estimate_density(BeliefSet({b0}), successors) == doctest::Approx(2.0));
    CHECK(estimate_density(BeliefSet(successors), successors) == 0.0);

    Rng rng(1);
    const std::vector<Belief> probes = sample_reachable_beliefs(m, 200, 7);
    BeliefSet B({b0});
    double last = estimate_density(B, probes);
    for (int k = 0; k < 20; ++k) {
        B.insert(probes[rng.index(probes.size())]);
        const double d = estimate_density(B, probes);
        CHECK(d <= last);
        last = d;
    }
}

TEST_CASE("one-step point backup error is within the density bound") {
    Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const PomdpModel m = random_model(rng);
        const ValueFunction prev = random_value_function(m, 1 + rng.index(3), rng);
        const BeliefSet B = random_beliefs(m, 1 + rng.index(5), rng);
        const ValueFunction point = point_backup(m, B, prev);
        const ValueFunction exact = exact_backup(m, prev).valueFunction;
        std::vector<Belief> sample = sample_reachable_beliefs(m, 100, static_cast<std::uint64_t>(trial), 6);
        for (int k = 0; k < 50; ++k) sample.push_back(random_belief(m.nStates(), rng));
        const double density = estimate_density(B, sample);
        double worst = 0.0;
        for (const Belief& b : sample)
            worst = std::max(worst, std::abs(value_at(exact, b).value - value_at(point, b).value));
        CHECK(worst <= theorem_bound(m, density).oneStep + 1e-6);
    }
}

TEST_CASE("point-based values are lower bounds on exact values") {
    Rng rng(43);
    for (int trial = 0; trial < 40; ++trial) {
        const PomdpModel m = random_model(rng, {4, 2, 2});
        const BeliefSet B = random_beliefs(m, 1 + rng.index(4), rng);
        ValueFunction point = pessimistic_value_function(m), exact = point;
        for (int t = 0; t < 3; ++t) {
            point = point_backup(m, B, point);
            exact = exact_backup(m, exact, 200000).valueFunction;
            for (int k = 0; k < 100; ++k) {
                const Belief b = random_belief(m.nStates(), rng);
                CHECK(value_at(point, b).value <= value_at(exact, b).value + 1e-6);
            }
        }
    }
}

TEST_CASE("solves are deterministic and independent of thread count") {
    const PomdpModel m = make_1d();
    for (Strategy s : {Strategy::RA, Strategy::SSRA, Strategy::SSGA, Strategy::SSEA, Strategy::GER}) {
        SolveConfig c;
        c.strategy = s;
        c.expansions = 4;
        c.horizon = 15;
        c.seed = 99;
        const SolveResult a = pbvi_main(m, c);
        c.threads = 4;
        const SolveResult b = pbvi_main(m, c);
        REQUIRE(a.valueFunction.size() == b.valueFunction.size());
        for (std::size_t i = 0; i < a.valueFunction.size(); ++i) CHECK(a.valueFunction[i] == b.valueFunction[i]);
        REQUIRE(a.beliefs.size() == b.beliefs.size());
        for (std::size_t i = 0; i < a.beliefs.size(); ++i) CHECK(a.beliefs[i] == b.beliefs[i]);
    }
}

TEST_CASE("point backup time grows linearly with |B|") {
    const PomdpModel m = make_tag();
    Rng rng(5);
    const std::vector<Belief> pool = sample_reachable_beliefs(m, 800, 3, 30);
    BeliefSet all(pool);
    const ValueFunction prev = random_value_function(m, 40, rng);
    auto time_for = [&](std::size_t n) {
        std::vector<Belief> first(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));
        const BeliefSet B(first);
        double best = INFINITY;
        for (int rep = 0; rep < 3; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            (void)point_backup(m, B, prev);
            best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
        return best;
    };
    REQUIRE(all.size() >= 400);
    const double small = time_for(100), large = time_for(400);
    const double ratio = large / small;
    CHECK(ratio > 4.0 / 2.0);
    CHECK(ratio < 4.0 * 2.0);
}
