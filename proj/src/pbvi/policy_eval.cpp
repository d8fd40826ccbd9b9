#include "pbvi/policy_eval.hpp"

#include <cmath>
#include <memory>

#include "pbvi/errors.hpp"
#include "pbvi/expansion.hpp"
#include "pbvi/parallel.hpp"

namespace pbvi {

Episode simulate_episode(const PomdpModel& model, const Policy& policy, const EvalProtocol& protocol, Rng& rng) {
    Episode ep;
    Belief b = model.initialBelief();
    std::size_t s = rng.categorical(b.probs());
    double weight = 1.0;
    for (std::size_t t = 0; t < protocol.maxSteps; ++t) {
        const std::size_t a = policy(b);
        if (a >= model.nActions()) throw InvalidArgument("policy returned an out-of-range action");
        ep.discountedReturn += weight * model.reward(s, a);
        weight *= model.discount();
        s = sample_sparse(model.successors(a, s), rng);
        const std::size_t z = sample_sparse(model.observations(a, s), rng);
        b = belief_update(model, b, a, z);
        ++ep.steps;
        if (model.isGoal(s)) {
            ep.goalReached = true;
            if (!protocol.resetOnGoal) break;
        }
        if (model.isTerminal(s)) break;
    }
    return ep;
}

PolicyStats evaluate(const PomdpModel& model, const Policy& policy, const EvalProtocol& protocol) {
    if (protocol.nRuns == 0) throw InvalidArgument("need at least one run");
    if (protocol.maxSteps == 0) throw InvalidArgument("need at least one step per run");
    std::vector<Episode> episodes(protocol.nRuns);
    parallel_for(protocol.nRuns, protocol.threads, [&](std::size_t i) {
        Rng rng(derive_seed(protocol.seed, i));
        episodes[i] = simulate_episode(model, policy, protocol, rng);
    });
    const double n = static_cast<double>(protocol.nRuns);
    PolicyStats stats;
    for (const Episode& e : episodes) {
        stats.meanDiscountedReturn += e.discountedReturn;
        stats.goalRate += e.goalReached ? 1.0 : 0.0;
        stats.meanSteps += static_cast<double>(e.steps);
    }
    stats.meanDiscountedReturn /= n;
    stats.goalRate /= n;
    stats.meanSteps /= n;
    if (protocol.nRuns > 1) {
        double ss = 0.0;
        for (const Episode& e : episodes) {
            const double d = e.discountedReturn - stats.meanDiscountedReturn;
            ss += d * d;
        }
        stats.ci95 = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return stats;
}

Policy greedy_policy(const ValueFunction& vf) {
    auto shared = std::make_shared<const ValueFunction>(vf);
    return [shared](const Belief& b) { return greedy_action(*shared, b); };
}

std::vector<double> solve_mdp_q(const PomdpModel& model, double tol) {
    if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
    const std::size_t S = model.nStates(), A = model.nActions();
    std::vector<double> V(S, 0.0), Q(S * A, 0.0);
    for (;;) {
        double residual = 0.0;
        for (std::size_t s = 0; s < S; ++s)
            for (std::size_t a = 0; a < A; ++a) {
                double acc = 0.0;
                for (const SparseEntry& e : model.successors(a, s)) acc += e.prob * V[e.index];
                const double q = model.reward(s, a) + model.discount() * acc;
                residual = std::max(residual, std::abs(q - Q[s * A + a]));
                Q[s * A + a] = q;
            }
        for (std::size_t s = 0; s < S; ++s) {
            double best = Q[s * A];
            for (std::size_t a = 1; a < A; ++a) best = std::max(best, Q[s * A + a]);
            V[s] = best;
        }
        if (residual < tol) return Q;
    }
}

ValueFunction qmdp_value_function(const PomdpModel& model, double tol) {
    const std::vector<double> Q = solve_mdp_q(model, tol);
    const std::size_t S = model.nStates(), A = model.nActions();
    std::vector<AlphaVector> vectors(A);
    for (std::size_t a = 0; a < A; ++a) {
        vectors[a].action = a;
        vectors[a].coeffs.resize(S);
        for (std::size_t s = 0; s < S; ++s) vectors[a].coeffs[s] = Q[s * A + a];
    }
    return ValueFunction(std::move(vectors));
}

Policy qmdp_policy(const PomdpModel& model, double tol) { return greedy_policy(qmdp_value_function(model, tol)); }

}  // namespace pbvi
