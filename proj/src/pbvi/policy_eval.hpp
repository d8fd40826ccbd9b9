#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "pbvi/model.hpp"
#include "pbvi/rng.hpp"

namespace pbvi {

/// Maps the current belief to an action. Must be safe to call concurrently.
using Policy = std::function<std::size_t(const Belief&)>;

struct EvalProtocol {
    std::size_t nRuns = 1;
    std::size_t maxSteps = 1;
    /// Keep going after the hidden state enters a goal state instead of ending
    /// the episode there. Terminal states always end the episode.
    bool resetOnGoal = false;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

struct PolicyStats {
    double meanDiscountedReturn = 0.0;
    double ci95 = 0.0;
    double goalRate = 0.0;
    double meanSteps = 0.0;
};

struct Episode {
    double discountedReturn = 0.0;
    std::size_t steps = 0;
    bool goalReached = false;
};

/// Samples s0 from b0, then repeats: a = policy(b), accrue gamma^t R(s, a),
/// s' ~ T, z ~ O, b = tau(b, a, z).
Episode simulate_episode(const PomdpModel& model, const Policy& policy, const EvalProtocol& protocol, Rng& rng);

/// Episode i uses the stream derive_seed(protocol.seed, i).
PolicyStats evaluate(const PomdpModel& model, const Policy& policy, const EvalProtocol& protocol);

Policy greedy_policy(const ValueFunction& vf);

/// Value iteration on the fully observable MDP. Returns Q[s * nActions + a].
std::vector<double> solve_mdp_q(const PomdpModel& model, double tol = 1e-9);

/// One vector per action holding Q(., a); its greedy policy is QMDP.
ValueFunction qmdp_value_function(const PomdpModel& model, double tol = 1e-9);
Policy qmdp_policy(const PomdpModel& model, double tol = 1e-9);

}  // namespace pbvi
