#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pbvi/expansion.hpp"
#include "pbvi/model.hpp"
#include "pbvi/policy_eval.hpp"

namespace pbvi {

struct SolveConfig {
    std::size_t expansions = 0;
    /// Backups per round. When unset it is derived from `epsilon`.
    std::optional<std::size_t> horizon;
    /// Defaults to 0.01 * (Rmax - Rmin).
    std::optional<double> epsilon;
    Strategy strategy = Strategy::GER;
    double greedyEpsilon = 0.1;
    std::uint64_t seed = 0;
    std::size_t maxBeliefs = kNoLimit;
    /// 0 means one worker per hardware thread.
    std::size_t threads = 1;
    /// Record the GER error estimate and a density estimate every round.
    bool diagnostics = false;
    std::size_t densityProbes = 256;
    /// Called after each round with the current value function. Time spent
    /// here is not counted as solve time.
    std::function<std::optional<PolicyStats>(std::size_t round, const ValueFunction&)> onRound;
};

struct TraceRecord {
    std::size_t round = 0;
    std::size_t beliefs = 0;
    std::size_t vectors = 0;
    double solveSeconds = 0.0;  // cumulative
    std::optional<double> gerError;
    std::optional<double> density;
    std::optional<PolicyStats> eval;
};

struct SolveResult {
    ValueFunction valueFunction;
    BeliefSet beliefs;
    std::vector<TraceRecord> trace;
    std::size_t horizon = 0;
};

/// Alpha vector with value Rmin / (1 - gamma) everywhere, tagged with action 0.
ValueFunction pessimistic_value_function(const PomdpModel& model);

/// One point-based backup of `previous` at every belief in B. The result holds
/// at most |B| vectors, listed in the order of the beliefs that produced them.
ValueFunction point_backup(const PomdpModel& model, const BeliefSet& B, const ValueFunction& previous,
                           std::size_t threads = 1);

/// The backed-up value at a single belief, max_a [b.R_a + gamma sum_z max_alpha alpha.b^{a,z}].
double point_backup_value(const PomdpModel& model, const Belief& b, const ValueFunction& previous);

/// Round 0 performs `horizon` backups on Binit; each further round expands B
/// once and backs up `horizon` more times. Stops early when B reaches
/// maxBeliefs or an expansion adds nothing.
SolveResult pbvi_main(const PomdpModel& model, const BeliefSet& Binit, const ValueFunction& gamma0,
                      const SolveConfig& config);
SolveResult pbvi_main(const PomdpModel& model, const SolveConfig& config);

std::size_t resolve_horizon(const PomdpModel& model, const SolveConfig& config);

/// Smallest T >= 1 with gamma^T (Rmax - Rmin) < epsilon.
std::size_t horizon_for_epsilon(const PomdpModel& model, double epsilon);

struct ErrorBound {
    double oneStep;
    double cumulative;
    double trivial;
};
ErrorBound theorem_bound(const PomdpModel& model, double density);

/// Beliefs reached by random-action walks from b0, with depths uniform in [0, maxDepth].
std::vector<Belief> sample_reachable_beliefs(const PomdpModel& model, std::size_t count, std::uint64_t seed,
                                             std::size_t maxDepth = 25);

/// max over probes of the L1 distance to the nearest member of B.
double estimate_density(const BeliefSet& B, std::span<const Belief> probes);
double estimate_density(const BeliefSet& B, const PomdpModel& model, std::size_t nProbes, std::uint64_t seed);

}  // namespace pbvi
