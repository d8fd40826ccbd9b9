#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "pbvi/model.hpp"
#include "pbvi/rng.hpp"

namespace pbvi {

enum class Strategy { RA, SSRA, SSGA, SSEA, GER };

std::optional<Strategy> parse_strategy(std::string_view name) noexcept;
std::string_view strategy_name(Strategy s) noexcept;

inline constexpr std::size_t kNoLimit = std::numeric_limits<std::size_t>::max();

/// Where an added belief came from. RA samples have no parent edge.
struct Provenance {
    std::optional<std::size_t> parent;
    std::optional<std::size_t> action;
    std::optional<std::size_t> observation;
};

/// The grown set (old members first, in order) plus the provenance of every
/// belief appended after them, aligned with `beliefs[oldSize + i]`.
struct ExpansionResult {
    BeliefSet beliefs;
    std::vector<Provenance> added;
};

/// One uniform draw from the simplex by sorted uniform spacings.
Belief sample_simplex(std::size_t nStates, Rng& rng);

/// Samples a successor state from a sparse distribution.
std::size_t sample_sparse(std::span<const SparseEntry> entries, Rng& rng);

/// `limit` caps the number of new beliefs; the earliest-selected ones are kept.
ExpansionResult expand_ra(const BeliefSet& B, const PomdpModel& model, Rng& rng, std::size_t limit = kNoLimit);
ExpansionResult expand_ssra(const BeliefSet& B, const PomdpModel& model, Rng& rng, std::size_t limit = kNoLimit);
ExpansionResult expand_ssga(const BeliefSet& B, const ValueFunction& vf, const PomdpModel& model, Rng& rng,
                            double greedyEpsilon, std::size_t limit = kNoLimit);
ExpansionResult expand_ssea(const BeliefSet& B, const PomdpModel& model, Rng& rng, std::size_t limit = kNoLimit);
ExpansionResult expand_ger(const BeliefSet& B, const ValueFunction& vf, const PomdpModel& model,
                           std::size_t limit = kNoLimit);

ExpansionResult expand(Strategy strategy, const BeliefSet& B, const ValueFunction& vf, const PomdpModel& model,
                       Rng& rng, double greedyEpsilon, std::size_t limit = kNoLimit);

/// Upper bound on the point-backup error at `candidate` given B:
///   min over b in B of sum_s (hi_s or lo_s - alpha_b(s)) (candidate(s) - b(s)),
/// using Rmax/(1-gamma) where candidate(s) >= b(s) and Rmin/(1-gamma) otherwise,
/// with alpha_b the maximizing vector at b.
double ger_point_error(const Belief& candidate, const BeliefSet& B, const ValueFunction& vf,
                       const PomdpModel& model);

/// The largest reachability-weighted envelope error
///   max over b in B, a of sum_z Pr(z | b, a) * error(tau(b, a, z)).
double ger_error_estimate(const BeliefSet& B, const ValueFunction& vf, const PomdpModel& model);

}  // namespace pbvi
