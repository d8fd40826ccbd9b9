#pragma once

#include <cstdint>
#include <vector>

#include "pbvi/model.hpp"

namespace pbvi {

inline constexpr std::uint64_t kDefaultExactCap = 1'000'000;

struct ExactBackupResult {
    ValueFunction valueFunction;
    /// Vectors produced by the cross-sum before any pruning: |A| * |G|^|Z|.
    std::uint64_t generated;
};

/// Full enumeration backup over the whole simplex followed by duplicate removal
/// and pointwise-dominance pruning. Output order is action-major, then the
/// lexicographic order of the per-observation choices.
/// Throws SizeLimitExceeded when the cross-sum would exceed `cap` vectors.
ExactBackupResult exact_backup(const PomdpModel& model, const ValueFunction& previous,
                               std::uint64_t cap = kDefaultExactCap);

/// Removes exact duplicates (keeping the first) and every vector that another
/// vector weakly dominates in all states with strict inequality somewhere.
std::vector<AlphaVector> pointwise_prune(std::vector<AlphaVector> vectors);

/// The projected set G^{a,z}: gamma * sum_{s'} T(s,a,s') O(s',a,z) alpha(s').
std::vector<double> project(const PomdpModel& model, std::span<const double> alpha, std::size_t a,
                            std::size_t z);

}  // namespace pbvi
