#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pbvi {

inline constexpr double kNormalizationTol = 1e-9;
inline constexpr double kZeroLikelihood = 1e-12;
inline constexpr double kBeliefDedupTol = 1e-9;
inline constexpr double kVectorDedupTol = 1e-12;

/// Probability distribution over states. Keeps the indices of its nonzero
/// entries so that dot products and filtering cost O(support).
class Belief {
public:
    Belief() = default;

    /// Validates nonnegativity and unit mass within kNormalizationTol.
    explicit Belief(std::vector<double> probs);

    static Belief point_mass(std::size_t nStates, std::size_t state);
    static Belief uniform(std::size_t nStates);

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t s) const noexcept { return probs_[s]; }
    std::span<const double> probs() const noexcept { return probs_; }
    std::span<const std::uint32_t> support() const noexcept { return support_; }

    double dot(std::span<const double> coeffs) const noexcept;

    friend bool operator==(const Belief& a, const Belief& b) { return a.probs_ == b.probs_; }

private:
    std::vector<double> probs_;
    std::vector<std::uint32_t> support_;
};

double l1_distance(const Belief& a, const Belief& b) noexcept;

struct AlphaVector {
    std::vector<double> coeffs;
    std::size_t action = 0;

    friend bool operator==(const AlphaVector&, const AlphaVector&) = default;
};

/// True when both vectors agree component-wise within `tol`.
bool nearly_equal(std::span<const double> a, std::span<const double> b, double tol) noexcept;

struct ValueAt {
    double value;
    std::size_t index;  // position of the maximizing vector
};

/// A nonempty set of alpha vectors; V(b) = max over vectors of alpha . b.
class ValueFunction {
public:
    /// Throws InvalidArgument on an empty list or ragged lengths. Drops
    /// vectors that duplicate an earlier one within kVectorDedupTol.
    explicit ValueFunction(std::vector<AlphaVector> vectors);

    std::size_t size() const noexcept { return vectors_.size(); }
    std::size_t nStates() const noexcept { return vectors_.front().coeffs.size(); }
    const AlphaVector& operator[](std::size_t i) const noexcept { return vectors_[i]; }
    auto begin() const noexcept { return vectors_.begin(); }
    auto end() const noexcept { return vectors_.end(); }
    const std::vector<AlphaVector>& vectors() const noexcept { return vectors_; }

    /// Maximal dot product; ties resolved to the lowest index.
    ValueAt evaluate(const Belief& b) const noexcept;

private:
    std::vector<AlphaVector> vectors_;
};

ValueAt value_at(const ValueFunction& vf, const Belief& b) noexcept;
std::size_t greedy_action(const ValueFunction& vf, const Belief& b) noexcept;

/// Insertion-ordered beliefs, no two within kBeliefDedupTol in L1.
class BeliefSet {
public:
    BeliefSet() = default;
    explicit BeliefSet(std::vector<Belief> beliefs);

    /// Returns false (and leaves the set unchanged) for a near-duplicate.
    bool insert(Belief b);
    std::optional<std::size_t> find(const Belief& b) const noexcept;
    bool contains(const Belief& b) const noexcept { return find(b).has_value(); }

    std::size_t size() const noexcept { return beliefs_.size(); }
    bool empty() const noexcept { return beliefs_.empty(); }
    const Belief& operator[](std::size_t i) const noexcept { return beliefs_[i]; }
    auto begin() const noexcept { return beliefs_.begin(); }
    auto end() const noexcept { return beliefs_.end(); }

private:
    std::vector<Belief> beliefs_;
};

struct SparseEntry {
    std::uint32_t index;
    double prob;
};

/// Raw model arrays. transition is [a][s][s'], observation is [a][s'][z],
/// reward is [s][a], all dense row-major.
struct ModelData {
    std::size_t nStates = 0;
    std::size_t nActions = 0;
    std::size_t nObservations = 0;
    std::vector<double> transition;
    std::vector<double> observation;
    std::vector<double> reward;
    double discount = 0.95;
    std::vector<double> initialBelief;
    std::vector<std::string> stateNames;
    std::vector<std::string> actionNames;
    std::vector<std::string> observationNames;
    /// Episodes end on entering one of these (e.g. Tag's `found` states).
    std::vector<std::size_t> terminalStates;
    /// States whose entry counts as reaching the goal during evaluation.
    std::vector<std::size_t> goalStates;
};

/// Immutable discrete POMDP {S, A, Z, T, O, R, gamma, b0}.
class PomdpModel {
public:
    /// Validates all invariants (throws ModelError) and builds sparse indices.
    explicit PomdpModel(ModelData data);

    std::size_t nStates() const noexcept { return data_.nStates; }
    std::size_t nActions() const noexcept { return data_.nActions; }
    std::size_t nObservations() const noexcept { return data_.nObservations; }
    double discount() const noexcept { return data_.discount; }

    double transition(std::size_t a, std::size_t s, std::size_t next) const noexcept {
        return data_.transition[(a * data_.nStates + s) * data_.nStates + next];
    }
    double observation(std::size_t a, std::size_t next, std::size_t z) const noexcept {
        return data_.observation[(a * data_.nStates + next) * data_.nObservations + z];
    }
    double reward(std::size_t s, std::size_t a) const noexcept {
        return data_.reward[s * data_.nActions + a];
    }
    /// Column R(., a) laid out contiguously.
    std::span<const double> reward_column(std::size_t a) const noexcept {
        return {rewardByAction_.data() + a * data_.nStates, data_.nStates};
    }

    std::span<const SparseEntry> successors(std::size_t a, std::size_t s) const noexcept {
        const std::size_t row = a * data_.nStates + s;
        return {transitionEntries_.data() + transitionOffsets_[row],
                transitionOffsets_[row + 1] - transitionOffsets_[row]};
    }
    std::span<const SparseEntry> observations(std::size_t a, std::size_t next) const noexcept {
        const std::size_t row = a * data_.nStates + next;
        return {observationEntries_.data() + observationOffsets_[row],
                observationOffsets_[row + 1] - observationOffsets_[row]};
    }

    const Belief& initialBelief() const noexcept { return initialBelief_; }
    double rewardMax() const noexcept { return rewardMax_; }
    double rewardMin() const noexcept { return rewardMin_; }

    bool isTerminal(std::size_t s) const noexcept { return terminal_[s] != 0; }
    bool isGoal(std::size_t s) const noexcept { return goal_[s] != 0; }

    const ModelData& data() const noexcept { return data_; }

private:
    ModelData data_;
    Belief initialBelief_;
    double rewardMax_ = 0.0;
    double rewardMin_ = 0.0;
    std::vector<double> rewardByAction_;
    std::vector<std::size_t> transitionOffsets_;
    std::vector<SparseEntry> transitionEntries_;
    std::vector<std::size_t> observationOffsets_;
    std::vector<SparseEntry> observationEntries_;
    std::vector<char> terminal_;
    std::vector<char> goal_;
};

/// Pr(z | b, a) = sum_{s,s'} b(s) T(s,a,s') O(s',a,z).
double observation_probability(const PomdpModel& model, const Belief& b, std::size_t a,
                               std::size_t z);

/// Bayes filter tau(b, a, z). Throws ZeroLikelihood if Pr(z | b, a) < kZeroLikelihood.
Belief belief_update(const PomdpModel& model, const Belief& b, std::size_t a, std::size_t z);

/// One-step lookahead from (b, a): for every observation, the unnormalized
/// successor sum_s b(s) T(s,a,s') O(s',a,z) restricted to its support.
struct ObservationBranch {
    std::size_t observation;
    double probability;
    std::vector<SparseEntry> unnormalized;
};
std::vector<ObservationBranch> observation_branches(const PomdpModel& model, const Belief& b,
                                                    std::size_t a);

/// Normalizes a branch into a Belief over nStates.
Belief branch_belief(const ObservationBranch& branch, std::size_t nStates);

}  // namespace pbvi
