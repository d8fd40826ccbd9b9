#include "pbvi/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pbvi/errors.hpp"

namespace pbvi {

Belief::Belief(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw InvalidArgument("belief must have at least one state");
    double total = 0.0;
    for (std::size_t s = 0; s < probs_.size(); ++s) {
        const double p = probs_[s];
        if (!(p >= 0.0) || !std::isfinite(p))
            throw InvalidArgument("belief entry " + std::to_string(s) + " is negative or not finite");
        total += p;
        if (p > 0.0) support_.push_back(static_cast<std::uint32_t>(s));
    }
    if (std::abs(total - 1.0) > kNormalizationTol) {
        std::ostringstream os;
        os.precision(17);
        os << "belief sums to " << total << ", expected 1";
        throw InvalidArgument(os.str());
    }
}

Belief Belief::point_mass(std::size_t nStates, std::size_t state) {
    std::vector<double> p(nStates, 0.0);
    p.at(state) = 1.0;
    return Belief(std::move(p));
}

Belief Belief::uniform(std::size_t nStates) {
    return Belief(std::vector<double>(nStates, 1.0 / static_cast<double>(nStates)));
}

double Belief::dot(std::span<const double> coeffs) const noexcept {
    double v = 0.0;
    for (std::uint32_t s : support_) v += probs_[s] * coeffs[s];
    return v;
}

double l1_distance(const Belief& a, const Belief& b) noexcept {
    double d = 0.0;
    for (std::size_t s = 0; s < a.size(); ++s) d += std::abs(a[s] - b[s]);
    return d;
}

bool nearly_equal(std::span<const double> a, std::span<const double> b, double tol) noexcept {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

ValueFunction::ValueFunction(std::vector<AlphaVector> vectors) {
    if (vectors.empty()) throw InvalidArgument("value function needs at least one alpha vector");
    const std::size_t n = vectors.front().coeffs.size();
    if (n == 0) throw InvalidArgument("alpha vectors must be nonempty");
    vectors_.reserve(vectors.size());
    for (auto& v : vectors) {
        if (v.coeffs.size() != n) throw InvalidArgument("alpha vectors have differing lengths");
        const bool dup = std::any_of(vectors_.begin(), vectors_.end(), [&](const AlphaVector& kept) {
            return nearly_equal(kept.coeffs, v.coeffs, kVectorDedupTol);
        });
        if (!dup) vectors_.push_back(std::move(v));
    }
}

ValueAt ValueFunction::evaluate(const Belief& b) const noexcept {
    ValueAt best{-std::numeric_limits<double>::infinity(), 0};
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
        const double v = b.dot(vectors_[i].coeffs);
        if (v > best.value) best = {v, i};
    }
    return best;
}

ValueAt value_at(const ValueFunction& vf, const Belief& b) noexcept { return vf.evaluate(b); }

std::size_t greedy_action(const ValueFunction& vf, const Belief& b) noexcept {
    return vf[vf.evaluate(b).index].action;
}

BeliefSet::BeliefSet(std::vector<Belief> beliefs) {
    for (auto& b : beliefs) insert(std::move(b));
}

bool BeliefSet::insert(Belief b) {
    if (contains(b)) return false;
    beliefs_.push_back(std::move(b));
    return true;
}

std::optional<std::size_t> BeliefSet::find(const Belief& b) const noexcept {
    for (std::size_t i = 0; i < beliefs_.size(); ++i) {
        const Belief& m = beliefs_[i];
        if (m.size() != b.size()) continue;
        // Early-exit L1 accumulation.
        double d = 0.0;
        std::size_t s = 0;
        for (; s < b.size() && d <= kBeliefDedupTol; ++s) d += std::abs(m[s] - b[s]);
        if (d <= kBeliefDedupTol) return i;
    }
    return std::nullopt;
}

namespace {

void check_stochastic_rows(const std::vector<double>& table, std::size_t rows, std::size_t cols,
                           const char* what) {
    for (std::size_t r = 0; r < rows; ++r) {
        double total = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            const double p = table[r * cols + c];
            if (!(p >= 0.0) || !std::isfinite(p))
                throw ModelError(std::string(what) + " row " + std::to_string(r) +
                                 " has a negative or non-finite entry");
            total += p;
        }
        if (std::abs(total - 1.0) > kNormalizationTol) {
            std::ostringstream os;
            os.precision(17);
            os << what << " row " << r << " sums to " << total;
            throw ModelError(os.str());
        }
    }
}

void build_sparse(const std::vector<double>& table, std::size_t rows, std::size_t cols,
                  std::vector<std::size_t>& offsets, std::vector<SparseEntry>& entries) {
    offsets.assign(rows + 1, 0);
    entries.clear();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double p = table[r * cols + c];
            if (p > 0.0) entries.push_back({static_cast<std::uint32_t>(c), p});
        }
        offsets[r + 1] = entries.size();
    }
}

}  // namespace

PomdpModel::PomdpModel(ModelData data) : data_(std::move(data)) {
    const std::size_t S = data_.nStates, A = data_.nActions, Z = data_.nObservations;
    if (S == 0 || A == 0 || Z == 0) throw ModelError("state, action and observation counts must be >= 1");
    if (S > std::numeric_limits<std::uint32_t>::max()) throw ModelError("too many states");
    if (data_.transition.size() != A * S * S) throw ModelError("transition table has wrong size");
    if (data_.observation.size() != A * S * Z) throw ModelError("observation table has wrong size");
    if (data_.reward.size() != S * A) throw ModelError("reward table has wrong size");
    if (!(data_.discount >= 0.0 && data_.discount < 1.0))
        throw ModelError("discount must lie in [0, 1)");
    if (data_.initialBelief.size() != S) throw ModelError("initial belief has wrong size");
    auto checkNames = [](const std::vector<std::string>& names, std::size_t n, const char* what) {
        if (!names.empty() && names.size() != n)
            throw ModelError(std::string(what) + " name table has wrong size");
    };
    checkNames(data_.stateNames, S, "state");
    checkNames(data_.actionNames, A, "action");
    checkNames(data_.observationNames, Z, "observation");

    check_stochastic_rows(data_.transition, A * S, S, "transition");
    check_stochastic_rows(data_.observation, A * S, Z, "observation");
    for (double r : data_.reward)
        if (!std::isfinite(r)) throw ModelError("reward is not finite");
    try {
        initialBelief_ = Belief(data_.initialBelief);
    } catch (const InvalidArgument& e) {
        throw ModelError(std::string("initial belief: ") + e.what());
    }

    rewardMax_ = *std::max_element(data_.reward.begin(), data_.reward.end());
    rewardMin_ = *std::min_element(data_.reward.begin(), data_.reward.end());
    rewardByAction_.resize(A * S);
    for (std::size_t a = 0; a < A; ++a)
        for (std::size_t s = 0; s < S; ++s) rewardByAction_[a * S + s] = data_.reward[s * A + a];

    build_sparse(data_.transition, A * S, S, transitionOffsets_, transitionEntries_);
    build_sparse(data_.observation, A * S, Z, observationOffsets_, observationEntries_);

    terminal_.assign(S, 0);
    goal_.assign(S, 0);
    for (std::size_t s : data_.terminalStates) {
        if (s >= S) throw ModelError("terminal state index out of range");
        terminal_[s] = 1;
    }
    for (std::size_t s : data_.goalStates) {
        if (s >= S) throw ModelError("goal state index out of range");
        goal_[s] = 1;
    }
}

namespace {

void check_indices(const PomdpModel& model, const Belief& b, std::size_t a, std::size_t z) {
    if (a >= model.nActions()) throw InvalidArgument("action index out of range");
    if (z >= model.nObservations()) throw InvalidArgument("observation index out of range");
    if (b.size() != model.nStates()) throw DimensionMismatch("belief size does not match model");
}

/// pred(s') = sum_s b(s) T(s, a, s'), dense.
std::vector<double> predict(const PomdpModel& model, const Belief& b, std::size_t a) {
    std::vector<double> pred(model.nStates(), 0.0);
    for (std::uint32_t s : b.support()) {
        const double ps = b[s];
        for (const SparseEntry& e : model.successors(a, s)) pred[e.index] += ps * e.prob;
    }
    return pred;
}

}  // namespace

double observation_probability(const PomdpModel& model, const Belief& b, std::size_t a, std::size_t z) {
    check_indices(model, b, a, z);
    const std::vector<double> pred = predict(model, b, a);
    double total = 0.0;
    for (std::size_t next = 0; next < pred.size(); ++next)
        if (pred[next] > 0.0) total += pred[next] * model.observation(a, next, z);
    return total;
}

Belief belief_update(const PomdpModel& model, const Belief& b, std::size_t a, std::size_t z) {
    check_indices(model, b, a, z);
    std::vector<double> post = predict(model, b, a);
    double total = 0.0;
    for (std::size_t next = 0; next < post.size(); ++next) {
        post[next] *= model.observation(a, next, z);
        total += post[next];
    }
    if (total < kZeroLikelihood)
        throw ZeroLikelihood("observation " + std::to_string(z) + " has zero likelihood after action " +
                             std::to_string(a));
    for (double& p : post) p /= total;
    return Belief(std::move(post));
}

std::vector<ObservationBranch> observation_branches(const PomdpModel& model, const Belief& b,
                                                    std::size_t a) {
    const std::vector<double> pred = predict(model, b, a);
    std::vector<std::vector<SparseEntry>> byObs(model.nObservations());
    std::vector<double> mass(model.nObservations(), 0.0);
    for (std::size_t next = 0; next < pred.size(); ++next) {
        if (pred[next] <= 0.0) continue;
        for (const SparseEntry& o : model.observations(a, next)) {
            const double w = pred[next] * o.prob;
            byObs[o.index].push_back({static_cast<std::uint32_t>(next), w});
            mass[o.index] += w;
        }
    }
    std::vector<ObservationBranch> out;
    for (std::size_t z = 0; z < byObs.size(); ++z)
        if (!byObs[z].empty()) out.push_back({z, mass[z], std::move(byObs[z])});
    return out;
}

Belief branch_belief(const ObservationBranch& branch, std::size_t nStates) {
    if (branch.probability < kZeroLikelihood)
        throw ZeroLikelihood("observation " + std::to_string(branch.observation) + " has zero likelihood");
    std::vector<double> p(nStates, 0.0);
    for (const SparseEntry& e : branch.unnormalized) p[e.index] = e.prob / branch.probability;
    return Belief(std::move(p));
}

}  // namespace pbvi
