#include "pbvi/expansion.hpp"

#include <algorithm>
#include <cmath>

#include "pbvi/errors.hpp"

namespace pbvi {

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
    if (name == "ra" || name == "RA") return Strategy::RA;
    if (name == "ssra" || name == "SSRA") return Strategy::SSRA;
    if (name == "ssga" || name == "SSGA") return Strategy::SSGA;
    if (name == "ssea" || name == "SSEA") return Strategy::SSEA;
    if (name == "ger" || name == "GER") return Strategy::GER;
    return std::nullopt;
}

std::string_view strategy_name(Strategy s) noexcept {
    switch (s) {
        case Strategy::RA: return "ra";
        case Strategy::SSRA: return "ssra";
        case Strategy::SSGA: return "ssga";
        case Strategy::SSEA: return "ssea";
        case Strategy::GER: return "ger";
    }
    return "?";
}

Belief sample_simplex(std::size_t nStates, Rng& rng) {
    std::vector<double> cuts(nStates + 1);
    cuts[0] = 0.0;
    cuts[nStates] = 1.0;
    for (std::size_t i = 1; i < nStates; ++i) cuts[i] = rng.uniform();
    std::sort(cuts.begin() + 1, cuts.end() - 1);
    std::vector<double> p(nStates);
    for (std::size_t i = 0; i < nStates; ++i) p[i] = cuts[i + 1] - cuts[i];
    return Belief(std::move(p));
}

std::size_t sample_sparse(std::span<const SparseEntry> entries, Rng& rng) {
    double u = rng.uniform();
    for (const SparseEntry& e : entries) {
        if (u < e.prob) return e.index;
        u -= e.prob;
    }
    return entries.back().index;
}

namespace {

struct Step {
    std::size_t action;
    std::size_t observation;
    Belief successor;
};

/// Forward-simulates one step from b under action a: s ~ b, s' ~ T, z ~ O.
std::optional<Step> simulate_step(const PomdpModel& model, const Belief& b, std::size_t a, Rng& rng) {
    const std::size_t s = rng.categorical(b.probs());
    const std::size_t next = sample_sparse(model.successors(a, s), rng);
    const std::size_t z = sample_sparse(model.observations(a, next), rng);
    try {
        return Step{a, z, belief_update(model, b, a, z)};
    } catch (const ZeroLikelihood&) {
        return std::nullopt;
    }
}

void append(ExpansionResult& out, Belief b, Provenance p, std::size_t& budget) {
    if (budget == 0) return;
    if (out.beliefs.insert(std::move(b))) {
        out.added.push_back(p);
        --budget;
    }
}

}  // namespace

ExpansionResult expand_ra(const BeliefSet& B, const PomdpModel& model, Rng& rng, std::size_t limit) {
    ExpansionResult out{B, {}};
    const std::size_t n = B.size();
    for (std::size_t i = 0; i < n && limit > 0; ++i) append(out, sample_simplex(model.nStates(), rng), {}, limit);
    return out;
}

ExpansionResult expand_ssra(const BeliefSet& B, const PomdpModel& model, Rng& rng, std::size_t limit) {
    ExpansionResult out{B, {}};
    for (std::size_t i = 0; i < B.size() && limit > 0; ++i) {
        const std::size_t a = rng.index(model.nActions());
        if (auto step = simulate_step(model, B[i], a, rng))
            append(out, std::move(step->successor), {i, step->action, step->observation}, limit);
    }
    return out;
}

ExpansionResult expand_ssga(const BeliefSet& B, const ValueFunction& vf, const PomdpModel& model, Rng& rng,
                            double greedyEpsilon, std::size_t limit) {
    if (!(greedyEpsilon >= 0.0 && greedyEpsilon <= 1.0)) throw InvalidArgument("greedy epsilon must lie in [0, 1]");
    ExpansionResult out{B, {}};
    for (std::size_t i = 0; i < B.size() && limit > 0; ++i) {
        const std::size_t a =
            rng.uniform() < greedyEpsilon ? rng.index(model.nActions()) : greedy_action(vf, B[i]);
        if (auto step = simulate_step(model, B[i], a, rng))
            append(out, std::move(step->successor), {i, step->action, step->observation}, limit);
    }
    return out;
}

ExpansionResult expand_ssea(const BeliefSet& B, const PomdpModel& model, Rng& rng, std::size_t limit) {
    ExpansionResult out{B, {}};
    constexpr double kTieTol = 1e-12;
    for (std::size_t i = 0; i < B.size() && limit > 0; ++i) {
        std::vector<Step> candidates;
        std::vector<double> distance;
        for (std::size_t a = 0; a < model.nActions(); ++a) {
            auto step = simulate_step(model, B[i], a, rng);
            if (!step) continue;
            double nearest = std::numeric_limits<double>::infinity();
            for (const Belief& m : out.beliefs) nearest = std::min(nearest, l1_distance(step->successor, m));
            candidates.push_back(std::move(*step));
            distance.push_back(nearest);
        }
        if (candidates.empty()) continue;
        const double best = *std::max_element(distance.begin(), distance.end());
        // Equidistant candidates are equally good; pick one uniformly.
        std::vector<std::size_t> tied;
        for (std::size_t c = 0; c < candidates.size(); ++c)
            if (distance[c] >= best - kTieTol) tied.push_back(c);
        const std::size_t pick = tied.size() == 1 ? tied.front() : tied[rng.index(tied.size())];
        Step& chosen = candidates[pick];
        append(out, std::move(chosen.successor), {i, chosen.action, chosen.observation}, limit);
    }
    return out;
}

namespace {

struct ErrorBounds {
    double hi;  // Rmax / (1 - gamma)
    double lo;  // Rmin / (1 - gamma)
};

ErrorBounds error_bounds(const PomdpModel& model) {
    return {model.rewardMax() / (1.0 - model.discount()), model.rewardMin() / (1.0 - model.discount())};
}

double pair_error(const Belief& candidate, const Belief& b, std::span<const double> alpha, ErrorBounds bounds) {
    double e = 0.0;
    for (std::size_t s = 0; s < candidate.size(); ++s) {
        const double diff = candidate[s] - b[s];
        if (diff == 0.0) continue;
        e += (diff >= 0.0 ? bounds.hi - alpha[s] : bounds.lo - alpha[s]) * diff;
    }
    return std::max(0.0, e);
}

struct EnvelopeEntry {
    std::size_t parent;
    std::size_t action;
    std::size_t observation;
    Belief successor;
    double reachProb;
    double error;
    bool member;
};

class Envelope {
public:
    Envelope(const BeliefSet& B, const ValueFunction& vf, const PomdpModel& model)
        : vf_(vf), model_(model), bounds_(error_bounds(model)), B_(B) {
        for (const Belief& b : B_) alphas_.push_back(&vf_[vf_.evaluate(b).index].coeffs);
        for (std::size_t p = 0; p < B_.size(); ++p) add_parent(p);
    }

    const BeliefSet& beliefs() const { return B_; }

    /// Scores (parent, action) pairs; returns the best one with a non-member successor.
    struct Choice {
        std::size_t parent, action;
        double score;
    };
    std::optional<Choice> best_pair() const {
        std::optional<Choice> best;
        for (std::size_t p = 0; p < B_.size(); ++p) {
            for (std::size_t a = 0; a < model_.nActions(); ++a) {
                const auto [lo, hi] = ranges_[p][a];
                double score = 0.0;
                bool open = false;
                for (std::size_t k = lo; k < hi; ++k) {
                    const EnvelopeEntry& e = entries_[k];
                    if (!e.member) {
                        open = true;
                        score += e.reachProb * e.error;
                    }
                }
                if (open && (!best || score > best->score)) best = Choice{p, a, score};
            }
        }
        return best;
    }

    double max_score() const {
        double best = 0.0;
        for (std::size_t p = 0; p < B_.size(); ++p)
            for (std::size_t a = 0; a < model_.nActions(); ++a) {
                const auto [lo, hi] = ranges_[p][a];
                double score = 0.0;
                for (std::size_t k = lo; k < hi; ++k)
                    if (!entries_[k].member) score += entries_[k].reachProb * entries_[k].error;
                best = std::max(best, score);
            }
        return best;
    }

    /// Inserts the best observation successor of (parent, action).
    Provenance take(std::size_t parent, std::size_t action) {
        const auto [lo, hi] = ranges_[parent][action];
        std::size_t pick = hi;
        double bestWeighted = -1.0;
        for (std::size_t k = lo; k < hi; ++k) {
            const EnvelopeEntry& e = entries_[k];
            if (e.member) continue;
            const double w = e.reachProb * e.error;
            if (w > bestWeighted) {
                bestWeighted = w;
                pick = k;
            }
        }
        const EnvelopeEntry chosen = entries_[pick];
        B_.insert(chosen.successor);
        const Belief& added = B_[B_.size() - 1];
        const std::vector<double>* alpha = &vf_[vf_.evaluate(added).index].coeffs;
        alphas_.push_back(alpha);
        for (EnvelopeEntry& e : entries_) {
            if (e.member) continue;
            if (l1_distance(e.successor, added) <= kBeliefDedupTol) {
                e.member = true;
                e.error = 0.0;
            } else {
                e.error = std::min(e.error, pair_error(e.successor, added, *alpha, bounds_));
            }
        }
        add_parent(B_.size() - 1);
        return {chosen.parent, chosen.action, chosen.observation};
    }

private:
    const ValueFunction& vf_;
    const PomdpModel& model_;
    ErrorBounds bounds_;
    BeliefSet B_;
    std::vector<const std::vector<double>*> alphas_;
    std::vector<EnvelopeEntry> entries_;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> ranges_;

    void add_parent(std::size_t p) {
        const Belief& b = B_[p];
        ranges_.emplace_back(model_.nActions());
        for (std::size_t a = 0; a < model_.nActions(); ++a) {
            const std::size_t lo = entries_.size();
            for (const ObservationBranch& br : observation_branches(model_, b, a)) {
                if (br.probability < kZeroLikelihood) continue;
                Belief succ = branch_belief(br, model_.nStates());
                const bool member = B_.contains(succ);
                double err = 0.0;
                if (!member) {
                    err = std::numeric_limits<double>::infinity();
                    for (std::size_t m = 0; m < B_.size(); ++m)
                        err = std::min(err, pair_error(succ, B_[m], *alphas_[m], bounds_));
                }
                entries_.push_back({p, a, br.observation, std::move(succ), br.probability, err, member});
            }
            ranges_[p][a] = {lo, entries_.size()};
        }
    }
};

}  // namespace

ExpansionResult expand_ger(const BeliefSet& B, const ValueFunction& vf, const PomdpModel& model, std::size_t limit) {
    if (B.empty()) throw InvalidArgument("GER expansion needs a nonempty belief set");
    Envelope env(B, vf, model);
    std::vector<Provenance> added;
    const std::size_t rounds = std::min(B.size(), limit);
    for (std::size_t i = 0; i < rounds; ++i) {
        const auto choice = env.best_pair();
        if (!choice) break;  // every reachable successor is already in B
        added.push_back(env.take(choice->parent, choice->action));
    }
    return {env.beliefs(), std::move(added)};
}

ExpansionResult expand(Strategy strategy, const BeliefSet& B, const ValueFunction& vf, const PomdpModel& model,
                       Rng& rng, double greedyEpsilon, std::size_t limit) {
    switch (strategy) {
        case Strategy::RA: return expand_ra(B, model, rng, limit);
        case Strategy::SSRA: return expand_ssra(B, model, rng, limit);
        case Strategy::SSGA: return expand_ssga(B, vf, model, rng, greedyEpsilon, limit);
        case Strategy::SSEA: return expand_ssea(B, model, rng, limit);
        case Strategy::GER: return expand_ger(B, vf, model, limit);
    }
    throw InvalidArgument("unknown strategy");
}

double ger_point_error(const Belief& candidate, const BeliefSet& B, const ValueFunction& vf, const PomdpModel& model) {
    if (B.empty()) throw InvalidArgument("belief set is empty");
    const ErrorBounds bounds = error_bounds(model);
    double best = std::numeric_limits<double>::infinity();
    for (const Belief& b : B) best = std::min(best, pair_error(candidate, b, vf[vf.evaluate(b).index].coeffs, bounds));
    return best;
}

double ger_error_estimate(const BeliefSet& B, const ValueFunction& vf, const PomdpModel& model) {
    if (B.empty()) return 0.0;
    return Envelope(B, vf, model).max_score();
}

}  // namespace pbvi
