#include "pbvi/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "pbvi/errors.hpp"
#include "pbvi/parallel.hpp"

namespace pbvi {

ValueFunction pessimistic_value_function(const PomdpModel& model) {
    const double v = model.rewardMin() / (1.0 - model.discount());
    return ValueFunction({AlphaVector{std::vector<double>(model.nStates(), v), 0}});
}

namespace {

/// Previous vectors stored state-major so that scoring a sparse belief is a
/// run of contiguous axpys.
struct Transposed {
    std::size_t G;
    std::vector<double> data;  // [s][g]

    explicit Transposed(const ValueFunction& vf) : G(vf.size()), data(vf.nStates() * vf.size()) {
        for (std::size_t g = 0; g < G; ++g)
            for (std::size_t s = 0; s < vf.nStates(); ++s) data[s * G + g] = vf[g].coeffs[s];
    }
};

struct Lookahead {
    double value;
    std::size_t action;
    std::vector<std::size_t> choice;  // per observation
};

Lookahead best_lookahead(const PomdpModel& model, const Belief& b, const Transposed& prev) {
    const std::size_t G = prev.G;
    std::vector<double> scores(G);
    Lookahead best{-std::numeric_limits<double>::infinity(), 0, {}};
    std::vector<std::size_t> choice(model.nObservations());
    for (std::size_t a = 0; a < model.nActions(); ++a) {
        std::fill(choice.begin(), choice.end(), 0);
        double future = 0.0;
        for (const ObservationBranch& br : observation_branches(model, b, a)) {
            std::fill(scores.begin(), scores.end(), 0.0);
            for (const SparseEntry& e : br.unnormalized) {
                const double* row = prev.data.data() + e.index * G;
                for (std::size_t g = 0; g < G; ++g) scores[g] += e.prob * row[g];
            }
            std::size_t arg = 0;
            for (std::size_t g = 1; g < G; ++g)
                if (scores[g] > scores[arg]) arg = g;
            choice[br.observation] = arg;
            future += scores[arg];
        }
        const double value = b.dot(model.reward_column(a)) + model.discount() * future;
        if (value > best.value) best = {value, a, choice};
    }
    return best;
}

AlphaVector build_vector(const PomdpModel& model, const ValueFunction& prev, const Lookahead& la) {
    const std::size_t S = model.nStates();
    const std::size_t a = la.action;
    std::vector<double> g(S, 0.0);
    for (std::size_t next = 0; next < S; ++next)
        for (const SparseEntry& o : model.observations(a, next)) g[next] += o.prob * prev[la.choice[o.index]].coeffs[next];
    AlphaVector out{std::vector<double>(S), a};
    for (std::size_t s = 0; s < S; ++s) {
        double acc = 0.0;
        for (const SparseEntry& t : model.successors(a, s)) acc += t.prob * g[t.index];
        out.coeffs[s] = model.reward(s, a) + model.discount() * acc;
    }
    return out;
}

}  // namespace

ValueFunction point_backup(const PomdpModel& model, const BeliefSet& B, const ValueFunction& previous,
                           std::size_t threads) {
    if (B.empty()) throw InvalidArgument("point backup needs a nonempty belief set");
    if (previous.nStates() != model.nStates()) throw DimensionMismatch("value function size does not match model");
    const Transposed prev(previous);
    std::vector<AlphaVector> slots(B.size());
    parallel_for(B.size(), threads,
                 [&](std::size_t i) { slots[i] = build_vector(model, previous, best_lookahead(model, B[i], prev)); });
    return ValueFunction(std::move(slots));
}

double point_backup_value(const PomdpModel& model, const Belief& b, const ValueFunction& previous) {
    return best_lookahead(model, b, Transposed(previous)).value;
}

std::size_t horizon_for_epsilon(const PomdpModel& model, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    const double gamma = model.discount();
    const double range = model.rewardMax() - model.rewardMin();
    if (gamma == 0.0) return 1;
    std::size_t T = 1;
    double weight = gamma * range;
    while (!(weight < epsilon)) {
        weight *= gamma;
        ++T;
    }
    return T;
}

std::size_t resolve_horizon(const PomdpModel& model, const SolveConfig& config) {
    if (config.horizon) {
        if (*config.horizon == 0) throw InvalidArgument("horizon must be at least 1");
        return *config.horizon;
    }
    const double range = model.rewardMax() - model.rewardMin();
    if (config.epsilon) return horizon_for_epsilon(model, *config.epsilon);
    if (range == 0.0) return 1;
    return horizon_for_epsilon(model, 0.01 * range);
}

ErrorBound theorem_bound(const PomdpModel& model, double density) {
    if (density < 0.0) throw InvalidArgument("density must be nonnegative");
    const double range = model.rewardMax() - model.rewardMin();
    const double gamma = model.discount();
    const double oneStep = range * density / (1.0 - gamma);
    return {oneStep, oneStep / (1.0 - gamma), range / (1.0 - gamma)};
}

std::vector<Belief> sample_reachable_beliefs(const PomdpModel& model, std::size_t count, std::uint64_t seed,
                                             std::size_t maxDepth) {
    std::vector<Belief> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(derive_seed(seed, i));
        Belief b = model.initialBelief();
        std::size_t s = rng.categorical(b.probs());
        const std::size_t depth = rng.index(maxDepth + 1);
        for (std::size_t d = 0; d < depth; ++d) {
            const std::size_t a = rng.index(model.nActions());
            s = sample_sparse(model.successors(a, s), rng);
            const std::size_t z = sample_sparse(model.observations(a, s), rng);
            b = belief_update(model, b, a, z);
        }
        out.push_back(std::move(b));
    }
    return out;
}

double estimate_density(const BeliefSet& B, std::span<const Belief> probes) {
    if (B.empty()) throw InvalidArgument("belief set is empty");
    double worst = 0.0;
    for (const Belief& p : probes) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const Belief& b : B) {
            nearest = std::min(nearest, l1_distance(p, b));
            if (nearest <= worst) break;
        }
        worst = std::max(worst, nearest);
    }
    return worst;
}

double estimate_density(const BeliefSet& B, const PomdpModel& model, std::size_t nProbes, std::uint64_t seed) {
    const std::vector<Belief> probes = sample_reachable_beliefs(model, nProbes, seed);
    return estimate_density(B, probes);
}

SolveResult pbvi_main(const PomdpModel& model, const BeliefSet& Binit, const ValueFunction& gamma0,
                      const SolveConfig& config) {
    if (Binit.empty()) throw InvalidArgument("initial belief set is empty");
    if (!(config.greedyEpsilon >= 0.0 && config.greedyEpsilon <= 1.0))
        throw InvalidArgument("greedy epsilon must lie in [0, 1]");
    if (gamma0.nStates() != model.nStates()) throw DimensionMismatch("initial value function size does not match model");
    for (const Belief& b : Binit)
        if (b.size() != model.nStates()) throw DimensionMismatch("initial belief size does not match model");

    using Clock = std::chrono::steady_clock;
    const std::size_t T = resolve_horizon(model, config);
    BeliefSet B = Binit;
    ValueFunction vf = gamma0;
    std::vector<TraceRecord> trace;
    double elapsed = 0.0;

    auto backups = [&] {
        for (std::size_t t = 0; t < T; ++t) vf = point_backup(model, B, vf, config.threads);
    };
    auto record = [&](std::size_t round) {
        TraceRecord r{round, B.size(), vf.size(), elapsed, {}, {}, {}};
        if (config.diagnostics) {
            r.gerError = ger_error_estimate(B, vf, model);
            r.density = estimate_density(B, model, config.densityProbes, derive_seed(config.seed, ~0ULL));
        }
        if (config.onRound) r.eval = config.onRound(round, vf);
        trace.push_back(std::move(r));
    };

    auto start = Clock::now();
    backups();
    elapsed += std::chrono::duration<double>(Clock::now() - start).count();
    record(0);

    for (std::size_t round = 1; round <= config.expansions; ++round) {
        if (B.size() >= config.maxBeliefs) break;
        start = Clock::now();
        Rng rng(derive_seed(config.seed, round));
        ExpansionResult grown =
            expand(config.strategy, B, vf, model, rng, config.greedyEpsilon, config.maxBeliefs - B.size());
        if (grown.beliefs.size() == B.size()) break;
        B = std::move(grown.beliefs);
        backups();
        elapsed += std::chrono::duration<double>(Clock::now() - start).count();
        record(round);
    }
    return {std::move(vf), std::move(B), std::move(trace), T};
}

SolveResult pbvi_main(const PomdpModel& model, const SolveConfig& config) {
    return pbvi_main(model, BeliefSet({model.initialBelief()}), pessimistic_value_function(model), config);
}

}  // namespace pbvi
