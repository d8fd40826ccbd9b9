#pragma once

#include <vector>

#include "pbvi/expansion.hpp"
#include "pbvi/model.hpp"
#include "pbvi/rng.hpp"

namespace pbvi::testing {

/// Random stochastic row; roughly a third of the entries are zeroed (at least
/// one survives) so the sparse paths get exercised.
inline std::vector<double> random_row(std::size_t n, Rng& rng) {
    std::vector<double> row(n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.uniform() < 0.33) continue;
        row[i] = rng.uniform() + 1e-3;
        total += row[i];
    }
    if (total == 0.0) {
        row[rng.index(n)] = 1.0;
        total = 1.0;
    }
    for (double& x : row) x /= total;
    return row;
}

struct ModelShape {
    std::size_t maxStates = 5;
    std::size_t maxActions = 3;
    std::size_t maxObservations = 3;
};

inline ModelData random_model_data(Rng& rng, ModelShape shape = {}) {
    ModelData d;
    d.nStates = 1 + rng.index(shape.maxStates);
    d.nActions = 1 + rng.index(shape.maxActions);
    d.nObservations = 1 + rng.index(shape.maxObservations);
    const std::size_t S = d.nStates, A = d.nActions, Z = d.nObservations;
    for (std::size_t a = 0; a < A; ++a)
        for (std::size_t s = 0; s < S; ++s) {
            auto row = random_row(S, rng);
            d.transition.insert(d.transition.end(), row.begin(), row.end());
        }
    for (std::size_t a = 0; a < A; ++a)
        for (std::size_t s = 0; s < S; ++s) {
            auto row = random_row(Z, rng);
            d.observation.insert(d.observation.end(), row.begin(), row.end());
        }
    d.reward.resize(S * A);
    for (double& r : d.reward) r = 2.0 * rng.uniform() - 1.0;
    d.discount = 0.5 + 0.45 * rng.uniform();
    const Belief b0 = sample_simplex(S, rng);
    d.initialBelief.assign(b0.probs().begin(), b0.probs().end());
    return d;
}

inline PomdpModel random_model(Rng& rng, ModelShape shape = {}) { return PomdpModel(random_model_data(rng, shape)); }

/// Value function with coefficients inside [Rmin, Rmax] / (1 - gamma).
inline ValueFunction random_value_function(const PomdpModel& m, std::size_t count, Rng& rng) {
    const double lo = m.rewardMin() / (1.0 - m.discount());
    const double hi = m.rewardMax() / (1.0 - m.discount());
    std::vector<AlphaVector> vs(count);
    for (AlphaVector& v : vs) {
        v.action = rng.index(m.nActions());
        v.coeffs.resize(m.nStates());
        for (double& c : v.coeffs) c = lo + (hi - lo) * rng.uniform();
    }
    return ValueFunction(std::move(vs));
}

/// Mix of simplex samples, corners and two-point beliefs.
inline Belief random_belief(std::size_t n, Rng& rng) {
    switch (rng.index(3)) {
        case 0: return Belief::point_mass(n, rng.index(n));
        case 1: {
            std::vector<double> p(n, 0.0);
            const double w = rng.uniform();
            p[rng.index(n)] += w;
            p[rng.index(n)] += 1.0 - w;
            return Belief(std::move(p));
        }
        default: return sample_simplex(n, rng);
    }
}

}  // namespace pbvi::testing
