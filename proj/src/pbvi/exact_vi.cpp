#include "pbvi/exact_vi.hpp"

#include <limits>
#include <string>

#include "pbvi/errors.hpp"

namespace pbvi {

std::vector<double> project(const PomdpModel& model, std::span<const double> alpha, std::size_t a,
                            std::size_t z) {
    const std::size_t S = model.nStates();
    std::vector<double> out(S, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
        double acc = 0.0;
        for (const SparseEntry& e : model.successors(a, s)) acc += e.prob * model.observation(a, e.index, z) * alpha[e.index];
        out[s] = model.discount() * acc;
    }
    return out;
}

std::vector<AlphaVector> pointwise_prune(std::vector<AlphaVector> vectors) {
    const std::size_t n = vectors.size();
    std::vector<char> removed(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (removed[i]) continue;
        for (std::size_t j = 0; j < n && !removed[i]; ++j) {
            if (i == j || removed[j]) continue;
            const auto& vi = vectors[i].coeffs;
            const auto& vj = vectors[j].coeffs;
            bool geq = true, strict = false;
            for (std::size_t s = 0; s < vi.size() && geq; ++s) {
                if (vj[s] < vi[s]) geq = false;
                else if (vj[s] > vi[s]) strict = true;
            }
            if (!geq) continue;
            // Equal vectors: keep the earlier one.
            if (strict || (nearly_equal(vi, vj, kVectorDedupTol) && j < i)) removed[i] = 1;
        }
    }
    std::vector<AlphaVector> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!removed[i]) out.push_back(std::move(vectors[i]));
    return out;
}

ExactBackupResult exact_backup(const PomdpModel& model, const ValueFunction& previous, std::uint64_t cap) {
    const std::size_t S = model.nStates(), A = model.nActions(), Z = model.nObservations();
    const std::uint64_t G = previous.size();
    if (previous.nStates() != S) throw DimensionMismatch("value function size does not match model");

    // |A| * G^|Z| with overflow detection.
    std::uint64_t perAction = 1;
    bool overflow = false;
    for (std::size_t z = 0; z < Z; ++z) {
        if (perAction > std::numeric_limits<std::uint64_t>::max() / G) {
            overflow = true;
            break;
        }
        perAction *= G;
    }
    if (!overflow && perAction > std::numeric_limits<std::uint64_t>::max() / A) overflow = true;
    const std::uint64_t generated = overflow ? std::numeric_limits<std::uint64_t>::max() : perAction * A;
    if (overflow || generated > cap)
        throw SizeLimitExceeded("exact backup would generate " +
                                (overflow ? std::string("more than 2^64") : std::to_string(generated)) +
                                " vectors (cap " + std::to_string(cap) + ")");

    // projections[a][z][i]
    std::vector<std::vector<std::vector<std::vector<double>>>> projections(A);
    for (std::size_t a = 0; a < A; ++a) {
        projections[a].resize(Z);
        for (std::size_t z = 0; z < Z; ++z)
            for (const AlphaVector& v : previous) projections[a][z].push_back(project(model, v.coeffs, a, z));
    }

    std::vector<AlphaVector> all;
    all.reserve(static_cast<std::size_t>(generated));
    std::vector<std::size_t> choice(Z, 0);
    for (std::size_t a = 0; a < A; ++a) {
        std::fill(choice.begin(), choice.end(), 0);
        for (std::uint64_t k = 0; k < perAction; ++k) {
            AlphaVector v;
            v.action = a;
            v.coeffs.resize(S);
            for (std::size_t s = 0; s < S; ++s) v.coeffs[s] = model.reward(s, a);
            for (std::size_t z = 0; z < Z; ++z) {
                const auto& p = projections[a][z][choice[z]];
                for (std::size_t s = 0; s < S; ++s) v.coeffs[s] += p[s];
            }
            all.push_back(std::move(v));
            // Lexicographic increment, last observation fastest.
            for (std::size_t z = Z; z-- > 0;) {
                if (++choice[z] < G) break;
                choice[z] = 0;
            }
        }
    }
    return {ValueFunction(pointwise_prune(std::move(all))), generated};
}

}  // namespace pbvi
