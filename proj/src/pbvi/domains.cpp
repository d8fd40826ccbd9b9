#include "pbvi/domains.hpp"

#include <string>

namespace pbvi {

PomdpModel make_1d() {
    ModelData d;
    d.nStates = 4;
    d.nActions = 2;
    d.nObservations = 2;
    d.discount = 0.75;
    d.stateNames = {"s0", "s1", "goal", "s3"};
    d.actionNames = {"left", "right"};
    d.observationNames = {"none", "goal"};
    d.transition.assign(2 * 4 * 4, 0.0);
    auto T = [&](std::size_t a, std::size_t s, std::size_t next) -> double& { return d.transition[(a * 4 + s) * 4 + next]; };
    T(k1dLeft, 0, 0) = 1.0;
    T(k1dLeft, 1, 0) = 1.0;
    T(k1dLeft, 3, k1dGoal) = 1.0;
    T(k1dRight, 0, 1) = 1.0;
    T(k1dRight, 1, k1dGoal) = 1.0;
    T(k1dRight, 3, 3) = 1.0;
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t next : {0, 1, 3}) T(a, k1dGoal, next) = 1.0 / 3.0;
    d.observation.assign(2 * 4 * 2, 0.0);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t next = 0; next < 4; ++next)
            d.observation[(a * 4 + next) * 2 + (next == k1dGoal ? k1dSeeGoal : k1dNone)] = 1.0;
    d.reward.assign(4 * 2, 0.0);
    d.reward[k1dGoal * 2 + k1dLeft] = 1.0;
    d.reward[k1dGoal * 2 + k1dRight] = 1.0;
    d.initialBelief = {1.0 / 3.0, 1.0 / 3.0, 0.0, 1.0 / 3.0};
    d.goalStates = {k1dGoal};
    return PomdpModel(std::move(d));
}

namespace {

struct Move {
    int dx;
    int dy;
};
constexpr Move kMoves[4] = {{0, 1}, {0, -1}, {1, 0}, {-1, 0}};

std::size_t step(std::size_t c, Move m) {
    const Cell p = TagGeometry::cell(c);
    return TagGeometry::at(p.x + m.dx, p.y + m.dy).value_or(c);
}

/// Person's next-cell distribution given its cell and the robot's cell.
/// Each axis carries 0.4: all of it away from the robot, or split evenly when
/// aligned on that axis. The remaining 0.2 stays; blocked moves stay as well.
void person_moves(std::size_t person, std::size_t robot, double* out) {
    const Cell p = TagGeometry::cell(person), r = TagGeometry::cell(robot);
    out[person] += 0.2;
    auto axis = [&](int pv, int rv, Move plus, Move minus) {
        if (pv > rv) out[step(person, plus)] += 0.4;
        else if (pv < rv) out[step(person, minus)] += 0.4;
        else {
            out[step(person, plus)] += 0.2;
            out[step(person, minus)] += 0.2;
        }
    };
    axis(p.x, r.x, kMoves[kEast], kMoves[kWest]);
    axis(p.y, r.y, kMoves[kNorth], kMoves[kSouth]);
}

}  // namespace

PomdpModel make_tag() {
    constexpr std::size_t C = TagGeometry::kCells;
    constexpr std::size_t P = C + 1;
    constexpr std::size_t S = C * P, A = 5, Z = C + 1;
    ModelData d;
    d.nStates = S;
    d.nActions = A;
    d.nObservations = Z;
    d.discount = 0.95;
    d.actionNames = {"north", "south", "east", "west", "tag"};
    for (std::size_t r = 0; r < C; ++r)
        for (std::size_t p = 0; p < P; ++p)
            d.stateNames.push_back("r" + std::to_string(r) + (p == kTagFound ? "_found" : "_p" + std::to_string(p)));
    for (std::size_t z = 0; z < C; ++z) d.observationNames.push_back("r" + std::to_string(z));
    d.observationNames.push_back("seen");

    d.transition.assign(A * S * S, 0.0);
    d.reward.assign(S * A, 0.0);
    std::vector<double> personNext(C);
    for (std::size_t a = 0; a < A; ++a) {
        for (std::size_t r = 0; r < C; ++r) {
            for (std::size_t p = 0; p < P; ++p) {
                const std::size_t s = tag_state(r, p);
                double* row = d.transition.data() + (a * S + s) * S;
                if (p == kTagFound) {
                    row[s] = 1.0;
                    continue;
                }
                if (a == kTag) {
                    d.reward[s * A + a] = r == p ? 10.0 : -10.0;
                    if (r == p) {
                        row[tag_state(r, kTagFound)] = 1.0;
                        continue;
                    }
                } else {
                    d.reward[s * A + a] = -1.0;
                }
                const std::size_t rNext = a == kTag ? r : step(r, kMoves[a]);
                std::fill(personNext.begin(), personNext.end(), 0.0);
                person_moves(p, r, personNext.data());
                for (std::size_t q = 0; q < C; ++q)
                    if (personNext[q] > 0.0) row[tag_state(rNext, q)] += personNext[q];
            }
        }
    }

    d.observation.assign(A * S * Z, 0.0);
    for (std::size_t a = 0; a < A; ++a)
        for (std::size_t r = 0; r < C; ++r)
            for (std::size_t p = 0; p < P; ++p) {
                const std::size_t z = (p == r || p == kTagFound) ? kTagSeen : r;
                d.observation[(a * S + tag_state(r, p)) * Z + z] = 1.0;
            }

    d.initialBelief.assign(S, 0.0);
    for (std::size_t r = 0; r < C; ++r)
        for (std::size_t p = 0; p < C; ++p) d.initialBelief[tag_state(r, p)] = 1.0 / static_cast<double>(C * C);
    for (std::size_t r = 0; r < C; ++r) {
        d.terminalStates.push_back(tag_state(r, kTagFound));
        d.goalStates.push_back(tag_state(r, kTagFound));
    }
    return PomdpModel(std::move(d));
}

}  // namespace pbvi
