#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hexplore/coordination.hpp"
#include "hexplore/rng.hpp"

using namespace hexplore;
using namespace hexplore::coord;
using world::BeliefMap;
using world::BeliefState;
using world::Cell;

namespace {

BeliefMap map_with_free_block(int side, int x0, int y0, int x1, int y1) {
    BeliefMap belief(side);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) belief.cells(y, x) = {BeliefState::Free, 0.9, 1};
    return belief;
}

PartnerEstimate partner(double d) { return {1, d, {0, 0}}; }

}  // namespace

TEST_CASE("regional summary shapes and ratios") {
    BeliefMap fresh(16);
    const auto empty = regional_summary(fresh, {}, 4);
    CHECK(empty.region_count() == 16);
    CHECK(empty.feature_vector().size() == 48);
    for (const auto& r : empty.regions) {
        CHECK(r.exploration_ratio == 0.0);
        CHECK(r.walkability_ratio == 0.0);
    }

    // Fully revealed open room: interior regions walkable everywhere.
    BeliefMap room(16);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) {
            const bool wall = x == 0 || y == 0 || x == 15 || y == 15;
            room.cells(y, x) = {wall ? BeliefState::Wall : BeliefState::Free, 1.0, 1};
        }
    const auto full = regional_summary(room, {}, 4);
    for (const auto& r : full.regions) CHECK(r.exploration_ratio == 1.0);
    CHECK(full.regions[5].walkability_ratio == 1.0);  // interior region
    CHECK(full.regions[0].walkability_ratio < 1.0);   // touches the border

    // Agent presence indicator.
    const std::vector<Cell> agents{{2, 2}, {13, 13}};
    const auto with_agents = regional_summary(room, agents, 4);
    CHECK(with_agents.regions[0].agent_present == 1.0);
    CHECK(with_agents.regions[15].agent_present == 1.0);
    CHECK(with_agents.regions[5].agent_present == 0.0);
}

TEST_CASE("curiosity map marks weighted frontiers") {
    // Fully revealed map: no frontier anywhere.
    BeliefMap room(8);
    for (auto& c : room.cells.data()) c = {BeliefState::Free, 1.0, 1};
    const auto none = curiosity_map(room, {4, 4});
    for (double v : none.data()) CHECK(v == 0.0);

    // One free cell surrounded by unknowns, agent on it: 4/4 * exp(0) = 1
    // before and after normalization.
    BeliefMap single(8);
    single.cells(4, 4) = {BeliefState::Free, 1.0, 1};
    const auto lone = curiosity_map(single, {4, 4});
    CHECK(lone(4, 4) == 1.0);

    // Two unknown neighbors at distance zero: pre-normalization 0.5.
    BeliefMap partial(8);
    partial.cells(4, 4) = {BeliefState::Free, 1.0, 1};
    partial.cells(4, 5) = {BeliefState::Free, 1.0, 1};   // east known
    partial.cells(4, 3) = {BeliefState::Wall, 1.0, 1};   // west known...
    // north and south unknown -> 2 unknown neighbors. The map max-normalizes,
    // so measure against a second frontier cell with a bigger score.
    partial.cells(5, 5) = {BeliefState::Free, 1.0, 1};
    const auto two = curiosity_map(partial, {4, 4});
    CHECK(two(4, 4) > 0.0);
    // Cell (5,5) has 3 unknown neighbors but sits one diagonal away, cell
    // (4,4) has 2 at distance zero: 0.5 vs 0.75 * exp(-0.1 * sqrt(2)).
    const double expect_ratio = 0.5 / (0.75 * std::exp(-0.1 * std::sqrt(2.0)));
    CHECK(two(4, 4) / two(5, 5) == doctest::Approx(expect_ratio).epsilon(1e-12));
}

TEST_CASE("coordination reward follows the repulsion rule") {
    CHECK(coordination_reward({}) == 0.0);
    const std::vector<PartnerEstimate> at5{partner(5.0)};
    CHECK(coordination_reward(at5) == 0.5);
    const std::vector<PartnerEstimate> at2{partner(2.0)};
    CHECK(coordination_reward(at2) == 0.0);  // below d_min
    const std::vector<PartnerEstimate> at20{partner(20.0)};
    CHECK(coordination_reward(at20) == 1.0);  // saturated

    const std::vector<PartnerEstimate> several{partner(5.0), partner(2.0), partner(20.0)};
    CHECK(coordination_reward(several) == 1.5);

    const std::vector<PartnerEstimate> bad{partner(-1.0)};
    CHECK_THROWS_AS(coordination_reward(bad), std::invalid_argument);
}

TEST_CASE("coordination reward is monotone above the threshold") {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const double a = rng.uniform(3.0, 30.0);
        const double b = a + rng.uniform(0.0, 10.0);
        const std::vector<PartnerEstimate> pa{partner(a)}, pb{partner(b)};
        CHECK(coordination_reward(pb) >= coordination_reward(pa));
    }
    const std::vector<PartnerEstimate> below{partner(2.999)};
    CHECK(coordination_reward(below) == 0.0);
}

TEST_CASE("exploration reward decays with distance") {
    CHECK(exploration_reward({}, {4, 4}) == 0.0);

    const std::vector<NewlyRevealedCell> self{{{4, 4}, true}};
    CHECK(exploration_reward(self, {4, 4}) == 1.0);

    const std::vector<NewlyRevealedCell> two_away{{{6, 4}, true}};
    CHECK(exploration_reward(two_away, {4, 4}) == std::exp(-0.2));

    // Outside the local radius, or already known to the team: no credit.
    const std::vector<NewlyRevealedCell> far{{{7, 4}, true}};
    CHECK(exploration_reward(far, {4, 4}) == 0.0);
    const std::vector<NewlyRevealedCell> stale{{{5, 4}, false}};
    CHECK(exploration_reward(stale, {4, 4}) == 0.0);
}

TEST_CASE("intrinsic reward composition is exact") {
    const auto zero = intrinsic_reward(0, 0, 0);
    CHECK(zero.composite == 0.0);

    const auto mix = intrinsic_reward(1.0, 0.5, 1.0);
    CHECK(mix.composite == 1.0 * 1.0 + 0.5 * 0.5 + 0.3 * 1.0);
    CHECK(mix.composite == doctest::Approx(1.55));

    const auto proj = intrinsic_reward(0.7, 9.0, 9.0, {1.0, 0.0, 0.0});
    CHECK(proj.composite == 0.7);

    // Affine sensitivity: nudging one component moves the composite by
    // exactly weight * delta.
    Rng rng(9);
    for (int i = 0; i < 50; ++i) {
        const double c = rng.uniform(0, 2), k = rng.uniform(0, 2), e = rng.uniform(0, 2);
        const double delta = rng.uniform(-1, 1);
        const auto base = intrinsic_reward(c, k, e);
        const auto bumped = intrinsic_reward(c, k + delta, e);
        CHECK(bumped.composite - base.composite == doctest::Approx(0.5 * delta).epsilon(1e-12));
    }
}

TEST_CASE("gating features") {
    // Straight corridor: two opposite free neighbors.
    BeliefMap corridor = map_with_free_block(9, 2, 4, 6, 4);
    TokenBudget tokens;
    const auto f = gating_features(corridor, {4, 4}, tokens);
    CHECK(f.values.size() == 9);
    CHECK(f.values[1] == 1.0);                   // full tokens
    CHECK(f.values[3] == doctest::Approx(0.5));  // 2 of 4 neighbors free
    CHECK(f.values[5] == 1.0);                   // corridor one-hot
    CHECK(f.values[4] + f.values[5] + f.values[6] + f.values[7] == 1.0);
    CHECK(f.values[8] == 1.0);

    // Junction: three free neighbors.
    BeliefMap junction = map_with_free_block(9, 2, 4, 6, 4);
    junction.cells(5, 4) = {BeliefState::Free, 0.9, 1};
    CHECK(gating_features(junction, {4, 4}, tokens).values[4] == 1.0);

    // Dead-end: one free neighbor.
    BeliefMap deadend(9);
    deadend.cells(4, 4) = {BeliefState::Free, 0.9, 1};
    deadend.cells(4, 5) = {BeliefState::Free, 0.9, 1};
    deadend.cells(4, 3) = {BeliefState::Wall, 0.9, 1};
    deadend.cells(3, 4) = {BeliefState::Wall, 0.9, 1};
    deadend.cells(5, 4) = {BeliefState::Wall, 0.9, 1};
    CHECK(gating_features(deadend, {4, 4}, tokens).values[6] == 1.0);

    // Open area: a revealed 3x3 block.
    BeliefMap open = map_with_free_block(9, 3, 3, 5, 5);
    CHECK(gating_features(open, {4, 4}, tokens).values[7] == 1.0);
}

TEST_CASE("gate decision respects hard gates and the classifier") {
    GatingFeatures f;
    f.values = {0.2, 1.0, 0.5, 0.75, 1, 0, 0, 0, 1};
    const std::vector<double> zero(9, 0.0);

    // Neutral classifier sits exactly at 0.5: threshold is inclusive.
    CHECK(gate_decision(f, zero, true, true));
    CHECK(!gate_decision(f, zero, false, true));
    CHECK(!gate_decision(f, zero, true, false));

    std::vector<double> discourage(9, 0.0);
    discourage[8] = -1.0;  // bias against transmitting
    CHECK(!gate_decision(f, discourage, true, true));

    std::vector<double> encourage(9, 0.0);
    encourage[8] = 1.0;
    CHECK(gate_decision(f, encourage, true, true));
}

TEST_CASE("gate decision is monotone in positively weighted features") {
    std::vector<double> w{0.5, 0.5, 0.5, 0.5, 0.2, 0.2, 0.2, 0.2, -1.2};
    Rng rng(14);
    for (int i = 0; i < 200; ++i) {
        GatingFeatures lo, hi;
        for (int k = 0; k < 4; ++k) {
            lo.values[k] = rng.uniform(0, 1);
            hi.values[k] = lo.values[k] + rng.uniform(0, 1 - lo.values[k]);
        }
        const int onehot = rng.uniform_int(4, 7);
        lo.values[onehot] = hi.values[onehot] = 1.0;
        lo.values[8] = hi.values[8] = 1.0;
        // Pairwise dominance: if lo transmits, hi must too.
        if (gate_decision(lo, w, true, true)) CHECK(gate_decision(hi, w, true, true));
    }
}

TEST_CASE("token budget accounting") {
    TokenBudget b{10.0, 10.0, 1.0 / 60.0};
    const auto idle = tick_tokens(b, false);
    CHECK(idle.current == 10.0);  // capped

    const auto spent = tick_tokens(b, true);
    CHECK(spent.current == doctest::Approx(9.0 + 1.0 / 60.0));

    // Sixty idle steps from 9 tokens refill exactly to the cap.
    TokenBudget t{9.0, 10.0, 1.0 / 60.0};
    for (int i = 0; i < 60; ++i) t = tick_tokens(t, false);
    CHECK(t.current == doctest::Approx(10.0));

    TokenBudget broke{0.5, 10.0, 1.0 / 60.0};
    CHECK_THROWS_AS(tick_tokens(broke, true), InsufficientTokens);

    // Never leaves [0, initial].
    TokenBudget walk{10.0, 10.0, 1.0 / 60.0};
    Rng rng(8);
    for (int i = 0; i < 1000; ++i) {
        walk = tick_tokens(walk, walk.current >= 1.0 && rng.uniform() < 0.3);
        CHECK(walk.current >= 0.0);
        CHECK(walk.current <= walk.initial);
    }
}

TEST_CASE("goal selection") {
    BeliefMap belief(16);
    // Reveal region 0 fully, leave others partly unknown with frontiers.
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) belief.cells(y, x) = {BeliefState::Free, 1.0, 1};
    belief.cells(8, 8) = {BeliefState::Free, 1.0, 1};

    const auto summary = regional_summary(belief, {}, 4);
    const auto cmap = curiosity_map(belief, {8, 8});
    const auto cur = aggregate_curiosity(cmap, summary);

    const auto goal = select_goal(summary, cur, {});
    REQUIRE(goal.has_value());
    CHECK(*goal != 0);  // region 0 is fully explored and masked

    // Target override wins regardless of scores.
    const auto forced = select_goal(summary, cur, {}, "greedy", 3);
    REQUIRE(forced.has_value());
    CHECK(*forced == 3);

    // All regions masked, no target: exploration complete.
    BeliefMap done(8);
    for (auto& c : done.cells.data()) c = {BeliefState::Free, 1.0, 1};
    const auto dsum = regional_summary(done, {}, 2);
    const std::vector<double> dcur(4, 0.0);
    CHECK(!select_goal(dsum, dcur, {}).has_value());

    CHECK_THROWS_AS(select_goal(summary, cur, {}, "mappo"), std::invalid_argument);
}

TEST_CASE("goal selection breaks ties toward the lower region index") {
    // Uniform unknown map: all regions tie on curiosity and coordination.
    BeliefMap belief(16);
    // Give every region an identical frontier pattern.
    for (int ry = 0; ry < 4; ++ry)
        for (int rx = 0; rx < 4; ++rx)
            belief.cells(ry * 4 + 1, rx * 4 + 1) = {BeliefState::Free, 1.0, 1};
    const auto summary = regional_summary(belief, {}, 4);
    const std::vector<double> cur(16, 0.5);
    const auto goal = select_goal(summary, cur, {});
    REQUIRE(goal.has_value());
    CHECK(*goal == 0);
}

TEST_CASE("goal selection never returns a masked region") {
    Rng rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        BeliefMap belief(16);
        // Randomly reveal some regions completely.
        std::vector<bool> masked(16, false);
        for (int k = 0; k < 16; ++k) {
            if (rng.uniform() < 0.4) {
                masked[k] = true;
                const int ry = k / 4, rx = k % 4;
                for (int y = ry * 4; y < ry * 4 + 4; ++y)
                    for (int x = rx * 4; x < rx * 4 + 4; ++x)
                        belief.cells(y, x) = {BeliefState::Free, 1.0, 1};
            }
        }
        const auto summary = regional_summary(belief, {}, 4);
        std::vector<double> cur(16);
        for (auto& c : cur) c = rng.uniform();
        const auto goal = select_goal(summary, cur, {});
        if (goal.has_value()) CHECK(!masked[*goal]);
    }
}
