#include "barfi/environments.hpp"
#include "barfi/error.hpp"
#include "barfi/policy.hpp"

#include "doctest.h"

#include <array>
#include <cmath>
#include <vector>

using namespace barfi;

namespace {

EnvState cell(int x, int y) { return EnvState{{double(x), double(y)}, 0, false}; }

}  // namespace

TEST_CASE("gridworld goal, center bonus and walls") {
    Rng rng(0);
    const StepOutcome goal = gridworld_step(cell(3, 4), gridworld::Right, AuxVariant::GW_centerBonus, rng);
    CHECK(goal.r_p == 100.0);
    CHECK(goal.terminal);
    CHECK_THROWS_AS(gridworld_step(goal.next_state, gridworld::Up, AuxVariant::GW_centerBonus, rng), ProtocolError);

    const StepOutcome center = gridworld_step(cell(2, 1), gridworld::Up, AuxVariant::GW_centerBonus, rng);
    CHECK(center.r_aux == 50.0);
    CHECK(center.r_p == 0.0);
    CHECK_FALSE(center.terminal);

    const StepOutcome wall = gridworld_step(cell(0, 0), gridworld::Left, AuxVariant::GW_centerBonus, rng);
    CHECK(wall.next_state.raw == std::vector<double>{0.0, 0.0});
    CHECK(wall.r_p == 0.0);
    CHECK(wall.r_aux == 0.0);
}

TEST_CASE("gridworld aux variants") {
    CHECK(gridworld::aux_for_cell(AuxVariant::GW_negL2, 0, 0) == -32.0);
    CHECK(gridworld::aux_for_cell(AuxVariant::GW_negL2, 4, 4) == 0.0);
    CHECK(gridworld::aux_for_cell(AuxVariant::GW_partialManhattan, 0, 1) == 7.0);
    CHECK(gridworld::aux_for_cell(AuxVariant::GW_partialManhattan, 3, 4) == -1.0);
}

TEST_CASE("gridworld episodes stop at the horizon") {
    Rng rng(0);
    EnvState s = gridworld::start_state();
    std::size_t steps = 0;
    while (!s.terminal) {
        s = gridworld_step(s, gridworld::Left, AuxVariant::GW_centerBonus, rng).next_state;
        ++steps;
    }
    CHECK(steps == gridworld::kHorizon);
}

TEST_CASE("mountaincar rewards") {
    Rng rng(0);
    const StepOutcome top = mountaincar_step(EnvState{{0.49, 0.05}, 0, false}, mountaincar::Right,
                                             AuxVariant::MC_absVelocity, rng);
    CHECK(top.r_p == 1.0);
    CHECK(top.terminal);

    const StepOutcome vel = mountaincar_step(EnvState{{-0.5, 0.03}, 0, false}, mountaincar::None,
                                             AuxVariant::MC_absVelocity, rng);
    CHECK(vel.r_aux == doctest::Approx(0.03));
    CHECK(vel.r_p == 0.0);

    const EnvState moving{{-0.5, 0.02}, 0, false};
    CHECK(mountaincar_step(moving, mountaincar::Right, AuxVariant::MC_energyPump, rng).r_aux == 1.0);
    CHECK(mountaincar_step(moving, mountaincar::Left, AuxVariant::MC_energyPump, rng).r_aux == 0.0);
    const EnvState back{{-0.5, -0.02}, 0, false};
    CHECK(mountaincar_step(back, mountaincar::Left, AuxVariant::MC_energyPump, rng).r_aux == 1.0);
}

TEST_CASE("mountaincar dynamics stay in bounds") {
    Rng rng(3);
    EnvState s = mountaincar::start_state(rng);
    CHECK(s.raw[0] >= -0.6);
    CHECK(s.raw[0] <= -0.4);
    CHECK(s.raw[1] == 0.0);
    const StepOutcome o = mountaincar_step(s, mountaincar::Right, AuxVariant::MC_absVelocity, rng);
    CHECK(o.next_state.raw[1] == doctest::Approx(0.001 - 0.0025 * std::cos(3 * s.raw[0])));
    for (int i = 0; i < 300 && !s.terminal; ++i) {
        s = mountaincar_step(s, mountaincar::Left, AuxVariant::MC_absVelocity, rng).next_state;
        CHECK(s.raw[0] >= mountaincar::kMinX);
        CHECK(std::abs(s.raw[1]) <= mountaincar::kMaxSpeed);
    }
}

TEST_CASE("cartpole aux follows the PD controller") {
    Rng rng(0);
    const PdGains gains{};
    const EnvState s{{0.0, 0.0, 0.05, 0.0}, 0, false};
    REQUIRE(pd_controller(s, gains) == cartpole::Right);
    CHECK(cartpole_step(s, cartpole::Right, AuxVariant::CP_matchPD, gains, rng).r_aux == 5.0);
    CHECK(cartpole_step(s, cartpole::Left, AuxVariant::CP_matchPD, gains, rng).r_aux == -1.0);
    CHECK(cartpole_step(s, cartpole::Right, AuxVariant::CP_antiPD, gains, rng).r_aux == -5.0);
    CHECK(cartpole_step(s, cartpole::Left, AuxVariant::CP_antiPD, gains, rng).r_aux == 1.0);
    CHECK(cartpole_step(s, cartpole::Left, AuxVariant::CP_antiPD, gains, rng).r_p == 1.0);
}

TEST_CASE("pd controller sign rule") {
    const PdGains gains{1.0, 0.2};
    CHECK(pd_controller(EnvState{{0, 0, 0.1, 0.0}, 0, false}, gains) == cartpole::Right);
    CHECK(pd_controller(EnvState{{0, 0, -0.1, 0.0}, 0, false}, gains) == cartpole::Left);
    CHECK(pd_controller(EnvState{{0, 0, 0.0, 0.0}, 0, false}, gains) == cartpole::Left);
    CHECK(pd_controller(EnvState{{0, 0, 0.02, -0.1}, 0, false}, gains) == cartpole::Left);
}

TEST_CASE("shipped PD gains balance the pole") {
    Rng rng(123);
    for (int episode = 0; episode < 5; ++episode) {
        EnvState s = cartpole::start_state(rng);
        std::size_t steps = 0;
        while (!s.terminal) {
            s = cartpole_step(s, pd_controller(s, PdGains{}), AuxVariant::CP_matchPD, PdGains{}, rng).next_state;
            ++steps;
        }
        CHECK(steps >= 450);
    }
}

TEST_CASE("cartpole terminates on the angle limit") {
    Rng rng(0);
    EnvState s{{0.0, 0.0, 0.2, 1.0}, 0, false};
    CHECK(cartpole_step(s, cartpole::Left, AuxVariant::CP_matchPD, PdGains{}, rng).terminal);
}

TEST_CASE("bandit is a single step") {
    const StepOutcome o = bandit_step(bandit::start_state(), 2);
    CHECK(o.terminal);
    CHECK(o.r_p == 1.0);
    CHECK(bandit_step(bandit::start_state(), 0).r_p == 0.2);
    CHECK(bandit_step(bandit::start_state(), 1).r_p == 0.5);
    CHECK_THROWS_AS(bandit_step(o.next_state, 0), ProtocolError);
    CHECK_THROWS_AS(bandit_step(bandit::start_state(), 3), IndexError);
}

TEST_CASE("bandit behavior policy frequencies") {
    const std::vector<double> beta{0.8, 0.1, 0.1};
    Rng rng(42);
    int a = 0;
    for (int i = 0; i < 10000; ++i) a += sample_from(beta, rng) == 0;
    CHECK(std::abs(a / 10000.0 - 0.8) < 0.02);
}

TEST_CASE("aux variants must match the environment") {
    CHECK_NOTHROW(require_aux_matches(EnvKind::CartPole, AuxVariant::CP_antiPD));
    CHECK_THROWS_AS(require_aux_matches(EnvKind::GridWorld, AuxVariant::CP_antiPD), ConfigError);
    CHECK(parse_env_kind("mountaincar") == EnvKind::MountainCar);
    CHECK(parse_aux_variant("GW_centerBonus") == AuxVariant::GW_centerBonus);
    CHECK_THROWS_AS(parse_aux_variant("nope"), ConfigError);
    CHECK(aux_is_state_based(AuxVariant::GW_centerBonus));
    CHECK_FALSE(aux_is_state_based(AuxVariant::MC_energyPump));
}

TEST_CASE("environment wrapper") {
    Rng rng(7);
    Environment cp(EnvKind::CartPole, EnvOptions{AuxVariant::CP_antiPD});
    CHECK(cp.num_actions() == 2);
    CHECK(cp.feature_dim() == 256);
    CHECK(cp.constant_first_feature());
    const EnvState s = cp.reset(rng);
    CHECK(cp.features(s)[0] == 1.0);
    CHECK_THROWS_AS(cp.aux_potential(s), ConfigError);

    Environment gw(EnvKind::GridWorld, EnvOptions{AuxVariant::GW_centerBonus});
    CHECK(gw.aux_potential(cell(2, 2)) == 50.0);

    Environment mc(EnvKind::MountainCar, EnvOptions{AuxVariant::MC_energyPump});
    CHECK(mc.feature_mass() == 5.0);
    CHECK_FALSE(mc.constant_first_feature());
}

TEST_CASE("same seed, same rewards") {
    for (EnvKind kind : {EnvKind::MountainCar, EnvKind::CartPole}) {
        const AuxVariant aux = kind == EnvKind::CartPole ? AuxVariant::CP_matchPD : AuxVariant::MC_absVelocity;
        Environment env(kind, EnvOptions{aux});
        std::vector<double> first, second;
        for (auto* out : {&first, &second}) {
            Rng rng(99);
            EnvState s = env.reset(rng);
            for (int i = 0; i < 50 && !s.terminal; ++i) {
                const StepOutcome o = env.step(s, i % 2, rng);
                out->push_back(o.r_aux);
                s = o.next_state;
            }
        }
        CHECK(first == second);
    }
}
