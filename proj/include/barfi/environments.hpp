#pragma once

#include "barfi/features.hpp"
#include "barfi/rng.hpp"

#include <cstddef>
#include <memory>
#include <string_view>
#include <variant>
#include <vector>

namespace barfi {

enum class EnvKind { GridWorld, MountainCar, CartPole, Bandit };

enum class AuxVariant {
    GW_negL2,
    GW_centerBonus,
    GW_partialManhattan,
    MC_absVelocity,
    MC_energyPump,
    CP_matchPD,
    CP_antiPD,
    Bandit_none,
};

std::string_view to_string(EnvKind kind);
std::string_view to_string(AuxVariant variant);
EnvKind parse_env_kind(std::string_view name);
AuxVariant parse_aux_variant(std::string_view name);

/// Throws ConfigError if the variant belongs to a different environment.
void require_aux_matches(EnvKind env, AuxVariant variant);

/// True when r_aux depends on the state alone (usable as a shaping potential).
bool aux_is_state_based(AuxVariant variant);

struct EnvState {
    std::vector<double> raw;
    std::size_t step_count = 0;
    bool terminal = false;
};

struct StepOutcome {
    EnvState next_state;
    double r_p = 0.0;
    double r_aux = 0.0;
    bool terminal = false;
};

// ---------------------------------------------------------------- GridWorld
// 5x5 deterministic grid, cells (x, y) with (0,0) bottom-left. Moving into
// a wall leaves the agent in place.
namespace gridworld {
inline constexpr int kSize = 5;
inline constexpr int kGoalX = 4, kGoalY = 4;
inline constexpr int kCenterX = 2, kCenterY = 2;
inline constexpr std::size_t kHorizon = 100;
inline constexpr double kGoalReward = 100.0;
inline constexpr double kCenterBonus = 50.0;
enum Action : std::size_t { Up = 0, Down = 1, Left = 2, Right = 3 };
inline constexpr std::size_t kNumActions = 4;

EnvState start_state();
/// r_aux of the given variant for arriving in cell (x, y).
double aux_for_cell(AuxVariant variant, int x, int y);
}  // namespace gridworld

StepOutcome gridworld_step(const EnvState& state, std::size_t action, AuxVariant aux, Rng& rng);

// -------------------------------------------------------------- MountainCar
namespace mountaincar {
inline constexpr double kMinX = -1.2, kMaxX = 0.6, kMaxSpeed = 0.07, kGoalX = 0.5;
inline constexpr std::size_t kHorizon = 1000;
enum Action : std::size_t { Left = 0, None = 1, Right = 2 };
inline constexpr std::size_t kNumActions = 3;

EnvState start_state(Rng& rng);
/// Action index to thrust direction in {-1, 0, +1}.
int thrust(std::size_t action);
}  // namespace mountaincar

StepOutcome mountaincar_step(const EnvState& state, std::size_t action, AuxVariant aux, Rng& rng);

// ----------------------------------------------------------------- CartPole
namespace cartpole {
inline constexpr double kGravity = 9.8, kCartMass = 1.0, kPoleMass = 0.1, kHalfLength = 0.5;
inline constexpr double kForce = 10.0, kTau = 0.02;
inline constexpr double kXLimit = 2.4;
inline constexpr double kAngleLimit = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
inline constexpr std::size_t kHorizon = 500;
enum Action : std::size_t { Left = 0, Right = 1 };
inline constexpr std::size_t kNumActions = 2;
inline constexpr double kMatchBonus = 5.0, kMismatchPenalty = -1.0;

EnvState start_state(Rng& rng);
}  // namespace cartpole

/// Bang-bang PD rule on pole angle and angular velocity.
struct PdGains {
    double kp = 1.0;
    double kd = 0.2;
};

/// Right iff kp * angle + kd * angular_velocity > 0; ties go left.
std::size_t pd_controller(const EnvState& state, const PdGains& gains);

StepOutcome cartpole_step(const EnvState& state, std::size_t action, AuxVariant aux, const PdGains& gains,
                          Rng& rng);

// ------------------------------------------------------------------- Bandit
// One state, three arms, one-step episodes.
namespace bandit {
inline constexpr std::size_t kNumActions = 3;
inline constexpr double kRewards[kNumActions] = {0.2, 0.5, 1.0};
EnvState start_state();
}  // namespace bandit

StepOutcome bandit_step(const EnvState& state, std::size_t action);

// --------------------------------------------------------- Environment API

struct EnvOptions {
    AuxVariant aux = AuxVariant::Bandit_none;
    std::size_t fourier_order = 3;
    std::size_t tiles_per_dim = 4;
    std::size_t tilings = 5;
    PdGains pd{};
};

/// An environment instance bundled with its state featurizer.
class Environment {
public:
    Environment(EnvKind kind, EnvOptions options);

    EnvKind kind() const { return kind_; }
    AuxVariant aux() const { return options_.aux; }
    const EnvOptions& options() const { return options_; }
    std::size_t num_actions() const;
    std::size_t horizon() const;

    EnvState reset(Rng& rng) const;
    StepOutcome step(const EnvState& state, std::size_t action, Rng& rng) const;

    std::size_t feature_dim() const;
    std::vector<double> features(const EnvState& state) const;
    /// True for the Fourier/bandit featurizers, whose entry 0 is constant 1.
    bool constant_first_feature() const;
    /// Sum of feature entries for any state (tile coding: number of tilings).
    double feature_mass() const;

    /// State potential equal to r_aux for state-based variants; throws
    /// ConfigError for action-dependent variants.
    double aux_potential(const EnvState& state) const;

private:
    EnvKind kind_;
    EnvOptions options_;
    std::variant<std::monostate, FourierBasis, TileCoder> featurizer_;
};

}  // namespace barfi
