#include "barfi/environments.hpp"

#include "barfi/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace barfi {

namespace {

struct AuxName {
    AuxVariant variant;
    std::string_view name;
    EnvKind env;
};

constexpr AuxName kAuxNames[] = {
    {AuxVariant::GW_negL2, "GW_negL2", EnvKind::GridWorld},
    {AuxVariant::GW_centerBonus, "GW_centerBonus", EnvKind::GridWorld},
    {AuxVariant::GW_partialManhattan, "GW_partialManhattan", EnvKind::GridWorld},
    {AuxVariant::MC_absVelocity, "MC_absVelocity", EnvKind::MountainCar},
    {AuxVariant::MC_energyPump, "MC_energyPump", EnvKind::MountainCar},
    {AuxVariant::CP_matchPD, "CP_matchPD", EnvKind::CartPole},
    {AuxVariant::CP_antiPD, "CP_antiPD", EnvKind::CartPole},
    {AuxVariant::Bandit_none, "Bandit_none", EnvKind::Bandit},
};

void require_live(const EnvState& state) {
    if (state.terminal) throw ProtocolError("step called on a terminal state");
}

void require_action(std::size_t action, std::size_t n) {
    if (action >= n) throw IndexError("action " + std::to_string(action) + " out of range");
}

}  // namespace

std::string_view to_string(EnvKind kind) {
    switch (kind) {
        case EnvKind::GridWorld: return "gridworld";
        case EnvKind::MountainCar: return "mountaincar";
        case EnvKind::CartPole: return "cartpole";
        case EnvKind::Bandit: return "bandit";
    }
    return "?";
}

std::string_view to_string(AuxVariant variant) {
    for (const auto& entry : kAuxNames) {
        if (entry.variant == variant) return entry.name;
    }
    return "?";
}

EnvKind parse_env_kind(std::string_view name) {
    for (EnvKind k : {EnvKind::GridWorld, EnvKind::MountainCar, EnvKind::CartPole, EnvKind::Bandit}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("unknown env '" + std::string(name) + "'");
}

AuxVariant parse_aux_variant(std::string_view name) {
    for (const auto& entry : kAuxNames) {
        if (entry.name == name) return entry.variant;
    }
    throw ConfigError("unknown aux_variant '" + std::string(name) + "'");
}

void require_aux_matches(EnvKind env, AuxVariant variant) {
    for (const auto& entry : kAuxNames) {
        if (entry.variant == variant && entry.env != env) {
            throw ConfigError("aux_variant " + std::string(entry.name) + " does not belong to env " +
                              std::string(to_string(env)));
        }
    }
}

bool aux_is_state_based(AuxVariant variant) {
    switch (variant) {
        case AuxVariant::GW_negL2:
        case AuxVariant::GW_centerBonus:
        case AuxVariant::GW_partialManhattan:
        case AuxVariant::MC_absVelocity:
        case AuxVariant::Bandit_none: return true;
        default: return false;
    }
}

// ---------------------------------------------------------------- GridWorld

EnvState gridworld::start_state() { return EnvState{{0.0, 0.0}, 0, false}; }

double gridworld::aux_for_cell(AuxVariant variant, int x, int y) {
    const int dx = x - kGoalX;
    const int dy = y - kGoalY;
    switch (variant) {
        case AuxVariant::GW_negL2: return -static_cast<double>(dx * dx + dy * dy);
        case AuxVariant::GW_centerBonus: return (x == kCenterX && y == kCenterY) ? kCenterBonus : 0.0;
        case AuxVariant::GW_partialManhattan: {
            // Start side of the anti-diagonal pays +distance (misleading),
            // goal side pays -distance (helpful).
            const int dist = std::abs(dx) + std::abs(dy);
            return (x + y < kSize - 1) ? static_cast<double>(dist) : -static_cast<double>(dist);
        }
        default: throw ConfigError("aux variant does not apply to gridworld");
    }
}

StepOutcome gridworld_step(const EnvState& state, std::size_t action, AuxVariant aux, Rng&) {
    require_live(state);
    require_action(action, gridworld::kNumActions);
    int x = static_cast<int>(state.raw.at(0));
    int y = static_cast<int>(state.raw.at(1));
    switch (action) {
        case gridworld::Up: y = std::min(y + 1, gridworld::kSize - 1); break;
        case gridworld::Down: y = std::max(y - 1, 0); break;
        case gridworld::Left: x = std::max(x - 1, 0); break;
        case gridworld::Right: x = std::min(x + 1, gridworld::kSize - 1); break;
        default: break;
    }
    StepOutcome out;
    out.next_state.raw = {static_cast<double>(x), static_cast<double>(y)};
    out.next_state.step_count = state.step_count + 1;
    const bool at_goal = x == gridworld::kGoalX && y == gridworld::kGoalY;
    out.r_p = at_goal ? gridworld::kGoalReward : 0.0;
    out.r_aux = aux == AuxVariant::Bandit_none ? 0.0 : gridworld::aux_for_cell(aux, x, y);
    out.terminal = at_goal || out.next_state.step_count >= gridworld::kHorizon;
    out.next_state.terminal = out.terminal;
    return out;
}

// -------------------------------------------------------------- MountainCar

EnvState mountaincar::start_state(Rng& rng) { return EnvState{{rng.uniform(-0.6, -0.4), 0.0}, 0, false}; }

int mountaincar::thrust(std::size_t action) { return static_cast<int>(action) - 1; }

StepOutcome mountaincar_step(const EnvState& state, std::size_t action, AuxVariant aux, Rng&) {
    using namespace mountaincar;
    require_live(state);
    require_action(action, kNumActions);
    const double x = state.raw.at(0);
    const double v = state.raw.at(1);
    const int a = thrust(action);
    double v_next = std::clamp(v + 0.001 * a - 0.0025 * std::cos(3.0 * x), -kMaxSpeed, kMaxSpeed);
    const double x_next = std::clamp(x + v_next, kMinX, kMaxX);
    if (x_next == kMinX && v_next < 0.0) v_next = 0.0;

    StepOutcome out;
    out.next_state.raw = {x_next, v_next};
    out.next_state.step_count = state.step_count + 1;
    const bool reached = x_next >= kGoalX;
    out.r_p = reached ? 1.0 : 0.0;
    switch (aux) {
        case AuxVariant::MC_absVelocity: out.r_aux = std::abs(v); break;
        case AuxVariant::MC_energyPump: {
            const int sign_v = (v > 0.0) - (v < 0.0);
            out.r_aux = sign_v == a ? 1.0 : 0.0;
            break;
        }
        case AuxVariant::Bandit_none: out.r_aux = 0.0; break;
        default: throw ConfigError("aux variant does not apply to mountaincar");
    }
    out.terminal = reached || out.next_state.step_count >= kHorizon;
    out.next_state.terminal = out.terminal;
    return out;
}

// ----------------------------------------------------------------- CartPole

EnvState cartpole::start_state(Rng& rng) {
    EnvState s;
    s.raw.resize(4);
    for (double& v : s.raw) v = rng.uniform(-0.05, 0.05);
    return s;
}

std::size_t pd_controller(const EnvState& state, const PdGains& gains) {
    const double signal = gains.kp * state.raw.at(2) + gains.kd * state.raw.at(3);
    return signal > 0.0 ? cartpole::Right : cartpole::Left;
}

StepOutcome cartpole_step(const EnvState& state, std::size_t action, AuxVariant aux, const PdGains& gains, Rng&) {
    using namespace cartpole;
    require_live(state);
    require_action(action, kNumActions);
    const double x = state.raw.at(0), x_dot = state.raw.at(1);
    const double theta = state.raw.at(2), theta_dot = state.raw.at(3);

    const double force = action == Right ? kForce : -kForce;
    const double total_mass = kCartMass + kPoleMass;
    const double pole_mass_length = kPoleMass * kHalfLength;
    const double cos_t = std::cos(theta), sin_t = std::sin(theta);
    const double temp = (force + pole_mass_length * theta_dot * theta_dot * sin_t) / total_mass;
    const double theta_acc = (kGravity * sin_t - cos_t * temp) /
                             (kHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / total_mass));
    const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;

    StepOutcome out;
    out.next_state.raw = {x + kTau * x_dot, x_dot + kTau * x_acc, theta + kTau * theta_dot,
                          theta_dot + kTau * theta_acc};
    out.next_state.step_count = state.step_count + 1;
    out.r_p = 1.0;

    const bool match = action == pd_controller(state, gains);
    const double matched = match ? kMatchBonus : kMismatchPenalty;
    switch (aux) {
        case AuxVariant::CP_matchPD: out.r_aux = matched; break;
        case AuxVariant::CP_antiPD: out.r_aux = -matched; break;
        case AuxVariant::Bandit_none: out.r_aux = 0.0; break;
        default: throw ConfigError("aux variant does not apply to cartpole");
    }

    const auto& n = out.next_state.raw;
    const bool failed = std::abs(n[0]) > kXLimit || std::abs(n[2]) > kAngleLimit;
    out.terminal = failed || out.next_state.step_count >= kHorizon;
    out.next_state.terminal = out.terminal;
    return out;
}

// ------------------------------------------------------------------- Bandit

EnvState bandit::start_state() { return EnvState{{0.0}, 0, false}; }

StepOutcome bandit_step(const EnvState& state, std::size_t action) {
    require_live(state);
    require_action(action, bandit::kNumActions);
    StepOutcome out;
    out.next_state = EnvState{{0.0}, state.step_count + 1, true};
    out.r_p = bandit::kRewards[action];
    out.r_aux = 0.0;
    out.terminal = true;
    return out;
}

// --------------------------------------------------------- Environment API

namespace {

std::vector<Bounds> cartpole_bounds() {
    return {{-cartpole::kXLimit, cartpole::kXLimit},
            {-3.0, 3.0},
            {-cartpole::kAngleLimit, cartpole::kAngleLimit},
            {-3.5, 3.5}};
}

}  // namespace

Environment::Environment(EnvKind kind, EnvOptions options) : kind_(kind), options_(options) {
    require_aux_matches(kind_, options_.aux);
    switch (kind_) {
        case EnvKind::GridWorld:
            featurizer_ = FourierBasis(options_.fourier_order,
                                       {{0.0, gridworld::kSize - 1.0}, {0.0, gridworld::kSize - 1.0}});
            break;
        case EnvKind::MountainCar:
            featurizer_ = TileCoder(options_.tilings, options_.tiles_per_dim,
                                    {{mountaincar::kMinX, mountaincar::kMaxX},
                                     {-mountaincar::kMaxSpeed, mountaincar::kMaxSpeed}});
            break;
        case EnvKind::CartPole: featurizer_ = FourierBasis(options_.fourier_order, cartpole_bounds()); break;
        case EnvKind::Bandit: featurizer_ = std::monostate{}; break;
    }
}

std::size_t Environment::num_actions() const {
    switch (kind_) {
        case EnvKind::GridWorld: return gridworld::kNumActions;
        case EnvKind::MountainCar: return mountaincar::kNumActions;
        case EnvKind::CartPole: return cartpole::kNumActions;
        case EnvKind::Bandit: return bandit::kNumActions;
    }
    return 0;
}

std::size_t Environment::horizon() const {
    switch (kind_) {
        case EnvKind::GridWorld: return gridworld::kHorizon;
        case EnvKind::MountainCar: return mountaincar::kHorizon;
        case EnvKind::CartPole: return cartpole::kHorizon;
        case EnvKind::Bandit: return 1;
    }
    return 0;
}

EnvState Environment::reset(Rng& rng) const {
    switch (kind_) {
        case EnvKind::GridWorld: return gridworld::start_state();
        case EnvKind::MountainCar: return mountaincar::start_state(rng);
        case EnvKind::CartPole: return cartpole::start_state(rng);
        case EnvKind::Bandit: return bandit::start_state();
    }
    throw UsageError("unknown environment");
}

StepOutcome Environment::step(const EnvState& state, std::size_t action, Rng& rng) const {
    switch (kind_) {
        case EnvKind::GridWorld: return gridworld_step(state, action, options_.aux, rng);
        case EnvKind::MountainCar: return mountaincar_step(state, action, options_.aux, rng);
        case EnvKind::CartPole: return cartpole_step(state, action, options_.aux, options_.pd, rng);
        case EnvKind::Bandit: return bandit_step(state, action);
    }
    throw UsageError("unknown environment");
}

std::size_t Environment::feature_dim() const {
    if (const auto* f = std::get_if<FourierBasis>(&featurizer_)) return f->output_dim();
    if (const auto* t = std::get_if<TileCoder>(&featurizer_)) return t->output_dim();
    return 1;
}

std::vector<double> Environment::features(const EnvState& state) const {
    if (const auto* f = std::get_if<FourierBasis>(&featurizer_)) return f->features(state.raw);
    if (const auto* t = std::get_if<TileCoder>(&featurizer_)) return t->features(state.raw);
    return {1.0};
}

bool Environment::constant_first_feature() const { return !std::holds_alternative<TileCoder>(featurizer_); }

double Environment::feature_mass() const {
    if (const auto* t = std::get_if<TileCoder>(&featurizer_)) return static_cast<double>(t->tilings());
    return 1.0;
}

double Environment::aux_potential(const EnvState& state) const {
    if (!aux_is_state_based(options_.aux)) {
        throw ConfigError("aux_variant " + std::string(to_string(options_.aux)) +
                          " is action-dependent and cannot serve as a state potential");
    }
    switch (options_.aux) {
        case AuxVariant::GW_negL2:
        case AuxVariant::GW_centerBonus:
        case AuxVariant::GW_partialManhattan:
            return gridworld::aux_for_cell(options_.aux, static_cast<int>(state.raw.at(0)),
                                           static_cast<int>(state.raw.at(1)));
        case AuxVariant::MC_absVelocity: return std::abs(state.raw.at(1));
        default: return 0.0;
    }
}

}  // namespace barfi
