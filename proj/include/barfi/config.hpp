#pragma once

#include "barfi/environments.hpp"
#include "barfi/inner.hpp"
#include "barfi/param.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace barfi {

enum class Method { Barfi, Naive, PotentialState, PotentialAction, ReinforceRp, ActorCritic };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

std::string_view to_string(InnerRegMode mode);
InnerRegMode parse_inner_reg_mode(std::string_view name);

struct ExperimentConfig {
    EnvKind env = EnvKind::GridWorld;
    AuxVariant aux_variant = AuxVariant::GW_centerBonus;
    Method method = Method::Barfi;

    double alpha_theta = 1e-3;
    double alpha_phi = 5e-3;
    double alpha_varphi = 5e-3;
    double lambda_theta = 0.25;
    double lambda_phi = 0.0625;
    double lambda_gamma = 4.0;
    double eta = 5e-4;
    std::size_t n = 5;
    std::size_t delta = 3;
    std::size_t N0 = 150;
    std::size_t Ni = 15;
    std::size_t buffer_capacity = 1000;
    std::size_t total_episodes = 1500;
    OptimizerKind optimizer = OptimizerKind::RmsProp;
    std::uint64_t seed = 0;
    double varphi_init = 4.6;
    InnerRegMode inner_reg_mode = InnerRegMode::L2;

    // Not in the hyperparameter tables.
    std::size_t batch_size = 1;   // trajectories per inner step; 0 = whole buffer
    double gamma = 0.99;          // environment discount (outer objective, baselines)
    double phi3_init = 1.0;       // initial aux weight of r_phi
    std::size_t outer_batch = 0;  // D_off subsample for the outer step; 0 = whole buffer
    std::string hvp = "fd";       // fd | analytic
    std::string eta_scaling = "fixed";  // fixed | spectral (eta capped at 1 / lambda_max)
    double pd_kp = 1.0;
    double pd_kd = 0.2;
    double alpha_critic = 0.01;
    bool wallclock = true;
    std::size_t fourier_order = 3;
    std::size_t tiles_per_dim = 4;
    std::size_t tilings = 5;
};

/// Table defaults for an environment/method pair (BARFI column for barfi,
/// actor-critic column for actor_critic, REINFORCE column otherwise).
ExperimentConfig default_config(EnvKind env, AuxVariant aux, Method method);

/// Throws ConfigError naming the first offending field.
void validate(const ExperimentConfig& cfg);

/// Strict `key = value` text; `#` starts a comment. env, aux_variant and
/// method are required; every other key overrides the table default.
/// Unknown keys and malformed values are rejected.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Every key with its canonical textual value, in a fixed order.
std::map<std::string, std::string> config_entries(const ExperimentConfig& cfg);

/// Serialized form accepted by parse_config.
std::string format_config(const ExperimentConfig& cfg);

EnvOptions env_options(const ExperimentConfig& cfg);

}  // namespace barfi
