#pragma once

#include "barfi/param.hpp"
#include "barfi/policy.hpp"
#include "barfi/rng.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace barfi {

/// Finite MDP with time steps t = 0..horizon. An episode ends after the
/// action at t = horizon, or as soon as a terminal state is entered.
struct TabularMDP {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<double> transition;  // [s][a][s'] row-major
    std::vector<double> r_p;         // [s][a]
    std::vector<double> r_aux;       // [s][a]
    std::vector<double> d0;
    std::size_t horizon = 0;
    std::vector<bool> terminal;

    double p(std::size_t s, std::size_t a, std::size_t s2) const {
        return transition[(s * num_actions + a) * num_states + s2];
    }
    double reward(std::size_t s, std::size_t a) const { return r_p[s * num_actions + a]; }

    /// Throws PreconditionError on malformed tables.
    void validate() const;
};

/// pi(a | s) stored [s][a].
using PolicyTable = std::vector<double>;

/// Softmax policy over one-hot state features (theta block per action).
SoftmaxLinearPolicy tabular_policy(const TabularMDP& mdp, ParamVector theta);
PolicyTable policy_table(const TabularMDP& mdp, const SoftmaxLinearPolicy& policy);

struct VisitationResult {
    std::vector<double> d_gamma;  // sum_t gamma^t Pr(S_t = s, A_t = a)
    std::vector<double> d_bar;    // sum_t Pr(S_t = s, A_t = a)
    std::vector<double> d_norm;   // d_bar / sum(d_bar)
};

VisitationResult visitation(const TabularMDP& mdp, const PolicyTable& policy, double gamma);

/// Time-indexed action values q_t(s, a), t = 0..horizon, of `reward_table`.
std::vector<std::vector<double>> qvalues_by_time(const TabularMDP& mdp, const PolicyTable& policy, double gamma,
                                                 const std::vector<double>& reward_table);

/// Action values averaged over time with the discounted occupancy weights
/// gamma^t Pr(S_t = s, A_t = a), so that q(s, a) d_gamma(s, a) =
/// sum_t gamma^t Pr_t(s, a) q_t(s, a). Equals the ordinary q when it does not
/// depend on t (one-step horizons, gamma = 0, time folded into the state).
std::vector<double> qvalues(const TabularMDP& mdp, const PolicyTable& policy, double gamma);

/// Per-step reward along an enumerated trajectory; `last` marks the final
/// step of the episode (next_state is then treated as terminal).
using TransitionReward = std::function<double(std::size_t s, std::size_t a, std::size_t next_state, bool last)>;

TransitionReward table_reward(const TabularMDP& mdp, std::vector<double> reward_table);

enum class UpdateWeighting {
    Dropped,          // sum_t psi_t sum_{j>=t} gamma^{j-t} r_j, sampled under pi
    GammaT,           // sum_t gamma^t psi_t sum_{j>=t} gamma^{j-t} r_j, sampled under pi
    OffPolicyFullIS,  // sum_t gamma^t psi_t sum_{j>=t} gamma^{j-t} rho_{0:j} r_j, sampled under beta
    OffPolicyNone,    // sum_t psi_t sum_{j>=t} gamma^{j-t} r_j, sampled under beta
};

inline constexpr std::size_t kMaxEnumeratedTrajectories = 1'000'000;

/// Number of positive-probability trajectories when acting with `sampler`.
std::size_t count_trajectories(const TabularMDP& mdp, const PolicyTable& sampler);

struct UpdateMoments {
    ParamVector mean;
    double total_variance = 0.0;  // trace of the covariance of the sample update
};

/// Exact expectation (and total variance) of the sample update, by summing
/// over every trajectory. `behavior` is required for the off-policy
/// weightings and ignored otherwise. Throws CapacityError beyond
/// kMaxEnumeratedTrajectories.
UpdateMoments exact_update_moments(const TabularMDP& mdp, const ParamVector& theta, const TransitionReward& reward,
                                   double gamma, UpdateWeighting weighting, const PolicyTable* behavior = nullptr);

ParamVector exact_expected_update(const TabularMDP& mdp, const ParamVector& theta,
                                  const std::vector<double>& reward_table, double gamma, UpdateWeighting weighting,
                                  const PolicyTable* behavior = nullptr);

struct MonteCarloEstimate {
    ParamVector mean;
    ParamVector standard_error;
    double total_variance = 0.0;
};

MonteCarloEstimate monte_carlo_update(const TabularMDP& mdp, const ParamVector& theta,
                                      const TransitionReward& reward, double gamma, UpdateWeighting weighting,
                                      std::size_t samples, Rng& rng, const PolicyTable* behavior = nullptr);

struct PropositionReport {
    std::string name;
    bool passed = false;
    double max_abs_diff = 0.0;
    double tolerance = 0.0;
    ParamVector lhs;
    ParamVector rhs;
    double var_shaped = 0.0;
    double var_primary = 0.0;
};

/// Potential shaping r_p + gamma Phi(s') - Phi(s) (Phi = 0 at episode end)
/// leaves the expected update unchanged.
PropositionReport prop1_check(const TabularMDP& mdp, const ParamVector& theta, const std::vector<double>& potential,
                              double gamma, double tolerance = 1e-10);

/// For one-step MDPs: Var(shaped) - Var(primary) in closed form,
/// E[|psi|^2 (Phi^2 - 2 Phi r_p)].
double one_step_variance_gap(const TabularMDP& mdp, const ParamVector& theta, const std::vector<double>& potential);

/// r_phi = q d_gamma / d_bar with gamma_phi = 0 reproduces the discounted
/// (gamma^t-weighted) policy gradient.
PropositionReport prop2_construct_and_check(const TabularMDP& mdp, const ParamVector& theta, double gamma,
                                            double tolerance = 1e-8);

/// r_phi = q^pi d^pi_gamma / d_bar^beta with gamma_phi = 0 makes the
/// uncorrected off-policy update match the fully importance-weighted one.
PropositionReport prop3_construct_and_check(const TabularMDP& mdp, const ParamVector& theta,
                                            const PolicyTable& behavior, double gamma, double tolerance = 1e-8);

/// Random MDP with dense random transitions and rewards in [0, 1].
TabularMDP random_tabular_mdp(std::size_t num_states, std::size_t num_actions, std::size_t horizon, Rng& rng);

/// Random policy table with every probability >= min_prob.
PolicyTable random_policy_table(std::size_t num_states, std::size_t num_actions, double min_prob, Rng& rng);

}  // namespace barfi
