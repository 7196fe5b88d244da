#pragma once

#include "barfi/param.hpp"
#include "barfi/policy.hpp"
#include "barfi/reward.hpp"
#include "barfi/rng.hpp"

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

namespace barfi {

struct Step {
    std::vector<double> features;
    std::size_t action = 0;
    double r_p = 0.0;
    double r_aux = 0.0;
    double behavior_logprob = 0.0;  // ln pi_behavior(action | features) when the step was taken
    double potential = 0.0;         // state potential of S_t (shaping baselines only)
};

struct Trajectory {
    std::vector<Step> steps;
    bool terminal = true;
};

/// Non-owning view of a set of trajectories (usually pointing into a buffer).
using Batch = std::vector<const Trajectory*>;

/// FIFO trajectory store; once full, the oldest trajectory is evicted first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }

    void push(Trajectory trajectory);
    const Trajectory& operator[](std::size_t i) const { return items_[i]; }

    Batch all() const;
    /// `count` trajectories drawn uniformly with replacement.
    Batch sample(std::size_t count, Rng& rng) const;

private:
    std::size_t capacity_;
    std::deque<Trajectory> items_;
};

Batch as_batch(std::span<const Trajectory> trajectories);

/// G_t = r_t + gamma G_{t+1}, computed back to front.
std::vector<double> discounted_returns(std::span<const double> rewards, double gamma);

enum class InnerRegMode { L2, Entropy };

struct InnerRegularizer {
    InnerRegMode mode = InnerRegMode::L2;
    double lambda = 0.0;
};

/// Per-step r_phi along a trajectory.
std::vector<double> alignment_rewards(const Trajectory& trajectory, const AlignmentReward& model);

/// out += sum_t psi(S_t, A_t) G_t for one trajectory, where G are the
/// per-step returns already computed by the caller.
void accumulate_policy_gradient(const SoftmaxLinearPolicy& policy, const Trajectory& trajectory,
                                std::span<const double> returns, std::span<double> out);

/// Replay estimate of the inner update (no importance weights):
///   (1/|B|) sum_tau sum_t psi_t sum_{j>=t} gamma_phi^{j-t} r_phi(S_j, A_j)
ParamVector inner_update_estimate(const SoftmaxLinearPolicy& policy, const Batch& batch,
                                  const AlignmentReward& model, const LearnedDiscount& disc);

/// Score-function surrogate whose theta-gradient is inner_update_estimate:
///   (1/|B|) sum_tau sum_t ln pi(A_t | S_t) G_t   (returns held fixed)
double inner_objective(const SoftmaxLinearPolicy& policy, const Batch& batch, const AlignmentReward& model,
                       const LearnedDiscount& disc);

/// L2: raw - lambda theta. Entropy: raw plus the contribution of replacing
/// r_phi(S_j, A_j) with r_phi(S_j, A_j) - lambda ln pi(S_j, A_j) in every return.
ParamVector regularized_update(const ParamVector& raw, const SoftmaxLinearPolicy& policy, const Batch& batch,
                               const InnerRegularizer& reg, const LearnedDiscount& disc);

/// The regularized inner update Delta(theta) in one pass over the batch.
ParamVector inner_update(const SoftmaxLinearPolicy& policy, const Batch& batch, const AlignmentReward& model,
                         const LearnedDiscount& disc, const InnerRegularizer& reg);

struct OuterObjective {
    double value = 0.0;  // J(theta; B)
    ParamVector grad;    // dJ / dtheta
};

/// J(theta; B) = (1/|B|) sum_tau sum_t ln pi(A_t | S_t) sum_{j>=t} gamma^{j-t} r_p(S_j, A_j)
/// and its gradient, using the environment discount and the primary reward.
OuterObjective outer_objective_grad(const SoftmaxLinearPolicy& policy, const Batch& on_policy_batch, double gamma);

struct InnerRunResult {
    SoftmaxLinearPolicy policy;
    std::size_t batches_consumed = 0;
    ParamVector last_update;
};

/// N_i optimizer steps on replayed batches (sampled with replacement;
/// batch_size = 0 means the whole buffer every step). Never touches an
/// environment.
InnerRunResult inner_converge(SoftmaxLinearPolicy policy, const ReplayBuffer& buffer, const AlignmentReward& model,
                              const LearnedDiscount& disc, std::size_t steps, OptimizerState& optim,
                              const InnerRegularizer& reg, Rng& rng, std::size_t batch_size = 1);

}  // namespace barfi
