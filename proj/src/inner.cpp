#include "barfi/inner.hpp"

#include "barfi/error.hpp"
#include "barfi/simd/kernels.hpp"

#include <cmath>

namespace barfi {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw UsageError("replay buffer capacity must be positive");
}

void ReplayBuffer::push(Trajectory trajectory) {
    if (trajectory.steps.empty()) throw UsageError("trajectories must contain at least one step");
    if (items_.size() == capacity_) items_.pop_front();
    items_.push_back(std::move(trajectory));
}

Batch ReplayBuffer::all() const {
    Batch out;
    out.reserve(items_.size());
    for (const Trajectory& t : items_) out.push_back(&t);
    return out;
}

Batch ReplayBuffer::sample(std::size_t count, Rng& rng) const {
    if (items_.empty()) throw UsageError("cannot sample from an empty replay buffer");
    Batch out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(&items_[rng.index(items_.size())]);
    return out;
}

Batch as_batch(std::span<const Trajectory> trajectories) {
    Batch out;
    out.reserve(trajectories.size());
    for (const Trajectory& t : trajectories) out.push_back(&t);
    return out;
}

std::vector<double> discounted_returns(std::span<const double> rewards, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw UsageError("discount must lie in [0, 1]");
    std::vector<double> out(rewards.size());
    double running = 0.0;
    for (std::size_t t = rewards.size(); t-- > 0;) {
        running = rewards[t] + gamma * running;
        out[t] = running;
    }
    return out;
}

std::vector<double> alignment_rewards(const Trajectory& trajectory, const AlignmentReward& model) {
    std::vector<double> out(trajectory.steps.size());
    for (std::size_t t = 0; t < out.size(); ++t) {
        const Step& s = trajectory.steps[t];
        out[t] = reward_eval(model, s.features, s.r_p, s.r_aux);
    }
    return out;
}

namespace {

void require_nonempty(const Batch& batch, const char* what) {
    if (batch.empty()) throw UsageError(std::string(what) + ": empty batch");
}

/// ln pi(A_t | S_t) for every step, under `policy`.
std::vector<double> log_probs(const SoftmaxLinearPolicy& policy, const Trajectory& trajectory) {
    std::vector<double> out(trajectory.steps.size());
    std::vector<double> probs(policy.num_actions());
    for (std::size_t t = 0; t < out.size(); ++t) {
        const Step& s = trajectory.steps[t];
        policy.action_probs_into(s.features, probs);
        out[t] = std::log(probs[s.action]);
    }
    return out;
}

}  // namespace

void accumulate_policy_gradient(const SoftmaxLinearPolicy& policy, const Trajectory& trajectory,
                                std::span<const double> returns, std::span<double> out) {
    std::vector<double> probs(policy.num_actions());
    for (std::size_t t = 0; t < trajectory.steps.size(); ++t) {
        if (returns[t] == 0.0) continue;
        const Step& s = trajectory.steps[t];
        policy.action_probs_into(s.features, probs);
        accumulate_score(out, s.features, probs, s.action, returns[t]);
    }
}

ParamVector inner_update_estimate(const SoftmaxLinearPolicy& policy, const Batch& batch,
                                  const AlignmentReward& model, const LearnedDiscount& disc) {
    require_nonempty(batch, "inner_update_estimate");
    const double gamma = disc.gamma();
    std::vector<double> acc(policy.theta().size(), 0.0);
    for (const Trajectory* traj : batch) {
        const std::vector<double> returns = discounted_returns(alignment_rewards(*traj, model), gamma);
        accumulate_policy_gradient(policy, *traj, returns, acc);
    }
    simd::scale(1.0 / static_cast<double>(batch.size()), acc);
    return ParamVector(std::move(acc));
}

double inner_objective(const SoftmaxLinearPolicy& policy, const Batch& batch, const AlignmentReward& model,
                       const LearnedDiscount& disc) {
    require_nonempty(batch, "inner_objective");
    const double gamma = disc.gamma();
    double total = 0.0;
    for (const Trajectory* traj : batch) {
        const std::vector<double> returns = discounted_returns(alignment_rewards(*traj, model), gamma);
        const std::vector<double> lp = log_probs(policy, *traj);
        for (std::size_t t = 0; t < lp.size(); ++t) total += lp[t] * returns[t];
    }
    return total / static_cast<double>(batch.size());
}

ParamVector regularized_update(const ParamVector& raw, const SoftmaxLinearPolicy& policy, const Batch& batch,
                               const InnerRegularizer& reg, const LearnedDiscount& disc) {
    if (reg.lambda < 0.0) throw UsageError("regularizer strength must be non-negative");
    require_same_length(raw, policy.theta(), "regularized_update");
    if (reg.lambda == 0.0) return raw;
    if (reg.mode == InnerRegMode::L2) {
        ParamVector out = raw;
        out.axpy(-reg.lambda, policy.theta());
        return out;
    }
    require_nonempty(batch, "regularized_update");
    const double gamma = disc.gamma();
    std::vector<double> acc(raw.size(), 0.0);
    for (const Trajectory* traj : batch) {
        std::vector<double> bonus = log_probs(policy, *traj);
        for (double& b : bonus) b *= -reg.lambda;
        accumulate_policy_gradient(policy, *traj, discounted_returns(bonus, gamma), acc);
    }
    ParamVector out = raw;
    out.axpy(1.0 / static_cast<double>(batch.size()), ParamVector(std::move(acc)));
    return out;
}

ParamVector inner_update(const SoftmaxLinearPolicy& policy, const Batch& batch, const AlignmentReward& model,
                         const LearnedDiscount& disc, const InnerRegularizer& reg) {
    require_nonempty(batch, "inner_update");
    if (reg.lambda < 0.0) throw UsageError("regularizer strength must be non-negative");
    const double gamma = disc.gamma();
    const bool entropy = reg.mode == InnerRegMode::Entropy && reg.lambda > 0.0;
    std::vector<double> acc(policy.theta().size(), 0.0);
    std::vector<double> probs(policy.num_actions());
    std::vector<double> rewards;
    for (const Trajectory* traj : batch) {
        const std::size_t len = traj->steps.size();
        rewards.resize(len);
        // One probability evaluation per step serves both the entropy bonus
        // and the score; the scores are accumulated in a second sweep.
        for (std::size_t t = 0; t < len; ++t) {
            const Step& s = traj->steps[t];
            double r = reward_eval(model, s.features, s.r_p, s.r_aux);
            if (entropy) {
                policy.action_probs_into(s.features, probs);
                r -= reg.lambda * std::log(probs[s.action]);
            }
            rewards[t] = r;
        }
        accumulate_policy_gradient(policy, *traj, discounted_returns(rewards, gamma), acc);
    }
    simd::scale(1.0 / static_cast<double>(batch.size()), acc);
    ParamVector out(std::move(acc));
    if (reg.mode == InnerRegMode::L2 && reg.lambda > 0.0) out.axpy(-reg.lambda, policy.theta());
    return out;
}

OuterObjective outer_objective_grad(const SoftmaxLinearPolicy& policy, const Batch& on_policy_batch, double gamma) {
    require_nonempty(on_policy_batch, "outer_objective_grad");
    OuterObjective out;
    std::vector<double> acc(policy.theta().size(), 0.0);
    std::vector<double> rewards;
    for (const Trajectory* traj : on_policy_batch) {
        rewards.resize(traj->steps.size());
        for (std::size_t t = 0; t < rewards.size(); ++t) rewards[t] = traj->steps[t].r_p;
        const std::vector<double> returns = discounted_returns(rewards, gamma);
        const std::vector<double> lp = log_probs(policy, *traj);
        for (std::size_t t = 0; t < lp.size(); ++t) out.value += lp[t] * returns[t];
        accumulate_policy_gradient(policy, *traj, returns, acc);
    }
    const double inv = 1.0 / static_cast<double>(on_policy_batch.size());
    out.value *= inv;
    simd::scale(inv, acc);
    out.grad = ParamVector(std::move(acc));
    return out;
}

InnerRunResult inner_converge(SoftmaxLinearPolicy policy, const ReplayBuffer& buffer, const AlignmentReward& model,
                              const LearnedDiscount& disc, std::size_t steps, OptimizerState& optim,
                              const InnerRegularizer& reg, Rng& rng, std::size_t batch_size) {
    if (buffer.empty()) throw UsageError("inner_converge: empty replay buffer");
    if (steps == 0) throw UsageError("inner_converge: need at least one step");
    InnerRunResult result;
    const Batch full = batch_size == 0 ? buffer.all() : Batch{};
    for (std::size_t i = 0; i < steps; ++i) {
        const Batch batch = batch_size == 0 ? full : buffer.sample(batch_size, rng);
        result.last_update = inner_update(policy, batch, model, disc, reg);
        policy.set_theta(optimizer_step(optim, policy.theta(), result.last_update));
        ++result.batches_consumed;
    }
    result.policy = std::move(policy);
    return result;
}

}  // namespace barfi
