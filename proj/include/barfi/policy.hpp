#pragma once

#include "barfi/param.hpp"
#include "barfi/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace barfi {

/// Softmax over per-action linear logits. theta holds one feature-length
/// block per action: logit(a) = theta[a*F .. a*F+F) . x.
class SoftmaxLinearPolicy {
public:
    SoftmaxLinearPolicy() = default;
    SoftmaxLinearPolicy(std::size_t feature_dim, std::size_t num_actions);
    SoftmaxLinearPolicy(std::size_t feature_dim, std::size_t num_actions, ParamVector theta);

    std::size_t feature_dim() const { return feature_dim_; }
    std::size_t num_actions() const { return num_actions_; }

    const ParamVector& theta() const { return theta_; }
    void set_theta(ParamVector theta);

    std::span<const double> block(std::size_t action) const;

    /// Probabilities written into `out` (size num_actions). Max-subtracted.
    void action_probs_into(std::span<const double> features, std::span<double> out) const;
    std::vector<double> action_probs(std::span<const double> features) const;

    double log_prob(std::span<const double> features, std::size_t action) const;

private:
    std::size_t feature_dim_ = 0;
    std::size_t num_actions_ = 0;
    ParamVector theta_;
};

std::vector<double> action_probs(const SoftmaxLinearPolicy& policy, std::span<const double> features);

/// d ln pi(action | x) / d theta; block b is x * (1[b = action] - pi(b | x)).
ParamVector score(const SoftmaxLinearPolicy& policy, std::span<const double> features, std::size_t action);

/// out += weight * score(x, action), given precomputed probabilities.
void accumulate_score(std::span<double> out, std::span<const double> features, std::span<const double> probs,
                      std::size_t action, double weight);

/// Inverse-CDF sampling; the lowest index wins ties.
std::size_t sample_action(const SoftmaxLinearPolicy& policy, std::span<const double> features, Rng& rng);
std::size_t sample_from(std::span<const double> probs, Rng& rng);

double entropy(const SoftmaxLinearPolicy& policy, std::span<const double> features);

}  // namespace barfi
