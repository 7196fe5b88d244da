#include "barfi/policy.hpp"

#include "barfi/error.hpp"
#include "barfi/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace barfi {

namespace {

void require_features(const SoftmaxLinearPolicy& p, std::span<const double> x) {
    if (x.size() != p.feature_dim()) {
        throw DimensionError("policy expects " + std::to_string(p.feature_dim()) + " features, got " +
                             std::to_string(x.size()));
    }
}

void require_action(const SoftmaxLinearPolicy& p, std::size_t a) {
    if (a >= p.num_actions()) throw IndexError("action " + std::to_string(a) + " out of range");
}

}  // namespace

SoftmaxLinearPolicy::SoftmaxLinearPolicy(std::size_t feature_dim, std::size_t num_actions)
    : SoftmaxLinearPolicy(feature_dim, num_actions, ParamVector(feature_dim * num_actions)) {}

SoftmaxLinearPolicy::SoftmaxLinearPolicy(std::size_t feature_dim, std::size_t num_actions, ParamVector theta)
    : feature_dim_(feature_dim), num_actions_(num_actions) {
    if (feature_dim == 0 || num_actions == 0) throw UsageError("policy needs at least one feature and action");
    set_theta(std::move(theta));
}

void SoftmaxLinearPolicy::set_theta(ParamVector theta) {
    if (theta.size() != feature_dim_ * num_actions_) {
        throw DimensionError("theta length " + std::to_string(theta.size()) + " != " +
                             std::to_string(feature_dim_ * num_actions_));
    }
    theta.require_finite("policy theta");
    theta_ = std::move(theta);
}

std::span<const double> SoftmaxLinearPolicy::block(std::size_t action) const {
    return theta_.span().subspan(action * feature_dim_, feature_dim_);
}

void SoftmaxLinearPolicy::action_probs_into(std::span<const double> features, std::span<double> out) const {
    require_features(*this, features);
    double max_logit = -INFINITY;
    for (std::size_t a = 0; a < num_actions_; ++a) {
        out[a] = simd::dot(block(a), features);
        max_logit = std::max(max_logit, out[a]);
    }
    double total = 0.0;
    for (std::size_t a = 0; a < num_actions_; ++a) {
        out[a] = std::exp(out[a] - max_logit);
        total += out[a];
    }
    for (std::size_t a = 0; a < num_actions_; ++a) out[a] /= total;
}

std::vector<double> SoftmaxLinearPolicy::action_probs(std::span<const double> features) const {
    std::vector<double> out(num_actions_);
    action_probs_into(features, out);
    return out;
}

double SoftmaxLinearPolicy::log_prob(std::span<const double> features, std::size_t action) const {
    require_features(*this, features);
    require_action(*this, action);
    std::vector<double> logits(num_actions_);
    double max_logit = -INFINITY;
    for (std::size_t a = 0; a < num_actions_; ++a) {
        logits[a] = simd::dot(block(a), features);
        max_logit = std::max(max_logit, logits[a]);
    }
    double total = 0.0;
    for (double l : logits) total += std::exp(l - max_logit);
    return logits[action] - max_logit - std::log(total);
}

std::vector<double> action_probs(const SoftmaxLinearPolicy& policy, std::span<const double> features) {
    return policy.action_probs(features);
}

void accumulate_score(std::span<double> out, std::span<const double> features, std::span<const double> probs,
                      std::size_t action, double weight) {
    const std::size_t f = features.size();
    for (std::size_t b = 0; b < probs.size(); ++b) {
        const double coef = weight * ((b == action ? 1.0 : 0.0) - probs[b]);
        if (coef != 0.0) simd::axpy(coef, features, out.subspan(b * f, f));
    }
}

ParamVector score(const SoftmaxLinearPolicy& policy, std::span<const double> features, std::size_t action) {
    require_action(policy, action);
    const std::vector<double> probs = policy.action_probs(features);
    ParamVector out(policy.theta().size());
    accumulate_score(out.span(), features, probs, action, 1.0);
    return out;
}

std::size_t sample_from(std::span<const double> probs, Rng& rng) {
    const double u = rng.uniform();
    double cumulative = 0.0;
    for (std::size_t a = 0; a < probs.size(); ++a) {
        cumulative += probs[a];
        if (u < cumulative) return a;
    }
    // Rounding left the total slightly below 1: take the last action with mass.
    for (std::size_t a = probs.size(); a-- > 0;) {
        if (probs[a] > 0.0) return a;
    }
    return 0;
}

std::size_t sample_action(const SoftmaxLinearPolicy& policy, std::span<const double> features, Rng& rng) {
    return sample_from(policy.action_probs(features), rng);
}

double entropy(const SoftmaxLinearPolicy& policy, std::span<const double> features) {
    double h = 0.0;
    for (double p : policy.action_probs(features)) {
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

}  // namespace barfi
