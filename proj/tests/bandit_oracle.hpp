#pragma once

// Brute-force outer-gradient oracle on the three-arm bandit: perturb one
// outer parameter, re-solve the L2-regularized inner problem to convergence,
// and finite-difference the exact expected return.

#include "barfi/environments.hpp"
#include "barfi/implicit.hpp"
#include "barfi/inner.hpp"
#include "barfi/policy.hpp"
#include "barfi/reward.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace barfi::testing {

struct BanditProblem {
    std::vector<Trajectory> d_off;  // fixed replay data
    double lambda = 0.5;            // L2 strength of the inner problem
    std::size_t steps_per_episode = 1;
};

inline Trajectory bandit_episode(const std::vector<std::size_t>& actions) {
    Trajectory t;
    for (std::size_t a : actions) {
        Step s;
        s.features = {1.0};
        s.action = a;
        s.r_p = bandit::kRewards[a];
        t.steps.push_back(s);
    }
    return t;
}

/// Exact expected undiscounted return of a stationary policy.
inline double bandit_return(const BanditProblem& p, const ParamVector& theta) {
    const auto probs = SoftmaxLinearPolicy(1, bandit::kNumActions, theta).action_probs(std::vector<double>{1.0});
    double j = 0.0;
    for (std::size_t a = 0; a < bandit::kNumActions; ++a) j += probs[a] * bandit::kRewards[a];
    return static_cast<double>(p.steps_per_episode) * j;
}

/// Newton iterations on the inner fixed point, using the exact Jacobian.
inline ParamVector solve_inner(const BanditProblem& p, const AlignmentReward& model, const LearnedDiscount& disc) {
    const Batch batch = as_batch(p.d_off);
    const InnerRegularizer reg{InnerRegMode::L2, p.lambda};
    ParamVector theta(bandit::kNumActions);
    for (int it = 0; it < 200; ++it) {
        const SoftmaxLinearPolicy pi(1, bandit::kNumActions, theta);
        const ParamVector delta = inner_update(pi, batch, model, disc, reg);
        if (delta.norm_inf() < 1e-13) return theta;
        // Solve (-H) x = delta with a fixed-step Neumann series; -H is small
        // and well conditioned here (lambda dominates).
        const VectorMap neg_h = [&](const ParamVector& x) { return -analytic_hvp(pi, batch, model, disc, reg, x); };
        const double rho = spectral_radius_estimate(neg_h, delta + ParamVector(delta.size(), 1e-3), 50);
        const ParamVector step = neumann_vhinv(delta, neg_h, NeumannConfig{0.9 / (rho * 1.1), 400, 1e6});
        theta += step;
    }
    throw std::runtime_error("bandit inner solve did not converge");
}

inline ParamVector oracle_phi_gradient(const BanditProblem& p, const AlignmentReward& model,
                                       const LearnedDiscount& disc, double eps = 1e-5) {
    ParamVector g(model.phi().size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        ParamVector up = model.phi(), down = model.phi();
        up[i] += eps;
        down[i] -= eps;
        const double jp = bandit_return(p, solve_inner(p, AlignmentReward(model.feature_dim(), up), disc));
        const double jm = bandit_return(p, solve_inner(p, AlignmentReward(model.feature_dim(), down), disc));
        g[i] = (jp - jm) / (2.0 * eps);
    }
    return g;
}

inline double oracle_varphi_gradient(const BanditProblem& p, const AlignmentReward& model,
                                     const LearnedDiscount& disc, double eps = 1e-5) {
    const double jp = bandit_return(p, solve_inner(p, model, LearnedDiscount{disc.varphi + eps}));
    const double jm = bandit_return(p, solve_inner(p, model, LearnedDiscount{disc.varphi - eps}));
    return (jp - jm) / (2.0 * eps);
}

/// On-policy episodes at theta for the outer objective.
inline std::vector<Trajectory> bandit_on_policy(const BanditProblem& p, const ParamVector& theta, std::size_t count,
                                                Rng& rng) {
    const SoftmaxLinearPolicy pi(1, bandit::kNumActions, theta);
    std::vector<Trajectory> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<std::size_t> actions;
        for (std::size_t t = 0; t < p.steps_per_episode; ++t)
            actions.push_back(sample_action(pi, std::vector<double>{1.0}, rng));
        out.push_back(bandit_episode(actions));
    }
    return out;
}

}  // namespace barfi::testing
