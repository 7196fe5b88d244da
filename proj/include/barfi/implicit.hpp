#pragma once

#include "barfi/inner.hpp"
#include "barfi/param.hpp"
#include "barfi/policy.hpp"
#include "barfi/reward.hpp"

#include <cstddef>
#include <functional>

namespace barfi {

using VectorMap = std::function<ParamVector(const ParamVector&)>;

struct NeumannConfig {
    double eta = 5e-4;  // eigenvalue scaling; eta * lambda_max(M) must stay below 2
    std::size_t n = 5;  // series order
    double divergence_factor = 10.0;
};

/// Default central-difference step: 1e-4 (1 + |theta|) / max(|v|, 1e-12).
double default_hvp_epsilon(const ParamVector& theta, const ParamVector& v);

/// Central finite difference of an update map along v:
///   (update(theta + eps v) - update(theta - eps v)) / (2 eps)
/// epsilon <= 0 selects default_hvp_epsilon.
ParamVector hvp(const VectorMap& update_fn, const ParamVector& theta, const ParamVector& v, double epsilon = 0.0);

/// Truncated Neumann series for v M^{-1} with a symmetric positive-definite
/// operator M given as a matrix-vector product:
///   v_0 = v, v_{i+1} = v_i - eta M v_i, result = eta sum_{i=0}^{n} v_i.
/// Throws DivergenceError once |v_i| exceeds divergence_factor |v_0|.
ParamVector neumann_vhinv(const ParamVector& v, const VectorMap& apply_m, const NeumannConfig& cfg);

/// Largest eigenvalue magnitude of a linear map, by power iteration from
/// `start`. Returns 0 for a zero start vector.
double spectral_radius_estimate(const VectorMap& apply_m, const ParamVector& start, std::size_t iterations);

/// Exact d(inner_update)/d theta applied to v for L2 (or no) regularization.
ParamVector analytic_hvp(const SoftmaxLinearPolicy& policy, const Batch& batch, const AlignmentReward& model,
                         const LearnedDiscount& disc, const InnerRegularizer& reg, const ParamVector& v);

/// (1/|B|) sum_tau sum_t (w . psi_t) sum_{j>=t} gamma^{j-t} d r_phi(S_j, A_j) / d phi,
/// i.e. w^T A without forming A.
ParamVector contract_reward_jacobian(const SoftmaxLinearPolicy& policy, const Batch& batch,
                                     const AlignmentReward& model, const LearnedDiscount& disc, const ParamVector& w);

/// (1/|B|) sum_tau sum_t (w . psi_t) sum_{j>=t} d gamma^{j-t} / d varphi * r~_j,
/// i.e. w^T B, where r~ carries the entropy bonus in entropy mode.
double contract_discount_jacobian(const SoftmaxLinearPolicy& policy, const Batch& batch, const AlignmentReward& model,
                                  const LearnedDiscount& disc, const InnerRegularizer& reg, const ParamVector& w);

enum class HvpMethod { FiniteDifference, Analytic };

struct OuterSettings {
    NeumannConfig neumann{};
    InnerRegularizer reg{};
    double lambda_phi = 0.0;
    double lambda_gamma = 0.0;
    double gamma_env = 0.99;
    HvpMethod hvp_method = HvpMethod::FiniteDifference;
    // Cap eta at 1 / lambda_max(-H) (power-iteration estimate) so the series
    // converges whatever the scale of the batch Hessian.
    bool spectral_eta = false;
    std::size_t power_iterations = 10;
};

struct OuterGradient {
    ParamVector phi_direction;     // ascent direction for phi, regularizer included
    double varphi_direction = 0.0; // ascent direction for varphi, regularizer included
    ParamVector v;                 // dJ/dtheta on D_on
    ParamVector w;                 // v (-H)^{-1} via Neumann
    double objective = 0.0;        // J(theta; D_on)
    double eta = 0.0;              // scaling actually used by the series
};

/// Implicit outer gradients at an (approximate) inner fixed point theta*.
/// H = d Delta / d theta on D_off (regularizer included) is negative definite
/// near a maximizer, so the series runs on M = -H and
///   dJ/dphi = -v H^{-1} A = (v M^{-1}) A.
OuterGradient compute_outer_gradient(const SoftmaxLinearPolicy& policy, const AlignmentReward& model,
                                     const LearnedDiscount& disc, const Batch& d_off, const Batch& d_on,
                                     const OuterSettings& settings);

ParamVector phi_update(const SoftmaxLinearPolicy& policy, const AlignmentReward& model, const LearnedDiscount& disc,
                       const Batch& d_off, const Batch& d_on, const OuterSettings& settings);

double varphi_update(const SoftmaxLinearPolicy& policy, const AlignmentReward& model, const LearnedDiscount& disc,
                     const Batch& d_off, const Batch& d_on, const OuterSettings& settings);

}  // namespace barfi
