#include "barfi/implicit.hpp"

#include "barfi/error.hpp"
#include "barfi/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace barfi {

double default_hvp_epsilon(const ParamVector& theta, const ParamVector& v) {
    return 1e-4 * (1.0 + theta.norm()) / std::max(v.norm(), 1e-12);
}

ParamVector hvp(const VectorMap& update_fn, const ParamVector& theta, const ParamVector& v, double epsilon) {
    require_same_length(theta, v, "hvp");
    if (v.norm() == 0.0) return ParamVector(v.size());
    const double eps = epsilon > 0.0 ? epsilon : default_hvp_epsilon(theta, v);
    ParamVector plus = theta;
    plus.axpy(eps, v);
    ParamVector minus = theta;
    minus.axpy(-eps, v);
    ParamVector out = update_fn(plus);
    out -= update_fn(minus);
    out *= 1.0 / (2.0 * eps);
    if (!out.all_finite()) throw NumericError("hessian-vector product is not finite");
    return out;
}

double spectral_radius_estimate(const VectorMap& apply_m, const ParamVector& start, std::size_t iterations) {
    const double n0 = start.norm();
    if (n0 == 0.0) return 0.0;
    ParamVector x = (1.0 / n0) * start;
    double rho = 0.0;
    for (std::size_t i = 0; i < iterations; ++i) {
        ParamVector y = apply_m(x);
        rho = y.norm();
        if (rho == 0.0) return 0.0;
        x = (1.0 / rho) * std::move(y);
    }
    return rho;
}

ParamVector neumann_vhinv(const ParamVector& v, const VectorMap& apply_m, const NeumannConfig& cfg) {
    if (!(cfg.eta > 0.0)) throw UsageError("Neumann eta must be positive");
    if (cfg.n == 0) throw UsageError("Neumann order must be positive");
    const double base = v.norm();
    if (base == 0.0) return ParamVector(v.size());
    ParamVector term = v;
    ParamVector sum = v;
    for (std::size_t i = 0; i < cfg.n; ++i) {
        ParamVector mv = apply_m(term);
        require_same_length(term, mv, "Neumann operator output");
        term.axpy(-cfg.eta, mv);
        const double size = term.norm();
        if (!std::isfinite(size) || size > cfg.divergence_factor * base) {
            throw DivergenceError("Neumann series diverging at term " + std::to_string(i + 1) +
                                  " (|v_i| / |v_0| = " + std::to_string(size / base) + "); reduce eta");
        }
        sum += term;
    }
    sum *= cfg.eta;
    return sum;
}

ParamVector analytic_hvp(const SoftmaxLinearPolicy& policy, const Batch& batch, const AlignmentReward& model,
                         const LearnedDiscount& disc, const InnerRegularizer& reg, const ParamVector& v) {
    if (batch.empty()) throw UsageError("analytic_hvp: empty batch");
    if (reg.mode == InnerRegMode::Entropy && reg.lambda > 0.0) {
        throw UsageError("analytic_hvp supports L2 regularization only");
    }
    require_same_length(policy.theta(), v, "analytic_hvp");
    const std::size_t f = policy.feature_dim();
    const std::size_t k = policy.num_actions();
    const double gamma = disc.gamma();
    std::vector<double> acc(v.size(), 0.0);
    std::vector<double> probs(k), proj(k);
    for (const Trajectory* traj : batch) {
        const std::vector<double> returns = discounted_returns(alignment_rewards(*traj, model), gamma);
        for (std::size_t t = 0; t < traj->steps.size(); ++t) {
            if (returns[t] == 0.0) continue;
            const auto& x = traj->steps[t].features;
            policy.action_probs_into(x, probs);
            // d psi_b = -x d pi_b,  d pi_b = pi_b (x.v_b - sum_c pi_c x.v_c)
            double mean = 0.0;
            for (std::size_t b = 0; b < k; ++b) {
                proj[b] = simd::dot(v.span().subspan(b * f, f), x);
                mean += probs[b] * proj[b];
            }
            for (std::size_t b = 0; b < k; ++b) {
                const double coef = -returns[t] * probs[b] * (proj[b] - mean);
                simd::axpy(coef, x, std::span<double>(acc).subspan(b * f, f));
            }
        }
    }
    simd::scale(1.0 / static_cast<double>(batch.size()), acc);
    ParamVector out(std::move(acc));
    if (reg.lambda > 0.0) out.axpy(-reg.lambda, v);
    return out;
}

namespace {

/// c_t = w . psi_t for every step of a trajectory.
std::vector<double> score_projections(const SoftmaxLinearPolicy& policy, const Trajectory& traj,
                                      const ParamVector& w) {
    const std::size_t f = policy.feature_dim();
    const std::size_t k = policy.num_actions();
    std::vector<double> out(traj.steps.size());
    std::vector<double> probs(k);
    for (std::size_t t = 0; t < out.size(); ++t) {
        const Step& s = traj.steps[t];
        policy.action_probs_into(s.features, probs);
        double mean = 0.0;
        double chosen = 0.0;
        for (std::size_t b = 0; b < k; ++b) {
            const double u = simd::dot(w.span().subspan(b * f, f), s.features);
            mean += probs[b] * u;
            if (b == s.action) chosen = u;
        }
        out[t] = chosen - mean;
    }
    return out;
}

}  // namespace

ParamVector contract_reward_jacobian(const SoftmaxLinearPolicy& policy, const Batch& batch,
                                     const AlignmentReward& model, const LearnedDiscount& disc, const ParamVector& w) {
    if (batch.empty()) throw UsageError("contract_reward_jacobian: empty batch");
    require_same_length(policy.theta(), w, "contract_reward_jacobian");
    const double gamma = disc.gamma();
    std::vector<double> acc(model.phi().size(), 0.0);
    for (const Trajectory* traj : batch) {
        const std::vector<double> c = score_projections(policy, *traj, w);
        // sum_t c_t sum_{j>=t} gamma^{j-t} g_j = sum_j g_j C_j,  C_j = gamma C_{j-1} + c_j
        double carry = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) {
            carry = gamma * carry + c[j];
            if (carry == 0.0) continue;
            const Step& s = traj->steps[j];
            accumulate_reward_grad(acc, s.features, s.r_p, s.r_aux, carry);
        }
    }
    simd::scale(1.0 / static_cast<double>(batch.size()), acc);
    return ParamVector(std::move(acc));
}

double contract_discount_jacobian(const SoftmaxLinearPolicy& policy, const Batch& batch, const AlignmentReward& model,
                                  const LearnedDiscount& disc, const InnerRegularizer& reg, const ParamVector& w) {
    if (batch.empty()) throw UsageError("contract_discount_jacobian: empty batch");
    require_same_length(policy.theta(), w, "contract_discount_jacobian");
    const double gamma = disc.gamma();
    const bool entropy = reg.mode == InnerRegMode::Entropy && reg.lambda > 0.0;
    std::vector<double> probs(policy.num_actions());
    double total = 0.0;
    for (const Trajectory* traj : batch) {
        const std::vector<double> c = score_projections(policy, *traj, w);
        // D_j = sum_{t<j} c_t (j-t) gamma^{j-t-1}; D_j = gamma D_{j-1} + S_{j-1},
        // S_j = gamma S_{j-1} + c_j.
        double s_prev = 0.0;
        double d = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) {
            d = gamma * d + s_prev;
            s_prev = gamma * s_prev + c[j];
            if (d == 0.0) continue;
            const Step& st = traj->steps[j];
            double r = reward_eval(model, st.features, st.r_p, st.r_aux);
            if (entropy) {
                policy.action_probs_into(st.features, probs);
                r -= reg.lambda * std::log(probs[st.action]);
            }
            total += d * r;
        }
    }
    return disc.gamma_grad() * total / static_cast<double>(batch.size());
}

OuterGradient compute_outer_gradient(const SoftmaxLinearPolicy& policy, const AlignmentReward& model,
                                     const LearnedDiscount& disc, const Batch& d_off, const Batch& d_on,
                                     const OuterSettings& settings) {
    if (d_off.empty() || d_on.empty()) throw UsageError("outer update needs non-empty D_off and D_on");
    OuterGradient out;
    OuterObjective j = outer_objective_grad(policy, d_on, settings.gamma_env);
    out.objective = j.value;
    out.v = std::move(j.grad);

    VectorMap neg_h;
    if (settings.hvp_method == HvpMethod::Analytic) {
        neg_h = [&](const ParamVector& x) { return -analytic_hvp(policy, d_off, model, disc, settings.reg, x); };
    } else {
        const VectorMap update = [&](const ParamVector& theta) {
            SoftmaxLinearPolicy probe(policy.feature_dim(), policy.num_actions(), theta);
            return inner_update(probe, d_off, model, disc, settings.reg);
        };
        neg_h = [&, update](const ParamVector& x) { return -hvp(update, policy.theta(), x); };
    }
    NeumannConfig neumann = settings.neumann;
    if (settings.spectral_eta) {
        const double rho = spectral_radius_estimate(neg_h, out.v, settings.power_iterations);
        if (rho > 0.0) neumann.eta = std::min(neumann.eta, 1.0 / rho);
    }
    out.eta = neumann.eta;
    out.w = neumann_vhinv(out.v, neg_h, neumann);

    out.phi_direction = contract_reward_jacobian(policy, d_off, model, disc, out.w);
    out.phi_direction.axpy(-settings.lambda_phi, model.phi());
    out.varphi_direction = contract_discount_jacobian(policy, d_off, model, disc, settings.reg, out.w) -
                           settings.lambda_gamma * disc.gamma_grad();
    return out;
}

ParamVector phi_update(const SoftmaxLinearPolicy& policy, const AlignmentReward& model, const LearnedDiscount& disc,
                       const Batch& d_off, const Batch& d_on, const OuterSettings& settings) {
    return compute_outer_gradient(policy, model, disc, d_off, d_on, settings).phi_direction;
}

double varphi_update(const SoftmaxLinearPolicy& policy, const AlignmentReward& model, const LearnedDiscount& disc,
                     const Batch& d_off, const Batch& d_on, const OuterSettings& settings) {
    return compute_outer_gradient(policy, model, disc, d_off, d_on, settings).varphi_direction;
}

}  // namespace barfi
