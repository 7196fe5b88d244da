#include "barfi/tabular.hpp"

#include "barfi/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace barfi {

namespace {

constexpr double kRowTolerance = 1e-12;
constexpr double kPolicyTolerance = 1e-9;

void require_policy_table(const TabularMDP& mdp, const PolicyTable& table, const char* what) {
    if (table.size() != mdp.num_states * mdp.num_actions) {
        throw DimensionError(std::string(what) + ": policy table has " + std::to_string(table.size()) +
                             " entries, expected " + std::to_string(mdp.num_states * mdp.num_actions));
    }
    for (std::size_t s = 0; s < mdp.num_states; ++s) {
        double sum = 0.0;
        for (std::size_t a = 0; a < mdp.num_actions; ++a) {
            const double p = table[s * mdp.num_actions + a];
            if (!(p >= 0.0) || !std::isfinite(p)) {
                throw PreconditionError(std::string(what) + ": policy row " + std::to_string(s) +
                                        " has an invalid probability");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kPolicyTolerance) {
            throw PreconditionError(std::string(what) + ": policy row " + std::to_string(s) + " sums to " +
                                    std::to_string(sum));
        }
    }
}

double gamma_power(double gamma, std::size_t t) {
    return std::pow(gamma, static_cast<double>(t));  // pow(0, 0) == 1
}

// Pr(S_t = s, A_t = a) for t = 0..horizon. States entered after a terminal
// transition carry no mass.
std::vector<std::vector<double>> occupancy_by_time(const TabularMDP& mdp, const PolicyTable& policy) {
    const std::size_t S = mdp.num_states, A = mdp.num_actions;
    std::vector<std::vector<double>> occ(mdp.horizon + 1, std::vector<double>(S * A, 0.0));
    std::vector<double> mu = mdp.d0;
    for (std::size_t t = 0; t <= mdp.horizon; ++t) {
        std::vector<double> next(S, 0.0);
        for (std::size_t s = 0; s < S; ++s) {
            if (mu[s] == 0.0 || mdp.terminal[s]) {
                continue;
            }
            for (std::size_t a = 0; a < A; ++a) {
                const double pr = mu[s] * policy[s * A + a];
                occ[t][s * A + a] = pr;
                for (std::size_t s2 = 0; s2 < S; ++s2) {
                    if (!mdp.terminal[s2]) {
                        next[s2] += pr * mdp.p(s, a, s2);
                    }
                }
            }
        }
        mu = std::move(next);
    }
    return occ;
}

// sum_t gamma^t Pr_t(s, a) q_t(s, a)
std::vector<double> discounted_q_mass(const TabularMDP& mdp, const PolicyTable& policy, double gamma) {
    const auto occ = occupancy_by_time(mdp, policy);
    const auto q = qvalues_by_time(mdp, policy, gamma, mdp.r_p);
    std::vector<double> mass(mdp.num_states * mdp.num_actions, 0.0);
    for (std::size_t t = 0; t <= mdp.horizon; ++t) {
        const double g = gamma_power(gamma, t);
        for (std::size_t i = 0; i < mass.size(); ++i) {
            mass[i] += g * occ[t][i] * q[t][i];
        }
    }
    return mass;
}

struct Enumerator {
    const TabularMDP& mdp;
    const PolicyTable& sampler;
    std::vector<std::size_t> states;
    std::vector<std::size_t> actions;
    std::vector<std::size_t> next_states;

    template <typename Fn>
    void run(Fn&& fn) {
        for (std::size_t s0 = 0; s0 < mdp.num_states; ++s0) {
            if (mdp.d0[s0] > 0.0) {
                visit(s0, 0, mdp.d0[s0], fn);
            }
        }
    }

    template <typename Fn>
    void visit(std::size_t s, std::size_t t, double prob, Fn& fn) {
        const std::size_t A = mdp.num_actions;
        for (std::size_t a = 0; a < A; ++a) {
            const double pa = sampler[s * A + a];
            if (pa == 0.0) {
                continue;
            }
            for (std::size_t s2 = 0; s2 < mdp.num_states; ++s2) {
                const double ps = mdp.p(s, a, s2);
                if (ps == 0.0) {
                    continue;
                }
                states.push_back(s);
                actions.push_back(a);
                next_states.push_back(s2);
                const double p = prob * pa * ps;
                if (t == mdp.horizon || mdp.terminal[s2]) {
                    fn(p);
                } else {
                    visit(s2, t + 1, p, fn);
                }
                states.pop_back();
                actions.pop_back();
                next_states.pop_back();
            }
        }
    }
};

bool is_off_policy(UpdateWeighting w) {
    return w == UpdateWeighting::OffPolicyFullIS || w == UpdateWeighting::OffPolicyNone;
}

// Sample update for one trajectory, accumulated into `out` (zeroed first).
void sample_update(const TabularMDP& mdp, const PolicyTable& pi, const PolicyTable* behavior,
                   const TransitionReward& reward, double gamma, UpdateWeighting weighting,
                   const std::vector<std::size_t>& states, const std::vector<std::size_t>& actions,
                   const std::vector<std::size_t>& next_states, std::vector<double>& returns,
                   std::vector<double>& out) {
    const std::size_t S = mdp.num_states, A = mdp.num_actions;
    const std::size_t L = states.size();
    std::fill(out.begin(), out.end(), 0.0);
    returns.assign(L, 0.0);

    // Per-step weights on the rewards (cumulative importance ratios).
    double rho = 1.0;
    for (std::size_t j = 0; j < L; ++j) {
        const std::size_t s = states[j], a = actions[j];
        double r = reward(s, a, next_states[j], j + 1 == L);
        if (weighting == UpdateWeighting::OffPolicyFullIS) {
            rho *= pi[s * A + a] / (*behavior)[s * A + a];
            r *= rho;
        }
        returns[j] = r;
    }
    for (std::size_t j = L; j-- > 1;) {
        returns[j - 1] += gamma * returns[j];
    }

    const bool discounted_score =
        weighting == UpdateWeighting::GammaT || weighting == UpdateWeighting::OffPolicyFullIS;
    double g = 1.0;
    for (std::size_t t = 0; t < L; ++t) {
        const double coeff = (discounted_score ? g : 1.0) * returns[t];
        g *= gamma;
        if (coeff == 0.0) {
            continue;
        }
        const std::size_t s = states[t];
        for (std::size_t b = 0; b < A; ++b) {
            const double ind = b == actions[t] ? 1.0 : 0.0;
            out[b * S + s] += coeff * (ind - pi[s * A + b]);
        }
    }
}

}  // namespace

void TabularMDP::validate() const {
    const std::size_t S = num_states, A = num_actions;
    if (S == 0 || A == 0) {
        throw PreconditionError("TabularMDP: empty state or action set");
    }
    if (transition.size() != S * A * S || r_p.size() != S * A || r_aux.size() != S * A || d0.size() != S ||
        terminal.size() != S) {
        throw DimensionError("TabularMDP: table sizes do not match num_states/num_actions");
    }
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
            double sum = 0.0;
            for (std::size_t s2 = 0; s2 < S; ++s2) {
                const double p = this->p(s, a, s2);
                if (!(p >= 0.0)) {
                    throw PreconditionError("TabularMDP: negative transition probability");
                }
                sum += p;
            }
            if (std::abs(sum - 1.0) > kRowTolerance) {
                throw PreconditionError("TabularMDP: transition row (" + std::to_string(s) + ", " +
                                        std::to_string(a) + ") sums to " + std::to_string(sum));
            }
        }
    }
    double d0_sum = 0.0;
    for (double p : d0) {
        if (!(p >= 0.0)) {
            throw PreconditionError("TabularMDP: negative start probability");
        }
        d0_sum += p;
    }
    if (std::abs(d0_sum - 1.0) > kRowTolerance) {
        throw PreconditionError("TabularMDP: d0 sums to " + std::to_string(d0_sum));
    }
    for (double r : r_p) {
        if (!std::isfinite(r)) throw NumericError("TabularMDP: non-finite r_p");
    }
}

SoftmaxLinearPolicy tabular_policy(const TabularMDP& mdp, ParamVector theta) {
    return SoftmaxLinearPolicy(mdp.num_states, mdp.num_actions, std::move(theta));
}

PolicyTable policy_table(const TabularMDP& mdp, const SoftmaxLinearPolicy& policy) {
    if (policy.feature_dim() != mdp.num_states || policy.num_actions() != mdp.num_actions) {
        throw DimensionError("policy_table: policy shape does not match the MDP");
    }
    PolicyTable table(mdp.num_states * mdp.num_actions);
    std::vector<double> x(mdp.num_states, 0.0);
    for (std::size_t s = 0; s < mdp.num_states; ++s) {
        x[s] = 1.0;
        policy.action_probs_into(x, std::span<double>(table).subspan(s * mdp.num_actions, mdp.num_actions));
        x[s] = 0.0;
    }
    return table;
}

VisitationResult visitation(const TabularMDP& mdp, const PolicyTable& policy, double gamma) {
    mdp.validate();
    require_policy_table(mdp, policy, "visitation");
    const auto occ = occupancy_by_time(mdp, policy);
    VisitationResult out;
    const std::size_t n = mdp.num_states * mdp.num_actions;
    out.d_gamma.assign(n, 0.0);
    out.d_bar.assign(n, 0.0);
    for (std::size_t t = 0; t <= mdp.horizon; ++t) {
        const double g = gamma_power(gamma, t);
        for (std::size_t i = 0; i < n; ++i) {
            out.d_gamma[i] += g * occ[t][i];
            out.d_bar[i] += occ[t][i];
        }
    }
    const double total = std::accumulate(out.d_bar.begin(), out.d_bar.end(), 0.0);
    out.d_norm.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.d_norm[i] = out.d_bar[i] / total;
    }
    return out;
}

std::vector<std::vector<double>> qvalues_by_time(const TabularMDP& mdp, const PolicyTable& policy, double gamma,
                                                 const std::vector<double>& reward_table) {
    mdp.validate();
    require_policy_table(mdp, policy, "qvalues");
    const std::size_t S = mdp.num_states, A = mdp.num_actions;
    std::vector<std::vector<double>> q(mdp.horizon + 1, std::vector<double>(S * A, 0.0));
    q[mdp.horizon] = reward_table;
    for (std::size_t t = mdp.horizon; t-- > 0;) {
        std::vector<double> v(S, 0.0);
        for (std::size_t s2 = 0; s2 < S; ++s2) {
            if (mdp.terminal[s2]) continue;
            for (std::size_t a2 = 0; a2 < A; ++a2) {
                v[s2] += policy[s2 * A + a2] * q[t + 1][s2 * A + a2];
            }
        }
        for (std::size_t s = 0; s < S; ++s) {
            for (std::size_t a = 0; a < A; ++a) {
                double ev = 0.0;
                for (std::size_t s2 = 0; s2 < S; ++s2) {
                    ev += mdp.p(s, a, s2) * v[s2];
                }
                q[t][s * A + a] = reward_table[s * A + a] + gamma * ev;
            }
        }
    }
    return q;
}

std::vector<double> qvalues(const TabularMDP& mdp, const PolicyTable& policy, double gamma) {
    const auto occ = occupancy_by_time(mdp, policy);
    const auto qt = qvalues_by_time(mdp, policy, gamma, mdp.r_p);
    const std::size_t n = mdp.num_states * mdp.num_actions;
    std::vector<double> q(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double mass = 0.0, weight = 0.0;
        for (std::size_t t = 0; t <= mdp.horizon; ++t) {
            const double w = gamma_power(gamma, t) * occ[t][i];
            mass += w * qt[t][i];
            weight += w;
        }
        // Unreachable pairs fall back to the t = 0 value.
        q[i] = weight > 0.0 ? mass / weight : qt[0][i];
    }
    return q;
}

TransitionReward table_reward(const TabularMDP& mdp, std::vector<double> reward_table) {
    if (reward_table.size() != mdp.num_states * mdp.num_actions) {
        throw DimensionError("table_reward: reward table has the wrong size");
    }
    const std::size_t A = mdp.num_actions;
    return [table = std::move(reward_table), A](std::size_t s, std::size_t a, std::size_t, bool) {
        return table[s * A + a];
    };
}

std::size_t count_trajectories(const TabularMDP& mdp, const PolicyTable& sampler) {
    const std::size_t S = mdp.num_states, A = mdp.num_actions;
    // counts[s] for the current t, filled backwards; saturates at the guard.
    constexpr std::size_t cap = kMaxEnumeratedTrajectories + 1;
    std::vector<std::size_t> later(S, 0);
    for (std::size_t t = mdp.horizon + 1; t-- > 0;) {
        std::vector<std::size_t> now(S, 0);
        for (std::size_t s = 0; s < S; ++s) {
            std::size_t c = 0;
            for (std::size_t a = 0; a < A; ++a) {
                if (sampler[s * A + a] == 0.0) continue;
                for (std::size_t s2 = 0; s2 < S; ++s2) {
                    if (mdp.p(s, a, s2) == 0.0) continue;
                    const std::size_t sub = (t == mdp.horizon || mdp.terminal[s2]) ? 1 : later[s2];
                    c = std::min(cap, c + sub);
                }
            }
            now[s] = c;
        }
        later = std::move(now);
    }
    std::size_t total = 0;
    for (std::size_t s = 0; s < S; ++s) {
        if (mdp.d0[s] > 0.0) total = std::min(cap, total + later[s]);
    }
    return total;
}

UpdateMoments exact_update_moments(const TabularMDP& mdp, const ParamVector& theta, const TransitionReward& reward,
                                   double gamma, UpdateWeighting weighting, const PolicyTable* behavior) {
    mdp.validate();
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw UsageError("exact_update_moments: gamma must lie in [0, 1]");
    }
    const PolicyTable pi = policy_table(mdp, tabular_policy(mdp, theta));
    const PolicyTable* sampler = &pi;
    if (is_off_policy(weighting)) {
        if (behavior == nullptr) {
            throw UsageError("exact_update_moments: off-policy weighting needs a behavior policy");
        }
        require_policy_table(mdp, *behavior, "behavior");
        for (std::size_t i = 0; i < pi.size(); ++i) {
            if ((*behavior)[i] == 0.0 && pi[i] > 0.0) {
                throw PreconditionError("behavior policy has zero probability where the target policy does not");
            }
        }
        sampler = behavior;
    }
    const std::size_t count = count_trajectories(mdp, *sampler);
    if (count > kMaxEnumeratedTrajectories) {
        throw CapacityError("enumeration needs more than " + std::to_string(kMaxEnumeratedTrajectories) +
                            " trajectories");
    }

    const std::size_t n = mdp.num_states * mdp.num_actions;
    std::vector<double> mean(n, 0.0), u(n, 0.0), returns;
    double second = 0.0;
    Enumerator en{mdp, *sampler, {}, {}, {}};
    en.run([&](double prob) {
        sample_update(mdp, pi, behavior, reward, gamma, weighting, en.states, en.actions, en.next_states, returns, u);
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean[i] += prob * u[i];
            sq += u[i] * u[i];
        }
        second += prob * sq;
    });
    double mean_sq = 0.0;
    for (double m : mean) mean_sq += m * m;
    UpdateMoments out{ParamVector(std::move(mean)), std::max(0.0, second - mean_sq)};
    out.mean.require_finite("exact expected update");
    return out;
}

ParamVector exact_expected_update(const TabularMDP& mdp, const ParamVector& theta,
                                  const std::vector<double>& reward_table, double gamma, UpdateWeighting weighting,
                                  const PolicyTable* behavior) {
    return exact_update_moments(mdp, theta, table_reward(mdp, reward_table), gamma, weighting, behavior).mean;
}

MonteCarloEstimate monte_carlo_update(const TabularMDP& mdp, const ParamVector& theta,
                                      const TransitionReward& reward, double gamma, UpdateWeighting weighting,
                                      std::size_t samples, Rng& rng, const PolicyTable* behavior) {
    mdp.validate();
    if (samples < 2) {
        throw UsageError("monte_carlo_update: need at least two samples");
    }
    const PolicyTable pi = policy_table(mdp, tabular_policy(mdp, theta));
    const PolicyTable* sampler = &pi;
    if (is_off_policy(weighting)) {
        if (behavior == nullptr) {
            throw UsageError("monte_carlo_update: off-policy weighting needs a behavior policy");
        }
        require_policy_table(mdp, *behavior, "behavior");
        sampler = behavior;
    }
    const std::size_t S = mdp.num_states, A = mdp.num_actions, n = S * A;
    std::vector<double> mean(n, 0.0), m2(n, 0.0), u(n, 0.0), returns;
    std::vector<std::size_t> states, actions, next_states;
    std::span<const double> d0(mdp.d0);
    for (std::size_t k = 0; k < samples; ++k) {
        states.clear();
        actions.clear();
        next_states.clear();
        std::size_t s = sample_from(d0, rng);
        for (std::size_t t = 0;; ++t) {
            const std::size_t a = sample_from(std::span<const double>(*sampler).subspan(s * A, A), rng);
            const std::size_t s2 =
                sample_from(std::span<const double>(mdp.transition).subspan((s * A + a) * S, S), rng);
            states.push_back(s);
            actions.push_back(a);
            next_states.push_back(s2);
            if (t == mdp.horizon || mdp.terminal[s2]) break;
            s = s2;
        }
        sample_update(mdp, pi, behavior, reward, gamma, weighting, states, actions, next_states, returns, u);
        const double count = static_cast<double>(k + 1);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = u[i] - mean[i];
            mean[i] += d / count;
            m2[i] += d * (u[i] - mean[i]);
        }
    }
    MonteCarloEstimate est;
    est.mean = ParamVector(mean);
    est.standard_error = ParamVector(n);
    const double ns = static_cast<double>(samples);
    for (std::size_t i = 0; i < n; ++i) {
        const double var = m2[i] / (ns - 1.0);
        est.total_variance += var;
        est.standard_error[i] = std::sqrt(var / ns);
    }
    return est;
}

PropositionReport prop1_check(const TabularMDP& mdp, const ParamVector& theta, const std::vector<double>& potential,
                              double gamma, double tolerance) {
    if (potential.size() != mdp.num_states) {
        throw DimensionError("prop1_check: potential must have one entry per state");
    }
    const std::size_t A = mdp.num_actions;
    // Terminal states and the post-horizon state carry zero potential.
    auto phi = [&](std::size_t s) { return mdp.terminal[s] ? 0.0 : potential[s]; };
    TransitionReward shaped = [&](std::size_t s, std::size_t a, std::size_t s2, bool last) {
        const double next = last ? 0.0 : phi(s2);
        return mdp.r_p[s * A + a] + gamma * next - phi(s);
    };
    const auto lhs = exact_update_moments(mdp, theta, shaped, gamma, UpdateWeighting::Dropped);
    const auto rhs = exact_update_moments(mdp, theta, table_reward(mdp, mdp.r_p), gamma, UpdateWeighting::Dropped);

    PropositionReport r;
    r.name = "potential shaping leaves the expected update unchanged";
    r.max_abs_diff = (lhs.mean - rhs.mean).norm_inf();
    r.tolerance = tolerance;
    r.passed = r.max_abs_diff <= tolerance;
    r.lhs = lhs.mean;
    r.rhs = rhs.mean;
    r.var_shaped = lhs.total_variance;
    r.var_primary = rhs.total_variance;
    return r;
}

double one_step_variance_gap(const TabularMDP& mdp, const ParamVector& theta, const std::vector<double>& potential) {
    mdp.validate();
    if (mdp.horizon != 0) {
        throw PreconditionError("one_step_variance_gap: MDP must have a one-step horizon");
    }
    if (potential.size() != mdp.num_states) {
        throw DimensionError("one_step_variance_gap: potential must have one entry per state");
    }
    const std::size_t A = mdp.num_actions;
    const PolicyTable pi = policy_table(mdp, tabular_policy(mdp, theta));
    double gap = 0.0;
    for (std::size_t s = 0; s < mdp.num_states; ++s) {
        if (mdp.d0[s] == 0.0) continue;
        const double phi = potential[s];
        for (std::size_t a = 0; a < A; ++a) {
            double psi_sq = 0.0;
            for (std::size_t b = 0; b < A; ++b) {
                const double e = (b == a ? 1.0 : 0.0) - pi[s * A + b];
                psi_sq += e * e;
            }
            gap += mdp.d0[s] * pi[s * A + a] * psi_sq * (phi * phi - 2.0 * phi * mdp.r_p[s * A + a]);
        }
    }
    return gap;
}

namespace {

std::vector<double> divide_by(const std::vector<double>& mass, const std::vector<double>& denom) {
    std::vector<double> out(mass.size(), 0.0);
    for (std::size_t i = 0; i < mass.size(); ++i) {
        out[i] = denom[i] > 0.0 ? mass[i] / denom[i] : 0.0;
    }
    return out;
}

PropositionReport make_report(std::string name, ParamVector lhs, ParamVector rhs, double tolerance) {
    PropositionReport r;
    r.name = std::move(name);
    r.max_abs_diff = (lhs - rhs).norm_inf();
    r.tolerance = tolerance;
    r.passed = r.max_abs_diff <= tolerance;
    r.lhs = std::move(lhs);
    r.rhs = std::move(rhs);
    return r;
}

}  // namespace

PropositionReport prop2_construct_and_check(const TabularMDP& mdp, const ParamVector& theta, double gamma,
                                            double tolerance) {
    mdp.validate();
    const PolicyTable pi = policy_table(mdp, tabular_policy(mdp, theta));
    const auto vis = visitation(mdp, pi, gamma);
    const auto r_phi = divide_by(discounted_q_mass(mdp, pi, gamma), vis.d_bar);
    auto lhs = exact_expected_update(mdp, theta, r_phi, 0.0, UpdateWeighting::Dropped);
    auto rhs = exact_expected_update(mdp, theta, mdp.r_p, gamma, UpdateWeighting::GammaT);
    return make_report("constructed reward recovers the discounted policy gradient", std::move(lhs), std::move(rhs),
                       tolerance);
}

PropositionReport prop3_construct_and_check(const TabularMDP& mdp, const ParamVector& theta,
                                            const PolicyTable& behavior, double gamma, double tolerance) {
    mdp.validate();
    require_policy_table(mdp, behavior, "behavior");
    const PolicyTable pi = policy_table(mdp, tabular_policy(mdp, theta));
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (behavior[i] == 0.0 && pi[i] > 0.0) {
            throw PreconditionError("prop3: behavior policy lacks support where the target policy acts");
        }
    }
    const auto vis_beta = visitation(mdp, behavior, gamma);
    const auto r_phi = divide_by(discounted_q_mass(mdp, pi, gamma), vis_beta.d_bar);
    auto lhs = exact_expected_update(mdp, theta, r_phi, 0.0, UpdateWeighting::OffPolicyNone, &behavior);
    auto rhs = exact_expected_update(mdp, theta, mdp.r_p, gamma, UpdateWeighting::OffPolicyFullIS, &behavior);
    return make_report("constructed reward removes the off-policy correction", std::move(lhs), std::move(rhs),
                       tolerance);
}

TabularMDP random_tabular_mdp(std::size_t num_states, std::size_t num_actions, std::size_t horizon, Rng& rng) {
    if (num_states < 2 || num_actions == 0) {
        throw UsageError("random_tabular_mdp: need at least two states and one action");
    }
    TabularMDP m;
    m.num_states = num_states;
    m.num_actions = num_actions;
    m.horizon = horizon;
    m.transition.resize(num_states * num_actions * num_states);
    m.r_p.resize(num_states * num_actions);
    m.r_aux.resize(num_states * num_actions);
    m.terminal.assign(num_states, false);
    m.terminal[num_states - 1] = true;  // one absorbing goal state
    for (std::size_t sa = 0; sa < num_states * num_actions; ++sa) {
        double* row = &m.transition[sa * num_states];
        double sum = 0.0;
        for (std::size_t s2 = 0; s2 < num_states; ++s2) {
            row[s2] = 0.05 + rng.uniform();
            sum += row[s2];
        }
        for (std::size_t s2 = 0; s2 < num_states; ++s2) row[s2] /= sum;
        m.r_p[sa] = rng.uniform();
        m.r_aux[sa] = rng.uniform(-1.0, 1.0);
    }
    m.d0.assign(num_states, 0.0);
    double sum = 0.0;
    for (std::size_t s = 0; s + 1 < num_states; ++s) {
        m.d0[s] = 0.1 + rng.uniform();
        sum += m.d0[s];
    }
    for (double& p : m.d0) p /= sum;
    return m;
}

PolicyTable random_policy_table(std::size_t num_states, std::size_t num_actions, double min_prob, Rng& rng) {
    if (min_prob * static_cast<double>(num_actions) > 1.0) {
        throw UsageError("random_policy_table: min_prob too large for the action count");
    }
    PolicyTable t(num_states * num_actions);
    const double free_mass = 1.0 - min_prob * static_cast<double>(num_actions);
    for (std::size_t s = 0; s < num_states; ++s) {
        double sum = 0.0;
        for (std::size_t a = 0; a < num_actions; ++a) {
            t[s * num_actions + a] = rng.uniform() + 1e-3;
            sum += t[s * num_actions + a];
        }
        for (std::size_t a = 0; a < num_actions; ++a) {
            t[s * num_actions + a] = min_prob + free_mass * t[s * num_actions + a] / sum;
        }
    }
    return t;
}

}  // namespace barfi
