#include "barfi/harness.hpp"

#include "barfi/error.hpp"
#include "barfi/implicit.hpp"
#include "barfi/log.hpp"
#include "barfi/simd/kernels.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#ifndef BARFI_BUILD_ID
#define BARFI_BUILD_ID "unknown"
#endif

namespace barfi {

std::string build_id() { return BARFI_BUILD_ID; }

EpisodeResult collect_episode(const Environment& env, const SoftmaxLinearPolicy& policy, Rng& env_rng,
                              Rng& action_rng) {
    EpisodeResult out;
    const bool with_potential = aux_is_state_based(env.aux());
    std::vector<double> probs(env.num_actions());
    EnvState s = env.reset(env_rng);
    for (;;) {
        Step step;
        step.features = env.features(s);
        policy.action_probs_into(step.features, probs);
        step.action = sample_from(probs, action_rng);
        step.behavior_logprob = std::log(probs[step.action]);
        if (with_potential) step.potential = env.aux_potential(s);
        StepOutcome o = env.step(s, step.action, env_rng);
        step.r_p = o.r_p;
        step.r_aux = o.r_aux;
        out.return_primary += o.r_p;
        out.return_aux += o.r_aux;
        out.trajectory.steps.push_back(std::move(step));
        s = std::move(o.next_state);
        if (o.terminal) break;
    }
    out.trajectory.terminal = true;
    return out;
}

double evaluate(const SoftmaxLinearPolicy& policy, const Environment& env, std::size_t episodes, Rng& rng) {
    if (episodes == 0) throw UsageError("evaluate: need at least one episode");
    Rng env_rng = rng.split(1);
    Rng action_rng = rng.split(2);
    double total = 0.0;
    for (std::size_t i = 0; i < episodes; ++i) {
        total += collect_episode(env, policy, env_rng, action_rng).return_primary;
    }
    return total / static_cast<double>(episodes);
}

std::vector<double> baseline_rewards(Method method, const Trajectory& trajectory, double gamma) {
    const auto& steps = trajectory.steps;
    const std::size_t len = steps.size();
    std::vector<double> r(len);
    for (std::size_t t = 0; t < len; ++t) {
        const Step& s = steps[t];
        const bool last = t + 1 == len;
        switch (method) {
            case Method::Naive: r[t] = s.r_p + s.r_aux; break;
            case Method::PotentialState: {
                // The potential after the final step is zero.
                const double next = last ? 0.0 : steps[t + 1].potential;
                r[t] = s.r_p + gamma * next - s.potential;
                break;
            }
            case Method::PotentialAction: {
                const double next = last ? 0.0 : steps[t + 1].r_aux;
                r[t] = s.r_p + gamma * next - s.r_aux;
                break;
            }
            case Method::ReinforceRp:
            case Method::ActorCritic: r[t] = s.r_p; break;
            case Method::Barfi: throw UsageError("baseline_rewards: barfi has no fixed training reward");
        }
    }
    return r;
}

namespace {

class Runner {
public:
    Runner(const ExperimentConfig& cfg, const RowCallback& on_row)
        : cfg_(cfg),
          on_row_(on_row),
          env_(cfg.env, env_options(cfg)),
          root_(cfg.seed),
          env_rng_(root_.split(1)),
          action_rng_(root_.split(2)),
          replay_rng_(root_.split(3)),
          outer_rng_(root_.split(4)),
          buffer_(cfg.buffer_capacity),
          barfi_(cfg.method == Method::Barfi),
          start_(std::chrono::steady_clock::now()) {
        const std::size_t F = env_.feature_dim(), A = env_.num_actions();
        result_.policy = SoftmaxLinearPolicy(F, A);
        result_.reward_model =
            AlignmentReward::pass_through(F, 1.0, cfg.phi3_init, env_.constant_first_feature(), env_.feature_mass());
        result_.discount = LearnedDiscount{cfg.varphi_init};
        opt_theta_ = OptimizerState(cfg.optimizer, cfg.alpha_theta, F * A);
        opt_phi_ = OptimizerState(cfg.optimizer, cfg.alpha_phi, 3 * F);
        opt_varphi_ = OptimizerState(cfg.optimizer, cfg.alpha_varphi, 1);
        critic_ = ParamVector(F);
        reg_ = InnerRegularizer{cfg.inner_reg_mode, cfg.lambda_theta};
    }

    RunResult run() {
        const std::size_t total = cfg_.total_episodes;
        result_.first_outer_episode = total;
        const std::size_t warm = std::min(cfg_.N0, total);
        for (std::size_t i = 0; i < warm; ++i) buffer_.push(collect());
        inner_steps(cfg_.N0 + cfg_.Ni);

        while (result_.rows.size() < total) {
            const std::size_t k = std::min(cfg_.delta, total - result_.rows.size());
            std::vector<Trajectory> d_on;
            for (std::size_t j = 0; j < k; ++j) d_on.push_back(collect());
            const bool full_round = k == cfg_.delta;
            if (barfi_ && full_round) outer_step(d_on);
            for (Trajectory& t : d_on) buffer_.push(std::move(t));
            if (!full_round) break;
            inner_steps(cfg_.Ni);
        }
        return std::move(result_);
    }

private:
    Trajectory collect() {
        EpisodeResult ep = collect_episode(env_, result_.policy, env_rng_, action_rng_);
        if (cfg_.method == Method::ActorCritic) critic_update(ep.trajectory);
        MetricsRow row;
        row.episode = result_.rows.size();
        row.return_primary = ep.return_primary;
        row.return_aux = ep.return_aux;
        row.gamma_value = barfi_ ? result_.discount.gamma() : cfg_.gamma;
        row.phi_l2norm = barfi_ ? result_.reward_model.phi().norm() : 0.0;
        if (cfg_.wallclock) {
            row.wallclock_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                   std::chrono::steady_clock::now() - start_)
                                   .count();
        }
        result_.rows.push_back(row);
        if (on_row_) on_row_(row);
        return std::move(ep.trajectory);
    }

    // Linear TD(0) value estimate on the policy features.
    void critic_update(const Trajectory& traj) {
        const auto& steps = traj.steps;
        for (std::size_t t = 0; t < steps.size(); ++t) {
            const double v = simd::dot(critic_.span(), steps[t].features);
            const double v_next = t + 1 < steps.size() ? simd::dot(critic_.span(), steps[t + 1].features) : 0.0;
            const double td = steps[t].r_p + cfg_.gamma * v_next - v;
            simd::axpy(cfg_.alpha_critic * td, steps[t].features, critic_.span());
        }
        critic_.require_finite("critic weights");
    }

    Batch next_batch() {
        return cfg_.batch_size == 0 ? buffer_.all() : buffer_.sample(cfg_.batch_size, replay_rng_);
    }

    ParamVector baseline_update(const Batch& batch) {
        const SoftmaxLinearPolicy& policy = result_.policy;
        const bool entropy = reg_.mode == InnerRegMode::Entropy && reg_.lambda > 0.0;
        std::vector<double> acc(policy.theta().size(), 0.0);
        std::vector<double> probs(policy.num_actions());
        for (const Trajectory* traj : batch) {
            std::vector<double> rewards = baseline_rewards(cfg_.method, *traj, cfg_.gamma);
            if (entropy) {
                for (std::size_t t = 0; t < rewards.size(); ++t) {
                    policy.action_probs_into(traj->steps[t].features, probs);
                    rewards[t] -= reg_.lambda * std::log(probs[traj->steps[t].action]);
                }
            }
            std::vector<double> returns = discounted_returns(rewards, cfg_.gamma);
            if (cfg_.method == Method::ActorCritic) {
                for (std::size_t t = 0; t < returns.size(); ++t) {
                    returns[t] -= simd::dot(critic_.span(), traj->steps[t].features);
                }
            }
            accumulate_policy_gradient(policy, *traj, returns, acc);
        }
        simd::scale(1.0 / static_cast<double>(batch.size()), acc);
        ParamVector out(std::move(acc));
        if (reg_.mode == InnerRegMode::L2 && reg_.lambda > 0.0) out.axpy(-reg_.lambda, policy.theta());
        return out;
    }

    void inner_steps(std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            const Batch batch = next_batch();
            const ParamVector update =
                barfi_ ? inner_update(result_.policy, batch, result_.reward_model, result_.discount, reg_)
                       : baseline_update(batch);
            result_.policy.set_theta(optimizer_step(opt_theta_, result_.policy.theta(), update));
            ++result_.inner_steps;
        }
    }

    void outer_step(const std::vector<Trajectory>& d_on) {
        const Batch d_off = (cfg_.outer_batch == 0 || buffer_.size() <= cfg_.outer_batch)
                                ? buffer_.all()
                                : buffer_.sample(cfg_.outer_batch, outer_rng_);
        const OuterSettings settings = outer_settings(cfg_);
        const std::size_t episode = result_.rows.size();
        OuterGradient g;
        try {
            g = compute_outer_gradient(result_.policy, result_.reward_model, result_.discount,
                                                           d_off, as_batch(d_on), settings);
            result_.reward_model.set_phi(optimizer_step(opt_phi_, result_.reward_model.phi(), g.phi_direction));
            const ParamVector varphi =
                optimizer_step(opt_varphi_, ParamVector{result_.discount.varphi}, ParamVector{g.varphi_direction});
            result_.discount.varphi = varphi[0];
        } catch (const DivergenceError& e) {
            ++result_.skipped_outer_steps;
            log::warn("outer update skipped at episode " + std::to_string(episode) + ": " + e.what());
            return;
        }
        if (result_.outer_updates == 0) result_.first_outer_episode = episode;
        ++result_.outer_updates;
        if (log::enabled(log::Level::Debug)) {
            char buf[256];
            std::snprintf(buf, sizeof buf,
                          "outer update %zu at episode %zu: gamma=%.6f |phi|=%.6f |v|=%.3e |w|=%.3e "
                          "|dphi|=%.3e dvarphi=%.3e eta=%.3e",
                          result_.outer_updates, episode, result_.discount.gamma(),
                          result_.reward_model.phi().norm(), g.v.norm(), g.w.norm(), g.phi_direction.norm(),
                          g.varphi_direction, g.eta);
            log::debug(buf);
        }
    }

    const ExperimentConfig& cfg_;
    const RowCallback& on_row_;
    Environment env_;
    Rng root_;
    Rng env_rng_, action_rng_, replay_rng_, outer_rng_;
    ReplayBuffer buffer_;
    bool barfi_;
    std::chrono::steady_clock::time_point start_;
    RunResult result_;
    OptimizerState opt_theta_, opt_phi_, opt_varphi_;
    ParamVector critic_;
    InnerRegularizer reg_;
};

}  // namespace

OuterSettings outer_settings(const ExperimentConfig& cfg) {
    OuterSettings settings;
    settings.neumann = NeumannConfig{cfg.eta, cfg.n};
    settings.reg = InnerRegularizer{cfg.inner_reg_mode, cfg.lambda_theta};
    settings.lambda_phi = cfg.lambda_phi;
    settings.lambda_gamma = cfg.lambda_gamma;
    settings.gamma_env = cfg.gamma;
    settings.hvp_method = cfg.hvp == "analytic" ? HvpMethod::Analytic : HvpMethod::FiniteDifference;
    settings.spectral_eta = cfg.eta_scaling == "spectral";
    return settings;
}

RunResult run_barfi(const ExperimentConfig& cfg, const RowCallback& on_row) {
    validate(cfg);
    if (cfg.method != Method::Barfi) throw UsageError("run_barfi: config method is not barfi");
    return Runner(cfg, on_row).run();
}

RunResult run_baseline(const ExperimentConfig& cfg, const RowCallback& on_row) {
    validate(cfg);
    if (cfg.method == Method::Barfi) throw UsageError("run_baseline: config method is barfi");
    return Runner(cfg, on_row).run();
}

RunResult run_experiment(const ExperimentConfig& cfg, const RowCallback& on_row) {
    return cfg.method == Method::Barfi ? run_barfi(cfg, on_row) : run_baseline(cfg, on_row);
}

std::string format_metrics_row(const MetricsRow& row) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g,%.10g,%.10g,%lld", row.episode, row.return_primary,
                  row.return_aux, row.gamma_value, row.phi_l2norm, static_cast<long long>(row.wallclock_ms));
    return buf;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
    out << kMetricsHeader << '\n';
    for (const MetricsRow& r : rows) out << format_metrics_row(r) << '\n';
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write metrics file '" + path + "'");
    write_metrics_csv(out, rows);
}

std::string manifest_json(const ExperimentConfig& cfg, const RunResult& result) {
    nlohmann::ordered_json j;
    j["seed"] = cfg.seed;
    j["build_id"] = build_id();
    j["simd"] = std::string(simd::isa_name(simd::active_isa()));
    nlohmann::ordered_json c;
    for (const auto& [k, v] : config_entries(cfg)) c[k] = v;
    j["config"] = c;
    j["episodes"] = result.rows.size();
    j["inner_steps"] = result.inner_steps;
    j["outer_updates"] = result.outer_updates;
    j["skipped_outer_steps"] = result.skipped_outer_steps;
    j["first_outer_episode"] = result.first_outer_episode;
    j["final_gamma"] = cfg.method == Method::Barfi ? result.discount.gamma() : cfg.gamma;
    j["final_phi_l2norm"] = result.reward_model.phi().norm();
    return j.dump(2) + "\n";
}

double final_mean_return(const std::vector<MetricsRow>& rows, std::size_t window) {
    if (rows.empty()) return 0.0;
    const std::size_t n = std::min(window, rows.size());
    double total = 0.0;
    for (std::size_t i = rows.size() - n; i < rows.size(); ++i) total += rows[i].return_primary;
    return total / static_cast<double>(n);
}

double final_success_rate(const std::vector<MetricsRow>& rows, std::size_t window) {
    if (rows.empty()) return 0.0;
    const std::size_t n = std::min(window, rows.size());
    std::size_t hits = 0;
    for (std::size_t i = rows.size() - n; i < rows.size(); ++i) hits += rows[i].return_primary > 0.0 ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace barfi
