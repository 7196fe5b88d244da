#pragma once

#include "barfi/config.hpp"
#include "barfi/environments.hpp"
#include "barfi/implicit.hpp"
#include "barfi/inner.hpp"
#include "barfi/policy.hpp"
#include "barfi/reward.hpp"
#include "barfi/rng.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace barfi {

struct MetricsRow {
    std::size_t episode = 0;
    double return_primary = 0.0;  // undiscounted
    double return_aux = 0.0;
    double gamma_value = 0.0;
    double phi_l2norm = 0.0;
    std::int64_t wallclock_ms = 0;
};

inline constexpr const char* kMetricsHeader = "episode,return_primary,return_aux,gamma_value,phi_l2norm,wallclock_ms";

struct EpisodeResult {
    Trajectory trajectory;
    double return_primary = 0.0;
    double return_aux = 0.0;
};

/// One episode under `policy`. Step potentials are filled in when the aux
/// variant is state-based.
EpisodeResult collect_episode(const Environment& env, const SoftmaxLinearPolicy& policy, Rng& env_rng,
                              Rng& action_rng);

/// Mean undiscounted primary return over `episodes` stochastic rollouts.
double evaluate(const SoftmaxLinearPolicy& policy, const Environment& env, std::size_t episodes, Rng& rng);

/// Per-step rewards a baseline method trains on.
std::vector<double> baseline_rewards(Method method, const Trajectory& trajectory, double gamma);

struct RunResult {
    std::vector<MetricsRow> rows;
    SoftmaxLinearPolicy policy;
    AlignmentReward reward_model;
    LearnedDiscount discount;
    std::size_t outer_updates = 0;
    std::size_t skipped_outer_steps = 0;
    std::size_t inner_steps = 0;
    // Number of episodes collected when the first outer update ran; equal
    // to total_episodes when none ran.
    std::size_t first_outer_episode = 0;
};

using RowCallback = std::function<void(const MetricsRow&)>;

/// Warm-up, then repeated rounds of delta fresh episodes, an outer reward
/// update and N_i replayed inner steps. Exactly total_episodes episodes.
RunResult run_barfi(const ExperimentConfig& cfg, const RowCallback& on_row = {});

/// Outer-step settings (Neumann, regularizers, HVP method) for a config.
OuterSettings outer_settings(const ExperimentConfig& cfg);

/// Same episode schedule with a fixed training reward and no outer step.
RunResult run_baseline(const ExperimentConfig& cfg, const RowCallback& on_row = {});

/// Dispatches on cfg.method.
RunResult run_experiment(const ExperimentConfig& cfg, const RowCallback& on_row = {});

std::string format_metrics_row(const MetricsRow& row);
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);
void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows);

/// JSON run record: config, seed, build id and run counters.
std::string manifest_json(const ExperimentConfig& cfg, const RunResult& result);

/// Mean of return_primary over the last `window` rows (all rows if fewer).
double final_mean_return(const std::vector<MetricsRow>& rows, std::size_t window);

/// Fraction of the last `window` rows with a positive primary return.
double final_success_rate(const std::vector<MetricsRow>& rows, std::size_t window);

std::string build_id();

}  // namespace barfi
