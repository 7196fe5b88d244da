// Acceptance runner: one PASS/FAIL line per criterion, exit code 1 if any
// criterion fails. Pass criterion numbers as arguments to run a subset.
// Expects to run from the repository root (configs/ is read relative to it).

#include "barfi/config.hpp"
#include "barfi/error.hpp"
#include "barfi/harness.hpp"
#include "barfi/implicit.hpp"
#include "barfi/ridge.hpp"
#include "barfi/tabular.hpp"

#include "bandit_oracle.hpp"
#include "test_util.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

using namespace barfi;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::string join(const std::vector<double>& xs, const char* f = "%.2f") {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? " " : "") + fmt(f, xs[i]);
    return out;
}

double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

ParamVector from_eigen(const Eigen::VectorXd& v) {
    return ParamVector(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd to_eigen(const ParamVector& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.values().data(), static_cast<Eigen::Index>(v.size()));
}

VectorMap matrix_map(const Eigen::MatrixXd& m) {
    return [m](const ParamVector& x) { return from_eigen(m * to_eigen(x)); };
}

ParamVector random_theta(std::size_t n, Rng& rng) { return testing::random_vector(n, rng); }

// ------------------------------------------------------------ experiments

constexpr std::uint64_t kSeeds[] = {1, 2, 3, 4, 5};

// Runs are shared between criteria (11 reuses the GridWorld runs of 8).
std::map<std::string, std::vector<RunResult>>& run_cache() {
    static std::map<std::string, std::vector<RunResult>> cache;
    return cache;
}

const std::vector<RunResult>& runs_for(const std::string& config_path) {
    auto& cache = run_cache();
    auto it = cache.find(config_path);
    if (it != cache.end()) return it->second;
    std::vector<RunResult> results;
    for (std::uint64_t seed : kSeeds) {
        ExperimentConfig cfg = load_config(config_path);
        cfg.seed = seed;
        const auto t0 = Clock::now();
        results.push_back(run_experiment(cfg));
        std::printf("  %s seed %llu: final-100 mean %.2f (%.0f s)\n", config_path.c_str(),
                    static_cast<unsigned long long>(seed), final_mean_return(results.back().rows, 100),
                    seconds_since(t0));
        std::fflush(stdout);
    }
    return cache.emplace(config_path, std::move(results)).first->second;
}

std::vector<double> final_returns(const std::string& config_path, std::size_t window) {
    std::vector<double> out;
    for (const RunResult& r : runs_for(config_path)) out.push_back(final_mean_return(r.rows, window));
    return out;
}

std::vector<double> success_rates(const std::string& config_path, std::size_t window) {
    std::vector<double> out;
    for (const RunResult& r : runs_for(config_path)) out.push_back(final_success_rate(r.rows, window));
    return out;
}

// ------------------------------------------------------------- criteria

Verdict prop1_equality() {
    const auto t0 = Clock::now();
    Rng rng(101);
    double worst = 0.0;
    bool ok = true;
    for (int i = 0; i < 20; ++i) {
        const TabularMDP mdp = random_tabular_mdp(3, 2, 3, rng);
        const ParamVector theta = random_theta(6, rng);
        std::vector<double> potential(3);
        for (double& p : potential) p = rng.uniform(-5.0, 5.0);
        const PropositionReport r = prop1_check(mdp, theta, potential, 0.9, 1e-10);
        ok = ok && r.passed;
        worst = std::max(worst, r.max_abs_diff);
    }
    const double secs = seconds_since(t0);
    return {ok && secs < 5.0, fmt("max |diff| %.2e over 20 MDPs (tol 1e-10), %.2f s (< 5 s)", worst, secs)};
}

Verdict prop1_variance() {
    const auto t0 = Clock::now();
    Rng rng(102);
    const TabularMDP mdp = random_tabular_mdp(3, 2, 0, rng);
    const ParamVector theta = random_theta(6, rng);
    double max_r = 0.0;
    for (double r : mdp.r_p) max_r = std::max(max_r, r);
    const std::vector<double> potential(3, 2.0 * max_r + 0.5);
    const double gap = one_step_variance_gap(mdp, theta, potential);

    const TransitionReward shaped = [&](std::size_t s, std::size_t a, std::size_t, bool) {
        return mdp.reward(s, a) - potential[s];  // Phi is zero once the single step ends
    };
    const std::size_t samples = 100'000;
    const MonteCarloEstimate mc_shaped =
        monte_carlo_update(mdp, theta, shaped, 0.9, UpdateWeighting::Dropped, samples, rng);
    const MonteCarloEstimate mc_primary =
        monte_carlo_update(mdp, theta, table_reward(mdp, mdp.r_p), 0.9, UpdateWeighting::Dropped, samples, rng);
    const double mc_gap = mc_shaped.total_variance - mc_primary.total_variance;
    const double secs = seconds_since(t0);
    const bool ok = gap > 0.0 && mc_gap > 0.0 && secs < 5.0;
    return {ok, fmt("closed-form gap %.4f, MC gap %.4f", gap, mc_gap) + fmt(" (1e5 samples), %.2f s (< 5 s)", secs)};
}

Verdict props23() {
    const auto t0 = Clock::now();
    Rng rng(103);
    double worst2 = 0.0, worst3 = 0.0;
    bool ok = true;
    for (int i = 0; i < 10; ++i) {
        const TabularMDP mdp = random_tabular_mdp(3, 2, 3, rng);
        const ParamVector theta = random_theta(6, rng);
        const PolicyTable beta = random_policy_table(3, 2, 0.05, rng);
        const PropositionReport r2 = prop2_construct_and_check(mdp, theta, 0.9, 1e-8);
        const PropositionReport r3 = prop3_construct_and_check(mdp, theta, beta, 0.9, 1e-8);
        ok = ok && r2.passed && r3.passed;
        worst2 = std::max(worst2, r2.max_abs_diff);
        worst3 = std::max(worst3, r3.max_abs_diff);
    }
    const double secs = seconds_since(t0);
    return {ok && secs < 10.0,
            fmt("max |diff| on-policy %.2e, off-policy %.2e (tol 1e-8)", worst2, worst3) +
                fmt(", %.2f s (< 10 s)", secs)};
}

// Q diag(U[1, 10]) Q^T.
Eigen::MatrixXd random_spd(int n, Rng& rng) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
    Eigen::VectorXd eig(n);
    for (int i = 0; i < n; ++i) eig(i) = rng.uniform(1.0, 10.0);
    return q * eig.asDiagonal() * q.transpose();
}

Verdict neumann_accuracy() {
    const auto t0 = Clock::now();
    Rng rng(104);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd h = random_spd(20, rng);
        const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues().maxCoeff();
        const ParamVector v = testing::random_vector(20, rng);
        const ParamVector got = neumann_vhinv(v, matrix_map(h), NeumannConfig{0.9 / lmax, 200, 1e6});
        const Eigen::VectorXd exact = h.ldlt().solve(to_eigen(v));
        worst = std::max(worst, (to_eigen(got) - exact).norm() / exact.norm());
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-3 && secs < 1.0, fmt("worst relative error %.2e over 10 matrices (tol 1e-3), %.3f s (< 1 s)",
                                             worst, secs)};
}

Verdict hvp_accuracy() {
    const auto t0 = Clock::now();
    Rng rng(105);
    // Gradient of 1/2 x^T A x + b^T x has Jacobian A.
    double worst_quad = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd a(8, 8);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) a(i, j) = rng.normal();
        a = (a + a.transpose()).eval();
        const Eigen::VectorXd b = to_eigen(testing::random_vector(8, rng));
        const VectorMap grad = [&](const ParamVector& x) { return from_eigen(a * to_eigen(x) + b); };
        const ParamVector theta = testing::random_vector(8, rng);
        const ParamVector v = testing::random_vector(8, rng);
        worst_quad = std::max(worst_quad, testing::rel_diff(hvp(grad, theta, v), from_eigen(a * to_eigen(v))));
    }

    // Two-arm bandit, r_phi = r_p, L2 inner update
    //   Delta(theta) = mean_i r_i (e_{a_i} - pi) - lambda theta,
    // whose Jacobian is -mean(r) (diag(pi) - pi pi^T) - lambda I.
    double worst_bandit = 0.0;
    const double lambda = 0.3;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Trajectory> data;
        for (int i = 0; i < 6; ++i) {
            Trajectory t;
            Step s;
            s.features = {1.0};
            s.action = rng.index(2);
            s.r_p = rng.uniform(-1.0, 2.0);
            t.steps.push_back(s);
            data.push_back(t);
        }
        const Batch batch = as_batch(data);
        const AlignmentReward model(1, ParamVector{0.0, 1.0, 0.0});
        const InnerRegularizer reg{InnerRegMode::L2, lambda};
        const ParamVector theta = testing::random_vector(2, rng);
        const ParamVector v = testing::random_vector(2, rng);
        const VectorMap update = [&](const ParamVector& t) {
            return inner_update(SoftmaxLinearPolicy(1, 2, t), batch, model, LearnedDiscount{}, reg);
        };
        const std::vector<double> pi = SoftmaxLinearPolicy(1, 2, theta).action_probs(std::vector<double>{1.0});
        double r_mean = 0.0;
        for (const Trajectory& t : data) r_mean += t.steps[0].r_p;
        r_mean /= static_cast<double>(data.size());
        Eigen::Matrix2d jac;
        jac << pi[0] - pi[0] * pi[0], -pi[0] * pi[1], -pi[1] * pi[0], pi[1] - pi[1] * pi[1];
        jac = (-r_mean * jac - lambda * Eigen::Matrix2d::Identity()).eval();
        const ParamVector expect = from_eigen(jac * to_eigen(v));
        worst_bandit = std::max(worst_bandit, testing::rel_diff(hvp(update, theta, v), expect));
    }
    const double secs = seconds_since(t0);
    const bool ok = worst_quad <= 1e-6 && worst_bandit <= 1e-4 && secs < 1.0;
    return {ok, fmt("quadratic rel err %.2e (tol 1e-6), bandit rel err %.2e (tol 1e-4)", worst_quad, worst_bandit) +
                    fmt(", %.3f s (< 1 s)", secs)};
}

Verdict ridge_consistency() {
    const auto t0 = Clock::now();
    Rng rng(106);
    double worst_fd = 0.0, worst_neumann = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        RidgeProblem p = random_ridge_problem(50, 30, 5, rng.uniform(0.1, 5.0), rng);
        for (std::size_t k = 0; k < p.dim(); ++k) p.theta0[k] = rng.normal();
        const double closed = implicit_lambda_grad(p);
        const double fd = finite_difference_lambda_grad(p);
        const double neumann = neumann_lambda_grad(p, NeumannConfig{0.9 / ridge_hessian_lambda_max(p), 200});
        worst_fd = std::max(worst_fd, std::abs(closed - fd) / std::abs(fd));
        worst_neumann = std::max(worst_neumann, std::abs(neumann - fd) / std::abs(fd));
    }
    const double secs = seconds_since(t0);
    const bool ok = worst_fd <= 1e-6 && worst_neumann <= 1e-4 && secs < 1.0;
    return {ok, fmt("closed form vs FD %.2e (tol 1e-6), Neumann vs FD %.2e (tol 1e-4)", worst_fd, worst_neumann) +
                    fmt(", %.3f s (< 1 s)", secs)};
}

Verdict bandit_direction() {
    const auto t0 = Clock::now();
    Rng rng(107);
    testing::BanditProblem problem;
    problem.d_off = {testing::bandit_episode({0}), testing::bandit_episode({0}), testing::bandit_episode({1}),
                     testing::bandit_episode({2})};
    problem.lambda = 0.5;
    OuterSettings settings;
    settings.reg = InnerRegularizer{InnerRegMode::L2, problem.lambda};
    settings.neumann = NeumannConfig{0.5, 200, 1e6};
    settings.gamma_env = 1.0;
    settings.hvp_method = HvpMethod::Analytic;
    std::vector<double> cosines;
    for (int i = 0; i < 10; ++i) {
        const AlignmentReward model(1, ParamVector{0.3 * rng.normal(), 1.0 + 0.3 * rng.normal(), 0.0});
        const LearnedDiscount disc{};
        const ParamVector theta = testing::solve_inner(problem, model, disc);
        const std::vector<Trajectory> d_on = testing::bandit_on_policy(problem, theta, 20000, rng);
        const ParamVector got = phi_update(SoftmaxLinearPolicy(1, bandit::kNumActions, theta), model, disc,
                                           as_batch(problem.d_off), as_batch(d_on), settings);
        cosines.push_back(cosine_similarity(got, testing::oracle_phi_gradient(problem, model, disc)));
    }
    const double secs = seconds_since(t0);
    const double avg = mean(cosines);
    return {avg > 0.9 && secs < 30.0,
            fmt("mean cosine %.6f over 10 phi (> 0.9), min %.6f", avg, *std::min_element(cosines.begin(), cosines.end())) +
                fmt(", %.2f s (< 30 s)", secs)};
}

Verdict gridworld_behavior() {
    const std::vector<double> naive = final_returns("configs/gw_center_naive.cfg", 500);
    const std::vector<double> ours = final_returns("configs/gw_center_barfi.cfg", 500);
    const bool ok = mean(naive) < 50.0 && mean(ours) >= 90.0;
    return {ok, "final-500 mean primary return: naive " + fmt("%.2f (< 50) [", mean(naive)) + join(naive) +
                    "], BARFI " + fmt("%.2f (>= 90) [", mean(ours)) + join(ours) + "]"};
}

Verdict cartpole_misaligned() {
    const std::vector<double> naive = final_returns("configs/cp_anti_naive.cfg", 100);
    const std::vector<double> ours = final_returns("configs/cp_anti_barfi.cfg", 100);
    const bool ok = mean(naive) < 50.0 && mean(ours) >= 400.0;
    return {ok, "final-100 mean return: naive " + fmt("%.2f (< 50) [", mean(naive)) + join(naive) + "], BARFI " +
                    fmt("%.2f (>= 400) [", mean(ours)) + join(ours) + "]"};
}

Verdict mountaincar_aligned() {
    const std::vector<double> ours = success_rates("configs/mc_pump_barfi.cfg", 100);
    const std::vector<double> naive = success_rates("configs/mc_pump_naive.cfg", 100);
    const std::vector<double> shaped = success_rates("configs/mc_pump_potential.cfg", 100);
    const bool ok = mean(ours) >= 0.9 && mean(naive) >= 0.9 && mean(shaped) <= 0.1;
    return {ok, "final-100 success rate: BARFI " + fmt("%.2f (>= 0.9) [", mean(ours)) + join(ours) + "], naive " +
                    fmt("%.2f (>= 0.9) [", mean(naive)) + join(naive) + "], potential " +
                    fmt("%.2f (<= 0.1) [", mean(shaped)) + join(shaped) + "]"};
}

Verdict learned_gamma() {
    const std::string path = "configs/gw_center_barfi.cfg";
    const std::vector<RunResult>& runs = runs_for(path);
    std::vector<double> first, last;
    bool decayed = true;
    for (const RunResult& r : runs) {
        first.push_back(r.rows.front().gamma_value);
        last.push_back(r.rows.back().gamma_value);
        decayed = decayed && r.rows.back().gamma_value <= r.rows.front().gamma_value;
    }

    // Fixed point with v = 0: only the gamma regularizer is left.
    const ExperimentConfig cfg = load_config(path);
    const RunResult& r = runs.front();
    const Environment env(cfg.env, env_options(cfg));
    Rng env_rng(7), action_rng(8);
    std::vector<Trajectory> d_off, d_on;
    for (int i = 0; i < 4; ++i) d_off.push_back(collect_episode(env, r.policy, env_rng, action_rng).trajectory);
    for (int i = 0; i < 4; ++i) {
        Trajectory t = collect_episode(env, r.policy, env_rng, action_rng).trajectory;
        for (Step& s : t.steps) s.r_p = 0.0;
        d_on.push_back(std::move(t));
    }
    const OuterSettings settings = outer_settings(cfg);
    const double got = varphi_update(r.policy, r.reward_model, r.discount, as_batch(d_off), as_batch(d_on), settings);
    const double expect = -cfg.lambda_gamma * r.discount.gamma_grad();
    const bool exact = got == expect;
    return {decayed && exact, "gamma initial [" + join(first, "%.4f") + "] final [" + join(last, "%.4f") +
                                  "]; v = 0 varphi update " + fmt("%.17g vs %.17g", got, expect) +
                                  (exact ? " (exact)" : " (MISMATCH)")};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> check;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "potential shaping leaves the expected update unchanged", prop1_equality},
        {2, "large potentials increase one-step update variance", prop1_variance},
        {3, "constructed rewards reproduce the corrected updates", props23},
        {4, "Neumann inverse-vector product accuracy", neumann_accuracy},
        {5, "finite-difference HVP accuracy", hvp_accuracy},
        {6, "ridge implicit gradient consistency", ridge_consistency},
        {7, "bandit outer-gradient direction", bandit_direction},
        {8, "GridWorld center bonus: behavior correction", gridworld_behavior},
        {9, "CartPole misaligned aux", cartpole_misaligned},
        {10, "MountainCar energy-pumping aux", mountaincar_aligned},
        {11, "learned discount decays", learned_gamma},
    };

    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const Criterion& c : criteria) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto t0 = Clock::now();
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        if (!v.pass) ++failures;
        std::printf("%s criterion %d: %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
