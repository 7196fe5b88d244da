#include "barfi/config.hpp"
#include "barfi/error.hpp"
#include "barfi/harness.hpp"
#include "barfi/log.hpp"
#include "barfi/ridge.hpp"
#include "barfi/tabular.hpp"

#include <CLI11.hpp>

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

extern char** environ;

namespace fs = std::filesystem;
using namespace barfi;

namespace {

int cmd_run(const std::string& config_path, std::uint64_t seed, const std::string& out_dir) {
    ExperimentConfig cfg = load_config(config_path);
    cfg.seed = seed;
    fs::create_directories(out_dir);
    const RunResult result = run_experiment(cfg);
    write_metrics_csv((fs::path(out_dir) / "metrics.csv").string(), result.rows);
    std::ofstream(fs::path(out_dir) / "manifest.json") << manifest_json(cfg, result);
    std::printf("%s seed %llu: %zu episodes, final-100 mean primary return %.4f, gamma %.4f\n",
                std::string(to_string(cfg.method)).c_str(), static_cast<unsigned long long>(seed),
                result.rows.size(), final_mean_return(result.rows, 100), result.rows.back().gamma_value);
    return 0;
}

bool print_report(const PropositionReport& r) {
    std::printf("%-4s %-60s max|diff| = %.3e (tol %.0e)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                r.max_abs_diff, r.tolerance);
    return r.passed;
}

int cmd_check_props(std::uint64_t seed, std::size_t trials) {
    Rng rng(seed);
    bool ok = true;
    for (std::size_t i = 0; i < trials; ++i) {
        const TabularMDP mdp = random_tabular_mdp(3, 2, 3, rng);
        ParamVector theta(6);
        for (std::size_t k = 0; k < theta.size(); ++k) theta[k] = rng.normal();
        std::vector<double> phi(3);
        for (double& p : phi) p = rng.uniform(-5.0, 5.0);
        const PolicyTable beta = random_policy_table(3, 2, 0.05, rng);
        std::printf("mdp %zu\n", i);
        ok &= print_report(prop1_check(mdp, theta, phi, 0.9));
        ok &= print_report(prop2_construct_and_check(mdp, theta, 0.7));
        ok &= print_report(prop3_construct_and_check(mdp, theta, beta, 0.7));
    }
    std::printf("%s\n", ok ? "all proposition checks passed" : "some proposition checks FAILED");
    return ok ? 0 : 1;
}

int cmd_ridge_demo(std::uint64_t seed) {
    Rng rng(seed);
    const RidgeProblem p = random_ridge_problem(50, 30, 5, 1.0, rng);
    const double closed = implicit_lambda_grad(p);
    const double fd = finite_difference_lambda_grad(p);
    const NeumannConfig cfg{0.9 / ridge_hessian_lambda_max(p), 200};
    const double neumann = neumann_lambda_grad(p, cfg);
    std::printf("lambda                 %.6f\n", p.lambda);
    std::printf("implicit (closed form) %.12g\n", closed);
    std::printf("implicit (Neumann)     %.12g\n", neumann);
    std::printf("finite difference      %.12g\n", fd);
    std::printf("rel. diff closed vs fd      %.3e\n", std::abs(closed - fd) / std::abs(fd));
    std::printf("rel. diff Neumann vs closed %.3e\n", std::abs(neumann - closed) / std::abs(closed));
    return 0;
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) throw ConfigError("--seeds: expected a..b");
    const std::uint64_t a = std::stoull(text.substr(0, dots));
    const std::uint64_t b = std::stoull(text.substr(dots + 2));
    if (b < a) throw ConfigError("--seeds: empty range");
    return {a, b};
}

// One child process per seed, at most `jobs` alive at a time.
int cmd_sweep(const std::string& config_path, const std::string& seeds, const std::string& out_dir,
              std::size_t jobs) {
    const auto [first, last] = parse_seed_range(seeds);
    load_config(config_path);  // fail fast on a bad config
    fs::create_directories(out_dir);
    const std::string self = fs::read_symlink("/proc/self/exe").string();
    std::size_t running = 0;
    int failures = 0;
    auto reap = [&]() {
        int status = 0;
        if (wait(&status) > 0) {
            --running;
            if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) ++failures;
        }
    };
    for (std::uint64_t s = first; s <= last; ++s) {
        while (running >= jobs) reap();
        const std::string seed_str = std::to_string(s);
        const std::string dir = (fs::path(out_dir) / ("seed_" + seed_str)).string();
        std::vector<std::string> args = {self, "run", "--config", config_path, "--seed", seed_str, "--out", dir};
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        argv.push_back(nullptr);
        pid_t pid = 0;
        if (posix_spawn(&pid, self.c_str(), nullptr, nullptr, argv.data(), environ) != 0) {
            std::fprintf(stderr, "failed to start run for seed %s\n", seed_str.c_str());
            ++failures;
            continue;
        }
        ++running;
    }
    while (running > 0) reap();
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Behavior-alignment reward learning with implicit gradients"};
    app.require_subcommand(1);

    std::string config_path, out_dir, seeds;
    std::uint64_t seed = 0;
    std::size_t trials = 20, jobs = 1;

    auto* run = app.add_subcommand("run", "Train one configuration and write metrics.csv and manifest.json");
    run->add_option("--config", config_path, "Config file (key = value)")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Random seed")->required();
    run->add_option("--out", out_dir, "Output directory")->required();

    auto* props = app.add_subcommand("check-props", "Check the shaping and construction propositions exactly");
    props->add_option("--seed", seed, "Seed for the random MDPs");
    props->add_option("--trials", trials, "Number of random MDPs");

    auto* ridge = app.add_subcommand("ridge-demo", "Compare ridge hypergradients on a random problem");
    ridge->add_option("--seed", seed, "Seed for the random problem");

    auto* sweep = app.add_subcommand("sweep", "Run a seed range, one process per seed");
    sweep->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--seeds", seeds, "Seed range a..b (inclusive)")->required();
    sweep->add_option("--out", out_dir, "Output directory")->required();
    sweep->add_option("--jobs", jobs, "Concurrent worker processes")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, seed, out_dir);
        if (*props) return cmd_check_props(seed, trials);
        if (*ridge) return cmd_ridge_demo(seed);
        if (*sweep) return cmd_sweep(config_path, seeds, out_dir, jobs);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
