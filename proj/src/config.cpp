#include "barfi/config.hpp"

#include "barfi/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

namespace barfi {

namespace {

struct MethodName {
    Method method;
    std::string_view name;
};

constexpr MethodName kMethods[] = {
    {Method::Barfi, "barfi"},
    {Method::Naive, "naive"},
    {Method::PotentialState, "potential_state"},
    {Method::PotentialAction, "potential_action"},
    {Method::ReinforceRp, "reinforce_rp"},
    {Method::ActorCritic, "actor_critic"},
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
        throw ConfigError(std::string(key) + ": expected a real number, got '" + std::string(v) + "'");
    }
    return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + std::string(v) + "'");
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(v) + "'");
}

std::string fmt_double(double v) {
    // Shortest text that parses back to the same double.
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

using Setter = std::function<void(ExperimentConfig&, std::string_view key, std::string_view value)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Field {
    std::string_view key;
    Setter set;
    Getter get;
};

#define REAL_FIELD(name)                                                                        \
    Field {                                                                                     \
        #name, [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.name = parse_double(k, v); }, \
            [](const ExperimentConfig& c) { return fmt_double(c.name); }                       \
    }
#define COUNT_FIELD(name)                                                                       \
    Field {                                                                                     \
        #name,                                                                                  \
            [](ExperimentConfig& c, std::string_view k, std::string_view v) {                   \
                c.name = static_cast<std::size_t>(parse_u64(k, v));                             \
            },                                                                                  \
            [](const ExperimentConfig& c) { return std::to_string(c.name); }                    \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        {"env", [](ExperimentConfig& c, std::string_view, std::string_view v) { c.env = parse_env_kind(v); },
         [](const ExperimentConfig& c) { return std::string(to_string(c.env)); }},
        {"aux_variant",
         [](ExperimentConfig& c, std::string_view, std::string_view v) { c.aux_variant = parse_aux_variant(v); },
         [](const ExperimentConfig& c) { return std::string(to_string(c.aux_variant)); }},
        {"method", [](ExperimentConfig& c, std::string_view, std::string_view v) { c.method = parse_method(v); },
         [](const ExperimentConfig& c) { return std::string(to_string(c.method)); }},
        REAL_FIELD(alpha_theta),
        REAL_FIELD(alpha_phi),
        REAL_FIELD(alpha_varphi),
        REAL_FIELD(lambda_theta),
        REAL_FIELD(lambda_phi),
        REAL_FIELD(lambda_gamma),
        REAL_FIELD(eta),
        COUNT_FIELD(n),
        COUNT_FIELD(delta),
        COUNT_FIELD(N0),
        COUNT_FIELD(Ni),
        COUNT_FIELD(buffer_capacity),
        COUNT_FIELD(total_episodes),
        {"optimizer",
         [](ExperimentConfig& c, std::string_view, std::string_view v) { c.optimizer = parse_optimizer_kind(v); },
         [](const ExperimentConfig& c) { return std::string(to_string(c.optimizer)); }},
        {"seed", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.seed = parse_u64(k, v); },
         [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
        REAL_FIELD(varphi_init),
        {"inner_reg_mode",
         [](ExperimentConfig& c, std::string_view, std::string_view v) {
             c.inner_reg_mode = parse_inner_reg_mode(v);
         },
         [](const ExperimentConfig& c) { return std::string(to_string(c.inner_reg_mode)); }},
        COUNT_FIELD(batch_size),
        REAL_FIELD(gamma),
        REAL_FIELD(phi3_init),
        COUNT_FIELD(outer_batch),
        {"hvp", [](ExperimentConfig& c, std::string_view, std::string_view v) { c.hvp = std::string(v); },
         [](const ExperimentConfig& c) { return c.hvp; }},
        {"eta_scaling",
         [](ExperimentConfig& c, std::string_view, std::string_view v) { c.eta_scaling = std::string(v); },
         [](const ExperimentConfig& c) { return c.eta_scaling; }},
        REAL_FIELD(pd_kp),
        REAL_FIELD(pd_kd),
        REAL_FIELD(alpha_critic),
        {"wallclock",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.wallclock = parse_bool(k, v); },
         [](const ExperimentConfig& c) { return std::string(c.wallclock ? "true" : "false"); }},
        COUNT_FIELD(fourier_order),
        COUNT_FIELD(tiles_per_dim),
        COUNT_FIELD(tilings),
    };
    return table;
}

#undef REAL_FIELD
#undef COUNT_FIELD

const Field* find_field(std::string_view key) {
    for (const Field& f : fields()) {
        if (f.key == key) return &f;
    }
    return nullptr;
}

void require(bool ok, std::string_view field, const std::string& message) {
    if (!ok) throw ConfigError(std::string(field) + ": " + message);
}

}  // namespace

std::string_view to_string(Method method) {
    for (const auto& m : kMethods) {
        if (m.method == method) return m.name;
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (const auto& m : kMethods) {
        if (m.name == name) return m.method;
    }
    throw ConfigError("method: unknown method '" + std::string(name) + "'");
}

std::string_view to_string(InnerRegMode mode) { return mode == InnerRegMode::L2 ? "L2" : "Entropy"; }

InnerRegMode parse_inner_reg_mode(std::string_view name) {
    if (name == "L2") return InnerRegMode::L2;
    if (name == "Entropy") return InnerRegMode::Entropy;
    throw ConfigError("inner_reg_mode: expected L2 or Entropy, got '" + std::string(name) + "'");
}

ExperimentConfig default_config(EnvKind env, AuxVariant aux, Method method) {
    ExperimentConfig c;
    c.env = env;
    c.aux_variant = aux;
    c.method = method;
    const bool barfi = method == Method::Barfi;
    const bool ac = method == Method::ActorCritic;
    switch (env) {
        case EnvKind::GridWorld:
            c.alpha_theta = 1e-3;
            c.alpha_phi = 5e-3;
            c.alpha_varphi = 5e-3;
            c.lambda_theta = 0.25;
            c.lambda_phi = 0.0625;
            c.lambda_gamma = 4.0;
            c.buffer_capacity = 1000;
            c.eta = 5e-4;
            c.N0 = 150;
            c.total_episodes = 1500;
            break;
        case EnvKind::MountainCar:
            c.alpha_theta = barfi ? 0.015625 : (ac ? 0.03125 : 0.125);
            c.alpha_phi = 0.0625;
            c.alpha_varphi = 0.0625;
            c.lambda_theta = ac ? 0.25 : 0.0;
            c.lambda_phi = 0.0;
            c.lambda_gamma = 0.25;
            c.buffer_capacity = 50;
            c.eta = 1e-3;
            c.N0 = 50;
            c.total_episodes = 500;
            break;
        case EnvKind::CartPole:
            c.alpha_theta = ac ? 5e-4 : 1e-3;
            c.alpha_phi = 1e-3;
            c.alpha_varphi = 5e-3;
            c.lambda_theta = ac ? 0.0 : 1.0;
            c.lambda_phi = 0.0;
            c.lambda_gamma = 4.0;
            c.buffer_capacity = 200;  // the table's 10000 does not fit in memory here
            c.eta = 5e-4;
            c.N0 = 150;
            c.total_episodes = 1000;
            break;
        case EnvKind::Bandit:
            c.alpha_theta = 1e-2;
            c.alpha_phi = 1e-2;
            c.alpha_varphi = 1e-2;
            c.lambda_theta = 0.25;
            c.lambda_phi = 0.0;
            c.lambda_gamma = 0.0;
            c.buffer_capacity = 100;
            c.eta = 0.1;
            c.N0 = 10;
            c.total_episodes = 200;
            break;
    }
    c.optimizer = OptimizerKind::RmsProp;
    c.n = 5;
    c.delta = 3;
    c.Ni = 15;
    c.batch_size = 1;
    if (!barfi) {
        // Baselines update on each fresh episode.
        c.delta = 1;
        c.N0 = 1;
        c.Ni = 1;
        c.buffer_capacity = 1;
        c.batch_size = 0;
    }
    return c;
}

void validate(const ExperimentConfig& c) {
    require_aux_matches(c.env, c.aux_variant);
    require(c.alpha_theta > 0.0, "alpha_theta", "must be > 0");
    if (c.method == Method::Barfi) {
        // Zero freezes the outer loop, which the frozen-reward check relies on.
        require(c.alpha_phi >= 0.0, "alpha_phi", "must be >= 0");
        require(c.alpha_varphi >= 0.0, "alpha_varphi", "must be >= 0");
        require(c.eta > 0.0, "eta", "must be > 0");
    }
    if (c.method == Method::ActorCritic) {
        require(c.alpha_critic > 0.0, "alpha_critic", "must be > 0");
    }
    require(c.lambda_theta >= 0.0, "lambda_theta", "must be >= 0");
    require(c.lambda_phi >= 0.0, "lambda_phi", "must be >= 0");
    require(c.lambda_gamma >= 0.0, "lambda_gamma", "must be >= 0");
    require(c.delta >= 1, "delta", "must be >= 1 (got " + std::to_string(c.delta) + ")");
    require(c.N0 >= 1, "N0", "must be >= 1 (got " + std::to_string(c.N0) + ")");
    require(c.Ni >= 1, "Ni", "must be >= 1");
    require(c.buffer_capacity >= 1, "buffer_capacity", "must be >= 1");
    require(c.total_episodes >= 1, "total_episodes", "must be >= 1");
    require(c.gamma >= 0.0 && c.gamma <= 1.0, "gamma", "must lie in [0, 1]");
    require(std::isfinite(c.varphi_init), "varphi_init", "must be finite");
    require(c.hvp == "fd" || c.hvp == "analytic", "hvp", "expected fd or analytic");
    require(c.eta_scaling == "fixed" || c.eta_scaling == "spectral", "eta_scaling", "expected fixed or spectral");
    require(!(c.hvp == "analytic" && c.inner_reg_mode == InnerRegMode::Entropy), "hvp",
            "the analytic HVP supports L2 regularization only");
    require(c.fourier_order >= 1, "fourier_order", "must be >= 1");
    require(c.tiles_per_dim >= 1, "tiles_per_dim", "must be >= 1");
    require(c.tilings >= 1, "tilings", "must be >= 1");
    if (c.method == Method::PotentialState && !aux_is_state_based(c.aux_variant)) {
        throw ConfigError("method: potential_state needs a state-based aux_variant, and " +
                          std::string(to_string(c.aux_variant)) + " depends on the action");
    }
}

ExperimentConfig parse_config(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (find_field(key) == nullptr) {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (value.empty()) {
            throw ConfigError(key + ": missing value");
        }
        if (!seen.insert(key).second) {
            throw ConfigError(key + ": given more than once");
        }
        entries.emplace_back(key, value);
    }

    std::string missing;
    for (const char* key : {"env", "aux_variant", "method"}) {
        if (!seen.count(key)) missing += missing.empty() ? key : std::string(", ") + key;
    }
    if (!missing.empty()) {
        throw ConfigError("missing required keys: " + missing);
    }

    ExperimentConfig head;
    for (const auto& [k, v] : entries) {
        if (k == "env" || k == "aux_variant" || k == "method") find_field(k)->set(head, k, v);
    }
    ExperimentConfig cfg = default_config(head.env, head.aux_variant, head.method);
    for (const auto& [k, v] : entries) find_field(k)->set(cfg, k, v);
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::map<std::string, std::string> config_entries(const ExperimentConfig& cfg) {
    std::map<std::string, std::string> out;
    for (const Field& f : fields()) out.emplace(std::string(f.key), f.get(cfg));
    return out;
}

std::string format_config(const ExperimentConfig& cfg) {
    std::string out;
    for (const Field& f : fields()) {
        out += std::string(f.key) + " = " + f.get(cfg) + "\n";
    }
    return out;
}

EnvOptions env_options(const ExperimentConfig& cfg) {
    EnvOptions o;
    o.aux = cfg.aux_variant;
    o.fourier_order = cfg.fourier_order;
    o.tiles_per_dim = cfg.tiles_per_dim;
    o.tilings = cfg.tilings;
    o.pd = PdGains{cfg.pd_kp, cfg.pd_kd};
    return o;
}

}  // namespace barfi
