#include "barfi/param.hpp"

#include "barfi/error.hpp"
#include "barfi/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace barfi {

ParamVector::ParamVector(std::size_t length, double fill) : values_(length, fill) {
    require_finite("ParamVector fill");
}

ParamVector::ParamVector(std::vector<double> values) : values_(std::move(values)) {
    require_finite("ParamVector values");
}

ParamVector::ParamVector(std::initializer_list<double> values) : values_(values) {
    require_finite("ParamVector values");
}

ParamVector& ParamVector::operator+=(const ParamVector& other) { return axpy(1.0, other); }

ParamVector& ParamVector::operator-=(const ParamVector& other) { return axpy(-1.0, other); }

ParamVector& ParamVector::operator*=(double s) {
    simd::scale(s, values_);
    require_finite("scaled vector");
    return *this;
}

ParamVector& ParamVector::axpy(double alpha, const ParamVector& x) {
    require_same_length(*this, x, "axpy");
    simd::axpy(alpha, x.values_, values_);
    require_finite("axpy result");
    return *this;
}

double ParamVector::dot(const ParamVector& other) const {
    require_same_length(*this, other, "dot");
    return simd::dot(values_, other.values_);
}

double ParamVector::norm() const { return std::sqrt(simd::sum_squares(values_)); }

double ParamVector::norm_inf() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool ParamVector::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void ParamVector::require_finite(std::string_view what) const {
    if (!all_finite()) throw NumericError("non-finite entry in " + std::string(what));
}

ParamVector operator+(ParamVector a, const ParamVector& b) { return a += b; }
ParamVector operator-(ParamVector a, const ParamVector& b) { return a -= b; }
ParamVector operator*(double s, ParamVector a) { return a *= s; }
ParamVector operator*(ParamVector a, double s) { return a *= s; }
ParamVector operator-(ParamVector a) { return a *= -1.0; }

void require_same_length(const ParamVector& a, const ParamVector& b, std::string_view what) {
    if (a.size() != b.size()) {
        throw DimensionError(std::string(what) + ": length " + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()));
    }
}

ParamVector concat(std::initializer_list<const ParamVector*> parts) {
    std::vector<double> out;
    for (const ParamVector* p : parts) out.insert(out.end(), p->values().begin(), p->values().end());
    return ParamVector(std::move(out));
}

double cosine_similarity(const ParamVector& a, const ParamVector& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return a.dot(b) / (na * nb);
}

std::string_view to_string(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::Sgd: return "sgd";
        case OptimizerKind::RmsProp: return "rmsprop";
        case OptimizerKind::Adam: return "adam";
    }
    return "?";
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
    if (name == "sgd" || name == "SGD") return OptimizerKind::Sgd;
    if (name == "rmsprop" || name == "RMSprop") return OptimizerKind::RmsProp;
    if (name == "adam" || name == "Adam") return OptimizerKind::Adam;
    throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

OptimizerState::OptimizerState(OptimizerKind kind, double step_size, std::size_t length,
                               OptimizerConstants constants)
    : kind(kind),
      step_size(step_size),
      constants(constants),
      first_moment(length),
      second_moment(length) {}

namespace {

void check_step_inputs(const OptimizerState& state, const ParamVector& params, const ParamVector& grad) {
    require_same_length(params, grad, "optimizer params/grad");
    if (state.second_moment.size() != params.size()) {
        throw DimensionError("optimizer accumulator sized " + std::to_string(state.second_moment.size()) +
                             " for params of length " + std::to_string(params.size()));
    }
    if (!(state.step_size >= 0.0) || !std::isfinite(state.step_size)) {
        throw UsageError("optimizer step size must be finite and non-negative");
    }
    params.require_finite("optimizer params");
    grad.require_finite("optimizer gradient");
}

}  // namespace

ParamVector sgd_step(OptimizerState& state, const ParamVector& params, const ParamVector& grad) {
    check_step_inputs(state, params, grad);
    ParamVector out = params;
    out.axpy(state.step_size, grad);
    ++state.step_count;
    return out;
}

ParamVector rmsprop_step(OptimizerState& state, const ParamVector& params, const ParamVector& grad) {
    check_step_inputs(state, params, grad);
    const double decay = state.constants.rms_decay;
    const double eps = state.constants.eps;
    std::vector<double> out = params.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double g = grad[i];
        double& acc = state.second_moment[i];
        acc = decay * acc + (1.0 - decay) * g * g;
        out[i] += state.step_size * g / (std::sqrt(acc) + eps);
    }
    ++state.step_count;
    return ParamVector(std::move(out));
}

ParamVector adam_step(OptimizerState& state, const ParamVector& params, const ParamVector& grad) {
    check_step_inputs(state, params, grad);
    const auto& c = state.constants;
    const double t = static_cast<double>(state.step_count + 1);
    const double bias1 = 1.0 - std::pow(c.beta1, t);
    const double bias2 = 1.0 - std::pow(c.beta2, t);
    std::vector<double> out = params.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double g = grad[i];
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        m = c.beta1 * m + (1.0 - c.beta1) * g;
        v = c.beta2 * v + (1.0 - c.beta2) * g * g;
        out[i] += state.step_size * (m / bias1) / (std::sqrt(v / bias2) + c.eps);
    }
    ++state.step_count;
    return ParamVector(std::move(out));
}

ParamVector optimizer_step(OptimizerState& state, const ParamVector& params, const ParamVector& grad) {
    switch (state.kind) {
        case OptimizerKind::Sgd: return sgd_step(state, params, grad);
        case OptimizerKind::RmsProp: return rmsprop_step(state, params, grad);
        case OptimizerKind::Adam: return adam_step(state, params, grad);
    }
    throw UsageError("unknown optimizer kind");
}

}  // namespace barfi
