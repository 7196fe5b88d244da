#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace barfi {

/// Flat, fixed-length vector of finite reals. Holds policy weights, reward
/// weights and every gradient that moves between them.
///
/// Length never changes after construction, and every arithmetic operation
/// re-checks that its result is finite (throws NumericError otherwise).
class ParamVector {
public:
    ParamVector() = default;
    explicit ParamVector(std::size_t length, double fill = 0.0);
    explicit ParamVector(std::vector<double> values);
    ParamVector(std::initializer_list<double> values);

    std::size_t size() const { return values_.size(); }

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    std::span<const double> span() const { return values_; }
    std::span<double> span() { return values_; }
    const std::vector<double>& values() const { return values_; }

    ParamVector& operator+=(const ParamVector& other);
    ParamVector& operator-=(const ParamVector& other);
    ParamVector& operator*=(double s);

    /// this += alpha * x
    ParamVector& axpy(double alpha, const ParamVector& x);

    double dot(const ParamVector& other) const;
    double norm() const;
    double norm_inf() const;
    bool all_finite() const;

    /// Throws NumericError naming `what` if any entry is NaN/Inf.
    void require_finite(std::string_view what) const;

    friend bool operator==(const ParamVector&, const ParamVector&) = default;

private:
    std::vector<double> values_;
};

ParamVector operator+(ParamVector a, const ParamVector& b);
ParamVector operator-(ParamVector a, const ParamVector& b);
ParamVector operator*(double s, ParamVector a);
ParamVector operator*(ParamVector a, double s);
ParamVector operator-(ParamVector a);

/// Throws DimensionError if the lengths differ.
void require_same_length(const ParamVector& a, const ParamVector& b, std::string_view what);

ParamVector concat(std::initializer_list<const ParamVector*> parts);

double cosine_similarity(const ParamVector& a, const ParamVector& b);

enum class OptimizerKind { Sgd, RmsProp, Adam };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(std::string_view name);

struct OptimizerConstants {
    double rms_decay = 0.99;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Per-target optimizer state. All optimizers ascend: the returned vector is
/// `params + update(grad)`; descent problems negate the gradient first.
struct OptimizerState {
    OptimizerKind kind = OptimizerKind::Sgd;
    double step_size = 1e-3;
    OptimizerConstants constants{};
    ParamVector first_moment;   // Adam m
    ParamVector second_moment;  // RMSprop/Adam accumulator
    std::size_t step_count = 0;

    OptimizerState() = default;
    OptimizerState(OptimizerKind kind, double step_size, std::size_t length,
                   OptimizerConstants constants = {});
};

ParamVector sgd_step(OptimizerState& state, const ParamVector& params, const ParamVector& grad);
ParamVector rmsprop_step(OptimizerState& state, const ParamVector& params, const ParamVector& grad);
ParamVector adam_step(OptimizerState& state, const ParamVector& params, const ParamVector& grad);

/// Dispatches on state.kind.
ParamVector optimizer_step(OptimizerState& state, const ParamVector& params, const ParamVector& grad);

}  // namespace barfi
