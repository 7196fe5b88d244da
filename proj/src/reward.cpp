#include "barfi/reward.hpp"

#include "barfi/error.hpp"
#include "barfi/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace barfi {

AlignmentReward::AlignmentReward(std::size_t feature_dim)
    : AlignmentReward(feature_dim, ParamVector(3 * feature_dim)) {}

AlignmentReward::AlignmentReward(std::size_t feature_dim, ParamVector phi) : feature_dim_(feature_dim) {
    if (feature_dim == 0) throw UsageError("reward model needs at least one feature");
    set_phi(std::move(phi));
}

AlignmentReward AlignmentReward::pass_through(std::size_t feature_dim, double primary_weight, double aux_weight,
                                              bool constant_first_feature, double feature_mass) {
    AlignmentReward model(feature_dim);
    ParamVector phi(3 * feature_dim);
    if (constant_first_feature) {
        phi[feature_dim] = primary_weight;
        phi[2 * feature_dim] = aux_weight;
    } else {
        for (std::size_t i = 0; i < feature_dim; ++i) {
            phi[feature_dim + i] = primary_weight / feature_mass;
            phi[2 * feature_dim + i] = aux_weight / feature_mass;
        }
    }
    model.set_phi(std::move(phi));
    return model;
}

void AlignmentReward::set_phi(ParamVector phi) {
    if (phi.size() != 3 * feature_dim_) {
        throw DimensionError("phi length " + std::to_string(phi.size()) + " != 3 x " + std::to_string(feature_dim_));
    }
    phi.require_finite("reward phi");
    phi_ = std::move(phi);
}

std::span<const double> AlignmentReward::head(std::size_t k) const {
    return phi_.span().subspan(k * feature_dim_, feature_dim_);
}

namespace {

void require_features(const AlignmentReward& m, std::span<const double> x) {
    if (x.size() != m.feature_dim()) {
        throw DimensionError("reward model expects " + std::to_string(m.feature_dim()) + " features, got " +
                             std::to_string(x.size()));
    }
}

}  // namespace

double AlignmentReward::bias_head(std::span<const double> x) const {
    require_features(*this, x);
    return simd::dot(head(0), x);
}

double AlignmentReward::primary_head(std::span<const double> x) const {
    require_features(*this, x);
    return simd::dot(head(1), x);
}

double AlignmentReward::aux_head(std::span<const double> x) const {
    require_features(*this, x);
    return simd::dot(head(2), x);
}

double reward_eval(const AlignmentReward& model, std::span<const double> features, double r_p, double r_aux) {
    return model.bias_head(features) + model.primary_head(features) * r_p + model.aux_head(features) * r_aux;
}

void accumulate_reward_grad(std::span<double> out, std::span<const double> features, double r_p, double r_aux,
                            double weight) {
    const std::size_t f = features.size();
    simd::axpy(weight, features, out.subspan(0, f));
    if (r_p != 0.0) simd::axpy(weight * r_p, features, out.subspan(f, f));
    if (r_aux != 0.0) simd::axpy(weight * r_aux, features, out.subspan(2 * f, f));
}

ParamVector reward_grad(const AlignmentReward& model, std::span<const double> features, double r_p, double r_aux) {
    require_features(model, features);
    ParamVector out(3 * model.feature_dim());
    accumulate_reward_grad(out.span(), features, r_p, r_aux, 1.0);
    return out;
}

double LearnedDiscount::gamma() const {
    double g;
    if (varphi >= 0.0) {
        g = 1.0 / (1.0 + std::exp(-varphi));
    } else {
        const double e = std::exp(varphi);
        g = e / (1.0 + e);
    }
    // Keep strictly inside (0, 1) even where the sigmoid rounds to an endpoint.
    return std::clamp(g, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

double LearnedDiscount::gamma_grad() const {
    // e^{-|x|} / (1 + e^{-|x|})^2 stays positive where gamma(1 - gamma) would round to 0.
    const double e = std::exp(-std::abs(varphi));
    return std::max(e / ((1.0 + e) * (1.0 + e)), std::numeric_limits<double>::min());
}

double gamma_eval(const LearnedDiscount& disc) { return disc.gamma(); }
double gamma_grad(const LearnedDiscount& disc) { return disc.gamma_grad(); }

}  // namespace barfi
