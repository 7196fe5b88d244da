#pragma once

#include "barfi/param.hpp"

#include <cstddef>
#include <span>

namespace barfi {

/// Three-headed linear reward over state features:
///   r_phi(s) = w1.x + (w2.x) r_p + (w3.x) r_aux
/// phi is stored as the concatenation w1 | w2 | w3.
class AlignmentReward {
public:
    AlignmentReward() = default;
    explicit AlignmentReward(std::size_t feature_dim);
    AlignmentReward(std::size_t feature_dim, ParamVector phi);

    /// w1 = 0, w2 and w3 uniform so that head 2 evaluates to `primary_weight`
    /// and head 3 to `aux_weight` on any state whose features sum to
    /// `feature_mass` (1 for a constant-first Fourier basis used with
    /// weight on the constant only; number of tilings for tile coding).
    static AlignmentReward pass_through(std::size_t feature_dim, double primary_weight, double aux_weight,
                                        bool constant_first_feature, double feature_mass);

    std::size_t feature_dim() const { return feature_dim_; }
    const ParamVector& phi() const { return phi_; }
    void set_phi(ParamVector phi);

    std::span<const double> head(std::size_t k) const;

    double bias_head(std::span<const double> x) const;
    double primary_head(std::span<const double> x) const;
    double aux_head(std::span<const double> x) const;

private:
    std::size_t feature_dim_ = 0;
    ParamVector phi_;
};

double reward_eval(const AlignmentReward& model, std::span<const double> features, double r_p, double r_aux);

/// d r_phi / d phi = (x, r_p x, r_aux x).
ParamVector reward_grad(const AlignmentReward& model, std::span<const double> features, double r_p, double r_aux);

/// out += weight * reward_grad(...)
void accumulate_reward_grad(std::span<double> out, std::span<const double> features, double r_p, double r_aux,
                            double weight);

/// gamma = sigmoid(varphi). Never reaches 0 or 1 for finite varphi.
struct LearnedDiscount {
    double varphi = 4.6;

    double gamma() const;
    /// d gamma / d varphi = gamma (1 - gamma)
    double gamma_grad() const;
};

double gamma_eval(const LearnedDiscount& disc);
double gamma_grad(const LearnedDiscount& disc);

}  // namespace barfi
