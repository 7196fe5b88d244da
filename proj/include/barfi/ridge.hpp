#pragma once

#include "barfi/implicit.hpp"
#include "barfi/param.hpp"
#include "barfi/rng.hpp"

#include <Eigen/Dense>

namespace barfi {

/// Ridge regression toward a prior center:
///   f_train(theta) = 1/2 |X theta - y|^2 + lambda/2 |theta - theta0|^2
///   f_val(theta)   = 1/2 |X_val theta - y_val|^2
struct RidgeProblem {
    Eigen::MatrixXd x_train;
    Eigen::VectorXd y_train;
    Eigen::MatrixXd x_val;
    Eigen::VectorXd y_val;
    ParamVector theta0;
    double lambda = 1.0;

    std::size_t dim() const { return static_cast<std::size_t>(x_train.cols()); }
    void validate() const;
};

/// theta*(lambda) = (X^T X + lambda I)^{-1} (X^T y + lambda theta0).
/// Throws NumericError when the system is singular.
ParamVector inner_solve(const RidgeProblem& problem);

double validation_loss(const RidgeProblem& problem, const ParamVector& theta);

/// d f_val(theta*(lambda)) / d lambda = grad f_val^T (X^T X + lambda I)^{-1} (theta0 - theta*).
double implicit_lambda_grad(const RidgeProblem& problem);

/// Central difference of lambda -> f_val(theta*(lambda)) through the full solve.
double finite_difference_lambda_grad(const RidgeProblem& problem, double step = 1e-5);

/// The same gradient through the generic implicit machinery: the inner
/// update is the descent direction -grad f_train, its Jacobian comes from
/// the finite-difference HVP and the inverse from the Neumann series.
double neumann_lambda_grad(const RidgeProblem& problem, const NeumannConfig& cfg);

/// Largest eigenvalue of X^T X + lambda I.
double ridge_hessian_lambda_max(const RidgeProblem& problem);

/// Gaussian design with a planted linear model plus noise.
RidgeProblem random_ridge_problem(std::size_t n_train, std::size_t n_val, std::size_t dim, double lambda, Rng& rng);

}  // namespace barfi
