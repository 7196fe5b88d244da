#include "barfi/error.hpp"
#include "barfi/ridge.hpp"

#include "doctest.h"

#include <cmath>

using namespace barfi;

namespace {

RidgeProblem scalar_problem(double lambda) {
    RidgeProblem p;
    p.x_train = Eigen::MatrixXd::Constant(1, 1, 1.0);
    p.y_train = Eigen::VectorXd::Constant(1, 1.0);
    p.x_val = Eigen::MatrixXd::Constant(1, 1, 1.0);
    p.y_val = Eigen::VectorXd::Constant(1, 1.0);
    p.theta0 = ParamVector{0.0};
    p.lambda = lambda;
    return p;
}

}  // namespace

TEST_CASE("one-dimensional closed form") {
    const RidgeProblem p = scalar_problem(1.0);
    CHECK(inner_solve(p)[0] == doctest::Approx(0.5));
    // (theta* - 1) (1 + lambda)^{-1} (theta0 - theta*) = (-0.5)(0.5)(-0.5)
    CHECK(implicit_lambda_grad(p) == doctest::Approx(0.125));
    CHECK(validation_loss(p, ParamVector{0.5}) == doctest::Approx(0.125));
}

TEST_CASE("strong regularization pins theta to the prior") {
    Rng rng(1);
    RidgeProblem p = random_ridge_problem(40, 20, 5, 1e6, rng);
    for (std::size_t i = 0; i < 5; ++i) p.theta0[i] = rng.normal();
    RidgeProblem ls = p;
    ls.lambda = 0.0;
    const ParamVector pinned = inner_solve(p);
    const ParamVector free = inner_solve(ls);
    CHECK((pinned - p.theta0).norm() <= 1e-3 * (free - p.theta0).norm());
}

TEST_CASE("unregularized square system") {
    RidgeProblem p;
    p.x_train.resize(2, 2);
    p.x_train << 2.0, 1.0, 1.0, 3.0;
    p.y_train.resize(2);
    p.y_train << 1.0, 2.0;
    p.x_val = p.x_train;
    p.y_val = p.y_train;
    p.theta0 = ParamVector(2);
    p.lambda = 0.0;
    const ParamVector t = inner_solve(p);
    const Eigen::Vector2d expect = p.x_train.inverse() * p.y_train;
    CHECK(t[0] == doctest::Approx(expect[0]).epsilon(1e-12));
    CHECK(t[1] == doctest::Approx(expect[1]).epsilon(1e-12));
}

TEST_CASE("singular systems are reported") {
    RidgeProblem p = scalar_problem(0.0);
    p.x_train = Eigen::MatrixXd::Zero(1, 1);
    CHECK_THROWS_AS(inner_solve(p), NumericError);
    RidgeProblem bad = scalar_problem(1.0);
    bad.y_train = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(bad.validate(), DimensionError);
}

TEST_CASE("gradient vanishes when the prior is the solution") {
    Rng rng(2);
    // theta0 at the least-squares solution is a fixed point of the solve.
    RidgeProblem p = random_ridge_problem(30, 10, 4, 0.0, rng);
    p.theta0 = inner_solve(p);
    p.lambda = 0.5;
    CHECK((inner_solve(p) - p.theta0).norm() < 1e-12);
    CHECK(std::abs(implicit_lambda_grad(p)) < 1e-12);
}

TEST_CASE("implicit gradient matches finite differences of the full solve") {
    Rng rng(3);
    for (int i = 0; i < 5; ++i) {
        RidgeProblem p = random_ridge_problem(50, 30, 5, rng.uniform(0.1, 5.0), rng);
        for (std::size_t k = 0; k < 5; ++k) p.theta0[k] = rng.normal();
        const double closed = implicit_lambda_grad(p);
        const double fd = finite_difference_lambda_grad(p);
        CHECK(std::abs(closed - fd) <= 1e-6 * std::abs(fd));
    }
}

TEST_CASE("neumann pipeline reproduces the closed form") {
    Rng rng(4);
    for (int i = 0; i < 5; ++i) {
        RidgeProblem p = random_ridge_problem(50, 30, 5, 1.0, rng);
        for (std::size_t k = 0; k < 5; ++k) p.theta0[k] = rng.normal();
        const NeumannConfig cfg{0.9 / ridge_hessian_lambda_max(p), 200};
        const double closed = implicit_lambda_grad(p);
        CHECK(std::abs(neumann_lambda_grad(p, cfg) - closed) <= 1e-4 * std::abs(closed));
    }
}
