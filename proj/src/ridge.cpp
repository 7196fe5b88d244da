#include "barfi/ridge.hpp"

#include "barfi/error.hpp"

#include <cmath>

namespace barfi {

namespace {

Eigen::VectorXd to_eigen(const ParamVector& p) {
    return Eigen::Map<const Eigen::VectorXd>(p.span().data(), static_cast<Eigen::Index>(p.size()));
}

ParamVector from_eigen(const Eigen::VectorXd& v) {
    return ParamVector(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::MatrixXd train_hessian(const RidgeProblem& p) {
    const auto d = p.x_train.cols();
    return p.x_train.transpose() * p.x_train + p.lambda * Eigen::MatrixXd::Identity(d, d);
}

Eigen::LDLT<Eigen::MatrixXd> factor(const Eigen::MatrixXd& h) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-14)) {
        throw NumericError("ridge: X^T X + lambda I is singular");
    }
    return ldlt;
}

Eigen::VectorXd val_grad(const RidgeProblem& p, const Eigen::VectorXd& theta) {
    return p.x_val.transpose() * (p.x_val * theta - p.y_val);
}

}  // namespace

void RidgeProblem::validate() const {
    if (x_train.rows() != y_train.size() || x_val.rows() != y_val.size() || x_val.cols() != x_train.cols() ||
        static_cast<Eigen::Index>(theta0.size()) != x_train.cols()) {
        throw DimensionError("RidgeProblem: inconsistent dimensions");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw UsageError("RidgeProblem: lambda must be a finite value >= 0");
    }
}

ParamVector inner_solve(const RidgeProblem& problem) {
    problem.validate();
    const auto ldlt = factor(train_hessian(problem));
    const Eigen::VectorXd rhs = problem.x_train.transpose() * problem.y_train + problem.lambda * to_eigen(problem.theta0);
    ParamVector out = from_eigen(ldlt.solve(rhs));
    out.require_finite("ridge solution");
    return out;
}

double validation_loss(const RidgeProblem& problem, const ParamVector& theta) {
    return 0.5 * (problem.x_val * to_eigen(theta) - problem.y_val).squaredNorm();
}

double implicit_lambda_grad(const RidgeProblem& problem) {
    const Eigen::VectorXd theta = to_eigen(inner_solve(problem));
    const auto ldlt = factor(train_hessian(problem));
    const Eigen::VectorXd a = to_eigen(problem.theta0) - theta;
    return val_grad(problem, theta).dot(ldlt.solve(a));
}

double finite_difference_lambda_grad(const RidgeProblem& problem, double step) {
    RidgeProblem hi = problem, lo = problem;
    hi.lambda = problem.lambda + step;
    lo.lambda = problem.lambda - step;
    if (lo.lambda < 0.0) {
        throw UsageError("finite_difference_lambda_grad: step exceeds lambda");
    }
    return (validation_loss(hi, inner_solve(hi)) - validation_loss(lo, inner_solve(lo))) / (2.0 * step);
}

double neumann_lambda_grad(const RidgeProblem& problem, const NeumannConfig& cfg) {
    const ParamVector theta = inner_solve(problem);
    // Inner update (ascent on -f_train): Delta = -X^T (X theta - y) - lambda (theta - theta0).
    VectorMap update = [&](const ParamVector& t) {
        const Eigen::VectorXd tv = to_eigen(t);
        const Eigen::VectorXd g = problem.x_train.transpose() * (problem.x_train * tv - problem.y_train) +
                                  problem.lambda * (tv - to_eigen(problem.theta0));
        return from_eigen(-g);
    };
    // M = -dDelta/dtheta, positive definite.
    VectorMap apply_m = [&](const ParamVector& v) { return -hvp(update, theta, v); };
    const ParamVector v = from_eigen(val_grad(problem, to_eigen(theta)));
    const ParamVector w = neumann_vhinv(v, apply_m, cfg);
    // dDelta/dlambda = theta0 - theta*.
    return w.dot(problem.theta0 - theta);
}

double ridge_hessian_lambda_max(const RidgeProblem& problem) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(train_hessian(problem), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

RidgeProblem random_ridge_problem(std::size_t n_train, std::size_t n_val, std::size_t dim, double lambda, Rng& rng) {
    const auto d = static_cast<Eigen::Index>(dim);
    Eigen::VectorXd truth(d);
    for (Eigen::Index i = 0; i < d; ++i) truth[i] = rng.normal();
    auto draw = [&](std::size_t rows, Eigen::MatrixXd& x, Eigen::VectorXd& y) {
        x.resize(static_cast<Eigen::Index>(rows), d);
        y.resize(static_cast<Eigen::Index>(rows));
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            for (Eigen::Index c = 0; c < d; ++c) x(r, c) = rng.normal();
        }
        for (Eigen::Index r = 0; r < x.rows(); ++r) y[r] = x.row(r).dot(truth) + 0.5 * rng.normal();
    };
    RidgeProblem p;
    draw(n_train, p.x_train, p.y_train);
    draw(n_val, p.x_val, p.y_val);
    p.theta0 = ParamVector(dim);
    for (std::size_t i = 0; i < dim; ++i) p.theta0[i] = rng.normal();
    p.lambda = lambda;
    return p;
}

}  // namespace barfi
