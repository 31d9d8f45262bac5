#pragma once

#include <Eigen/Dense>
#include <functional>

namespace actirehab {

// Value and (when `grad` is non-null) gradient of the function to minimise.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct BfgsOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;  // on the projected gradient, inf-norm
    Eigen::VectorXd lower;             // empty = unbounded
    Eigen::VectorXd upper;
};

struct BfgsResult {
    Eigen::VectorXd x;
    double value = 0.0;
    Eigen::VectorXd gradient;
    int iterations = 0;
    bool converged = false;
};

// Quasi-Newton minimisation with an inverse-Hessian BFGS update, projected
// onto simple bounds, and a backtracking Armijo line search.
BfgsResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& options);

}  // namespace actirehab
