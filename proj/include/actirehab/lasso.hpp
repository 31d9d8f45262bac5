#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace actirehab {

struct LassoOptions {
    double kkt_tolerance = 1e-8;
    int max_sweeps = 200000;
};

// Minimiser of (1/2n)||y - b0 - X beta||^2 + lambda ||beta||_1, intercept
// unpenalised.
struct LassoFit {
    double lambda = 0.0;
    Eigen::VectorXd coefficients;
    double intercept = 0.0;
    std::vector<std::size_t> selected;  // columns with nonzero coefficient
    int sweeps = 0;
    double kkt_residual = 0.0;
    double duality_gap = 0.0;  // NaN when lambda == 0

    Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

// Smallest lambda giving an all-zero solution: max_k |(1/n) x_k^T (y - ybar)|.
double lasso_lambda_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// Cyclic coordinate descent. Throws NonConvergence when the KKT residual is
// still above tolerance after max_sweeps.
LassoFit lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                   const LassoOptions& options = {}, const Eigen::VectorXd* warm_start = nullptr);

// Worst violation of the LASSO optimality conditions at a fit.
double lasso_kkt_residual(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LassoFit& fit);

// `count` log-spaced values from lambda_max down to min_ratio * lambda_max.
std::vector<double> lasso_lambda_grid(double lambda_max, int count = 100, double min_ratio = 1e-3);

struct LassoSelection {
    double lambda = 0.0;
    LassoFit fit;  // refit on all rows at the chosen lambda
    std::vector<double> grid;
    std::vector<double> cv_mse;
    std::vector<double> cv_se;  // standard error of the per-fold MSEs
};

// MinMse picks the lowest CV error; OneStandardError picks the largest
// lambda within one standard error of that minimum.
enum class LassoCvRule { MinMse, OneStandardError };

// k-fold CV over the grid (any order); by default picks the minimum mean
// squared error, ties going to the larger lambda. An empty grid means the
// default 100-point grid. Fold assignment is a seeded permutation.
LassoSelection lasso_select(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            std::vector<double> grid, int folds = 5, std::uint64_t seed = 0,
                            const LassoOptions& options = {},
                            LassoCvRule rule = LassoCvRule::MinMse);

}  // namespace actirehab
