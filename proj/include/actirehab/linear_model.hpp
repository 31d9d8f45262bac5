#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace actirehab {

// y = b0 + x^T beta + eps, eps ~ N(0, sigma2).
struct LinearModel {
    std::vector<std::string> feature_names;
    Eigen::VectorXd beta;  // [intercept, coefficients...]
    double sigma2 = 0.0;   // RSS / (n - p), p counting the intercept

    double predict(const Eigen::VectorXd& x) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

// Ordinary least squares with an intercept. Needs n > p and a full-rank
// design, otherwise RankDeficient.
LinearModel ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    std::vector<std::string> names = {});

}  // namespace actirehab
