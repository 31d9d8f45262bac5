#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace actirehab {

// Column-wise z-normalisation with the (n - 1) standard deviation.
struct Standardizer {
    std::vector<std::string> names;
    Eigen::VectorXd means;
    Eigen::VectorXd stds;

    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
    Eigen::VectorXd apply_row(const Eigen::VectorXd& row) const;
    Eigen::MatrixXd inverse(const Eigen::MatrixXd& z) const;
    // Sub-standardizer restricted to the named columns, in the given order.
    Standardizer subset(const std::vector<std::string>& wanted) const;
};

// Needs >= 2 rows; throws ConstantColumn(name) for a zero-variance column.
Standardizer znorm_fit(const Eigen::MatrixXd& x, std::vector<std::string> names = {});

// Indices of the columns znorm_fit() would reject.
std::vector<std::size_t> constant_columns(const Eigen::MatrixXd& x);

}  // namespace actirehab
