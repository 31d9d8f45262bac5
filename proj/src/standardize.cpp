#include "actirehab/standardize.hpp"

#include <cmath>

#include "actirehab/error.hpp"

namespace actirehab {

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
    if (x.cols() != means.size()) {
        throw DimensionMismatch("standardizer has " + std::to_string(means.size()) +
                                " columns, input has " + std::to_string(x.cols()));
    }
    return (x.rowwise() - means.transpose()).array().rowwise() / stds.transpose().array();
}

Eigen::VectorXd Standardizer::apply_row(const Eigen::VectorXd& row) const {
    if (row.size() != means.size()) throw DimensionMismatch("standardizer row width");
    return (row - means).cwiseQuotient(stds);
}

Eigen::MatrixXd Standardizer::inverse(const Eigen::MatrixXd& z) const {
    if (z.cols() != means.size()) throw DimensionMismatch("standardizer column count");
    return (z.array().rowwise() * stds.transpose().array()).matrix().rowwise() + means.transpose();
}

Standardizer Standardizer::subset(const std::vector<std::string>& wanted) const {
    Standardizer out;
    out.names = wanted;
    out.means.resize(static_cast<Eigen::Index>(wanted.size()));
    out.stds.resize(static_cast<Eigen::Index>(wanted.size()));
    for (std::size_t i = 0; i < wanted.size(); ++i) {
        Eigen::Index src = -1;
        for (std::size_t j = 0; j < names.size(); ++j) {
            if (names[j] == wanted[i]) src = static_cast<Eigen::Index>(j);
        }
        if (src < 0) throw DimensionMismatch("standardizer has no column '" + wanted[i] + "'");
        out.means(static_cast<Eigen::Index>(i)) = means(src);
        out.stds(static_cast<Eigen::Index>(i)) = stds(src);
    }
    return out;
}

namespace {

bool is_constant(double sd, double mean) { return !(sd > 1e-12 * std::max(1.0, std::abs(mean))); }

}  // namespace

std::vector<std::size_t> constant_columns(const Eigen::MatrixXd& x) {
    std::vector<std::size_t> out;
    if (x.rows() < 2) return out;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const double mean = x.col(c).mean();
        const double sd = std::sqrt((x.col(c).array() - mean).square().sum() /
                                    static_cast<double>(x.rows() - 1));
        if (is_constant(sd, mean)) out.push_back(static_cast<std::size_t>(c));
    }
    return out;
}

Standardizer znorm_fit(const Eigen::MatrixXd& x, std::vector<std::string> names) {
    const auto n = x.rows();
    if (n < 2) throw DimensionMismatch("z-normalisation needs at least 2 rows");
    if (names.empty()) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) names.push_back("x" + std::to_string(c));
    }
    if (static_cast<Eigen::Index>(names.size()) != x.cols()) {
        throw DimensionMismatch("name count does not match column count");
    }
    Standardizer s;
    s.names = std::move(names);
    s.means = x.colwise().mean().transpose();
    s.stds.resize(x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const double ss = (x.col(c).array() - s.means(c)).square().sum();
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (is_constant(sd, s.means(c))) {
            throw ConstantColumn(s.names[static_cast<std::size_t>(c)]);
        }
        s.stds(c) = sd;
    }
    return s;
}

}  // namespace actirehab
