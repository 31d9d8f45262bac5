#include "actirehab/linear_model.hpp"

#include "actirehab/error.hpp"

namespace actirehab {

double LinearModel::predict(const Eigen::VectorXd& x) const {
    if (x.size() + 1 != beta.size()) {
        throw DimensionMismatch("linear model expects " + std::to_string(beta.size() - 1) +
                                " features, got " + std::to_string(x.size()));
    }
    return beta(0) + beta.tail(beta.size() - 1).dot(x);
}

Eigen::VectorXd LinearModel::predict(const Eigen::MatrixXd& x) const {
    if (x.cols() + 1 != beta.size()) {
        throw DimensionMismatch("linear model expects " + std::to_string(beta.size() - 1) +
                                " features, got " + std::to_string(x.cols()));
    }
    return (x * beta.tail(beta.size() - 1)).array() + beta(0);
}

LinearModel ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    std::vector<std::string> names) {
    const auto n = x.rows();
    const auto p = x.cols() + 1;
    if (n != y.size()) throw DimensionMismatch("ols: X rows vs y");
    if (n <= p) {
        throw RankDeficient("ols needs more rows (" + std::to_string(n) + ") than parameters (" +
                            std::to_string(p) + ")");
    }
    Eigen::MatrixXd design(n, p);
    design.col(0).setOnes();
    design.rightCols(p - 1) = x;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < p) {
        throw RankDeficient("design matrix has rank " + std::to_string(qr.rank()) + " < " +
                            std::to_string(p));
    }
    LinearModel m;
    m.beta = qr.solve(y);
    const double rss = (y - design * m.beta).squaredNorm();
    m.sigma2 = rss / static_cast<double>(n - p);
    if (names.empty()) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) names.push_back("x" + std::to_string(c));
    }
    m.feature_names = std::move(names);
    return m;
}

}  // namespace actirehab
