#include "actirehab/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "actirehab/error.hpp"
#include "actirehab/random.hpp"

namespace actirehab {

namespace {

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

struct Centered {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    Eigen::VectorXd x_means;
    double y_mean = 0.0;
};

Centered center(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    Centered c;
    c.x_means = x.colwise().mean().transpose();
    c.y_mean = y.mean();
    c.x = x.rowwise() - c.x_means.transpose();
    c.y = y.array() - c.y_mean;
    return c;
}

double kkt_violation(const Eigen::VectorXd& grad, const Eigen::VectorXd& beta, double lambda) {
    double worst = 0.0;
    for (Eigen::Index k = 0; k < beta.size(); ++k) {
        const double v = beta(k) == 0.0 ? std::max(0.0, std::abs(grad(k)) - lambda)
                                        : std::abs(grad(k) - lambda * (beta(k) > 0 ? 1.0 : -1.0));
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace

Eigen::VectorXd LassoFit::predict(const Eigen::MatrixXd& x) const {
    return (x * coefficients).array() + intercept;
}

double lasso_lambda_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    if (x.rows() != y.size() || x.rows() == 0) throw DimensionMismatch("lasso: X rows vs y");
    const auto c = center(x, y);
    return (c.x.transpose() * c.y).cwiseAbs().maxCoeff() / static_cast<double>(x.rows());
}

double lasso_kkt_residual(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LassoFit& fit) {
    const Eigen::VectorXd r = y - fit.predict(x);
    const Eigen::VectorXd grad = x.transpose() * r / static_cast<double>(x.rows());
    // The intercept condition (residuals sum to zero) is folded in via centering.
    return std::max(kkt_violation(grad, fit.coefficients, fit.lambda), std::abs(r.mean()));
}

LassoFit lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                   const LassoOptions& options, const Eigen::VectorXd* warm_start) {
    if (x.rows() != y.size()) {
        throw DimensionMismatch("lasso: X has " + std::to_string(x.rows()) + " rows, y has " +
                                std::to_string(y.size()));
    }
    if (x.rows() == 0) throw DimensionMismatch("lasso: no rows");
    if (!(lambda >= 0.0)) throw DimensionMismatch("lasso: lambda must be >= 0");

    const auto c = center(x, y);
    const auto n = static_cast<double>(x.rows());
    const auto p = x.cols();
    const Eigen::VectorXd col_sq = c.x.colwise().squaredNorm().transpose() / n;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    if (warm_start && warm_start->size() == p) beta = *warm_start;
    for (Eigen::Index k = 0; k < p; ++k) {
        if (col_sq(k) <= 0.0) beta(k) = 0.0;
    }
    // Covariance updates: grad = X^T r / n is kept current through the Gram
    // matrix, so one coordinate step costs O(p).
    const Eigen::MatrixXd gram = c.x.transpose() * c.x / n;
    const Eigen::VectorXd xty = c.x.transpose() * c.y / n;
    Eigen::VectorXd grad = xty - gram * beta;

    const auto update = [&](Eigen::Index k) {
        const double old = beta(k);
        const double updated = soft_threshold(grad(k) + col_sq(k) * old, lambda) / col_sq(k);
        if (updated == old) return 0.0;
        grad -= gram.col(k) * (updated - old);
        beta(k) = updated;
        return std::abs(updated - old) * std::sqrt(col_sq(k));
    };
    const double inner_tol = 1e-3 * options.kkt_tolerance;
    constexpr int kMaxActiveSweeps = 50;

    LassoFit fit;
    fit.lambda = lambda;
    double kkt = std::numeric_limits<double>::infinity();
    Eigen::VectorXd r;
    int sweep = 0;
    while (sweep < options.max_sweeps) {
        double max_change = 0.0;
        for (Eigen::Index k = 0; k < p; ++k) {
            if (col_sq(k) > 0.0) max_change = std::max(max_change, update(k));
        }
        ++sweep;
        // Sweep the active set alone until it settles.
        for (int inner = 0; inner < kMaxActiveSweeps && max_change >= inner_tol &&
                            sweep < options.max_sweeps;
             ++inner) {
            max_change = 0.0;
            for (Eigen::Index k = 0; k < p; ++k) {
                if (beta(k) != 0.0) max_change = std::max(max_change, update(k));
            }
            ++sweep;
        }
        // With the support and signs fixed the optimality conditions are
        // linear: G_AA b = (X^T y / n)_A - lambda s. Solving them directly
        // finishes what coordinate steps do slowly on correlated columns.
        std::vector<Eigen::Index> active;
        for (Eigen::Index k = 0; k < p; ++k) {
            if (beta(k) != 0.0) active.push_back(k);
        }
        if (!active.empty()) {
            const auto m = static_cast<Eigen::Index>(active.size());
            Eigen::VectorXd signs(m);
            for (Eigen::Index i = 0; i < m; ++i) signs(i) = beta(active[i]) > 0 ? 1.0 : -1.0;
            const Eigen::MatrixXd g_aa = gram(active, active);
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(g_aa);
            if (qr.rank() == m) {
                const Eigen::VectorXd b = qr.solve(xty(active) - lambda * signs);
                if ((b.array() * signs.array() > 0.0).all()) {
                    for (Eigen::Index i = 0; i < m; ++i) beta(active[i]) = b(i);
                }
            }
        }
        // Exact gradient from a fresh residual, free of accumulated rounding.
        r = c.y - c.x * beta;
        grad = c.x.transpose() * r / n;
        kkt = kkt_violation(grad, beta, lambda);
        if (kkt <= options.kkt_tolerance) break;
    }
    if (kkt > options.kkt_tolerance) {
        throw NonConvergence("lasso did not converge in " + std::to_string(options.max_sweeps) +
                             " sweeps (KKT residual " + std::to_string(kkt) + ")");
    }
    fit.coefficients = beta;
    fit.intercept = c.y_mean - c.x_means.dot(beta);
    fit.sweeps = sweep;
    fit.kkt_residual = kkt;
    for (Eigen::Index k = 0; k < p; ++k) {
        if (beta(k) != 0.0) fit.selected.push_back(static_cast<std::size_t>(k));
    }
    if (lambda > 0.0) {
        const Eigen::VectorXd grad = c.x.transpose() * r / n;
        const double primal = 0.5 * r.squaredNorm() / n + lambda * beta.lpNorm<1>();
        const double scale = std::min(1.0, lambda / std::max(grad.cwiseAbs().maxCoeff(), 1e-300));
        const Eigen::VectorXd theta = scale * r / n;
        const double dual = 0.5 * c.y.squaredNorm() / n - 0.5 * n * (theta - c.y / n).squaredNorm();
        fit.duality_gap = primal - dual;
    } else {
        fit.duality_gap = std::numeric_limits<double>::quiet_NaN();
    }
    return fit;
}

std::vector<double> lasso_lambda_grid(double lambda_max, int count, double min_ratio) {
    std::vector<double> grid;
    if (count <= 0 || !(lambda_max > 0.0)) return grid;
    if (count == 1) return {lambda_max};
    const double log_hi = std::log(lambda_max);
    const double log_lo = std::log(lambda_max * min_ratio);
    for (int i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        grid.push_back(std::exp(log_hi + t * (log_lo - log_hi)));
    }
    grid.front() = lambda_max;
    return grid;
}

LassoSelection lasso_select(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            std::vector<double> grid, int folds, std::uint64_t seed,
                            const LassoOptions& options, LassoCvRule rule) {
    const auto n = x.rows();
    if (n != y.size()) throw DimensionMismatch("lasso_select: X rows vs y");
    if (folds < 2 || n < folds) {
        throw DimensionMismatch("lasso_select needs at least " + std::to_string(folds) + " rows");
    }
    if (grid.empty()) grid = lasso_lambda_grid(lasso_lambda_max(x, y));
    if (grid.empty()) grid = {0.0};  // y constant: every lambda gives beta = 0
    // Solve along a descending path so warm starts stay useful.
    std::vector<std::size_t> order(grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return grid[a] > grid[b]; });

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed, 0x1a550ULL);
    rng.shuffle(perm);
    std::vector<int> fold_of(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        fold_of[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
            static_cast<int>(i % folds);
    }

    std::vector<double> sse(grid.size(), 0.0);
    std::vector<std::vector<double>> fold_mse(grid.size(), std::vector<double>(static_cast<std::size_t>(folds)));
    for (int f = 0; f < folds; ++f) {
        std::vector<Eigen::Index> train;
        std::vector<Eigen::Index> test;
        for (Eigen::Index i = 0; i < n; ++i) {
            (fold_of[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
        }
        const Eigen::MatrixXd xtr = x(train, Eigen::all);
        const Eigen::VectorXd ytr = y(train);
        const Eigen::MatrixXd xte = x(test, Eigen::all);
        const Eigen::VectorXd yte = y(test);
        Eigen::VectorXd warm = Eigen::VectorXd::Zero(x.cols());
        for (auto g : order) {
            const auto fit = lasso_fit(xtr, ytr, grid[g], options, &warm);
            warm = fit.coefficients;
            const double e = (yte - fit.predict(xte)).squaredNorm();
            sse[g] += e;
            fold_mse[g][static_cast<std::size_t>(f)] = e / static_cast<double>(test.size());
        }
    }

    LassoSelection out;
    out.grid = grid;
    out.cv_mse.resize(grid.size());
    out.cv_se.resize(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        out.cv_mse[g] = sse[g] / static_cast<double>(n);
        const auto& m = fold_mse[g];
        const double mean = std::accumulate(m.begin(), m.end(), 0.0) / folds;
        double ss = 0.0;
        for (double v : m) ss += (v - mean) * (v - mean);
        out.cv_se[g] = std::sqrt(ss / (folds - 1)) / std::sqrt(static_cast<double>(folds));
    }
    std::size_t best = order.front();
    for (auto g : order) {
        // Strict improvement only, so ties keep the larger lambda.
        if (out.cv_mse[g] < out.cv_mse[best]) best = g;
    }
    if (rule == LassoCvRule::OneStandardError) {
        const double limit = out.cv_mse[best] + out.cv_se[best];
        for (auto g : order) {
            if (out.cv_mse[g] <= limit) {
                best = g;
                break;
            }
        }
    }
    out.lambda = grid[best];
    out.fit = lasso_fit(x, y, out.lambda, options);
    return out;
}

}  // namespace actirehab
