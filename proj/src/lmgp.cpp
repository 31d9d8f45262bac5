#include "actirehab/lmgp.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include "actirehab/error.hpp"
#include "actirehab/optimize.hpp"
#include "actirehab/random.hpp"

namespace actirehab {

double se_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const KernelParams& theta) {
    if (a.size() != b.size() || a.size() != theta.dims()) {
        throw DimensionMismatch("se_kernel: inputs of size " + std::to_string(a.size()) + " and " +
                                std::to_string(b.size()) + " with " +
                                std::to_string(theta.dims()) + " weights");
    }
    const double d = (theta.w.array() * (a - b).array().square()).sum();
    return theta.v0 * std::exp(-0.5 * d);
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& phi, const KernelParams& theta) {
    if (phi.cols() != theta.dims()) throw DimensionMismatch("kernel_matrix: phi width");
    const auto m = phi.rows();
    Eigen::MatrixXd c(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        c(i, i) = theta.v0;
        for (Eigen::Index j = 0; j < i; ++j) {
            c(i, j) = c(j, i) = se_kernel(phi.row(i).transpose(), phi.row(j).transpose(), theta);
        }
    }
    return c;
}

Eigen::VectorXd kernel_vector(const Eigen::MatrixXd& phi, const Eigen::VectorXd& query,
                              const KernelParams& theta) {
    Eigen::VectorXd k(phi.rows());
    for (Eigen::Index i = 0; i < phi.rows(); ++i) {
        k(i) = se_kernel(phi.row(i).transpose(), query, theta);
    }
    return k;
}

Eigen::VectorXd to_log_params(const KernelParams& theta) {
    Eigen::VectorXd p(theta.dims() + 2);
    p(0) = std::log(theta.v0);
    for (Eigen::Index q = 0; q < theta.dims(); ++q) p(q + 1) = std::log(theta.w(q));
    p(theta.dims() + 1) = std::log(theta.sigma2);
    return p;
}

KernelParams from_log_params(const Eigen::VectorXd& log_params) {
    const auto q = log_params.size() - 2;
    KernelParams t;
    t.v0 = std::exp(log_params(0));
    t.w = log_params.segment(1, q).array().exp();
    t.sigma2 = std::exp(log_params(q + 1));
    return t;
}

Eigen::LLT<Eigen::MatrixXd> factorize_covariance(const Eigen::MatrixXd& c, double sigma2,
                                                 double* jitter_used) {
    const auto m = c.rows();
    Eigen::MatrixXd k = c;
    k.diagonal().array() += sigma2;
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() == Eigen::Success) {
        if (jitter_used) *jitter_used = 0.0;
        return llt;
    }
    const double base = m > 0 ? c.trace() / static_cast<double>(m) : 0.0;
    for (double factor = 1e-10; factor <= 1e-6 * (1 + 1e-9); factor *= 10.0) {
        const double jitter = factor * base;
        Eigen::MatrixXd kj = k;
        kj.diagonal().array() += jitter;
        llt.compute(kj);
        if (llt.info() == Eigen::Success) {
            if (jitter_used) *jitter_used = jitter;
            return llt;
        }
    }
    throw NonPositiveDefinite("C + sigma2 I is not positive definite after jitter up to 1e-6 * " +
                              std::to_string(base));
}

double lmgp_log_marginal(const std::vector<SubjectBlock>& blocks, const KernelParams& theta,
                         Eigen::VectorXd* grad_log) {
    const auto q = theta.dims();
    if (grad_log) grad_log->setZero(q + 2);
    double total = 0.0;
    for (const auto& b : blocks) {
        const auto m = b.residuals.size();
        if (m == 0) continue;
        if (b.phi.rows() != m || b.phi.cols() != q) {
            throw DimensionMismatch("block " + b.subject_id + " has inconsistent shapes");
        }
        const Eigen::MatrixXd c = kernel_matrix(b.phi, theta);
        const auto llt = factorize_covariance(c, theta.sigma2);
        const Eigen::VectorXd alpha = llt.solve(b.residuals);
        const double log_det =
            2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        total += -0.5 * b.residuals.dot(alpha) - 0.5 * log_det -
                 0.5 * static_cast<double>(m) * std::log(2.0 * std::numbers::pi);

        if (grad_log) {
            const Eigen::MatrixXd k_inv = llt.solve(Eigen::MatrixXd::Identity(m, m));
            const Eigen::MatrixXd a = alpha * alpha.transpose() - k_inv;
            (*grad_log)(0) += 0.5 * (a.array() * c.array()).sum();
            for (Eigen::Index d = 0; d < q; ++d) {
                double acc = 0.0;
                for (Eigen::Index i = 0; i < m; ++i) {
                    for (Eigen::Index j = 0; j < m; ++j) {
                        const double diff = b.phi(i, d) - b.phi(j, d);
                        acc += a(i, j) * c(i, j) * (-0.5 * theta.w(d) * diff * diff);
                    }
                }
                (*grad_log)(d + 1) += 0.5 * acc;
            }
            (*grad_log)(q + 1) += 0.5 * theta.sigma2 * a.trace();
        }
    }
    return total;
}

KernelParams fit_kernel_params(const std::vector<SubjectBlock>& blocks, Eigen::Index q,
                               const LmgpOptions& options, double* log_marginal, int* iterations,
                               bool* converged) {
    // Residual variance sets the scale of the starting points.
    double sum = 0.0;
    double sum_sq = 0.0;
    double count = 0.0;
    for (const auto& b : blocks) {
        sum += b.residuals.sum();
        sum_sq += b.residuals.squaredNorm();
        count += static_cast<double>(b.residuals.size());
    }
    if (count == 0.0) throw OptimFailure("no residuals to fit the random effects on");
    const double mean = sum / count;
    const double var = std::max(sum_sq / count - mean * mean, 1e-8);

    const auto dim = q + 2;
    Eigen::VectorXd base(dim);
    base(0) = std::log(0.5 * var);
    base.segment(1, q).setConstant(std::log(1.0 / static_cast<double>(std::max<Eigen::Index>(q, 1))));
    base(q + 1) = std::log(0.5 * var);

    BfgsOptions bfgs;
    bfgs.max_iterations = options.max_iterations;
    bfgs.gradient_tolerance = options.gradient_tolerance;
    bfgs.lower = Eigen::VectorXd::Constant(dim, options.log_lower);
    bfgs.upper = Eigen::VectorXd::Constant(dim, options.log_upper);

    const Objective objective = [&](const Eigen::VectorXd& p, Eigen::VectorXd* grad) {
        try {
            const double ll = lmgp_log_marginal(blocks, from_log_params(p), grad);
            if (grad) *grad = -*grad;
            return -ll;
        } catch (const NonPositiveDefinite&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    Rng rng(options.seed, 0x6a7ULL);
    bool have_best = false;
    BfgsResult best;
    for (int s = 0; s < std::max(1, options.starts); ++s) {
        Eigen::VectorXd start = base;
        if (s > 0) {
            for (Eigen::Index i = 0; i < dim; ++i) start(i) += rng.normal();
        }
        start = start.cwiseMax(bfgs.lower).cwiseMin(bfgs.upper);
        BfgsResult r;
        try {
            r = minimize_bfgs(objective, start, bfgs);
        } catch (const OptimFailure&) {
            continue;
        }
        if (!have_best || r.value < best.value) {
            best = r;
            have_best = true;
        }
    }
    if (!have_best) throw OptimFailure("marginal likelihood was not finite at any start");
    if (log_marginal) *log_marginal = -best.value;
    if (iterations) *iterations = best.iterations;
    if (converged) *converged = best.converged;
    return from_log_params(best.x);
}

LmgpModel lmgp_fit(const LmgpTrainingData& data, const LmgpOptions& options) {
    const auto n = data.y.size();
    if (data.x_fixed.rows() != n || data.phi.rows() != n ||
        static_cast<Eigen::Index>(data.subject_ids.size()) != n ||
        static_cast<Eigen::Index>(data.weeks.size()) != n) {
        throw DimensionMismatch("lmgp_fit: row counts disagree");
    }
    LmgpModel model;
    model.fixed = ols_fit(data.x_fixed, data.y, data.fixed_names);
    model.random_features = data.random_names;
    const Eigen::VectorXd residuals = data.y - model.fixed.predict(data.x_fixed);

    // Blocks in order of first appearance; visits within a block by week.
    std::map<std::string, std::size_t> index;
    std::vector<std::vector<Eigen::Index>> rows_of;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& sid = data.subject_ids[static_cast<std::size_t>(i)];
        auto [it, inserted] = index.emplace(sid, rows_of.size());
        if (inserted) {
            rows_of.emplace_back();
            model.blocks.push_back(SubjectBlock{sid, {}, {}, {}});
        }
        rows_of[it->second].push_back(i);
    }
    for (std::size_t b = 0; b < rows_of.size(); ++b) {
        auto& rows = rows_of[b];
        std::stable_sort(rows.begin(), rows.end(), [&](Eigen::Index a, Eigen::Index c) {
            return data.weeks[static_cast<std::size_t>(a)] < data.weeks[static_cast<std::size_t>(c)];
        });
        auto& block = model.blocks[b];
        block.phi = data.phi(rows, Eigen::all);
        block.residuals = residuals(rows);
        for (auto r : rows) block.weeks.push_back(data.weeks[static_cast<std::size_t>(r)]);
    }

    model.theta = fit_kernel_params(model.blocks, data.phi.cols(), options, &model.log_marginal,
                                    &model.optimizer_iterations, &model.converged);
    return model;
}

GpPrediction lmgp_predict(const LmgpModel& model, const SubjectContext& context,
                          const Eigen::VectorXd& phi_new, const Eigen::VectorXd& x_new,
                          bool add_noise) {
    const auto& theta = model.theta;
    if (phi_new.size() != theta.dims()) {
        throw DimensionMismatch("lmgp_predict: phi has " + std::to_string(phi_new.size()) +
                                " entries, model expects " + std::to_string(theta.dims()));
    }
    if (context.phi.rows() != context.residuals.size() ||
        (context.phi.rows() > 0 && context.phi.cols() != theta.dims())) {
        throw DimensionMismatch("lmgp_predict: context shapes disagree");
    }
    GpPrediction out;
    out.fixed = model.fixed.predict(x_new);
    double var = theta.v0;
    if (context.residuals.size() > 0) {
        const Eigen::MatrixXd c = kernel_matrix(context.phi, theta);
        const auto llt = factorize_covariance(c, theta.sigma2);
        const Eigen::VectorXd k_star = kernel_vector(context.phi, phi_new, theta);
        out.random_effect = k_star.dot(llt.solve(context.residuals));
        var = std::max(0.0, theta.v0 - k_star.dot(llt.solve(k_star)));
    }
    out.mean = out.fixed + out.random_effect;
    out.variance = var + (add_noise ? theta.sigma2 : 0.0);
    const double half = 1.96 * std::sqrt(out.variance);
    out.lo95 = out.mean - half;
    out.hi95 = out.mean + half;
    return out;
}

FittedRandomEffects lmgp_fitted(const SubjectBlock& block, const KernelParams& theta) {
    const Eigen::MatrixXd c = kernel_matrix(block.phi, theta);
    const auto llt = factorize_covariance(c, theta.sigma2);
    FittedRandomEffects out;
    out.mean = c * llt.solve(block.residuals);
    const Eigen::MatrixXd cov = theta.sigma2 * llt.solve(c);
    out.variance = cov.diagonal();
    return out;
}

}  // namespace actirehab
