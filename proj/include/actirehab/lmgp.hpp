#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "actirehab/linear_model.hpp"

namespace actirehab {

// Squared-exponential kernel parameters plus the observation noise.
struct KernelParams {
    double v0 = 1.0;    // signal variance
    Eigen::VectorXd w;  // per-dimension inverse squared length-scales, >= 0
    double sigma2 = 1.0;

    Eigen::Index dims() const { return w.size(); }
};

// v0 * exp(-1/2 sum_q w_q (a_q - b_q)^2). DimensionMismatch on size errors.
double se_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const KernelParams& theta);
// Gram matrix over the rows of phi.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& phi, const KernelParams& theta);
// Cross-covariances between the rows of phi and one query point.
Eigen::VectorXd kernel_vector(const Eigen::MatrixXd& phi, const Eigen::VectorXd& query,
                              const KernelParams& theta);

// Packing used by the optimiser: [log v0, log w_1..w_Q, log sigma2].
Eigen::VectorXd to_log_params(const KernelParams& theta);
KernelParams from_log_params(const Eigen::VectorXd& log_params);

// Cholesky of C + sigma2 I. On failure, retries with a diagonal jitter of
// 1e-10 * trace(C)/J growing x10 up to 1e-6 * trace(C)/J, then throws
// NonPositiveDefinite.
Eigen::LLT<Eigen::MatrixXd> factorize_covariance(const Eigen::MatrixXd& c, double sigma2,
                                                 double* jitter_used = nullptr);

// One subject's visits in week order: random-effects inputs and residuals
// from the fixed-effects fit.
struct SubjectBlock {
    std::string subject_id;
    std::vector<int> weeks;
    Eigen::MatrixXd phi;  // visits x Q
    Eigen::VectorXd residuals;
};

// Sum over subjects of the Gaussian log marginal likelihood of the residual
// blocks. If `grad_log` is given it receives the gradient with respect to
// to_log_params(theta).
double lmgp_log_marginal(const std::vector<SubjectBlock>& blocks, const KernelParams& theta,
                         Eigen::VectorXd* grad_log = nullptr);

struct LmgpOptions {
    int starts = 5;
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;
    std::uint64_t seed = 0;
    double log_lower = -25.0;
    double log_upper = 15.0;
};

struct LmgpTrainingData {
    Eigen::MatrixXd x_fixed;  // rows x P
    Eigen::MatrixXd phi;      // rows x Q
    Eigen::VectorXd y;
    std::vector<std::string> subject_ids;
    std::vector<int> weeks;
    std::vector<std::string> fixed_names;
    std::vector<std::string> random_names;
};

struct LmgpModel {
    LinearModel fixed;
    std::vector<std::string> random_features;
    KernelParams theta;
    std::vector<SubjectBlock> blocks;
    double log_marginal = 0.0;
    int optimizer_iterations = 0;
    bool converged = false;
};

// OLS for the fixed part, residuals per subject, then empirical-Bayes
// (multi-start BFGS on log-parameters) for the kernel and noise.
LmgpModel lmgp_fit(const LmgpTrainingData& data, const LmgpOptions& options = {});

// The same estimation step when residual blocks are already available.
KernelParams fit_kernel_params(const std::vector<SubjectBlock>& blocks, Eigen::Index q,
                               const LmgpOptions& options, double* log_marginal = nullptr,
                               int* iterations = nullptr, bool* converged = nullptr);

// Earlier visits of the subject being predicted.
struct SubjectContext {
    Eigen::MatrixXd phi;  // 0 x Q allowed
    Eigen::VectorXd residuals;
};

struct GpPrediction {
    double fixed = 0.0;           // x^T beta
    double random_effect = 0.0;   // posterior mean of g at the query
    double mean = 0.0;            // fixed + random_effect
    double variance = 0.0;        // posterior variance of g (+ sigma2 if requested)
    double lo95 = 0.0;
    double hi95 = 0.0;
};

GpPrediction lmgp_predict(const LmgpModel& model, const SubjectContext& context,
                          const Eigen::VectorXd& phi_new, const Eigen::VectorXd& x_new,
                          bool add_noise = false);

// In-sample smoothing of one block: g_hat = C (C + s2 I)^-1 r and the
// diagonal of s2 (C + s2 I)^-1 C.
struct FittedRandomEffects {
    Eigen::VectorXd mean;
    Eigen::VectorXd variance;
};
FittedRandomEffects lmgp_fitted(const SubjectBlock& block, const KernelParams& theta);

}  // namespace actirehab
