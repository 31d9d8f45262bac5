#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "actirehab/features.hpp"
#include "actirehab/ingest.hpp"
#include "actirehab/lmgp.hpp"

namespace actirehab {

struct TrajectoryParams {
    double ini_lo = 10.0;  // week-1 score ~ U(ini_lo, ini_hi)
    double ini_hi = 35.0;
    double drift_mean = 3.5;  // score change per week
    double drift_sd = 1.0;
    double visit_sd = 1.5;    // week-to-week noise around the trend
};

struct SynthConfig {
    std::uint64_t seed = 1;
    int n_acute = 26;
    int n_chronic = 33;
    int first_week = kFirstVisitWeek;
    int last_week = kLastVisitWeek;
    int seconds_per_visit = 3 * 128;
    double sample_rate_hz = 2.0;
    TrajectoryParams acute{10.0, 35.0, 3.5, 1.0, 1.5};
    TrajectoryParams chronic{20.0, 50.0, 0.0, 0.25, 1.0};
    // Target pnp2 is linear in the score: asymmetry_at_min at score 7,
    // asymmetry_at_max at score 63.
    double asymmetry_at_min = 0.8;
    double asymmetry_at_max = 0.0;
    // Centre of the activity oscillation in cycles per second (inside the
    // scale-2 band at 1 Hz).
    double oscillation_hz = 0.1875;
    double noise_level = 0.05;  // relative to the bout amplitude

    void validate() const;  // InvariantViolation
};

double target_pnp2(const SynthConfig& config, double score);

// Ratio SAD_p / SAD_np that realises a given pnp2.
double amplitude_ratio(double pnp2);

// One wrist's second-wise VM trace and the raw stream that reproduces it.
TriaxialRecording recording_from_vm(const std::vector<double>& vm, double sample_rate_hz);

// In-memory cohort; subject ids are A01.., C01...
Cohort synthesize_cohort(const SynthConfig& config);

// Writes manifest.csv plus raw/ files; returns the manifest path. IoError on
// filesystem failures.
std::filesystem::path generate_cohort(const SynthConfig& config, const std::filesystem::path& out_dir);

// Inputs of a mixed-effects design; rows grouped by subject.
struct LmgpDesign {
    Eigen::MatrixXd x;    // rows x P (no intercept column)
    Eigen::MatrixXd phi;  // rows x Q
    std::vector<std::string> subject_ids;
    std::vector<int> weeks;
};

struct LmgpSample {
    Eigen::VectorXd y;
    Eigen::VectorXd g;      // true random effects
    Eigen::VectorXd noise;
};

// y = [1 x] beta + g + eps with g ~ GP(0, K_theta) drawn independently per
// subject and eps ~ N(0, sigma2). beta holds the intercept first.
LmgpSample generate_lmgp_data(const Eigen::VectorXd& beta, const KernelParams& theta,
                              const LmgpDesign& design, std::uint64_t seed);

// Standard-normal x and phi for `subjects` subjects with `visits` visits each
// (weeks 2, 3, ...).
LmgpDesign random_lmgp_design(int subjects, int visits, int p, int q, std::uint64_t seed);

// Tabular cohort shaped like the clinical one: acute subjects whose features
// drift with the week and carry a larger random effect, chronic subjects with
// flat features and a smaller one. Columns x1..x3 and ini; cahai = y.
struct LmgpCohortConfig {
    std::uint64_t seed = 1;
    int n_acute = 26;
    int n_chronic = 33;
    int first_week = kFirstVisitWeek;
    int last_week = kLastVisitWeek;
    KernelParams acute_theta;    // defaults filled by make_lmgp_cohort_config()
    KernelParams chronic_theta;
};
LmgpCohortConfig make_lmgp_cohort_config(std::uint64_t seed);
FeatureTable synthesize_lmgp_cohort(const LmgpCohortConfig& config);

}  // namespace actirehab
