#include "actirehab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "actirehab/error.hpp"
#include "actirehab/random.hpp"

namespace actirehab {

namespace {

std::string subject_name(char prefix, int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%02d", prefix, i + 1);
    return buf;
}

double clamp_score(double s) { return std::clamp(std::round(s), kMinScore, kMaxScore); }

// Rest/bout switching with an oscillation inside bouts; values >= 0.
std::vector<double> shared_activity(int seconds, double osc_hz, Rng& rng) {
    std::vector<double> out(static_cast<std::size_t>(seconds));
    bool active = rng.bernoulli(0.5);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (int t = 0; t < seconds; ++t) {
        if (active ? rng.bernoulli(0.08) : rng.bernoulli(0.06)) active = !active;
        const double level = active ? 1.0 : 0.1;
        const double osc = 1.0 + 0.8 * std::sin(2.0 * std::numbers::pi * osc_hz * t + phase);
        out[static_cast<std::size_t>(t)] = level * osc;
    }
    return out;
}

}  // namespace

void SynthConfig::validate() const {
    if (n_acute < 0 || n_chronic < 0) throw InvariantViolation("subject counts must be >= 0");
    if (first_week < kFirstVisitWeek || last_week > kLastVisitWeek || first_week > last_week) {
        throw InvariantViolation("weeks must lie in [2, 8]");
    }
    if (seconds_per_visit <= 0 || seconds_per_visit % 128 != 0) {
        throw InvariantViolation("seconds_per_visit must be a positive multiple of 128");
    }
    if (!(sample_rate_hz > 0.0)) throw InvariantViolation("sample_rate_hz must be > 0");
    for (double a : {asymmetry_at_min, asymmetry_at_max}) {
        if (!(a > -1.0 && a < 1.0)) throw InvariantViolation("asymmetry targets must lie in (-1, 1)");
    }
}

double target_pnp2(const SynthConfig& config, double score) {
    const double u = (std::clamp(score, kMinScore, kMaxScore) - kMinScore) / (kMaxScore - kMinScore);
    return config.asymmetry_at_min + u * (config.asymmetry_at_max - config.asymmetry_at_min);
}

double amplitude_ratio(double pnp2) { return (1.0 - pnp2) / (1.0 + pnp2); }

TriaxialRecording recording_from_vm(const std::vector<double>& vm, double sample_rate_hz) {
    TriaxialRecording rec;
    rec.sample_rate_hz = sample_rate_hz;
    const auto per_second = static_cast<int>(std::lround(sample_rate_hz));
    if (per_second < 1 || std::abs(per_second - sample_rate_hz) > 1e-12) {
        throw InvariantViolation("synthetic sample rate must be a whole number of Hz");
    }
    rec.samples.reserve(vm.size() * static_cast<std::size_t>(per_second));
    std::size_t k = 0;
    for (std::size_t s = 0; s < vm.size(); ++s) {
        for (int i = 0; i < per_second; ++i, ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            rec.samples.push_back({static_cast<double>(s) + i / sample_rate_hz, 0.0, 0.0,
                                   sign * (1.0 + vm[s])});
        }
    }
    return rec;
}

Cohort synthesize_cohort(const SynthConfig& config) {
    config.validate();
    Cohort cohort;
    const auto add_group = [&](Group group, int count, const TrajectoryParams& traj, char prefix,
                               std::uint64_t stream) {
        for (int i = 0; i < count; ++i) {
            Rng rng(config.seed, stream * 1000 + static_cast<std::uint64_t>(i));
            SubjectMeta meta;
            meta.subject_id = subject_name(prefix, i);
            meta.group = group;
            meta.paralysed_side = rng.bernoulli(0.5) ? Side::Left : Side::Right;
            meta.ini = clamp_score(rng.uniform(traj.ini_lo, traj.ini_hi));
            const double drift = rng.normal(traj.drift_mean, traj.drift_sd);
            const double activity = rng.uniform(0.15, 0.4);
            for (int week = config.first_week; week <= config.last_week; ++week) {
                VisitRecord visit;
                visit.subject_id = meta.subject_id;
                visit.week = week;
                const double score =
                    clamp_score(meta.ini + drift * (week - 1) + rng.normal(0.0, traj.visit_sd));
                visit.cahai = score;
                const double rho = amplitude_ratio(target_pnp2(config, score));
                const auto shared = shared_activity(config.seconds_per_visit, config.oscillation_hz, rng);
                std::vector<double> vp(shared.size());
                std::vector<double> vnp(shared.size());
                for (std::size_t t = 0; t < shared.size(); ++t) {
                    vnp[t] = activity * (shared[t] + config.noise_level * std::abs(rng.normal()));
                    vp[t] = rho * activity * (shared[t] + config.noise_level * std::abs(rng.normal()));
                }
                visit.paralysed = recording_from_vm(vp, config.sample_rate_hz);
                visit.non_paralysed = recording_from_vm(vnp, config.sample_rate_hz);
                cohort.visits.push_back(std::move(visit));
            }
            cohort.subjects.push_back(meta);
        }
    };
    add_group(Group::Acute, config.n_acute, config.acute, 'A', 1);
    add_group(Group::Chronic, config.n_chronic, config.chronic, 'C', 2);
    return cohort;
}

std::filesystem::path generate_cohort(const SynthConfig& config, const std::filesystem::path& out_dir) {
    return write_cohort(out_dir, synthesize_cohort(config));
}

LmgpSample generate_lmgp_data(const Eigen::VectorXd& beta, const KernelParams& theta,
                              const LmgpDesign& design, std::uint64_t seed) {
    const auto n = design.x.rows();
    if (beta.size() != design.x.cols() + 1) throw DimensionMismatch("beta must be [intercept, P]");
    if (design.phi.rows() != n || static_cast<Eigen::Index>(design.subject_ids.size()) != n) {
        throw DimensionMismatch("design rows disagree");
    }
    if (design.phi.cols() != theta.dims()) throw DimensionMismatch("phi columns vs kernel dims");
    if (theta.v0 < 0.0 || theta.sigma2 < 0.0) throw InvariantViolation("variances must be >= 0");

    Rng rng(seed, 0x9e11);
    LmgpSample out;
    out.g = Eigen::VectorXd::Zero(n);
    out.noise = Eigen::VectorXd::Zero(n);

    if (theta.v0 > 0.0) {
        Eigen::Index start = 0;
        while (start < n) {
            Eigen::Index end = start + 1;
            while (end < n && design.subject_ids[static_cast<std::size_t>(end)] ==
                                  design.subject_ids[static_cast<std::size_t>(start)]) {
                ++end;
            }
            const auto len = end - start;
            const Eigen::MatrixXd k = kernel_matrix(design.phi.middleRows(start, len), theta);
            const auto llt = factorize_covariance(k, 0.0);
            Eigen::VectorXd z(len);
            for (Eigen::Index i = 0; i < len; ++i) z(i) = rng.normal();
            out.g.segment(start, len) = llt.matrixL() * z;
            start = end;
        }
    }
    if (theta.sigma2 > 0.0) {
        const double sd = std::sqrt(theta.sigma2);
        for (Eigen::Index i = 0; i < n; ++i) out.noise(i) = sd * rng.normal();
    }
    out.y = (design.x * beta.tail(beta.size() - 1)).array() + beta(0);
    out.y += out.g + out.noise;
    return out;
}

LmgpDesign random_lmgp_design(int subjects, int visits, int p, int q, std::uint64_t seed) {
    Rng rng(seed, 0xde5);
    const auto n = static_cast<Eigen::Index>(subjects) * visits;
    LmgpDesign d;
    d.x.resize(n, p);
    d.phi.resize(n, q);
    Eigen::Index r = 0;
    for (int s = 0; s < subjects; ++s) {
        for (int v = 0; v < visits; ++v, ++r) {
            for (int c = 0; c < p; ++c) d.x(r, c) = rng.normal();
            for (int c = 0; c < q; ++c) d.phi(r, c) = rng.normal();
            d.subject_ids.push_back(subject_name('S', s));
            d.weeks.push_back(kFirstVisitWeek + v);
        }
    }
    return d;
}

LmgpCohortConfig make_lmgp_cohort_config(std::uint64_t seed) {
    LmgpCohortConfig c;
    c.seed = seed;
    c.acute_theta.v0 = 25.0;
    c.acute_theta.w = Eigen::VectorXd::Constant(4, 0.5);
    c.acute_theta.sigma2 = 4.0;
    c.chronic_theta.v0 = 9.0;
    c.chronic_theta.w = Eigen::VectorXd::Constant(4, 0.5);
    c.chronic_theta.sigma2 = 1.0;
    return c;
}

FeatureTable synthesize_lmgp_cohort(const LmgpCohortConfig& config) {
    FeatureTable table;
    table.names = {"x1", "x2", "x3", "ini"};
    std::vector<Eigen::VectorXd> rows;
    Eigen::VectorXd beta(5);
    beta << 30.0, 4.0, -2.0, 1.0, 0.3;

    const auto add_group = [&](Group group, int count, bool drifting, const KernelParams& theta,
                               char prefix, std::uint64_t stream) {
        Rng rng(config.seed, stream);
        LmgpDesign design;
        const int visits = config.last_week - config.first_week + 1;
        const auto n = static_cast<Eigen::Index>(count) * visits;
        design.x.resize(n, 4);
        Eigen::Index r = 0;
        for (int s = 0; s < count; ++s) {
            const double ini = rng.uniform(drifting ? -1.5 : -1.0, drifting ? 0.5 : 1.0);
            const Eigen::Vector3d base(rng.normal(), rng.normal(), rng.normal());
            const double slope = drifting ? rng.normal(0.5, 0.15) : 0.0;
            for (int week = config.first_week; week <= config.last_week; ++week, ++r) {
                const double t = week - config.first_week;
                design.x(r, 0) = base(0) + slope * t + rng.normal(0.0, 0.2);
                design.x(r, 1) = base(1) + 0.5 * slope * t + rng.normal(0.0, 0.2);
                design.x(r, 2) = base(2) + rng.normal(0.0, 0.2);
                design.x(r, 3) = ini;
                design.subject_ids.push_back(subject_name(prefix, s));
                design.weeks.push_back(week);
            }
        }
        design.phi = design.x;
        const auto sample = generate_lmgp_data(beta, theta, design, rng.next());
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::VectorXd row = design.x.row(i).transpose();
            row(3) = std::clamp(std::round(35.0 + 8.0 * row(3)), kMinScore, kMaxScore);
            rows.push_back(row);
            table.subject_ids.push_back(design.subject_ids[static_cast<std::size_t>(i)]);
            table.groups.push_back(group);
            table.weeks.push_back(design.weeks[static_cast<std::size_t>(i)]);
            table.cahai.push_back(std::clamp(sample.y(i), kMinScore, kMaxScore));
        }
    };
    add_group(Group::Acute, config.n_acute, true, config.acute_theta, 'A', 0x1a);
    add_group(Group::Chronic, config.n_chronic, false, config.chronic_theta, 'C', 0x1c);

    table.values.resize(static_cast<Eigen::Index>(rows.size()), 4);
    for (std::size_t i = 0; i < rows.size(); ++i) table.values.row(static_cast<Eigen::Index>(i)) = rows[i];
    return table;
}

}  // namespace actirehab
