#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>

#include "actirehab/error.hpp"
#include "actirehab/features.hpp"
#include "actirehab/signal.hpp"
#include "actirehab/synth.hpp"
#include "actirehab/wavelet.hpp"
#include "test_util.hpp"

using namespace actirehab;
namespace fs = std::filesystem;

namespace {

std::map<std::string, std::string> dir_contents(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = testutil::read_file(e.path());
    }
    return out;
}

SynthConfig small_config(std::uint64_t seed) {
    SynthConfig c;
    c.seed = seed;
    c.n_acute = 3;
    c.n_chronic = 3;
    return c;
}

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j);
        i = j + 1;
    }
    return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const auto ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST(SynthConfigCheck, Validate) {
    SynthConfig c;
    c.validate();
    c.n_acute = -1;
    EXPECT_THROW(c.validate(), InvariantViolation);
    c = SynthConfig{};
    c.seconds_per_visit = 100;
    EXPECT_THROW(c.validate(), InvariantViolation);
    c = SynthConfig{};
    c.asymmetry_at_min = 1.0;
    EXPECT_THROW(c.validate(), InvariantViolation);
    c = SynthConfig{};
    c.first_week = 1;
    EXPECT_THROW(c.validate(), InvariantViolation);
}

TEST(SynthHelpers, TargetAndRatio) {
    SynthConfig c;
    EXPECT_DOUBLE_EQ(target_pnp2(c, 7.0), 0.8);
    EXPECT_DOUBLE_EQ(target_pnp2(c, 63.0), 0.0);
    EXPECT_NEAR(target_pnp2(c, 35.0), 0.4, 1e-15);
    for (double tau : {-0.5, 0.0, 0.3, 0.8}) {
        const double rho = amplitude_ratio(tau);
        EXPECT_NEAR((1 - rho) / (1 + rho), tau, 1e-15);
    }
}

TEST(SynthHelpers, RecordingReproducesVm) {
    const std::vector<double> vm{0.0, 0.5, 0.2, 1.3};
    const auto rec = recording_from_vm(vm, 2.0);
    validate_recording(rec);
    const auto back = secondwise_vm(rec).values;
    ASSERT_EQ(back.size(), vm.size());
    for (std::size_t i = 0; i < vm.size(); ++i) EXPECT_NEAR(back[i], vm[i], 1e-12);
}

TEST(SynthCohort, ShapeAndIds) {
    const auto c = synthesize_cohort(small_config(1));
    ASSERT_EQ(c.subjects.size(), 6u);
    EXPECT_EQ(c.subjects[0].subject_id, "A01");
    EXPECT_EQ(c.subjects[3].subject_id, "C01");
    EXPECT_EQ(c.visits.size(), 6u * 7u);
    for (const auto& v : c.visits) {
        ASSERT_TRUE(v.cahai.has_value());
        EXPECT_GE(*v.cahai, kMinScore);
        EXPECT_LE(*v.cahai, kMaxScore);
        EXPECT_EQ(*v.cahai, std::round(*v.cahai));
        EXPECT_EQ(secondwise_vm(v.paralysed).values.size(), 384u);
    }
}

TEST(SynthCohort, SameSeedSameBytes) {
    testutil::TempDir a("synth_a"), b("synth_b"), c("synth_c");
    generate_cohort(small_config(5), a.path());
    generate_cohort(small_config(5), b.path());
    generate_cohort(small_config(6), c.path());
    const auto da = dir_contents(a.path());
    EXPECT_GT(da.size(), 1u);
    EXPECT_EQ(da, dir_contents(b.path()));
    EXPECT_NE(da, dir_contents(c.path()));
}

TEST(SynthCohort, WrittenCohortLoadsBack) {
    testutil::TempDir dir("synth_load");
    const auto cfg = small_config(8);
    const auto manifest = generate_cohort(cfg, dir.path());
    const auto loaded = load_cohort(manifest);
    const auto direct = synthesize_cohort(cfg);
    ASSERT_EQ(loaded.visits.size(), direct.visits.size());
    EXPECT_EQ(loaded.subjects, direct.subjects);
    const auto va = secondwise_vm(loaded.visits[4].paralysed).values;
    const auto vb = secondwise_vm(direct.visits[4].paralysed).values;
    ASSERT_EQ(va.size(), vb.size());
    for (std::size_t i = 0; i < va.size(); ++i) EXPECT_NEAR(va[i], vb[i], 1e-9);
}

TEST(SynthCohort, ConstantAsymmetryIsRecovered) {
    const auto bank = make_filter_bank(WaveletFamily::Daubechies4);
    for (double tau : {0.0, 0.5}) {
        auto cfg = small_config(3);
        cfg.asymmetry_at_min = tau;
        cfg.asymmetry_at_max = tau;
        const auto table = extract_features(synthesize_cohort(cfg), bank).model;
        for (const char* name : {"pnp2_2", "pnp2_3", "pnp2_4"}) {
            const auto col = static_cast<Eigen::Index>(table.column(name));
            for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
                EXPECT_NEAR(table.values(r, col), tau, 0.1) << name << " row " << r;
            }
        }
    }
}

TEST(SynthCohort, AsymmetryFallsWithScore) {
    auto cfg = small_config(4);
    cfg.n_acute = 8;
    cfg.n_chronic = 8;
    const auto bank = make_filter_bank(WaveletFamily::Daubechies4);
    const auto table = extract_features(synthesize_cohort(cfg), bank).model;
    const auto col = static_cast<Eigen::Index>(table.column("pnp2_2"));
    std::vector<double> pnp2, score;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        pnp2.push_back(table.values(static_cast<Eigen::Index>(r), col));
        score.push_back(*table.cahai[r]);
    }
    EXPECT_GT(-spearman(pnp2, score), 0.8);
}

TEST(SynthCohort, AcuteImprovesChronicFlat) {
    SynthConfig cfg;
    cfg.n_acute = 20;
    cfg.n_chronic = 20;
    cfg.seconds_per_visit = 128;
    const auto c = synthesize_cohort(cfg);
    std::map<std::string, std::vector<double>> by;
    for (const auto& v : c.visits) by[v.subject_id].push_back(*v.cahai);
    double acute = 0, chronic = 0;
    for (const auto& [sid, s] : by) (sid[0] == 'A' ? acute : chronic) += s.back() - s.front();
    EXPECT_GT(acute / 20.0, 10.0);
    EXPECT_LT(std::abs(chronic / 20.0), 3.0);
}

TEST(LmgpData, ZeroVarianceComponents) {
    const auto design = random_lmgp_design(4, 5, 2, 1, 1);
    const Eigen::Vector3d beta(1.0, 2.0, -1.0);
    KernelParams t;
    t.v0 = 0.0;
    t.w = Eigen::VectorXd::Ones(1);
    t.sigma2 = 0.0;
    const auto s = generate_lmgp_data(beta, t, design, 3);
    EXPECT_EQ(s.g.norm(), 0.0);
    EXPECT_EQ(s.noise.norm(), 0.0);
    const Eigen::VectorXd expected =
        (beta(0) + (design.x * beta.tail(2)).array()).matrix();
    EXPECT_LT((s.y - expected).norm(), 1e-12);

    t.sigma2 = 0.5;
    const auto s2 = generate_lmgp_data(beta, t, design, 3);
    EXPECT_EQ(s2.g.norm(), 0.0);
    EXPECT_LT((s2.y - expected - s2.noise).norm(), 1e-12);
    EXPECT_GT(s2.noise.norm(), 0.0);
}

TEST(LmgpData, RandomEffectCovarianceMatchesKernel) {
    const int subjects = 2000, visits = 4;
    Eigen::MatrixXd phi_one(visits, 1);
    phi_one << 0.0, 0.5, 1.0, 2.0;
    LmgpDesign d;
    d.x = Eigen::MatrixXd::Zero(subjects * visits, 1);
    d.phi.resize(subjects * visits, 1);
    for (int s = 0; s < subjects; ++s) {
        d.phi.middleRows(s * visits, visits) = phi_one;
        for (int v = 0; v < visits; ++v) {
            d.subject_ids.push_back("S" + std::to_string(s));
            d.weeks.push_back(2 + v);
        }
    }
    KernelParams t;
    t.v0 = 2.0;
    t.w = Eigen::VectorXd::Constant(1, 1.0);
    t.sigma2 = 0.0;
    const auto sample = generate_lmgp_data(Eigen::Vector2d(0.0, 0.0), t, d, 12);
    Eigen::MatrixXd emp = Eigen::MatrixXd::Zero(visits, visits);
    for (int s = 0; s < subjects; ++s) {
        const Eigen::VectorXd g = sample.g.segment(s * visits, visits);
        emp += g * g.transpose();
    }
    emp /= subjects;
    const Eigen::MatrixXd k = kernel_matrix(phi_one, t);
    for (int i = 0; i < visits; ++i)
        for (int j = 0; j < visits; ++j) EXPECT_NEAR(emp(i, j), k(i, j), 0.1 * t.v0) << i << "," << j;
}

TEST(LmgpData, DesignShapeAndDeterminism) {
    const auto a = random_lmgp_design(5, 3, 2, 1, 9);
    const auto b = random_lmgp_design(5, 3, 2, 1, 9);
    EXPECT_EQ(a.x.rows(), 15);
    EXPECT_EQ(a.phi.cols(), 1);
    EXPECT_EQ(a.subject_ids[3], "S02");
    EXPECT_EQ(a.weeks[3], 2);
    EXPECT_EQ(a.x, b.x);
}

TEST(LmgpCohort, GroupsAndColumns) {
    auto cfg = make_lmgp_cohort_config(2);
    cfg.n_acute = 4;
    cfg.n_chronic = 5;
    const auto t = synthesize_lmgp_cohort(cfg);
    EXPECT_EQ(t.names, (std::vector<std::string>{"x1", "x2", "x3", "ini"}));
    EXPECT_EQ(t.rows(), 9u * 7u);
    EXPECT_EQ(t.filter_group(Group::Acute).rows(), 28u);
    for (const auto& y : t.cahai) {
        EXPECT_GE(*y, kMinScore);
        EXPECT_LE(*y, kMaxScore);
    }
}
