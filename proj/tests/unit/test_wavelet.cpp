#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "actirehab/error.hpp"
#include "actirehab/features.hpp"
#include "actirehab/wavelet.hpp"
#include "test_util.hpp"

using namespace actirehab;

namespace {

std::vector<double> randn(std::size_t n, std::mt19937_64& gen) {
    std::normal_distribution<double> nd;
    std::vector<double> x(n);
    for (auto& v : x) v = nd(gen);
    return x;
}

double energy(const std::vector<double>& v) {
    return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

double coeff_energy(const WaveletCoefficients& w) {
    double e = energy(w.approx);
    for (const auto& d : w.detail) e += energy(d);
    return e;
}

std::vector<double> sinusoid(std::size_t n, double cycles_per_sample, double phase = 0.3) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::sin(2.0 * std::numbers::pi * cycles_per_sample * static_cast<double>(i) + phase);
    }
    return x;
}

// Independent one-level periodic analysis written as explicit sums.
void naive_level(const std::vector<double>& x, const std::vector<double>& g, std::vector<double>& a,
                 std::vector<double>& d) {
    const std::size_t n = x.size(), L = g.size();
    a.assign(n / 2, 0.0);
    d.assign(n / 2, 0.0);
    for (std::size_t k = 0; k < n / 2; ++k) {
        for (std::size_t l = 0; l < L; ++l) {
            const double h = ((l % 2) ? -1.0 : 1.0) * g[L - 1 - l];
            a[k] += g[l] * x[(2 * k + l) % n];
            d[k] += h * x[(2 * k + l) % n];
        }
    }
}

const std::array<WaveletFamily, 2> kFamilies = {WaveletFamily::Haar, WaveletFamily::Daubechies4};

}  // namespace

TEST(FilterBank, Db4CoefficientsFrozen) {
    const auto b = make_filter_bank(WaveletFamily::Daubechies4);
    ASSERT_EQ(b.low_pass.size(), 4u);
    EXPECT_NEAR(b.low_pass[0], 0.48296291314453414, 1e-15);
    EXPECT_NEAR(b.low_pass[1], 0.83651630373780772, 1e-15);
    EXPECT_NEAR(b.low_pass[2], 0.22414386804201339, 1e-15);
    EXPECT_NEAR(b.low_pass[3], -0.12940952255126037, 1e-15);
}

TEST(FilterBank, QuadratureMirrorAndOrthonormality) {
    for (auto fam : kFamilies) {
        const auto b = make_filter_bank(fam);
        const auto L = b.low_pass.size();
        ASSERT_EQ(b.high_pass.size(), L);
        double sum = 0.0;
        for (std::size_t k = 0; k < L; ++k) {
            EXPECT_DOUBLE_EQ(b.high_pass[k], ((k % 2) ? -1.0 : 1.0) * b.low_pass[L - 1 - k]);
            sum += b.low_pass[k];
        }
        EXPECT_NEAR(sum, std::sqrt(2.0), 1e-12);
        for (std::size_t m = 0; 2 * m < L; ++m) {
            double s = 0.0;
            for (std::size_t k = 0; k + 2 * m < L; ++k) s += b.low_pass[k] * b.low_pass[k + 2 * m];
            EXPECT_NEAR(s, m == 0 ? 1.0 : 0.0, 1e-12);
        }
    }
}

TEST(FilterBank, FamilyNames) {
    EXPECT_EQ(parse_wavelet_family("haar"), WaveletFamily::Haar);
    EXPECT_EQ(parse_wavelet_family("db4"), WaveletFamily::Daubechies4);
    EXPECT_THROW(parse_wavelet_family("sym8"), Error);
}

TEST(Dwt, PartitionSizes) {
    std::mt19937_64 gen(1);
    const auto w = decompose(randn(512, gen), make_filter_bank(WaveletFamily::Daubechies4));
    ASSERT_EQ(w.levels(), 7);
    for (int j = 1; j <= 7; ++j) EXPECT_EQ(w.detail_at(j).size(), 512u >> j);
    EXPECT_EQ(w.approx.size(), 4u);
    for (const auto& p : w.packets) EXPECT_EQ(p.size(), 64u);
}

TEST(Dwt, MatchesNaiveFirstLevel) {
    std::mt19937_64 gen(2);
    for (auto fam : kFamilies) {
        const auto b = make_filter_bank(fam);
        const auto x = randn(256, gen);
        const auto w = dwt(x, b, 1);
        std::vector<double> a, d;
        naive_level(x, b.low_pass, a, d);
        for (std::size_t k = 0; k < a.size(); ++k) {
            EXPECT_NEAR(w.approx[k], a[k], 1e-12);
            EXPECT_NEAR(w.detail[0][k], d[k], 1e-12);
        }
    }
}

TEST(Dwt, MatchesNaivePyramid) {
    std::mt19937_64 gen(3);
    const auto b = make_filter_bank(WaveletFamily::Daubechies4);
    const auto x = randn(1024, gen);
    const auto w = dwt(x, b);
    std::vector<double> cur = x;
    for (int j = 1; j <= 7; ++j) {
        std::vector<double> a, d;
        naive_level(cur, b.low_pass, a, d);
        for (std::size_t k = 0; k < d.size(); ++k) EXPECT_NEAR(w.detail_at(j)[k], d[k], 1e-11);
        cur = a;
    }
    for (std::size_t k = 0; k < cur.size(); ++k) EXPECT_NEAR(w.approx[k], cur[k], 1e-11);
}

TEST(Dwt, ConstantSignal) {
    for (auto fam : kFamilies) {
        const std::vector<double> x(256, 2.5);
        const auto w = decompose(x, make_filter_bank(fam));
        for (const auto& d : w.detail)
            for (double v : d) EXPECT_NEAR(v, 0.0, 1e-12);
        for (const auto& p : w.packets)
            for (double v : p) EXPECT_NEAR(v, 0.0, 1e-12);
        EXPECT_NEAR(energy(w.approx), energy(x), 1e-9);
    }
}

TEST(Dwt, HaarAlternatingSignal) {
    std::vector<double> x(128);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = (i % 2) ? -1.0 : 1.0;
    const auto w = dwt(x, make_filter_bank(WaveletFamily::Haar));
    EXPECT_NEAR(energy(w.detail_at(1)), 128.0, 1e-12);
    for (double v : w.detail_at(1)) EXPECT_NEAR(std::abs(v), std::sqrt(2.0), 1e-14);
    for (int j = 2; j <= 7; ++j)
        for (double v : w.detail_at(j)) EXPECT_EQ(v, 0.0);
    for (double v : w.approx) EXPECT_EQ(v, 0.0);
}

TEST(Dwt, ZeroSignal) {
    const auto w = decompose(std::vector<double>(256, 0.0), make_filter_bank(WaveletFamily::Daubechies4));
    EXPECT_EQ(coeff_energy(w), 0.0);
    for (const auto& p : w.packets) EXPECT_EQ(energy(p), 0.0);
}

TEST(Dwt, BadLength) {
    const auto b = make_filter_bank(WaveletFamily::Daubechies4);
    EXPECT_THROW(dwt(std::vector<double>(100, 1.0), b), BadLength);
    EXPECT_THROW(dwt(std::vector<double>{}, b), BadLength);
    EXPECT_THROW(dwpt_scale1_split(std::vector<double>(130, 1.0), b), BadLength);
    EXPECT_NO_THROW(dwt(std::vector<double>(384, 1.0), b));
}

TEST(Dwt, Linearity) {
    std::mt19937_64 gen(4);
    const auto b = make_filter_bank(WaveletFamily::Daubechies4);
    const auto x = randn(512, gen), y = randn(512, gen);
    const double a = 1.7, c = -0.4;
    std::vector<double> z(512);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = a * x[i] + c * y[i];
    const auto wx = decompose(x, b), wy = decompose(y, b), wz = decompose(z, b);
    for (int j = 1; j <= 7; ++j)
        for (std::size_t k = 0; k < wz.detail_at(j).size(); ++k)
            EXPECT_NEAR(wz.detail_at(j)[k], a * wx.detail_at(j)[k] + c * wy.detail_at(j)[k], 1e-10);
    for (std::size_t p = 0; p < 4; ++p)
        for (std::size_t k = 0; k < wz.packets[p].size(); ++k)
            EXPECT_NEAR(wz.packets[p][k], a * wx.packets[p][k] + c * wy.packets[p][k], 1e-10);
}

TEST(Dwt, EnergyIdentityAndPacketIdentity) {
    std::mt19937_64 gen(5);
    for (auto fam : kFamilies) {
        const auto b = make_filter_bank(fam);
        for (int trial = 0; trial < 20; ++trial) {
            const auto x = randn(1024, gen);
            const auto w = decompose(x, b);
            EXPECT_LT(testutil::rel_err(coeff_energy(w), energy(x)), 1e-8);
            double pe = 0.0;
            for (const auto& p : w.packets) pe += energy(p);
            EXPECT_LT(std::abs(pe - energy(w.detail_at(1))) / energy(w.detail_at(1)), 1e-8);
        }
    }
}

TEST(Reconstruct, RoundTrip) {
    std::mt19937_64 gen(6);
    for (auto fam : kFamilies) {
        const auto b = make_filter_bank(fam);
        const auto x = randn(256, gen);
        const auto back = reconstruct(dwt(x, b), b);
        ASSERT_EQ(back.size(), x.size());
        double err = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) err += (back[i] - x[i]) * (back[i] - x[i]);
        EXPECT_LT(std::sqrt(err / energy(x)), 1e-9);
    }
}

TEST(Reconstruct, ZeroCoefficientsGiveZeroSignal) {
    const auto b = make_filter_bank(WaveletFamily::Daubechies4);
    auto w = dwt(std::vector<double>(256, 1.0), b);
    for (auto& d : w.detail) std::fill(d.begin(), d.end(), 0.0);
    std::fill(w.approx.begin(), w.approx.end(), 0.0);
    for (double v : reconstruct(w, b)) EXPECT_EQ(v, 0.0);
}

TEST(Reconstruct, EnergyOfReconstruction) {
    std::mt19937_64 gen(7);
    const auto b = make_filter_bank(WaveletFamily::Daubechies4);
    auto w = dwt(randn(512, gen), b);
    // Perturb the coefficients: reconstruction energy must still equal coefficient energy.
    for (auto& d : w.detail)
        for (auto& v : d) v *= 1.5;
    EXPECT_LT(testutil::rel_err(energy(reconstruct(w, b)), coeff_energy(w)), 1e-8);
}

TEST(Reconstruct, ShapeMismatch) {
    const auto b = make_filter_bank(WaveletFamily::Daubechies4);
    auto w = dwt(std::vector<double>(256, 1.0), b);
    w.detail[2].pop_back();
    EXPECT_THROW(reconstruct(w, b), ShapeMismatch);
}

TEST(AnalysisMatrix, Orthonormal128) {
    for (auto fam : kFamilies) {
        const auto m = analysis_matrix(128, make_filter_bank(fam));
        ASSERT_EQ(m.rows(), 128);
        const Eigen::MatrixXd g = m.transpose() * m;
        EXPECT_LT((g - Eigen::MatrixXd::Identity(128, 128)).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(AnalysisMatrix, AgreesWithPyramid) {
    std::mt19937_64 gen(8);
    const auto b = make_filter_bank(WaveletFamily::Daubechies4);
    const auto x = randn(256, gen);
    const Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x.data(), 256);
    const Eigen::VectorXd wv = analysis_matrix(256, b) * xv;
    const auto w = dwt(x, b);
    Eigen::Index r = 0;
    for (int j = 1; j <= 7; ++j)
        for (double v : w.detail_at(j)) EXPECT_NEAR(wv(r++), v, 1e-12);
    for (double v : w.approx) EXPECT_NEAR(wv(r++), v, 1e-12);
}

TEST(Packets, ConstantSignalZero) {
    const auto p = dwpt_scale1_split(std::vector<double>(256, 3.0), make_filter_bank(WaveletFamily::Daubechies4));
    for (const auto& v : p)
        for (double c : v) EXPECT_NEAR(c, 0.0, 1e-12);
}

TEST(Packets, SequencyOrder) {
    EXPECT_EQ(sequency_to_natural(0), 0u);
    EXPECT_EQ(sequency_to_natural(1), 1u);
    EXPECT_EQ(sequency_to_natural(2), 3u);
    EXPECT_EQ(sequency_to_natural(3), 2u);
    EXPECT_EQ(sequency_to_natural(4), 6u);
    EXPECT_EQ(sequency_to_natural(7), 4u);
}

TEST(Packets, FrequencySweepOrdersPackets) {
    // Each packet band's midpoint must put the most energy into that packet.
    const auto b = make_filter_bank(WaveletFamily::Daubechies4);
    for (std::size_t i = 0; i < 4; ++i) {
        const double f = 0.25 + (i + 0.5) / 16.0;
        const auto p = dwpt_scale1_split(sinusoid(2048, f), b);
        std::size_t best = 0;
        for (std::size_t k = 1; k < 4; ++k)
            if (energy(p[k]) > energy(p[best])) best = k;
        EXPECT_EQ(best, i) << "f=" << f;
    }
}

TEST(Packets, PacketOneOneAtScaledTableFrequency) {
    // The frequency table quotes 0.5-0.625 Hz for packet 1.1; its bands sit
    // at twice the cycles-per-sample value, so 0.55 maps to 0.275.
    const auto b = make_filter_bank(WaveletFamily::Daubechies4);
    const auto w = decompose(sinusoid(2048, 0.55 / 2.0), b);
    std::size_t best = 0;
    for (std::size_t k = 0; k < kNumScales; ++k)
        if (sad(w, kAllScales[k]) > sad(w, kAllScales[best])) best = k;
    EXPECT_EQ(kAllScales[best], ScaleIndex::S1_1);
}

TEST(Bands, NominalBands) {
    EXPECT_DOUBLE_EQ(nominal_band(ScaleIndex::S1_1).lo, 0.25);
    EXPECT_DOUBLE_EQ(nominal_band(ScaleIndex::S1_4).hi, 0.5);
    EXPECT_DOUBLE_EQ(nominal_band(ScaleIndex::S2).lo, 0.125);
    EXPECT_DOUBLE_EQ(nominal_band(ScaleIndex::S2).hi, 0.25);
    EXPECT_DOUBLE_EQ(nominal_band(ScaleIndex::S7).lo, 1.0 / 256.0);
}

TEST(Bands, TableMidpointsSelectTheirScale) {
    // Frequency table (Hz) in scale order 1.1 .. 7.
    const double table[10][2] = {{0.5, 0.625},     {0.625, 0.75},    {0.75, 0.875},
                                 {0.875, 1.0},     {0.25, 0.5},      {0.125, 0.25},
                                 {0.0625, 0.125},  {0.0312, 0.0625}, {0.0156, 0.0312},
                                 {0.0078, 0.0156}};
    const auto b = make_filter_bank(WaveletFamily::Daubechies4);
    int hits = 0;
    for (std::size_t k = 0; k < 10; ++k) {
        const double f = 0.25 * (table[k][0] + table[k][1]);
        const auto w = decompose(sinusoid(4096, f), b);
        std::size_t best = 0;
        for (std::size_t s = 1; s < kNumScales; ++s)
            if (sad(w, kAllScales[s]) > sad(w, kAllScales[best])) best = s;
        if (best == k) ++hits;
    }
    EXPECT_GE(hits, 9);
}

TEST(VarianceDecomposition, ConstantSignal) {
    const std::vector<double> x(256, 4.0);
    const auto v = sample_variance_decomposition(dwt(x, make_filter_bank(WaveletFamily::Daubechies4)), 4.0);
    for (double s : v.detail_shares) EXPECT_NEAR(s, 0.0, 1e-12);
    EXPECT_NEAR(v.sample_variance, 0.0, 1e-9);
}

TEST(VarianceDecomposition, SharesSumToMeanSquare) {
    std::mt19937_64 gen(9);
    const auto x = randn(1024, gen);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / 1024.0;
    const auto v = sample_variance_decomposition(dwt(x, make_filter_bank(WaveletFamily::Daubechies4)), mean);
    const double total = std::accumulate(v.detail_shares.begin(), v.detail_shares.end(), v.approx_share);
    EXPECT_NEAR(total, energy(x) / 1024.0, 1e-8);
    double var = 0.0;
    for (double xi : x) var += (xi - mean) * (xi - mean);
    EXPECT_NEAR(v.sample_variance, var / 1024.0, 1e-8);
}

TEST(VarianceDecomposition, WhiteNoiseHalvesPerScale) {
    const auto b = make_filter_bank(WaveletFamily::Daubechies4);
    std::vector<double> mean_share(7, 0.0);
    const int seeds = 50;
    for (int s = 0; s < seeds; ++s) {
        std::mt19937_64 gen(100 + s);
        const auto x = randn(1 << 14, gen);
        const auto v = sample_variance_decomposition(dwt(x, b), 0.0);
        const double total = energy(x) / x.size();
        for (int j = 0; j < 7; ++j) mean_share[j] += v.detail_shares[j] / total / seeds;
    }
    for (int j = 0; j < 7; ++j) {
        const double expected = std::ldexp(1.0, -(j + 1));
        EXPECT_NEAR(mean_share[j], expected, 0.2 * expected) << "scale " << j + 1;
    }
}

TEST(UsableLength, TruncatesToMultipleOf128) {
    EXPECT_EQ(usable_length(127), 0u);
    EXPECT_EQ(usable_length(128), 128u);
    EXPECT_EQ(usable_length(1000), 896u);
}
