#include "actirehab/wavelet.hpp"

#include <cmath>
#include <numeric>

#include "actirehab/error.hpp"

namespace actirehab {

namespace {

double squared_norm(const std::vector<double>& v) {
    return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

void check_length(std::size_t n, int levels) {
    const std::size_t block = std::size_t{1} << levels;
    if (n == 0 || n % block != 0) {
        throw BadLength("length " + std::to_string(n) + " is not a positive multiple of " +
                        std::to_string(block));
    }
}

}  // namespace

std::string_view label(ScaleIndex k) {
    static constexpr std::array<std::string_view, kNumScales> names = {
        "1.1", "1.2", "1.3", "1.4", "2", "3", "4", "5", "6", "7"};
    return names[index_of(k)];
}

std::string_view column_suffix(ScaleIndex k) {
    static constexpr std::array<std::string_view, kNumScales> names = {
        "1_1", "1_2", "1_3", "1_4", "2", "3", "4", "5", "6", "7"};
    return names[index_of(k)];
}

FrequencyBand nominal_band(ScaleIndex k) {
    if (is_packet(k)) {
        const double width = 1.0 / 16.0;
        const double lo = 0.25 + width * static_cast<double>(index_of(k));
        return {lo, lo + width};
    }
    const int j = vector_level(k);
    return {std::ldexp(1.0, -(j + 1)), std::ldexp(1.0, -j)};
}

std::string_view to_string(WaveletFamily f) {
    return f == WaveletFamily::Haar ? "haar" : "db4";
}

WaveletFamily parse_wavelet_family(std::string_view text) {
    if (text == "haar") return WaveletFamily::Haar;
    if (text == "db4" || text == "d4") return WaveletFamily::Daubechies4;
    throw ParseError("unknown wavelet family '" + std::string(text) + "'");
}

FilterBank make_filter_bank(WaveletFamily family) {
    FilterBank bank;
    bank.family = family;
    if (family == WaveletFamily::Haar) {
        const double c = 1.0 / std::sqrt(2.0);
        bank.low_pass = {c, c};
    } else {
        const double s3 = std::sqrt(3.0);
        const double d = 4.0 * std::sqrt(2.0);
        bank.low_pass = {(1 + s3) / d, (3 + s3) / d, (3 - s3) / d, (1 - s3) / d};
    }
    const auto len = bank.low_pass.size();
    bank.high_pass.resize(len);
    for (std::size_t k = 0; k < len; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        bank.high_pass[k] = sign * bank.low_pass[len - 1 - k];
    }
    return bank;
}

const std::vector<double>& WaveletCoefficients::scale_vector(ScaleIndex k) const {
    if (is_packet(k)) {
        if (!has_packets()) throw ShapeMismatch("packet coefficients were not computed");
        return packets[index_of(k)];
    }
    return detail_at(vector_level(k));
}

void analysis_step(std::span<const double> x, const FilterBank& bank, std::vector<double>& approx,
                   std::vector<double>& detail) {
    const std::size_t n = x.size();
    if (n == 0 || n % 2 != 0) throw BadLength("analysis step needs an even, positive length");
    const std::size_t half = n / 2;
    const std::size_t taps = bank.low_pass.size();
    approx.assign(half, 0.0);
    detail.assign(half, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        double a = 0.0;
        double d = 0.0;
        for (std::size_t l = 0; l < taps; ++l) {
            const double v = x[(2 * k + l) % n];
            a += bank.low_pass[l] * v;
            d += bank.high_pass[l] * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

std::vector<double> synthesis_step(std::span<const double> approx, std::span<const double> detail,
                                   const FilterBank& bank) {
    if (approx.size() != detail.size()) {
        throw ShapeMismatch("approx/detail lengths differ: " + std::to_string(approx.size()) +
                            " vs " + std::to_string(detail.size()));
    }
    const std::size_t n = 2 * approx.size();
    const std::size_t taps = bank.low_pass.size();
    std::vector<double> x(n, 0.0);
    for (std::size_t k = 0; k < approx.size(); ++k) {
        for (std::size_t l = 0; l < taps; ++l) {
            x[(2 * k + l) % n] += bank.low_pass[l] * approx[k] + bank.high_pass[l] * detail[k];
        }
    }
    return x;
}

WaveletCoefficients dwt(std::span<const double> x, const FilterBank& bank, int levels) {
    if (levels < 1) throw BadLength("levels must be >= 1");
    check_length(x.size(), levels);
    WaveletCoefficients out;
    out.n = x.size();
    out.detail.resize(static_cast<std::size_t>(levels));
    std::vector<double> current(x.begin(), x.end());
    std::vector<double> approx;
    for (int j = 0; j < levels; ++j) {
        analysis_step(current, bank, approx, out.detail[static_cast<std::size_t>(j)]);
        current.swap(approx);
    }
    out.approx = std::move(current);
    return out;
}

std::vector<std::vector<double>> packet_level(std::span<const double> x, const FilterBank& bank,
                                              int depth) {
    check_length(x.size(), depth);
    std::vector<std::vector<double>> nodes{std::vector<double>(x.begin(), x.end())};
    for (int d = 0; d < depth; ++d) {
        std::vector<std::vector<double>> next(nodes.size() * 2);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            analysis_step(nodes[i], bank, next[2 * i], next[2 * i + 1]);
        }
        nodes.swap(next);
    }
    return nodes;
}

std::array<std::vector<double>, 4> dwpt_scale1_split(std::span<const double> x,
                                                      const FilterBank& bank) {
    check_length(x.size(), 3);
    std::vector<double> low;
    std::vector<double> w1;
    analysis_step(x, bank, low, w1);
    // Depth-2 packets of W_1 are the depth-3 nodes 4..7 of the full tree.
    auto sub = packet_level(w1, bank, 2);
    std::array<std::vector<double>, 4> out;
    for (std::size_t f = 0; f < 4; ++f) {
        out[f] = std::move(sub[sequency_to_natural(4 + f) - 4]);
    }
    return out;
}

WaveletCoefficients decompose(std::span<const double> x, const FilterBank& bank, int levels) {
    auto coeffs = dwt(x, bank, levels);
    coeffs.packets = dwpt_scale1_split(x, bank);
    return coeffs;
}

std::vector<double> reconstruct(const WaveletCoefficients& coeffs, const FilterBank& bank) {
    const int levels = coeffs.levels();
    if (levels < 1) throw ShapeMismatch("no detail levels");
    const std::size_t block = std::size_t{1} << levels;
    if (coeffs.n == 0 || coeffs.n % block != 0 || coeffs.approx.size() != coeffs.n / block) {
        throw ShapeMismatch("approximation length does not match n / 2^J");
    }
    for (int j = 1; j <= levels; ++j) {
        if (coeffs.detail_at(j).size() != (coeffs.n >> j)) {
            throw ShapeMismatch("detail level " + std::to_string(j) + " has length " +
                                std::to_string(coeffs.detail_at(j).size()) + ", expected " +
                                std::to_string(coeffs.n >> j));
        }
    }
    std::vector<double> current = coeffs.approx;
    for (int j = levels; j >= 1; --j) {
        current = synthesis_step(current, coeffs.detail_at(j), bank);
    }
    return current;
}

VarianceDecomposition sample_variance_decomposition(const WaveletCoefficients& coeffs,
                                                    double mean_x) {
    if (coeffs.n == 0) throw ShapeMismatch("empty coefficients");
    const double n = static_cast<double>(coeffs.n);
    VarianceDecomposition out;
    double total = 0.0;
    for (const auto& w : coeffs.detail) {
        out.detail_shares.push_back(squared_norm(w) / n);
        total += out.detail_shares.back();
    }
    out.approx_share = squared_norm(coeffs.approx) / n;
    total += out.approx_share;
    out.sample_variance = total - mean_x * mean_x;
    return out;
}

Eigen::MatrixXd analysis_matrix(std::size_t n, const FilterBank& bank, int levels) {
    check_length(n, levels);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<double> unit(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        unit.assign(n, 0.0);
        unit[c] = 1.0;
        const auto coeffs = dwt(unit, bank, levels);
        Eigen::Index r = 0;
        for (const auto& w : coeffs.detail) {
            for (double v : w) m(r++, static_cast<Eigen::Index>(c)) = v;
        }
        for (double v : coeffs.approx) m(r++, static_cast<Eigen::Index>(c)) = v;
    }
    return m;
}

std::size_t usable_length(std::size_t n, int levels) {
    const std::size_t block = std::size_t{1} << levels;
    return (n / block) * block;
}

}  // namespace actirehab
