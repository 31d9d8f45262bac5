#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "actirehab/scales.hpp"

namespace actirehab {

enum class WaveletFamily { Haar, Daubechies4 };

std::string_view to_string(WaveletFamily f);
WaveletFamily parse_wavelet_family(std::string_view text);

// Orthonormal two-channel filter bank. high[k] = (-1)^k low[L-1-k].
struct FilterBank {
    WaveletFamily family = WaveletFamily::Daubechies4;
    std::vector<double> low_pass;
    std::vector<double> high_pass;
};

FilterBank make_filter_bank(WaveletFamily family);

inline constexpr int kDecompositionLevels = 7;

// DWT detail vectors W_1..W_J, the approximation V_J, and (optionally) the
// four depth-3 packets that split W_1, ordered by ascending frequency.
struct WaveletCoefficients {
    std::size_t n = 0;
    std::vector<std::vector<double>> detail;  // detail[j-1] has length n / 2^j
    std::vector<double> approx;               // V_J, length n / 2^J
    std::array<std::vector<double>, 4> packets;  // scales 1.1..1.4, length n / 8 each

    int levels() const { return static_cast<int>(detail.size()); }
    const std::vector<double>& detail_at(int j) const { return detail.at(static_cast<std::size_t>(j - 1)); }
    bool has_packets() const { return !packets[0].empty(); }
    // Coefficient vector backing a feature scale.
    const std::vector<double>& scale_vector(ScaleIndex k) const;
};

// One periodic analysis stage: approx[k] = sum_l g[l] x[(2k+l) mod n], and
// likewise detail with h. n must be even.
void analysis_step(std::span<const double> x, const FilterBank& bank, std::vector<double>& approx,
                   std::vector<double>& detail);
// Inverse of analysis_step (its transpose).
std::vector<double> synthesis_step(std::span<const double> approx, std::span<const double> detail,
                                   const FilterBank& bank);

// Pyramid DWT with periodic boundary. x.size() must be a positive multiple of
// 2^levels, otherwise BadLength.
WaveletCoefficients dwt(std::span<const double> x, const FilterBank& bank,
                        int levels = kDecompositionLevels);

// Nodes of the wavelet-packet tree at `depth`, in natural (Paley) order:
// node bits read root-first, 0 = low-pass, 1 = high-pass.
std::vector<std::vector<double>> packet_level(std::span<const double> x, const FilterBank& bank,
                                              int depth);

// Natural-order index of the node holding the f-th lowest frequency band at
// a given depth (Gray code).
constexpr std::size_t sequency_to_natural(std::size_t f) { return f ^ (f >> 1); }

// The four depth-3 packets covering DWT scale 1, ascending frequency.
std::array<std::vector<double>, 4> dwpt_scale1_split(std::span<const double> x,
                                                      const FilterBank& bank);

// dwt() plus dwpt_scale1_split().
WaveletCoefficients decompose(std::span<const double> x, const FilterBank& bank,
                              int levels = kDecompositionLevels);

// Inverse pyramid from detail + approx (packets ignored). ShapeMismatch if
// the partition sizes are inconsistent.
std::vector<double> reconstruct(const WaveletCoefficients& coeffs, const FilterBank& bank);

struct VarianceDecomposition {
    std::vector<double> detail_shares;  // ||W_j||^2 / N, j = 1..J
    double approx_share = 0.0;          // ||V_J||^2 / N
    double sample_variance = 0.0;       // ||X||^2 / N - mean^2
};

VarianceDecomposition sample_variance_decomposition(const WaveletCoefficients& coeffs,
                                                    double mean_x);

// Rows [W_1; ...; W_J; V_J] of the analysis operator for length-n signals.
Eigen::MatrixXd analysis_matrix(std::size_t n, const FilterBank& bank,
                                int levels = kDecompositionLevels);

// Largest prefix length that is a multiple of 2^levels.
std::size_t usable_length(std::size_t n, int levels = kDecompositionLevels);

}  // namespace actirehab
