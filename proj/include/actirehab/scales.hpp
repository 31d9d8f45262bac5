#pragma once

#include <array>
#include <string_view>

namespace actirehab {

// The ten feature scales: four wavelet packets splitting DWT scale 1
// (ascending frequency), then DWT detail scales 2..7.
enum class ScaleIndex { S1_1, S1_2, S1_3, S1_4, S2, S3, S4, S5, S6, S7 };

inline constexpr std::size_t kNumScales = 10;

inline constexpr std::array<ScaleIndex, kNumScales> kAllScales = {
    ScaleIndex::S1_1, ScaleIndex::S1_2, ScaleIndex::S1_3, ScaleIndex::S1_4, ScaleIndex::S2,
    ScaleIndex::S3,   ScaleIndex::S4,   ScaleIndex::S5,   ScaleIndex::S6,   ScaleIndex::S7};

constexpr std::size_t index_of(ScaleIndex k) { return static_cast<std::size_t>(k); }

// "1.1" ... "7"
std::string_view label(ScaleIndex k);
// "1_1" ... "7", used in column names.
std::string_view column_suffix(ScaleIndex k);

// True for the four packet scales 1.1..1.4.
constexpr bool is_packet(ScaleIndex k) { return index_of(k) < 4; }
// DWT level of a scale: 3 for packets (their vectors live at depth 3), j otherwise.
constexpr int vector_level(ScaleIndex k) {
    return is_packet(k) ? 3 : static_cast<int>(index_of(k)) - 2;
}

// Nominal frequency band of a scale in cycles per sample. With one sample
// per second scale j covers [2^-(j+1), 2^-j] Hz; the packets quarter
// scale 1's [0.25, 0.5].
struct FrequencyBand {
    double lo = 0.0;
    double hi = 0.0;
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double f) const { return f >= lo && f <= hi; }
};
FrequencyBand nominal_band(ScaleIndex k);

}  // namespace actirehab
