#pragma once

#include <Eigen/Dense>
#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actirehab/ingest.hpp"
#include "actirehab/scales.hpp"
#include "actirehab/wavelet.hpp"

namespace actirehab {

using ScaleArray = std::array<double, kNumScales>;

enum class Wrist { Paralysed, NonParalysed };

struct SideFeatures {
    Wrist side = Wrist::Paralysed;
    ScaleArray sad{};
    ScaleArray ssd{};
};

// Layout: [sad_p(10), sad_np(10), pnp1(10), pnp2(10), ini].
inline constexpr std::size_t kFeatureCount = 4 * kNumScales + 1;

struct FeatureVector {
    ScaleArray sad_p{};
    ScaleArray sad_np{};
    ScaleArray pnp1{};
    ScaleArray pnp2{};
    double ini = 0.0;

    std::array<double, kFeatureCount> flatten() const;
};

// Column names in flatten() order: sad_p_1_1 ... sad_p_7, sad_np_..., pnp1_..., pnp2_..., ini.
const std::vector<std::string>& feature_names();
// ssd_p_1_1 ... ssd_np_7 (exported only, not part of the model vector).
const std::vector<std::string>& ssd_feature_names();

// Mean absolute coefficient of the scale's vector: ||W||_1 / (N / 2^level).
double sad(const WaveletCoefficients& coeffs, ScaleIndex k);
// Mean squared coefficient: ||W||^2 / (N / 2^level).
double ssd(const WaveletCoefficients& coeffs, ScaleIndex k);

// Cap applied to pnp1 when the non-paralysed SAD is zero.
inline constexpr double kPnp1Cap = 1e6;

struct PnpPair {
    double pnp1 = 1.0;  // sad_p / sad_np
    double pnp2 = 0.0;  // (sad_np - sad_p) / (sad_np + sad_p)
};

// Degenerate inputs: (0, 0) -> (1, 0); sad_np == 0 < sad_p -> (kPnp1Cap, -1).
PnpPair pnp(double sad_p, double sad_np);

// SAD/SSD for one wrist from its VM series; the series is truncated to a
// multiple of 128 seconds first (BadLength if shorter).
SideFeatures side_features_from_vm(std::span<const double> vm, Wrist side, const FilterBank& bank);
SideFeatures side_features(const TriaxialRecording& rec, Wrist side, const FilterBank& bank);

FeatureVector combine_sides(const SideFeatures& paralysed, const SideFeatures& non_paralysed,
                            double ini);

struct VisitFeatures {
    std::string subject_id;
    Group group = Group::Acute;
    int week = kFirstVisitWeek;
    std::optional<double> cahai;
    SideFeatures paralysed;
    SideFeatures non_paralysed;
    FeatureVector features;
};

// signal -> wavelet -> SAD per side -> PNP per scale, plus ini. Errors are
// rethrown with the subject/week attached.
VisitFeatures build_visit_features(const VisitRecord& visit, const SubjectMeta& meta,
                                   const FilterBank& bank);
FeatureVector build_feature_vector(const VisitRecord& visit, const SubjectMeta& meta,
                                   const FilterBank& bank);

// Rows of named real-valued columns keyed by (subject, week).
struct FeatureTable {
    std::vector<std::string> names;
    std::vector<std::string> subject_ids;
    std::vector<Group> groups;
    std::vector<int> weeks;
    std::vector<std::optional<double>> cahai;
    Eigen::MatrixXd values;  // rows x names.size()

    std::size_t rows() const { return subject_ids.size(); }
    std::size_t column(const std::string& name) const;  // DimensionMismatch if absent
    std::vector<std::size_t> columns(const std::vector<std::string>& names) const;
    // Rows of one group, order preserved.
    FeatureTable filter_group(Group g) const;
    FeatureTable select_rows(const std::vector<std::size_t>& rows) const;
};

// Model table (41 columns) and SSD export table (20 columns). `workers` > 1
// extracts visits concurrently; output order always follows the cohort.
struct ExtractedFeatures {
    FeatureTable model;
    FeatureTable ssd;
};
ExtractedFeatures extract_features(const Cohort& cohort, const FilterBank& bank,
                                   unsigned workers = 1);

// CSV: subject_id, group, week, <names...>, cahai ("NA" when absent).
void write_feature_table(const std::filesystem::path& path, const FeatureTable& table);
FeatureTable read_feature_table(const std::filesystem::path& path);

}  // namespace actirehab
