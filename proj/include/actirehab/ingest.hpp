#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace actirehab {

enum class Group { Acute, Chronic };
enum class Side { Left, Right };

std::string_view to_string(Group g);
std::string_view to_string(Side s);
Group parse_group(std::string_view text);
Side parse_side(std::string_view text);

// Clinical score range (sum of nine 7-point items).
inline constexpr double kMinScore = 7.0;
inline constexpr double kMaxScore = 63.0;
// Week 1 is history only; accelerometer visits are weeks 2..8.
inline constexpr int kFirstVisitWeek = 2;
inline constexpr int kLastVisitWeek = 8;

struct SubjectMeta {
    std::string subject_id;
    Group group = Group::Acute;
    Side paralysed_side = Side::Left;
    double ini = kMinScore;  // week-1 score

    bool operator==(const SubjectMeta&) const = default;
};

struct TriaxialSample {
    double t = 0.0;  // seconds
    double ax = 0.0, ay = 0.0, az = 0.0;  // g units

    bool operator==(const TriaxialSample&) const = default;
};

struct TriaxialRecording {
    double sample_rate_hz = 100.0;
    std::vector<TriaxialSample> samples;  // strictly increasing t

    bool operator==(const TriaxialRecording&) const = default;
};

struct VisitRecord {
    std::string subject_id;
    int week = kFirstVisitWeek;
    std::optional<double> cahai;  // absent in prediction mode
    TriaxialRecording paralysed;
    TriaxialRecording non_paralysed;

    bool operator==(const VisitRecord&) const = default;
};

struct Cohort {
    std::vector<SubjectMeta> subjects;
    std::vector<VisitRecord> visits;

    const SubjectMeta& subject(std::string_view id) const;
    bool operator==(const Cohort&) const = default;
};

// One manifest line before the recordings are read.
struct ManifestRow {
    SubjectMeta meta;
    int week = kFirstVisitWeek;
    std::optional<double> cahai;
    std::filesystem::path path_paralysed;     // resolved against the manifest directory
    std::filesystem::path path_nonparalysed;
};

struct ManifestContents {
    std::vector<SubjectMeta> subjects;  // in order of first appearance
    std::vector<ManifestRow> rows;
};

// Parses and validates a cohort manifest without touching the recordings.
ManifestContents read_manifest(const std::filesystem::path& manifest_path);

// Parses the manifest and loads both recordings of every visit.
Cohort load_cohort(const std::filesystem::path& manifest_path);

// Reads a (t_seconds, ax_g, ay_g, az_g) file. The sample rate is the median
// reciprocal inter-sample gap; when `declared_rate_hz` is given the inferred
// value must lie within 10% of it.
TriaxialRecording read_triaxial_csv(const std::filesystem::path& path,
                                    std::optional<double> declared_rate_hz = std::nullopt);
void write_triaxial_csv(const std::filesystem::path& path, const TriaxialRecording& rec);

// Writes `<dir>/manifest.csv` plus one raw file per visit and side under
// `<dir>/raw/`; returns the manifest path.
std::filesystem::path write_cohort(const std::filesystem::path& dir, const Cohort& cohort);

// Checks the recording invariants; throws NonMonotonicTime / InvariantViolation.
void validate_recording(const TriaxialRecording& rec);

}  // namespace actirehab
