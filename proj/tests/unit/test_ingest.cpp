#include <gtest/gtest.h>

#include "actirehab/error.hpp"
#include "actirehab/ingest.hpp"
#include "actirehab/synth.hpp"
#include "test_util.hpp"

using namespace actirehab;
using testutil::TempDir;
using testutil::write_file;

namespace {

const char* kHeader =
    "subject_id,group,paralysed_side,ini,week,cahai,path_paralysed,path_nonparalysed\n";

void write_recording(const std::filesystem::path& p, int rows, double rate = 100.0) {
    std::string text = "t_seconds,ax_g,ay_g,az_g\n";
    for (int i = 0; i < rows; ++i) text += std::to_string(i / rate) + ",0,0,1\n";
    write_file(p, text);
}

}  // namespace

TEST(Manifest, EmptyManifestGivesEmptyCohort) {
    TempDir dir("ingest");
    write_file(dir / "m.csv", kHeader);
    const auto cohort = load_cohort(dir / "m.csv");
    EXPECT_TRUE(cohort.subjects.empty());
    EXPECT_TRUE(cohort.visits.empty());
}

TEST(Manifest, MissingFile) {
    TempDir dir("ingest");
    EXPECT_THROW(load_cohort(dir / "nope.csv"), MissingFile);
}

TEST(Manifest, WeekNineIsInvariantViolation) {
    TempDir dir("ingest");
    write_recording(dir / "p.csv", 10);
    write_recording(dir / "np.csv", 10);
    write_file(dir / "m.csv", std::string(kHeader) + "S1,acute,left,20,9,30,p.csv,np.csv\n");
    try {
        load_cohort(dir / "m.csv");
        FAIL() << "expected InvariantViolation";
    } catch (const InvariantViolation& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("week"), std::string::npos);
        EXPECT_NE(msg.find("S1"), std::string::npos);
        EXPECT_NE(msg.find("9"), std::string::npos);
    }
}

TEST(Manifest, RangeChecks) {
    TempDir dir("ingest");
    write_recording(dir / "p.csv", 10);
    write_recording(dir / "np.csv", 10);
    write_file(dir / "a.csv", std::string(kHeader) + "S1,acute,left,6,2,30,p.csv,np.csv\n");
    EXPECT_THROW(load_cohort(dir / "a.csv"), InvariantViolation);
    write_file(dir / "b.csv", std::string(kHeader) + "S1,acute,left,20,2,64,p.csv,np.csv\n");
    EXPECT_THROW(load_cohort(dir / "b.csv"), InvariantViolation);
    write_file(dir / "c.csv", std::string(kHeader) + "S1,acute,left,20,1,30,p.csv,np.csv\n");
    EXPECT_THROW(load_cohort(dir / "c.csv"), InvariantViolation);
}

TEST(Manifest, MissingIniIsMalformedRow) {
    TempDir dir("ingest");
    write_recording(dir / "p.csv", 10);
    write_recording(dir / "np.csv", 10);
    write_file(dir / "m.csv", std::string(kHeader) + "S1,acute,left,,2,30,p.csv,np.csv\n");
    EXPECT_THROW(load_cohort(dir / "m.csv"), MalformedRow);
}

TEST(Manifest, MissingCahaiAllowed) {
    TempDir dir("ingest");
    write_recording(dir / "p.csv", 10);
    write_recording(dir / "np.csv", 10);
    write_file(dir / "m.csv", std::string(kHeader) + "S1,chronic,right,20,2,NA,p.csv,np.csv\n" +
                                  "S1,chronic,right,20,3,,p.csv,np.csv\n");
    const auto cohort = load_cohort(dir / "m.csv");
    ASSERT_EQ(cohort.visits.size(), 2u);
    EXPECT_FALSE(cohort.visits[0].cahai.has_value());
    EXPECT_FALSE(cohort.visits[1].cahai.has_value());
    EXPECT_EQ(cohort.subjects.at(0).group, Group::Chronic);
    EXPECT_EQ(cohort.subjects.at(0).paralysed_side, Side::Right);
}

TEST(Manifest, ConflictingSubjectMetadataRejected) {
    TempDir dir("ingest");
    write_recording(dir / "p.csv", 10);
    write_recording(dir / "np.csv", 10);
    write_file(dir / "m.csv", std::string(kHeader) + "S1,acute,left,20,2,30,p.csv,np.csv\n" +
                                  "S1,acute,left,21,3,30,p.csv,np.csv\n");
    EXPECT_THROW(load_cohort(dir / "m.csv"), InvariantViolation);
}

TEST(Manifest, MissingRecordingFile) {
    TempDir dir("ingest");
    write_recording(dir / "p.csv", 10);
    write_file(dir / "m.csv", std::string(kHeader) + "S1,acute,left,20,2,30,p.csv,gone.csv\n");
    EXPECT_THROW(load_cohort(dir / "m.csv"), MissingFile);
}

TEST(Manifest, BadFieldIsMalformedRow) {
    TempDir dir("ingest");
    write_recording(dir / "p.csv", 10);
    write_recording(dir / "np.csv", 10);
    write_file(dir / "m.csv", std::string(kHeader) + "S1,subacute,left,20,2,30,p.csv,np.csv\n");
    EXPECT_THROW(load_cohort(dir / "m.csv"), Error);
}

TEST(Manifest, SyntheticCohortRoundTrips) {
    TempDir dir("ingest");
    SynthConfig cfg;
    cfg.seed = 11;
    cfg.n_acute = 1;
    cfg.n_chronic = 1;
    cfg.seconds_per_visit = 128;
    const auto original = synthesize_cohort(cfg);
    const auto manifest = write_cohort(dir / "a", original);
    const auto loaded = load_cohort(manifest);
    EXPECT_EQ(loaded, original);
    const auto manifest2 = write_cohort(dir / "b", loaded);
    EXPECT_EQ(load_cohort(manifest2), loaded);
    EXPECT_EQ(testutil::read_file(manifest), testutil::read_file(manifest2));
}

TEST(TriaxialCsv, ThreeRows) {
    TempDir dir("ingest");
    write_file(dir / "r.csv", "t_seconds,ax_g,ay_g,az_g\n0.00,0,0,1\n0.01,0.1,0.2,0.9\n0.02,0,0,1\n");
    const auto rec = read_triaxial_csv(dir / "r.csv");
    ASSERT_EQ(rec.samples.size(), 3u);
    EXPECT_DOUBLE_EQ(rec.samples[1].ax, 0.1);
    EXPECT_DOUBLE_EQ(rec.samples[1].az, 0.9);
    EXPECT_NEAR(rec.sample_rate_hz, 100.0, 1e-9);
}

TEST(TriaxialCsv, DuplicatedTimestamp) {
    TempDir dir("ingest");
    write_file(dir / "r.csv", "t_seconds,ax_g,ay_g,az_g\n0.00,0,0,1\n0.01,0,0,1\n0.01,0,0,1\n");
    try {
        read_triaxial_csv(dir / "r.csv");
        FAIL();
    } catch (const NonMonotonicTime& e) {
        EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
    }
}

TEST(TriaxialCsv, ParseError) {
    TempDir dir("ingest");
    write_file(dir / "r.csv", "t_seconds,ax_g,ay_g,az_g\n0.00,0,zero,1\n");
    EXPECT_THROW(read_triaxial_csv(dir / "r.csv"), ParseError);
}

TEST(TriaxialCsv, HeaderOnlyRejected) {
    TempDir dir("ingest");
    write_file(dir / "r.csv", "t_seconds,ax_g,ay_g,az_g\n");
    EXPECT_THROW(read_triaxial_csv(dir / "r.csv"), Error);
}

TEST(TriaxialCsv, TenSecondsAt100Hz) {
    TempDir dir("ingest");
    TriaxialRecording rec;
    rec.sample_rate_hz = 100.0;
    for (int i = 0; i < 1000; ++i) rec.samples.push_back({i / 100.0, 0.0, 0.0, 1.0});
    write_triaxial_csv(dir / "r.csv", rec);
    const auto back = read_triaxial_csv(dir / "r.csv", 100.0);
    EXPECT_EQ(back.samples.size(), 1000u);
    EXPECT_NEAR(back.sample_rate_hz, 100.0, 1e-6);
    EXPECT_EQ(back.samples, rec.samples);
}

TEST(TriaxialCsv, DeclaredRateMismatch) {
    TempDir dir("ingest");
    write_recording(dir / "r.csv", 50, 100.0);
    EXPECT_THROW(read_triaxial_csv(dir / "r.csv", 50.0), InvariantViolation);
    EXPECT_NO_THROW(read_triaxial_csv(dir / "r.csv", 95.0));
}

TEST(TriaxialCsv, MedianGapIgnoresDeviceGaps) {
    TempDir dir("ingest");
    std::string text = "t_seconds,ax_g,ay_g,az_g\n";
    for (int i = 0; i < 200; ++i) text += std::to_string(i / 50.0 + (i >= 100 ? 30.0 : 0.0)) + ",0,0,1\n";
    write_file(dir / "r.csv", text);
    EXPECT_NEAR(read_triaxial_csv(dir / "r.csv").sample_rate_hz, 50.0, 0.5);
}

TEST(Recording, ValidateInvariants) {
    TriaxialRecording rec;
    rec.samples = {{0.0, 0, 0, 1}, {0.5, 0, 0, 1}};
    EXPECT_NO_THROW(validate_recording(rec));
    rec.samples.push_back({0.5, 0, 0, 1});
    EXPECT_THROW(validate_recording(rec), NonMonotonicTime);
    rec.samples.pop_back();
    rec.sample_rate_hz = 0.0;
    EXPECT_THROW(validate_recording(rec), InvariantViolation);
}

TEST(Enums, TextRoundTrip) {
    EXPECT_EQ(parse_group(to_string(Group::Acute)), Group::Acute);
    EXPECT_EQ(parse_group(to_string(Group::Chronic)), Group::Chronic);
    EXPECT_EQ(parse_side(to_string(Side::Left)), Side::Left);
    EXPECT_EQ(parse_side(to_string(Side::Right)), Side::Right);
}
