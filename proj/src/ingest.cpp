#include "actirehab/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "actirehab/csv.hpp"
#include "actirehab/error.hpp"

namespace actirehab {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool in_score_range(double v) { return v >= kMinScore && v <= kMaxScore; }

bool is_missing(std::string_view cell) {
    const auto l = lower(cell);
    return l.empty() || l == "na" || l == "nan";
}

const std::vector<std::string> kManifestColumns = {
    "subject_id", "group", "paralysed_side", "ini",
    "week", "cahai", "path_paralysed", "path_nonparalysed"};

}  // namespace

std::string_view to_string(Group g) { return g == Group::Acute ? "acute" : "chronic"; }
std::string_view to_string(Side s) { return s == Side::Left ? "left" : "right"; }

Group parse_group(std::string_view text) {
    const auto l = lower(text);
    if (l == "acute") return Group::Acute;
    if (l == "chronic") return Group::Chronic;
    throw ParseError("unknown group '" + std::string(text) + "'");
}

Side parse_side(std::string_view text) {
    const auto l = lower(text);
    if (l == "left") return Side::Left;
    if (l == "right") return Side::Right;
    throw ParseError("unknown side '" + std::string(text) + "'");
}

const SubjectMeta& Cohort::subject(std::string_view id) const {
    for (const auto& s : subjects) {
        if (s.subject_id == id) return s;
    }
    throw InvariantViolation("unknown subject '" + std::string(id) + "'");
}

void validate_recording(const TriaxialRecording& rec) {
    if (!(rec.sample_rate_hz > 0.0) || !std::isfinite(rec.sample_rate_hz)) {
        throw InvariantViolation("sample_rate_hz must be > 0");
    }
    for (std::size_t i = 1; i < rec.samples.size(); ++i) {
        if (!(rec.samples[i].t > rec.samples[i - 1].t)) {
            throw NonMonotonicTime("first offending sample index " + std::to_string(i));
        }
    }
}

TriaxialRecording read_triaxial_csv(const fs::path& path, std::optional<double> declared_rate_hz) {
    const auto table = csv::read_file(path);
    if (table.header.empty() || table.rows.empty()) {
        throw ParseError(path.string() + ": need a header and at least one data row");
    }
    const auto ct = table.column("t_seconds");
    const auto cx = table.column("ax_g");
    const auto cy = table.column("ay_g");
    const auto cz = table.column("az_g");
    const auto width = std::max({ct, cx, cy, cz}) + 1;

    TriaxialRecording rec;
    rec.samples.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (row.size() < width) {
            throw ParseError(path.string() + ": line " + std::to_string(table.line_numbers[i]) +
                             " has too few fields");
        }
        rec.samples.push_back({csv::parse_double(row[ct], "t_seconds"),
                               csv::parse_double(row[cx], "ax_g"),
                               csv::parse_double(row[cy], "ay_g"),
                               csv::parse_double(row[cz], "az_g")});
    }
    for (std::size_t i = 1; i < rec.samples.size(); ++i) {
        if (!(rec.samples[i].t > rec.samples[i - 1].t)) {
            throw NonMonotonicTime(path.string() + ": first offending sample index " +
                                   std::to_string(i));
        }
    }

    if (rec.samples.size() < 2) {
        rec.sample_rate_hz = declared_rate_hz.value_or(100.0);
    } else {
        std::vector<double> rates;
        rates.reserve(rec.samples.size() - 1);
        for (std::size_t i = 1; i < rec.samples.size(); ++i) {
            rates.push_back(1.0 / (rec.samples[i].t - rec.samples[i - 1].t));
        }
        const auto mid = rates.begin() + static_cast<std::ptrdiff_t>(rates.size() / 2);
        std::nth_element(rates.begin(), mid, rates.end());
        double median = *mid;
        if (rates.size() % 2 == 0) {
            median = 0.5 * (median + *std::max_element(rates.begin(), mid));
        }
        rec.sample_rate_hz = median;
    }
    if (declared_rate_hz) {
        const double rel = std::abs(rec.sample_rate_hz - *declared_rate_hz) / *declared_rate_hz;
        if (rel > 0.10) {
            throw InvariantViolation(path.string() + ": inferred sample rate " +
                                     csv::format_double(rec.sample_rate_hz) +
                                     " Hz deviates >10% from declared " +
                                     csv::format_double(*declared_rate_hz) + " Hz");
        }
    }
    validate_recording(rec);
    return rec;
}

void write_triaxial_csv(const fs::path& path, const TriaxialRecording& rec) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "t_seconds,ax_g,ay_g,az_g\n";
    for (const auto& s : rec.samples) {
        out << csv::format_double(s.t) << ',' << csv::format_double(s.ax) << ','
            << csv::format_double(s.ay) << ',' << csv::format_double(s.az) << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

ManifestContents read_manifest(const fs::path& manifest_path) {
    const auto table = csv::read_file(manifest_path);
    ManifestContents out;
    if (table.header.empty()) return out;

    std::vector<std::size_t> idx;
    for (const auto& name : kManifestColumns) idx.push_back(table.column(name));
    const auto width = *std::max_element(idx.begin(), idx.end()) + 1;
    const auto base = manifest_path.parent_path();

    std::map<std::string, std::size_t> subject_index;
    std::set<std::pair<std::string, int>> seen_visits;

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto where = "row " + std::to_string(r + 1);
        if (row.size() < width) throw MalformedRow(where + ": too few fields");

        ManifestRow mr;
        try {
            mr.meta.subject_id = row[idx[0]];
            if (mr.meta.subject_id.empty()) throw MalformedRow(where + ": empty subject_id");
            mr.meta.group = parse_group(row[idx[1]]);
            mr.meta.paralysed_side = parse_side(row[idx[2]]);
            if (is_missing(row[idx[3]])) throw MalformedRow(where + ": missing ini");
            mr.meta.ini = csv::parse_double(row[idx[3]], "ini");
            mr.week = static_cast<int>(csv::parse_int(row[idx[4]], "week"));
            if (!is_missing(row[idx[5]])) mr.cahai = csv::parse_double(row[idx[5]], "cahai");
        } catch (const ParseError& e) {
            throw MalformedRow(where + ": " + e.what());
        }
        const auto& sid = mr.meta.subject_id;
        if (!in_score_range(mr.meta.ini)) {
            throw InvariantViolation("ini: subject " + sid + " value " +
                                     csv::format_double(mr.meta.ini));
        }
        if (mr.week < kFirstVisitWeek || mr.week > kLastVisitWeek) {
            throw InvariantViolation("week: subject " + sid + " value " + std::to_string(mr.week));
        }
        if (mr.cahai && !in_score_range(*mr.cahai)) {
            throw InvariantViolation("cahai: subject " + sid + " week " + std::to_string(mr.week) +
                                     " value " + csv::format_double(*mr.cahai));
        }
        if (row[idx[6]].empty() || row[idx[7]].empty()) {
            throw InvariantViolation("both sides: subject " + sid + " week " +
                                     std::to_string(mr.week) + " lacks a recording path");
        }
        mr.path_paralysed = base / row[idx[6]];
        mr.path_nonparalysed = base / row[idx[7]];

        if (auto it = subject_index.find(sid); it != subject_index.end()) {
            if (!(out.subjects[it->second] == mr.meta)) {
                throw InvariantViolation("subject_id unique: subject " + sid +
                                         " has conflicting metadata across rows");
            }
        } else {
            subject_index.emplace(sid, out.subjects.size());
            out.subjects.push_back(mr.meta);
        }
        if (!seen_visits.emplace(sid, mr.week).second) {
            throw InvariantViolation("visit unique: subject " + sid + " week " +
                                     std::to_string(mr.week) + " listed twice");
        }
        out.rows.push_back(std::move(mr));
    }
    return out;
}

Cohort load_cohort(const fs::path& manifest_path) {
    auto manifest = read_manifest(manifest_path);
    Cohort cohort;
    cohort.subjects = std::move(manifest.subjects);
    cohort.visits.reserve(manifest.rows.size());
    for (auto& row : manifest.rows) {
        VisitRecord v;
        v.subject_id = row.meta.subject_id;
        v.week = row.week;
        v.cahai = row.cahai;
        v.paralysed = read_triaxial_csv(row.path_paralysed);
        v.non_paralysed = read_triaxial_csv(row.path_nonparalysed);
        cohort.visits.push_back(std::move(v));
    }
    return cohort;
}

fs::path write_cohort(const fs::path& dir, const Cohort& cohort) {
    fs::create_directories(dir / "raw");
    const auto manifest_path = dir / "manifest.csv";
    std::ofstream out(manifest_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + manifest_path.string());
    out << "subject_id,group,paralysed_side,ini,week,cahai,path_paralysed,path_nonparalysed\n";
    for (const auto& v : cohort.visits) {
        const auto& meta = cohort.subject(v.subject_id);
        const auto stem = v.subject_id + "_w" + std::to_string(v.week);
        const auto rel_p = fs::path("raw") / (stem + "_p.csv");
        const auto rel_np = fs::path("raw") / (stem + "_np.csv");
        write_triaxial_csv(dir / rel_p, v.paralysed);
        write_triaxial_csv(dir / rel_np, v.non_paralysed);
        out << meta.subject_id << ',' << to_string(meta.group) << ','
            << to_string(meta.paralysed_side) << ',' << csv::format_double(meta.ini) << ','
            << v.week << ',' << (v.cahai ? csv::format_double(*v.cahai) : std::string("NA"))
            << ',' << rel_p.generic_string() << ',' << rel_np.generic_string() << '\n';
    }
    if (!out) throw IoError("write failed: " + manifest_path.string());
    return manifest_path;
}

}  // namespace actirehab
