#include "actirehab/features.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <map>

#include "actirehab/csv.hpp"
#include "actirehab/error.hpp"
#include "actirehab/signal.hpp"

namespace actirehab {

namespace {

std::vector<std::string> make_names(const std::vector<std::string>& prefixes, bool with_ini) {
    std::vector<std::string> out;
    for (const auto& p : prefixes) {
        for (auto k : kAllScales) out.push_back(p + "_" + std::string(column_suffix(k)));
    }
    if (with_ini) out.emplace_back("ini");
    return out;
}

std::string visit_tag(const VisitRecord& v) {
    return "subject " + v.subject_id + " week " + std::to_string(v.week) + ": ";
}

}  // namespace

std::array<double, kFeatureCount> FeatureVector::flatten() const {
    std::array<double, kFeatureCount> out{};
    for (std::size_t i = 0; i < kNumScales; ++i) {
        out[i] = sad_p[i];
        out[kNumScales + i] = sad_np[i];
        out[2 * kNumScales + i] = pnp1[i];
        out[3 * kNumScales + i] = pnp2[i];
    }
    out[4 * kNumScales] = ini;
    return out;
}

const std::vector<std::string>& feature_names() {
    static const auto names = make_names({"sad_p", "sad_np", "pnp1", "pnp2"}, true);
    return names;
}

const std::vector<std::string>& ssd_feature_names() {
    static const auto names = make_names({"ssd_p", "ssd_np"}, false);
    return names;
}

double sad(const WaveletCoefficients& coeffs, ScaleIndex k) {
    const auto& w = coeffs.scale_vector(k);
    double acc = 0.0;
    for (double v : w) acc += std::abs(v);
    return acc / static_cast<double>(w.size());
}

double ssd(const WaveletCoefficients& coeffs, ScaleIndex k) {
    const auto& w = coeffs.scale_vector(k);
    double acc = 0.0;
    for (double v : w) acc += v * v;
    return acc / static_cast<double>(w.size());
}

PnpPair pnp(double sad_p, double sad_np) {
    if (sad_np == 0.0) {
        if (sad_p == 0.0) return {1.0, 0.0};
        return {kPnp1Cap, -1.0};
    }
    return {std::min(sad_p / sad_np, kPnp1Cap), (sad_np - sad_p) / (sad_np + sad_p)};
}

SideFeatures side_features_from_vm(std::span<const double> vm, Wrist side, const FilterBank& bank) {
    const auto n = usable_length(vm.size());
    if (n == 0) {
        throw BadLength("VM series of " + std::to_string(vm.size()) +
                        " s is shorter than the 128 s needed for 7 levels");
    }
    const auto coeffs = decompose(vm.first(n), bank);
    SideFeatures out;
    out.side = side;
    for (auto k : kAllScales) {
        out.sad[index_of(k)] = sad(coeffs, k);
        out.ssd[index_of(k)] = ssd(coeffs, k);
    }
    return out;
}

SideFeatures side_features(const TriaxialRecording& rec, Wrist side, const FilterBank& bank) {
    const auto vm = secondwise_vm(rec);
    return side_features_from_vm(vm.values, side, bank);
}

FeatureVector combine_sides(const SideFeatures& paralysed, const SideFeatures& non_paralysed,
                            double ini) {
    FeatureVector fv;
    fv.sad_p = paralysed.sad;
    fv.sad_np = non_paralysed.sad;
    for (std::size_t i = 0; i < kNumScales; ++i) {
        const auto r = pnp(fv.sad_p[i], fv.sad_np[i]);
        fv.pnp1[i] = r.pnp1;
        fv.pnp2[i] = r.pnp2;
    }
    fv.ini = ini;
    return fv;
}

VisitFeatures build_visit_features(const VisitRecord& visit, const SubjectMeta& meta,
                                   const FilterBank& bank) {
    VisitFeatures out;
    out.subject_id = visit.subject_id;
    out.group = meta.group;
    out.week = visit.week;
    out.cahai = visit.cahai;
    try {
        out.paralysed = side_features(visit.paralysed, Wrist::Paralysed, bank);
        out.non_paralysed = side_features(visit.non_paralysed, Wrist::NonParalysed, bank);
    } catch (const BadLength& e) {
        throw BadLength(visit_tag(visit) + e.detail());
    } catch (const EmptyRecording& e) {
        throw EmptyRecording(visit_tag(visit) + e.detail());
    } catch (const NonFiniteInput& e) {
        throw NonFiniteInput(visit_tag(visit) + e.detail());
    }
    out.features = combine_sides(out.paralysed, out.non_paralysed, meta.ini);
    return out;
}

FeatureVector build_feature_vector(const VisitRecord& visit, const SubjectMeta& meta,
                                   const FilterBank& bank) {
    return build_visit_features(visit, meta, bank).features;
}

std::size_t FeatureTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return i;
    }
    throw DimensionMismatch("unknown feature column '" + name + "'");
}

std::vector<std::size_t> FeatureTable::columns(const std::vector<std::string>& wanted) const {
    std::vector<std::size_t> out;
    out.reserve(wanted.size());
    for (const auto& n : wanted) out.push_back(column(n));
    return out;
}

FeatureTable FeatureTable::select_rows(const std::vector<std::size_t>& rows) const {
    FeatureTable out;
    out.names = names;
    out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto src = rows[r];
        out.subject_ids.push_back(subject_ids[src]);
        out.groups.push_back(groups[src]);
        out.weeks.push_back(weeks[src]);
        out.cahai.push_back(cahai[src]);
        out.values.row(static_cast<Eigen::Index>(r)) = values.row(static_cast<Eigen::Index>(src));
    }
    return out;
}

FeatureTable FeatureTable::filter_group(Group g) const {
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < rows(); ++r) {
        if (groups[r] == g) keep.push_back(r);
    }
    return select_rows(keep);
}

ExtractedFeatures extract_features(const Cohort& cohort, const FilterBank& bank, unsigned workers) {
    const auto n = cohort.visits.size();
    std::vector<VisitFeatures> results(n);
    auto work = [&](std::size_t i) {
        const auto& v = cohort.visits[i];
        results[i] = build_visit_features(v, cohort.subject(v.subject_id), bank);
    };
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) work(i);
    } else {
        // Strided partition; each task writes only its own slots.
        std::vector<std::future<void>> tasks;
        for (unsigned w = 0; w < workers; ++w) {
            tasks.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t i = w; i < n; i += workers) work(i);
            }));
        }
        for (auto& t : tasks) t.get();
    }

    ExtractedFeatures out;
    out.model.names = feature_names();
    out.ssd.names = ssd_feature_names();
    out.model.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(kFeatureCount));
    out.ssd.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(2 * kNumScales));
    for (auto* t : {&out.model, &out.ssd}) {
        for (const auto& r : results) {
            t->subject_ids.push_back(r.subject_id);
            t->groups.push_back(r.group);
            t->weeks.push_back(r.week);
            t->cahai.push_back(r.cahai);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        const auto flat = results[i].features.flatten();
        for (std::size_t c = 0; c < kFeatureCount; ++c) {
            out.model.values(row, static_cast<Eigen::Index>(c)) = flat[c];
        }
        for (std::size_t c = 0; c < kNumScales; ++c) {
            out.ssd.values(row, static_cast<Eigen::Index>(c)) = results[i].paralysed.ssd[c];
            out.ssd.values(row, static_cast<Eigen::Index>(kNumScales + c)) =
                results[i].non_paralysed.ssd[c];
        }
    }
    return out;
}

void write_feature_table(const std::filesystem::path& path, const FeatureTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "subject_id,group,week";
    for (const auto& n : table.names) out << ',' << n;
    out << ",cahai\n";
    for (std::size_t r = 0; r < table.rows(); ++r) {
        out << table.subject_ids[r] << ',' << to_string(table.groups[r]) << ',' << table.weeks[r];
        for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
            out << ',' << csv::format_double(table.values(static_cast<Eigen::Index>(r), c));
        }
        out << ',' << (table.cahai[r] ? csv::format_double(*table.cahai[r]) : std::string("NA"))
            << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

FeatureTable read_feature_table(const std::filesystem::path& path) {
    const auto raw = csv::read_file(path);
    if (raw.header.size() < 4 || raw.header[0] != "subject_id" || raw.header[1] != "group" ||
        raw.header[2] != "week" || raw.header.back() != "cahai") {
        throw ParseError(path.string() + ": expected subject_id,group,week,<features...>,cahai");
    }
    FeatureTable t;
    t.names.assign(raw.header.begin() + 3, raw.header.end() - 1);
    const auto width = raw.header.size();
    t.values.resize(static_cast<Eigen::Index>(raw.rows.size()),
                    static_cast<Eigen::Index>(t.names.size()));
    for (std::size_t r = 0; r < raw.rows.size(); ++r) {
        const auto& row = raw.rows[r];
        if (row.size() != width) {
            throw MalformedRow(path.string() + ": line " + std::to_string(raw.line_numbers[r]) +
                               " has " + std::to_string(row.size()) + " fields, expected " +
                               std::to_string(width));
        }
        t.subject_ids.push_back(row[0]);
        t.groups.push_back(parse_group(row[1]));
        t.weeks.push_back(static_cast<int>(csv::parse_int(row[2], "week")));
        for (std::size_t c = 0; c < t.names.size(); ++c) {
            t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                csv::parse_double(row[3 + c], t.names[c]);
        }
        const auto& last = row.back();
        if (last.empty() || last == "NA") {
            t.cahai.emplace_back();
        } else {
            t.cahai.emplace_back(csv::parse_double(last, "cahai"));
        }
    }
    return t;
}

}  // namespace actirehab
