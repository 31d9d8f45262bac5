#include "actirehab/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "actirehab/csv.hpp"
#include "actirehab/error.hpp"

namespace actirehab {

double rmse(std::span<const double> y_true, std::span<const double> y_pred) {
    if (y_true.size() != y_pred.size() || y_true.empty()) {
        throw DimensionMismatch("rmse needs equal, non-empty inputs");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const double d = y_true[i] - y_pred[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(y_true.size()));
}

CvReport loso_cv(const FeatureTable& table, const ModelSpec& spec, Group group,
                 std::string model_name) {
    std::vector<std::string> subjects;
    std::map<std::string, std::vector<std::size_t>> rows_of;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        auto& v = rows_of[table.subject_ids[r]];
        if (v.empty()) subjects.push_back(table.subject_ids[r]);
        v.push_back(r);
    }
    if (subjects.size() < 2) {
        throw InsufficientSubjects("leave-one-subject-out needs >= 2 subjects, have " +
                                   std::to_string(subjects.size()));
    }

    CvReport report;
    report.group = group;
    report.model_name = std::move(model_name);
    double total = 0.0;
    for (const auto& held_out : subjects) {
        std::vector<std::size_t> train_rows;
        for (const auto& s : subjects) {
            if (s == held_out) continue;
            const auto& rs = rows_of[s];
            train_rows.insert(train_rows.end(), rs.begin(), rs.end());
        }
        std::sort(train_rows.begin(), train_rows.end());
        ModelSpec fold_spec = spec;
        const auto model = train_model(table.select_rows(train_rows), fold_spec);
        const auto preds = predict_subject(model, table.select_rows(rows_of[held_out]));

        std::vector<double> yt;
        std::vector<double> yp;
        for (const auto& p : preds) {
            if (!p.y_true) continue;
            yt.push_back(*p.y_true);
            yp.push_back(p.y_pred);
            report.predictions.push_back(p);
        }
        if (yt.empty()) continue;  // no scored visit to evaluate
        const double e = rmse(yt, yp);
        report.per_subject_rmse.emplace_back(held_out, e);
        total += e;
    }
    if (report.per_subject_rmse.empty()) {
        throw InsufficientSubjects("no subject has a scored visit");
    }
    report.mean_rmse = total / static_cast<double>(report.per_subject_rmse.size());
    return report;
}

double interval_coverage(const std::vector<PredictionRow>& predictions) {
    std::size_t hit = 0;
    std::size_t total = 0;
    for (const auto& p : predictions) {
        if (!p.y_true) continue;
        ++total;
        if (*p.y_true >= p.lo95 && *p.y_true <= p.hi95) ++hit;
    }
    return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b, bool* constant) {
    if (a.size() != b.size()) throw DimensionMismatch("pearson: lengths differ");
    const Eigen::ArrayXd da = a.array() - a.mean();
    const Eigen::ArrayXd db = b.array() - b.mean();
    const double sa = std::sqrt((da * da).sum());
    const double sb = std::sqrt((db * db).sum());
    const double eps_a = 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()) * std::sqrt(double(a.size()));
    const double eps_b = 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff()) * std::sqrt(double(b.size()));
    if (sa <= eps_a || sb <= eps_b) {
        if (constant) *constant = true;
        return 0.0;
    }
    if (constant) *constant = false;
    return std::clamp((da * db).sum() / (sa * sb), -1.0, 1.0);
}

CorrelationResult correlation_table(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                    std::vector<std::string> names) {
    if (x.rows() != y.size()) throw DimensionMismatch("correlation_table: rows vs y");
    if (x.rows() < 3) throw DimensionMismatch("correlation_table needs >= 3 rows");
    if (names.empty()) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) names.push_back("x" + std::to_string(c));
    }
    CorrelationResult out;
    out.names = std::move(names);
    out.r.resize(x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        bool constant = false;
        out.r(c) = pearson(x.col(c), y, &constant);
        out.constant.push_back(constant);
    }
    return out;
}

std::string format_correlation_grid(const CorrelationResult& corr) {
    static const std::vector<std::string> families = {"sad_p", "sad_np", "pnp1", "pnp2"};
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < corr.names.size(); ++i) pos[corr.names[i]] = i;
    std::ostringstream os;
    os << std::left << std::setw(10) << "scale";
    for (const auto& f : families) os << std::right << std::setw(9) << f;
    os << '\n';
    for (auto k : kAllScales) {
        os << std::left << std::setw(10) << ("k=" + std::string(label(k)));
        for (const auto& f : families) {
            const auto it = pos.find(f + "_" + std::string(column_suffix(k)));
            os << std::right << std::setw(9);
            if (it == pos.end()) {
                os << "-";
            } else {
                std::ostringstream cell;
                cell << std::fixed << std::setprecision(2)
                     << corr.r(static_cast<Eigen::Index>(it->second));
                os << cell.str();
            }
        }
        os << '\n';
    }
    if (const auto it = pos.find("ini"); it != pos.end()) {
        std::ostringstream cell;
        cell << std::fixed << std::setprecision(2) << corr.r(static_cast<Eigen::Index>(it->second));
        os << std::left << std::setw(10) << "ini" << std::right << std::setw(9) << cell.str() << '\n';
    }
    return os.str();
}

Eigen::MatrixXd cross_correlation(const Eigen::MatrixXd& x) {
    if (x.rows() < 3) throw DimensionMismatch("cross_correlation needs >= 3 rows");
    const auto p = x.cols();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            m(i, j) = m(j, i) = pearson(x.col(i), x.col(j));
        }
    }
    return m;
}

std::vector<std::string> rank_by_magnitude(const std::vector<std::string>& names,
                                           const std::vector<double>& values) {
    if (names.size() != values.size()) throw DimensionMismatch("rank: names vs values");
    std::vector<std::size_t> order(names.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(values[a]) > std::abs(values[b]);
    });
    std::vector<std::string> out;
    for (auto i : order) out.push_back(names[i]);
    return out;
}

FeatureRankings rank_features(const std::vector<std::string>& names,
                              const std::vector<double>& lasso_coefficients,
                              const std::vector<double>& correlations) {
    return {rank_by_magnitude(names, lasso_coefficients), rank_by_magnitude(names, correlations)};
}

std::size_t top_count(std::size_t m, double fraction) {
    const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(m) - 1e-12));
    return std::clamp<std::size_t>(k, m == 0 ? 0 : 1, m);
}

std::vector<SubsetResult> subset_experiment(const FeatureTable& table, Group group,
                                            const std::vector<std::string>& selected,
                                            const FeatureRankings& rankings, double fraction,
                                            const ModelSpec& base) {
    std::vector<SubsetResult> out;
    const auto run = [&](std::string label, std::vector<std::string> fixed) {
        ModelSpec spec = base;
        spec.kind = ModelKind::Lmgp;
        spec.fixed_features = fixed;
        spec.random_features = selected;
        auto report = loso_cv(table, spec, group, "lmgp:" + label);
        out.push_back({std::move(label), std::move(fixed), selected, std::move(report)});
    };
    run("full", selected);
    const auto k = top_count(selected.size(), fraction);
    const auto take = [&](const std::vector<std::string>& ranked) {
        return std::vector<std::string>(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k));
    };
    run("top-corr", take(rankings.by_correlation));
    run("top-lasso", take(rankings.by_lasso));
    return out;
}

nlohmann::json report_to_json(const CvReport& report) {
    nlohmann::json j;
    j["group"] = to_string(report.group);
    j["model"] = report.model_name;
    j["mean_rmse"] = report.mean_rmse;
    nlohmann::json per = nlohmann::json::array();
    for (const auto& [s, e] : report.per_subject_rmse) per.push_back({{"subject_id", s}, {"rmse", e}});
    j["per_subject_rmse"] = per;
    j["n_predictions"] = report.predictions.size();
    j["coverage95"] = interval_coverage(report.predictions);
    return j;
}

void write_predictions_csv(const std::filesystem::path& path,
                           const std::vector<PredictionRow>& predictions) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "subject_id,week,y_true,y_pred,lo95,hi95\n";
    for (const auto& p : predictions) {
        out << p.subject_id << ',' << p.week << ','
            << (p.y_true ? csv::format_double(*p.y_true) : std::string("NA")) << ','
            << csv::format_double(p.y_pred) << ',' << csv::format_double(p.lo95) << ','
            << csv::format_double(p.hi95) << '\n';
    }
}

void write_correlation_csv(const std::filesystem::path& path, const CorrelationResult& corr) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "feature,r,constant\n";
    for (std::size_t i = 0; i < corr.names.size(); ++i) {
        out << corr.names[i] << ',' << csv::format_double(corr.r(static_cast<Eigen::Index>(i))) << ','
            << (corr.constant[i] ? 1 : 0) << '\n';
    }
}

void write_matrix_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                      const Eigen::MatrixXd& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "feature";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << names[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << csv::format_double(m(i, j));
        out << '\n';
    }
}

}  // namespace actirehab
