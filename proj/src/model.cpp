#include "actirehab/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "actirehab/error.hpp"

namespace actirehab {

using nlohmann::json;

std::string_view to_string(ModelKind k) { return k == ModelKind::Linear ? "linear" : "lmgp"; }
std::string_view to_string(PredictionMode m) {
    return m == PredictionMode::Monitoring ? "monitoring" : "cold";
}

ModelKind parse_model_kind(std::string_view text) {
    if (text == "linear") return ModelKind::Linear;
    if (text == "lmgp") return ModelKind::Lmgp;
    throw UsageError("unknown model '" + std::string(text) + "' (linear|lmgp)");
}

PredictionMode parse_prediction_mode(std::string_view text) {
    if (text == "monitoring") return PredictionMode::Monitoring;
    if (text == "cold") return PredictionMode::Cold;
    throw UsageError("unknown mode '" + std::string(text) + "' (monitoring|cold)");
}

namespace {

std::vector<std::string> union_of(const std::vector<std::string>& a,
                                  const std::vector<std::string>& b) {
    std::vector<std::string> out = a;
    for (const auto& n : b) {
        if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    }
    return out;
}

Eigen::MatrixXd columns_of(const FeatureTable& t, const std::vector<std::string>& names,
                           const std::vector<Eigen::Index>& rows) {
    const auto idx = t.columns(names);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < idx.size(); ++c) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                t.values(rows[r], static_cast<Eigen::Index>(idx[c]));
        }
    }
    return out;
}

std::vector<Eigen::Index> all_rows(const FeatureTable& t) {
    std::vector<Eigen::Index> rows(t.rows());
    std::iota(rows.begin(), rows.end(), 0);
    return rows;
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vec_from(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json mat_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec_json(m.row(r).transpose()));
    return rows;
}

Eigen::MatrixXd mat_from(const json& j, Eigen::Index cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const auto row = vec_from(j[r]);
        if (row.size() != cols) throw ParseError("model JSON: ragged matrix");
        m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return m;
}

}  // namespace

TrainedModel train_model(const FeatureTable& table, const ModelSpec& spec) {
    std::vector<Eigen::Index> scored;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        if (table.cahai[r]) scored.push_back(static_cast<Eigen::Index>(r));
    }
    TrainedModel m;
    m.spec = spec;
    const auto used = spec.kind == ModelKind::Lmgp ? union_of(spec.fixed_features, spec.random_features)
                                                   : spec.fixed_features;
    const Eigen::MatrixXd raw = columns_of(table, used, scored);
    Eigen::VectorXd y(static_cast<Eigen::Index>(scored.size()));
    for (std::size_t i = 0; i < scored.size(); ++i) {
        y(static_cast<Eigen::Index>(i)) = *table.cahai[static_cast<std::size_t>(scored[i])];
    }
    if (used.empty()) {
        m.standardizer.names = {};
        m.standardizer.means.resize(0);
        m.standardizer.stds.resize(0);
    } else {
        m.standardizer = znorm_fit(raw, used);
    }
    const Eigen::MatrixXd z = used.empty() ? raw : m.standardizer.apply(raw);
    const auto pick = [&](const std::vector<std::string>& names) {
        Eigen::MatrixXd out(z.rows(), static_cast<Eigen::Index>(names.size()));
        for (std::size_t c = 0; c < names.size(); ++c) {
            const auto pos = std::find(used.begin(), used.end(), names[c]) - used.begin();
            out.col(static_cast<Eigen::Index>(c)) = z.col(pos);
        }
        return out;
    };

    if (spec.kind == ModelKind::Linear) {
        m.linear = ols_fit(pick(spec.fixed_features), y, spec.fixed_features);
        return m;
    }
    if (spec.random_features.empty()) throw UsageError("LMGP needs at least one random-effects feature");
    LmgpTrainingData data;
    data.x_fixed = pick(spec.fixed_features);
    data.phi = pick(spec.random_features);
    data.y = y;
    for (auto r : scored) {
        data.subject_ids.push_back(table.subject_ids[static_cast<std::size_t>(r)]);
        data.weeks.push_back(table.weeks[static_cast<std::size_t>(r)]);
    }
    data.fixed_names = spec.fixed_features;
    data.random_names = spec.random_features;
    m.lmgp = lmgp_fit(data, spec.lmgp);
    m.linear = m.lmgp->fixed;
    return m;
}

std::vector<PredictionRow> predict_subject(const TrainedModel& model, const FeatureTable& rows) {
    std::vector<Eigen::Index> order = all_rows(rows);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return rows.weeks[static_cast<std::size_t>(a)] < rows.weeks[static_cast<std::size_t>(b)];
    });
    const auto& used = model.standardizer.names;
    const Eigen::MatrixXd raw = columns_of(rows, used, order);
    const Eigen::MatrixXd z = used.empty() ? raw : model.standardizer.apply(raw);
    const auto pick = [&](const std::vector<std::string>& names) {
        Eigen::MatrixXd out(z.rows(), static_cast<Eigen::Index>(names.size()));
        for (std::size_t c = 0; c < names.size(); ++c) {
            const auto pos = std::find(used.begin(), used.end(), names[c]) - used.begin();
            out.col(static_cast<Eigen::Index>(c)) = z.col(pos);
        }
        return out;
    };
    const Eigen::MatrixXd x_fixed = pick(model.spec.fixed_features);

    std::vector<PredictionRow> out;
    if (model.spec.kind == ModelKind::Linear || !model.lmgp) {
        const double half = 1.96 * std::sqrt(model.linear.sigma2);
        for (std::size_t i = 0; i < order.size(); ++i) {
            const auto r = static_cast<std::size_t>(order[i]);
            const double pred = model.linear.predict(Eigen::VectorXd(x_fixed.row(static_cast<Eigen::Index>(i))));
            out.push_back({rows.subject_ids[r], rows.weeks[r], rows.cahai[r], pred, pred - half, pred + half});
        }
        return out;
    }

    const auto& lmgp = *model.lmgp;
    const Eigen::MatrixXd phi = pick(model.spec.random_features);
    std::vector<Eigen::Index> context_rows;
    std::vector<double> context_resid;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto r = static_cast<std::size_t>(order[i]);
        const auto ii = static_cast<Eigen::Index>(i);
        SubjectContext ctx;
        if (model.spec.mode == PredictionMode::Monitoring) {
            ctx.phi = phi(context_rows, Eigen::all);
            ctx.residuals = Eigen::Map<const Eigen::VectorXd>(
                context_resid.data(), static_cast<Eigen::Index>(context_resid.size()));
        } else {
            ctx.phi.resize(0, phi.cols());
            ctx.residuals.resize(0);
        }
        const Eigen::VectorXd x_row = x_fixed.row(ii).transpose();
        const auto p = lmgp_predict(lmgp, ctx, phi.row(ii).transpose(), x_row,
                                    model.spec.interval_add_noise);
        out.push_back({rows.subject_ids[r], rows.weeks[r], rows.cahai[r], p.mean, p.lo95, p.hi95});
        if (rows.cahai[r]) {
            context_rows.push_back(ii);
            context_resid.push_back(*rows.cahai[r] - p.fixed);
        }
    }
    return out;
}

std::vector<PredictionRow> predict_table(const TrainedModel& model, const FeatureTable& table) {
    std::vector<std::string> subjects;
    std::map<std::string, std::vector<std::size_t>> rows_of;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        auto& v = rows_of[table.subject_ids[r]];
        if (v.empty()) subjects.push_back(table.subject_ids[r]);
        v.push_back(r);
    }
    std::vector<PredictionRow> out;
    for (const auto& s : subjects) {
        const auto part = predict_subject(model, table.select_rows(rows_of[s]));
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

json model_to_json(const TrainedModel& model) {
    json doc;
    doc["version"] = kModelFormatVersion;
    doc["kind"] = to_string(model.spec.kind);
    doc["mode"] = to_string(model.spec.mode);
    doc["interval_add_noise"] = model.spec.interval_add_noise;
    doc["fixed_features"] = model.spec.fixed_features;
    doc["random_features"] = model.spec.random_features;
    doc["standardizer"] = {{"names", model.standardizer.names},
                           {"means", vec_json(model.standardizer.means)},
                           {"stds", vec_json(model.standardizer.stds)}};
    doc["fixed_effects"] = {{"beta", vec_json(model.linear.beta)}, {"sigma2", model.linear.sigma2}};
    if (model.lmgp) {
        const auto& g = *model.lmgp;
        doc["theta"] = {{"v0", g.theta.v0},
                        {"w", vec_json(g.theta.w)},
                        {"sigma2", g.theta.sigma2},
                        {"log", vec_json(to_log_params(g.theta))}};
        doc["log_marginal"] = g.log_marginal;
        doc["optimizer"] = {{"iterations", g.optimizer_iterations}, {"converged", g.converged}};
        json blocks = json::array();
        for (const auto& b : g.blocks) {
            blocks.push_back({{"subject_id", b.subject_id},
                              {"weeks", b.weeks},
                              {"phi", mat_json(b.phi)},
                              {"residuals", vec_json(b.residuals)}});
        }
        doc["residual_blocks"] = blocks;
    }
    return doc;
}

TrainedModel model_from_json(const json& doc) {
    try {
        if (doc.at("version").get<std::string>() != kModelFormatVersion) {
            throw ParseError("model JSON: unsupported version " + doc.at("version").dump());
        }
        TrainedModel m;
        m.spec.kind = parse_model_kind(doc.at("kind").get<std::string>());
        m.spec.mode = parse_prediction_mode(doc.at("mode").get<std::string>());
        m.spec.interval_add_noise = doc.at("interval_add_noise").get<bool>();
        m.spec.fixed_features = doc.at("fixed_features").get<std::vector<std::string>>();
        m.spec.random_features = doc.at("random_features").get<std::vector<std::string>>();
        const auto& st = doc.at("standardizer");
        m.standardizer.names = st.at("names").get<std::vector<std::string>>();
        m.standardizer.means = vec_from(st.at("means"));
        m.standardizer.stds = vec_from(st.at("stds"));
        m.linear.feature_names = m.spec.fixed_features;
        m.linear.beta = vec_from(doc.at("fixed_effects").at("beta"));
        m.linear.sigma2 = doc.at("fixed_effects").at("sigma2").get<double>();
        if (m.spec.kind == ModelKind::Lmgp) {
            LmgpModel g;
            g.fixed = m.linear;
            g.random_features = m.spec.random_features;
            const auto& th = doc.at("theta");
            g.theta.v0 = th.at("v0").get<double>();
            g.theta.w = vec_from(th.at("w"));
            g.theta.sigma2 = th.at("sigma2").get<double>();
            g.log_marginal = doc.at("log_marginal").get<double>();
            g.optimizer_iterations = doc.at("optimizer").at("iterations").get<int>();
            g.converged = doc.at("optimizer").at("converged").get<bool>();
            for (const auto& b : doc.at("residual_blocks")) {
                SubjectBlock block;
                block.subject_id = b.at("subject_id").get<std::string>();
                block.weeks = b.at("weeks").get<std::vector<int>>();
                block.phi = mat_from(b.at("phi"), g.theta.dims());
                block.residuals = vec_from(b.at("residuals"));
                g.blocks.push_back(std::move(block));
            }
            m.lmgp = std::move(g);
        }
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    }
}

}  // namespace actirehab
