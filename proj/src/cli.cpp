#include "actirehab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "actirehab/config.hpp"
#include "actirehab/csv.hpp"
#include "actirehab/error.hpp"
#include "actirehab/eval.hpp"
#include "actirehab/features.hpp"
#include "actirehab/ingest.hpp"
#include "actirehab/lasso.hpp"
#include "actirehab/model.hpp"
#include "actirehab/signal.hpp"
#include "actirehab/standardize.hpp"
#include "actirehab/synth.hpp"
#include "actirehab/wavelet.hpp"

namespace actirehab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Tracks what a subcommand writes so the run log can hash it and a failure
// can remove it.
class Run {
public:
    Run(std::string command, PipelineConfig config)
        : command_(std::move(command)), config_(std::move(config)), out_(config_.out) {}

    const PipelineConfig& config() const { return config_; }
    const fs::path& out_dir() const { return out_; }

    fs::path artifact(const std::string& relative) {
        const fs::path p = out_ / relative;
        fs::create_directories(p.parent_path());
        written_.push_back(relative);
        return p;
    }

    json stamp() const {
        return {{"config_hash", config_.hash()}, {"tool_version", std::string(kToolVersion)}};
    }

    void write_json(const std::string& relative, json doc) {
        const json s = stamp();
        for (const auto& [k, v] : s.items()) doc[k] = v;
        std::ofstream f(artifact(relative), std::ios::binary);
        if (!f) throw IoError("cannot write " + relative);
        f << doc.dump(2) << '\n';
    }

    void write_text(const std::string& relative, const std::string& text) {
        std::ofstream f(artifact(relative), std::ios::binary);
        if (!f) throw IoError("cannot write " + relative);
        f << text;
    }

    void finish(json extra = json::object()) {
        std::vector<std::string> files;
        for (const auto& rel : written_) {
            const fs::path p = out_ / rel;
            if (fs::is_directory(p)) {
                for (const auto& e : fs::recursive_directory_iterator(p)) {
                    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), out_).generic_string());
                }
            } else if (fs::exists(p)) {
                files.push_back(fs::path(rel).generic_string());
            }
        }
        std::sort(files.begin(), files.end());
        files.erase(std::unique(files.begin(), files.end()), files.end());
        json artifacts = json::array();
        for (const auto& f : files) artifacts.push_back({{"path", f}, {"sha256", sha256_file(out_ / f)}});
        json log = stamp();
        log["command"] = command_;
        log["config"] = config_.canonical_text();
        log["artifacts"] = artifacts;
        log["details"] = std::move(extra);
        const std::string name = "run_" + command_ + ".json";
        written_.push_back(name);
        std::ofstream f(out_ / name, std::ios::binary);
        if (!f) throw IoError("cannot write " + name);
        f << log.dump(2) << '\n';
    }

    void rollback() noexcept {
        std::error_code ec;
        for (const auto& rel : written_) fs::remove_all(out_ / rel, ec);
    }

private:
    std::string command_;
    PipelineConfig config_;
    fs::path out_;
    std::vector<std::string> written_;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<Group> parse_groups(const std::string& text) {
    if (text == "both") return {Group::Acute, Group::Chronic};
    try {
        return {parse_group(text)};
    } catch (const Error&) {
        throw UsageError("--group must be acute, chronic or both");
    }
}

std::vector<ModelKind> parse_models(const std::string& text) {
    if (text == "both") return {ModelKind::Linear, ModelKind::Lmgp};
    return {parse_model_kind(text)};
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile("not found: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.filename().string() + ": " + e.what());
    }
}

std::vector<std::size_t> scored_rows(const FeatureTable& t) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        if (t.cahai[r]) rows.push_back(r);
    }
    return rows;
}

Eigen::VectorXd scores(const FeatureTable& t) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(t.rows()));
    for (std::size_t r = 0; r < t.rows(); ++r) y(static_cast<Eigen::Index>(r)) = t.cahai[r].value();
    return y;
}

std::vector<std::string> selected_features(const json& selection, Group g) {
    const std::string key(to_string(g));
    if (!selection.contains("groups") || !selection["groups"].contains(key)) {
        throw InvariantViolation("selection has no entry for group " + key);
    }
    return selection["groups"][key].at("selected").get<std::vector<std::string>>();
}

ModelSpec make_spec(const PipelineConfig& cfg, ModelKind kind, std::vector<std::string> fixed,
                    std::vector<std::string> random) {
    ModelSpec spec;
    spec.kind = kind;
    spec.fixed_features = std::move(fixed);
    spec.random_features = kind == ModelKind::Lmgp ? std::move(random) : std::vector<std::string>{};
    spec.mode = cfg.mode;
    spec.interval_add_noise = cfg.interval_add_noise;
    spec.lmgp = cfg.lmgp_options();
    return spec;
}

// ---- subcommands ----

void cmd_synth(Run& run) {
    const auto& c = run.config();
    SynthConfig sc;
    sc.seed = c.seed;
    sc.n_acute = c.n_acute;
    sc.n_chronic = c.n_chronic;
    sc.seconds_per_visit = c.seconds_per_visit;
    sc.sample_rate_hz = c.sample_rate_hz;
    run.artifact("manifest.csv");
    run.artifact("raw");
    const auto cohort = synthesize_cohort(sc);
    write_cohort(run.out_dir(), cohort);
    run.finish({{"subjects", cohort.subjects.size()}, {"visits", cohort.visits.size()}});
}

void dump_coefficients(const fs::path& path, const WaveletCoefficients& w) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "scale,index,value\n";
    for (auto k : kAllScales) {
        const auto& v = w.scale_vector(k);
        for (std::size_t i = 0; i < v.size(); ++i) {
            out << label(k) << ',' << i << ',' << csv::format_double(v[i]) << '\n';
        }
    }
    for (std::size_t i = 0; i < w.approx.size(); ++i) {
        out << "v7," << i << ',' << csv::format_double(w.approx[i]) << '\n';
    }
}

void cmd_preprocess(Run& run, const fs::path& manifest, const std::optional<fs::path>& dump_dir) {
    const auto cohort = load_cohort(manifest);
    const auto bank = make_filter_bank(run.config().wavelet);
    fs::create_directories(run.artifact("vm"));
    std::size_t series = 0;
    for (const auto& v : cohort.visits) {
        const std::string stem = v.subject_id + "_w" + std::to_string(v.week);
        for (const auto& [tag, rec] : {std::pair<std::string, const TriaxialRecording*>{"p", &v.paralysed},
                                       {"np", &v.non_paralysed}}) {
            const auto vm = secondwise_vm(*rec);
            std::ofstream out(run.out_dir() / "vm" / (stem + "_" + tag + ".csv"), std::ios::binary);
            if (!out) throw IoError("cannot write vm series");
            out << "second_index,vm\n";
            for (std::size_t i = 0; i < vm.values.size(); ++i) {
                out << i << ',' << csv::format_double(vm.values[i]) << '\n';
            }
            ++series;
            if (dump_dir) {
                const auto n = usable_length(vm.values.size());
                if (n == 0) throw BadLength(stem + ": fewer than 128 seconds");
                const auto coeffs = decompose(std::span<const double>(vm.values.data(), n), bank);
                fs::create_directories(*dump_dir);
                dump_coefficients(*dump_dir / (stem + "_" + tag + ".csv"), coeffs);
            }
        }
    }
    run.finish({{"series", series}});
}

void cmd_features(Run& run, const fs::path& manifest) {
    const auto cohort = load_cohort(manifest);
    const auto extracted = extract_features(cohort, make_filter_bank(run.config().wavelet),
                                            run.config().workers);
    write_feature_table(run.artifact("features.csv"), extracted.model);
    write_feature_table(run.artifact("features_ssd.csv"), extracted.ssd);
    run.finish({{"visits", extracted.model.rows()}, {"wavelet", to_string(run.config().wavelet)}});
}

void cmd_select(Run& run, const fs::path& features_path) {
    const auto& cfg = run.config();
    const auto all = read_feature_table(features_path);
    json groups = json::object();
    for (Group g : {Group::Acute, Group::Chronic}) {
        const auto gt = all.filter_group(g);
        const auto table = gt.select_rows(scored_rows(gt));
        if (table.rows() == 0) continue;
        const std::string key = lower(to_string(g));
        if (table.rows() < static_cast<std::size_t>(std::max(cfg.cv_folds, 3))) {
            throw InsufficientSubjects(key + ": too few scored visits for selection");
        }
        const Eigen::VectorXd y = scores(table);

        const auto corr = correlation_table(table.values, y, table.names);
        write_correlation_csv(run.artifact("correlations_" + key + ".csv"), corr);
        run.write_text("correlation_grid_" + key + ".txt", format_correlation_grid(corr));

        // LASSO over the non-constant columns, standardised.
        std::vector<std::string> usable;
        std::vector<std::string> dropped;
        const auto constant = constant_columns(table.values);
        for (std::size_t c = 0; c < table.names.size(); ++c) {
            if (std::find(constant.begin(), constant.end(), c) != constant.end()) {
                dropped.push_back(table.names[c]);
            } else {
                usable.push_back(table.names[c]);
            }
        }
        if (usable.empty()) throw ConstantColumn(key + ": every feature is constant");
        Eigen::MatrixXd x(static_cast<Eigen::Index>(table.rows()), static_cast<Eigen::Index>(usable.size()));
        const auto cols = table.columns(usable);
        for (std::size_t c = 0; c < cols.size(); ++c) {
            x.col(static_cast<Eigen::Index>(c)) = table.values.col(static_cast<Eigen::Index>(cols[c]));
        }
        const auto st = znorm_fit(x, usable);
        const Eigen::MatrixXd xs = st.apply(x);
        const auto grid = lasso_lambda_grid(lasso_lambda_max(xs, y), cfg.lambda_count, cfg.lambda_min_ratio);
        const auto sel = lasso_select(xs, y, grid, cfg.cv_folds, cfg.seed, {}, cfg.lasso_rule);

        std::vector<std::string> selected;
        std::vector<double> sel_coef;
        std::vector<double> sel_corr;
        json coefs = json::object();
        for (std::size_t c = 0; c < usable.size(); ++c) {
            const double b = sel.fit.coefficients(static_cast<Eigen::Index>(c));
            coefs[usable[c]] = b;
            if (b != 0.0) {
                selected.push_back(usable[c]);
                sel_coef.push_back(b);
                sel_corr.push_back(corr.r(static_cast<Eigen::Index>(table.column(usable[c]))));
            }
        }
        bool fallback = false;
        if (selected.empty()) {
            // An empty fixed-effects design cannot be modelled; keep ini.
            selected = {"ini"};
            sel_coef = {0.0};
            sel_corr = {corr.r(static_cast<Eigen::Index>(table.column("ini")))};
            fallback = true;
        }
        const auto rankings = rank_features(selected, sel_coef, sel_corr);

        Eigen::MatrixXd xsel(x.rows(), static_cast<Eigen::Index>(selected.size()));
        const auto scols = table.columns(selected);
        for (std::size_t c = 0; c < scols.size(); ++c) {
            xsel.col(static_cast<Eigen::Index>(c)) = table.values.col(static_cast<Eigen::Index>(scols[c]));
        }
        write_matrix_csv(run.artifact("crosscorr_" + key + ".csv"), selected, cross_correlation(xsel));

        groups[key] = {{"lambda", sel.lambda},
                       {"lambda_max", grid.front()},
                       {"rows", table.rows()},
                       {"selected", selected},
                       {"fallback_to_ini", fallback},
                       {"dropped_constant", dropped},
                       {"coefficients", coefs},
                       {"ranking_lasso", rankings.by_lasso},
                       {"ranking_corr", rankings.by_correlation}};
    }
    if (groups.empty()) throw InsufficientSubjects("no scored visits in the feature table");
    run.write_json("selection.json", {{"groups", groups}});
    run.finish();
}

struct FeatureChoice {
    std::string fixed;
    std::string random;
};

std::pair<std::vector<std::string>, std::vector<std::string>> choose_features(
    const std::optional<json>& selection, Group g, const FeatureChoice& choice) {
    std::vector<std::string> fixed = split_list(choice.fixed);
    std::vector<std::string> random = split_list(choice.random);
    if (fixed.empty() && !selection) throw UsageError("give --selection or --fixed-features");
    if (selection && (fixed.empty() || random.empty())) {
        const auto sel = selected_features(*selection, g);
        if (fixed.empty()) fixed = sel;
        if (random.empty()) random = sel;
    }
    // Without a selection the random-effects inputs default to the fixed ones.
    if (random.empty()) random = fixed;
    return {fixed, random};
}

void cmd_train(Run& run, const fs::path& features_path, const std::optional<fs::path>& selection_path,
               const std::string& group_text, const std::string& model_text, const FeatureChoice& choice) {
    const auto groups = parse_groups(group_text);
    const auto kinds = parse_models(model_text);
    const auto table = read_feature_table(features_path);
    std::optional<json> selection;
    if (selection_path) selection = read_json(*selection_path);
    json trained = json::array();
    for (Group g : groups) {
        const auto gt = table.filter_group(g);
        if (gt.rows() == 0) continue;
        const auto [fixed, random] = choose_features(selection, g, choice);
        for (ModelKind k : kinds) {
            const auto model = train_model(gt, make_spec(run.config(), k, fixed, random));
            auto doc = model_to_json(model);
            doc["group"] = lower(to_string(g));
            const std::string name = "model_" + lower(to_string(g)) + "_" + std::string(to_string(k)) + ".json";
            run.write_json(name, doc);
            trained.push_back(name);
        }
    }
    if (trained.empty()) throw InsufficientSubjects("no rows for the requested group");
    run.finish({{"models", trained}});
}

void cmd_predict(Run& run, const std::optional<fs::path>& model_path, const fs::path& features_path) {
    if (!model_path) throw UsageError("predict needs --model <file>");
    if (!fs::exists(*model_path)) throw UsageError("model file not found: " + model_path->string());
    const auto doc = read_json(*model_path);
    const auto model = model_from_json(doc);
    auto table = read_feature_table(features_path);
    if (doc.contains("group")) table = table.filter_group(parse_group(doc["group"].get<std::string>()));
    const auto preds = predict_table(model, table);
    write_predictions_csv(run.artifact("predictions.csv"), preds);
    run.finish({{"model", model_path->filename().string()}, {"predictions", preds.size()}});
}

void cmd_cv(Run& run, const fs::path& features_path, const std::optional<fs::path>& selection_path,
            const std::string& group_text, const std::string& model_text, const FeatureChoice& choice,
            bool subsets) {
    const auto& cfg = run.config();
    const auto groups = parse_groups(group_text);
    const auto kinds = parse_models(model_text);
    const auto table = read_feature_table(features_path);
    std::optional<json> selection;
    if (selection_path) selection = read_json(*selection_path);
    json summary = json::array();
    for (Group g : groups) {
        const auto gt = table.filter_group(g);
        if (gt.rows() == 0) continue;
        const std::string key = lower(to_string(g));
        const auto [fixed, random] = choose_features(selection, g, choice);
        for (ModelKind k : kinds) {
            const std::string name = std::string(to_string(k));
            const auto report = loso_cv(gt, make_spec(cfg, k, fixed, random), g, name);
            auto doc = report_to_json(report);
            doc["mode"] = to_string(cfg.mode);
            doc["interval_add_noise"] = cfg.interval_add_noise;
            doc["fixed_features"] = fixed;
            doc["random_features"] = k == ModelKind::Lmgp ? random : std::vector<std::string>{};
            run.write_json("cv_" + key + "_" + name + ".json", doc);
            write_predictions_csv(run.artifact("predictions_" + key + "_" + name + ".csv"), report.predictions);
            summary.push_back({{"group", key}, {"model", name}, {"mean_rmse", report.mean_rmse}});
        }
        if (subsets) {
            if (!selection) throw UsageError("--subsets needs --selection");
            const auto& gs = (*selection)["groups"][key];
            FeatureRankings rankings{gs.at("ranking_lasso").get<std::vector<std::string>>(),
                                     gs.at("ranking_corr").get<std::vector<std::string>>()};
            const auto results = subset_experiment(gt, g, random, rankings, cfg.subset_fraction,
                                                   make_spec(cfg, ModelKind::Lmgp, fixed, random));
            json cells = json::array();
            for (const auto& r : results) {
                cells.push_back({{"label", r.label},
                                 {"fixed_features", r.fixed_features},
                                 {"random_features", r.random_features},
                                 {"mean_rmse", r.report.mean_rmse}});
            }
            run.write_json("subsets_" + key + ".json",
                           {{"group", key}, {"fraction", cfg.subset_fraction}, {"configurations", cells}});
        }
    }
    if (summary.empty()) throw InsufficientSubjects("no rows for the requested group");
    run.finish({{"reports", summary}});
}

void cmd_report(Run& run, const std::vector<fs::path>& inputs) {
    std::set<std::string> hashes;
    std::map<std::string, json> cv_docs;
    std::map<std::string, json> subset_docs;
    std::map<std::string, std::string> grids;
    for (const auto& dir : inputs) {
        if (!fs::is_directory(dir)) throw MissingFile("not a directory: " + dir.string());
        std::vector<fs::path> entries;
        for (const auto& e : fs::directory_iterator(dir)) entries.push_back(e.path());
        std::sort(entries.begin(), entries.end());
        for (const auto& p : entries) {
            const std::string name = p.filename().string();
            if (p.extension() == ".json" && (name.rfind("run_", 0) == 0 || name.rfind("cv_", 0) == 0 ||
                                             name.rfind("subsets_", 0) == 0 ||
                                             name == "selection.json")) {
                if (name == "run_report.json") continue;
                const auto doc = read_json(p);
                if (!doc.contains("config_hash")) throw InvariantViolation(name + " has no config hash");
                hashes.insert(doc["config_hash"].get<std::string>());
                if (name.rfind("cv_", 0) == 0) cv_docs[name] = doc;
                if (name.rfind("subsets_", 0) == 0) subset_docs[name] = doc;
            } else if (name.rfind("correlation_grid_", 0) == 0) {
                std::ifstream in(p);
                std::ostringstream ss;
                ss << in.rdbuf();
                grids[name.substr(17, name.size() - 17 - 4)] = ss.str();
            }
        }
    }
    if (hashes.empty()) throw MissingFile("no run artifacts found");
    if (hashes.size() > 1) {
        std::string list;
        for (const auto& h : hashes) list += " " + h.substr(0, 12);
        throw InvariantViolation("artifacts come from different config hashes:" + list);
    }
    if (*hashes.begin() != run.config().hash()) {
        throw InvariantViolation("artifacts were produced with config hash " + hashes.begin()->substr(0, 12) +
                                 ", current config hashes to " + run.config().hash().substr(0, 12));
    }

    std::ostringstream os;
    os << "actirehab report\n";
    os << "config hash: " << *hashes.begin() << "\n";
    os << "tool version: " << kToolVersion << "\n\n";
    for (const auto& [group, grid] : grids) {
        os << "Correlation with the clinical score (" << group << ")\n" << grid << "\n";
    }
    json rmse = json::object();
    if (!cv_docs.empty()) {
        os << "LOSO mean RMSE\n";
        os << "group      model      mean_rmse  coverage95\n";
        for (const auto& [name, doc] : cv_docs) {
            char line[128];
            std::snprintf(line, sizeof line, "%-10s %-10s %9.4f  %9.3f\n",
                          doc["group"].get<std::string>().c_str(), doc["model"].get<std::string>().c_str(),
                          doc["mean_rmse"].get<double>(), doc["coverage95"].get<double>());
            os << line;
            rmse[doc["group"].get<std::string>()][doc["model"].get<std::string>()] = doc["mean_rmse"];
        }
        os << "\n";
    }
    for (const auto& [name, doc] : subset_docs) {
        os << "Fixed-effects subsets (" << doc["group"].get<std::string>() << ", fraction "
           << doc["fraction"].get<double>() << ")\n";
        for (const auto& cell : doc["configurations"]) {
            char line[160];
            std::snprintf(line, sizeof line, "%-10s %9.4f  ", cell["label"].get<std::string>().c_str(),
                          cell["mean_rmse"].get<double>());
            os << line;
            bool first = true;
            for (const auto& f : cell["fixed_features"]) {
                os << (first ? "" : ",") << f.get<std::string>();
                first = false;
            }
            os << "\n";
        }
        os << "\n";
    }
    run.write_text("summary.txt", os.str());
    run.write_json("report.json", {{"mean_rmse", rmse}});
    run.finish();
}

int exit_code(ErrorClass c) {
    switch (c) {
        case ErrorClass::Validation: return kExitValidation;
        case ErrorClass::Usage: return kExitUsage;
        case ErrorClass::Numerical: return kExitNumerical;
    }
    return kExitValidation;
}

void print_error(std::string_view cls, std::string_view code, std::string_view message) {
    json err = {{"error", {{"class", cls}, {"code", code}, {"message", message}}}};
    std::cerr << err.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Wavelet-feature rehabilitation scoring pipeline", "actirehab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    std::optional<std::string> config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> workers;
    std::optional<std::string> mode;
    std::optional<std::string> wavelet;
    bool add_noise = false;
    app.add_option("--config", config_path, "Flat key = value config file");
    app.add_option("--set", overrides, "Override one config key (key=value)");
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--out", out, "Output directory");
    app.add_option("--workers", workers, "Worker threads for feature extraction");
    app.add_option("--mode", mode, "Prediction mode: monitoring or cold");
    app.add_option("--wavelet", wavelet, "Wavelet family: db4 or haar");
    app.add_flag("--interval-add-noise", add_noise, "Add the noise variance to predictive intervals");

    std::string manifest;
    std::string features = "features.csv";
    std::optional<std::string> selection;
    std::optional<std::string> model;
    std::optional<std::string> dump_coeffs;
    std::string group = "both";
    std::string model_kind = "both";
    FeatureChoice choice;
    bool subsets = false;
    std::vector<std::string> inputs;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort");
    auto* preprocess = app.add_subcommand("preprocess", "Write second-wise VM series");
    preprocess->add_option("--manifest", manifest, "Cohort manifest")->required();
    preprocess->add_option("--dump-coeffs", dump_coeffs, "Directory for per-scale coefficient CSVs");
    auto* feat = app.add_subcommand("features", "Extract the wavelet feature table");
    feat->add_option("--manifest", manifest, "Cohort manifest")->required();
    auto* select = app.add_subcommand("select", "LASSO selection and correlation analysis per group");
    select->add_option("--features", features, "Feature table CSV")->required();
    auto* train = app.add_subcommand("train", "Fit and save models");
    auto* predict = app.add_subcommand("predict", "Predict with a saved model");
    predict->add_option("--model", model, "Model JSON");
    predict->add_option("--features", features, "Feature table CSV")->required();
    auto* cv = app.add_subcommand("cv", "Leave-one-subject-out evaluation");
    for (auto* sub : {train, cv}) {
        sub->add_option("--features", features, "Feature table CSV")->required();
        sub->add_option("--selection", selection, "selection.json from `select`");
        sub->add_option("--group", group, "acute, chronic or both");
        sub->add_option("--model", model_kind, "linear, lmgp or both");
        sub->add_option("--fixed-features", choice.fixed, "Comma-separated fixed-effects features");
        sub->add_option("--random-features", choice.random, "Comma-separated random-effects features");
    }
    cv->add_flag("--subsets", subsets, "Also run the fixed-effects subset experiment");
    auto* report = app.add_subcommand("report", "Summarise artifacts of one configuration");
    report->add_option("--in", inputs, "Directories holding run artifacts")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage", "UsageError", e.what());
        return kExitUsage;
    }

    const auto* sub = app.get_subcommands().front();
    std::optional<Run> active;
    try {
        PipelineConfig cfg = config_path ? read_config_file(*config_path) : PipelineConfig{};
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw UsageError("--set expects key=value");
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (seed) cfg.seed = *seed;
        if (out) cfg.out = *out;
        if (workers) cfg.workers = *workers;
        if (mode) cfg.set("mode", *mode);
        if (wavelet) cfg.set("wavelet", *wavelet);
        if (add_noise) cfg.interval_add_noise = true;
        cfg.validate();
        fs::create_directories(cfg.out);

        active.emplace(sub->get_name(), cfg);
        Run& r = *active;
        const auto opt_path = [](const std::optional<std::string>& s) -> std::optional<fs::path> {
            if (s) return fs::path(*s);
            return std::nullopt;
        };
        if (sub == synth) {
            cmd_synth(r);
        } else if (sub == preprocess) {
            cmd_preprocess(r, manifest, opt_path(dump_coeffs));
        } else if (sub == feat) {
            cmd_features(r, manifest);
        } else if (sub == select) {
            cmd_select(r, features);
        } else if (sub == train) {
            cmd_train(r, features, opt_path(selection), group, model_kind, choice);
        } else if (sub == predict) {
            cmd_predict(r, opt_path(model), features);
        } else if (sub == cv) {
            cmd_cv(r, features, opt_path(selection), group, model_kind, choice, subsets);
        } else if (sub == report) {
            std::vector<fs::path> dirs(inputs.begin(), inputs.end());
            cmd_report(r, dirs);
        }
        return kExitOk;
    } catch (const Error& e) {
        if (active) active->rollback();
        const char* cls = e.error_class() == ErrorClass::Usage       ? "usage"
                          : e.error_class() == ErrorClass::Numerical ? "numerical"
                                                                      : "validation";
        print_error(cls, e.code(), e.what());
        return exit_code(e.error_class());
    } catch (const std::exception& e) {
        if (active) active->rollback();
        print_error("validation", "IoError", e.what());
        return kExitValidation;
    }
}

}  // namespace actirehab::cli
