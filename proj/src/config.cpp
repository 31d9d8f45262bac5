#include "actirehab/config.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <type_traits>
#include <sstream>

#include "actirehab/csv.hpp"
#include "actirehab/error.hpp"

namespace actirehab {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
    try {
        if constexpr (std::is_floating_point_v<T>) {
            return static_cast<T>(csv::parse_double(value, key));
        } else {
            const long v = csv::parse_int(value, key);
            if (v < 0 && std::is_unsigned_v<T>) throw ParseError("negative");
            return static_cast<T>(v);
        }
    } catch (const ParseError&) {
        throw UsageError("config key '" + std::string(key) + "': bad value '" + std::string(value) + "'");
    }
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw UsageError("config key '" + std::string(key) + "': expected true/false");
}

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view value) {
    const std::string v = trim(value);
    if (key == "wavelet") {
        try {
            wavelet = parse_wavelet_family(v);
        } catch (const Error&) {
            throw UsageError("config key 'wavelet': expected haar or db4");
        }
    } else if (key == "levels") {
        levels = parse_number<int>(key, v);
    } else if (key == "lambda_count") {
        lambda_count = parse_number<int>(key, v);
    } else if (key == "lambda_min_ratio") {
        lambda_min_ratio = parse_number<double>(key, v);
    } else if (key == "lasso_rule") {
        if (v == "min") {
            lasso_rule = LassoCvRule::MinMse;
        } else if (v == "1se") {
            lasso_rule = LassoCvRule::OneStandardError;
        } else {
            throw UsageError("config key 'lasso_rule': expected min or 1se");
        }
    } else if (key == "cv_folds") {
        cv_folds = parse_number<int>(key, v);
    } else if (key == "lmgp_starts") {
        lmgp_starts = parse_number<int>(key, v);
    } else if (key == "lmgp_max_iter") {
        lmgp_max_iter = parse_number<int>(key, v);
    } else if (key == "lmgp_grad_tol") {
        lmgp_grad_tol = parse_number<double>(key, v);
    } else if (key == "mode") {
        mode = parse_prediction_mode(v);
    } else if (key == "interval_add_noise") {
        interval_add_noise = parse_bool(key, v);
    } else if (key == "subset_fraction") {
        subset_fraction = parse_number<double>(key, v);
    } else if (key == "seed") {
        seed = parse_number<std::uint64_t>(key, v);
    } else if (key == "n_acute") {
        n_acute = parse_number<int>(key, v);
    } else if (key == "n_chronic") {
        n_chronic = parse_number<int>(key, v);
    } else if (key == "seconds_per_visit") {
        seconds_per_visit = parse_number<int>(key, v);
    } else if (key == "sample_rate_hz") {
        sample_rate_hz = parse_number<double>(key, v);
    } else if (key == "workers") {
        workers = parse_number<unsigned>(key, v);
    } else if (key == "out") {
        out = v;
    } else {
        throw UsageError("unknown config key '" + std::string(key) + "'");
    }
}

void PipelineConfig::validate() const {
    if (levels != kDecompositionLevels) throw UsageError("levels must be 7");
    if (cv_folds < 2) throw UsageError("cv_folds must be >= 2");
    if (lambda_count < 1) throw UsageError("lambda_count must be >= 1");
    if (!(lambda_min_ratio > 0.0 && lambda_min_ratio <= 1.0)) {
        throw UsageError("lambda_min_ratio must lie in (0, 1]");
    }
    if (lmgp_starts < 1 || lmgp_max_iter < 1 || !(lmgp_grad_tol > 0.0)) {
        throw UsageError("lmgp optimiser settings must be positive");
    }
    if (!(subset_fraction > 0.0 && subset_fraction <= 1.0)) {
        throw UsageError("subset_fraction must lie in (0, 1]");
    }
    if (n_acute < 0 || n_chronic < 0) throw UsageError("subject counts must be >= 0");
    if (seconds_per_visit <= 0 || seconds_per_visit % 128 != 0) {
        throw UsageError("seconds_per_visit must be a positive multiple of 128");
    }
    if (!(sample_rate_hz > 0.0)) throw UsageError("sample_rate_hz must be > 0");
    if (workers < 1) throw UsageError("workers must be >= 1");
}

std::string PipelineConfig::canonical_text() const {
    std::map<std::string, std::string> kv;
    kv["wavelet"] = std::string(to_string(wavelet));
    kv["levels"] = std::to_string(levels);
    kv["lambda_count"] = std::to_string(lambda_count);
    kv["lambda_min_ratio"] = csv::format_double(lambda_min_ratio);
    kv["cv_folds"] = std::to_string(cv_folds);
    kv["lasso_rule"] = lasso_rule == LassoCvRule::MinMse ? "min" : "1se";
    kv["lmgp_starts"] = std::to_string(lmgp_starts);
    kv["lmgp_max_iter"] = std::to_string(lmgp_max_iter);
    kv["lmgp_grad_tol"] = csv::format_double(lmgp_grad_tol);
    kv["mode"] = std::string(to_string(mode));
    kv["interval_add_noise"] = interval_add_noise ? "true" : "false";
    kv["subset_fraction"] = csv::format_double(subset_fraction);
    kv["seed"] = std::to_string(seed);
    kv["n_acute"] = std::to_string(n_acute);
    kv["n_chronic"] = std::to_string(n_chronic);
    kv["seconds_per_visit"] = std::to_string(seconds_per_visit);
    kv["sample_rate_hz"] = csv::format_double(sample_rate_hz);
    std::string text;
    for (const auto& [k, v] : kv) text += k + "=" + v + "\n";
    return text;
}

std::string PipelineConfig::hash() const { return sha256_hex(canonical_text()); }

LmgpOptions PipelineConfig::lmgp_options() const {
    LmgpOptions o;
    o.starts = lmgp_starts;
    o.max_iterations = lmgp_max_iter;
    o.gradient_tolerance = lmgp_grad_tol;
    o.seed = seed;
    return o;
}

PipelineConfig read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile("config file not found: " + path.string());
    PipelineConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path.filename().string() + ":" + std::to_string(line_no) +
                             ": expected key = value");
        }
        cfg.set(trim(std::string_view(t).substr(0, eq)), std::string_view(t).substr(eq + 1));
    }
    return cfg;
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw IoError("SHA-256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

}  // namespace actirehab
