#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "actirehab/lasso.hpp"
#include "actirehab/model.hpp"
#include "actirehab/wavelet.hpp"

namespace actirehab {

// Flat `key = value` settings shared by every subcommand. Blank lines and
// lines starting with '#' are ignored.
struct PipelineConfig {
    WaveletFamily wavelet = WaveletFamily::Daubechies4;
    int levels = kDecompositionLevels;  // must stay 7
    int lambda_count = 100;
    double lambda_min_ratio = 1e-3;
    int cv_folds = 5;
    LassoCvRule lasso_rule = LassoCvRule::MinMse;  // "min" or "1se"
    int lmgp_starts = 5;
    int lmgp_max_iter = 500;
    double lmgp_grad_tol = 1e-6;
    PredictionMode mode = PredictionMode::Monitoring;
    bool interval_add_noise = false;
    double subset_fraction = 0.5;
    std::uint64_t seed = 1;
    // synth
    int n_acute = 26;
    int n_chronic = 33;
    int seconds_per_visit = 384;
    double sample_rate_hz = 2.0;
    // not part of the hash
    unsigned workers = 1;
    std::string out = "out";

    // Sets one key from text; UsageError on unknown keys or bad values.
    void set(std::string_view key, std::string_view value);
    void validate() const;

    // Sorted `key=value` lines of every hashed key.
    std::string canonical_text() const;
    // SHA-256 hex of canonical_text().
    std::string hash() const;

    LmgpOptions lmgp_options() const;
};

PipelineConfig read_config_file(const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace actirehab
