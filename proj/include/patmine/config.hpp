#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "patmine/classifier.hpp"
#include "patmine/corpus.hpp"
#include "patmine/embedding.hpp"
#include "patmine/evaluation.hpp"
#include "patmine/sslr.hpp"

namespace patmine {

struct PipelineConfig {
    std::filesystem::path corpus_root;
    std::filesystem::path labels_path;
    std::filesystem::path out_dir;
    FilterRules filters;
    SslrOptions sslr;
    EmbedHyperparams embed;
    EnsembleParams ensemble;
    SmoteSettings smote;
    int k = 10;
    /// Global seed. Stage seeds are derived from it by derive_stage_seeds().
    std::uint64_t seed = 1;
    bool append_numeric_features = false;
    /// Train CBOW separately per fold on training-fold files only.
    bool embed_train_folds_only = false;

    /// Throws ConfigError.
    void validate() const;
    /// Sets embed.seed, ensemble.seed and smote.seed from `seed`.
    void derive_stage_seeds();
    /// Flat key/value view, echoed into report.json.
    std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Applies an INI-style text (`[section]` headers, `key = value` lines,
/// `#` comments) on top of `config`. Unknown sections or keys throw
/// ConfigError naming the line.
void apply_config_text(PipelineConfig& config, std::string_view text);
void apply_config_file(PipelineConfig& config, const std::filesystem::path& path);

}  // namespace patmine
