#include "patmine/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "patmine/errors.hpp"
#include "patmine/random.hpp"

namespace patmine {

void PipelineConfig::validate() const {
    embed.validate();
    ensemble.validate();
    if (k < 2) throw ConfigError("k must be >= 2");
    if (smote.k_neighbors < 1) throw ConfigError("smote k_neighbors must be >= 1");
    if (sslr.ngram < 1 || sslr.ngram > 2) throw ConfigError("ngram must be 1 or 2");
}

void PipelineConfig::derive_stage_seeds() {
    embed.seed = derive_seed(seed, 1);
    ensemble.seed = derive_seed(seed, 2);
    smote.seed = derive_seed(seed, 3);
}

std::vector<std::pair<std::string, std::string>> PipelineConfig::echo() const {
    auto b = [](bool v) { return std::string(v ? "true" : "false"); };
    std::string max_features = ensemble.max_features == EnsembleParams::kSqrt  ? "sqrt"
                               : ensemble.max_features == EnsembleParams::kAll ? "all"
                                                                               : std::to_string(ensemble.max_features);
    return {
        {"seed", std::to_string(seed)},
        {"k", std::to_string(k)},
        {"exclude_tests", b(filters.exclude_tests)},
        {"ngram", std::to_string(sslr.ngram)},
        {"embedding.dim", std::to_string(embed.dim)},
        {"embedding.window", std::to_string(embed.window)},
        {"embedding.min_count", std::to_string(embed.min_count)},
        {"embedding.negative_samples", std::to_string(embed.negative_samples)},
        {"embedding.epochs", std::to_string(embed.epochs)},
        {"embedding.learning_rate", fmt::format("{}", embed.initial_learning_rate)},
        {"embedding.parallel", b(embed.parallel)},
        {"embedding.train_folds_only", b(embed_train_folds_only)},
        {"classifier.mode", std::string(to_string(ensemble.mode))},
        {"classifier.n_trees", std::to_string(ensemble.n_trees)},
        {"classifier.max_features", max_features},
        {"classifier.min_samples_split", std::to_string(ensemble.min_samples_split)},
        {"classifier.max_depth", ensemble.max_depth ? std::to_string(*ensemble.max_depth) : "none"},
        {"classifier.append_numeric_features", b(append_numeric_features)},
        {"smote.enabled", b(smote.enabled)},
        {"smote.on_test", b(smote.on_test)},
        {"smote.k_neighbors", std::to_string(smote.k_neighbors)},
    };
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

class LineError {
public:
    explicit LineError(std::size_t line) : line_(line) {}
    ConfigError operator()(const std::string& what) const {
        return ConfigError("config line " + std::to_string(line_) + ": " + what);
    }

private:
    std::size_t line_;
};

template <class T>
T parse_number(const std::string& v, const LineError& err) {
    T out{};
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end) throw err("bad number '" + v + "'");
    return out;
}

double parse_real(const std::string& v, const LineError& err) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size()) return d;
    } catch (const std::logic_error&) {
    }
    throw err("bad number '" + v + "'");
}

bool parse_bool(const std::string& v, const LineError& err) {
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    throw err("bad boolean '" + v + "'");
}

void apply(PipelineConfig& c, const std::string& section, const std::string& key, const std::string& v,
           const LineError& err) {
    const std::string full = section.empty() ? key : section + "." + key;
    if (full == "run.seed" || full == "seed") {
        c.seed = parse_number<std::uint64_t>(v, err);
    } else if (full == "run.out" || full == "out") {
        c.out_dir = v;
    } else if (full == "run.k" || full == "evaluation.k") {
        c.k = parse_number<int>(v, err);
    } else if (full == "corpus.root") {
        c.corpus_root = v;
    } else if (full == "corpus.labels") {
        c.labels_path = v;
    } else if (full == "corpus.exclude_tests") {
        c.filters.exclude_tests = parse_bool(v, err);
    } else if (full == "corpus.exclude_glob") {
        c.filters.exclude_globs.push_back(v);
    } else if (full == "corpus.project_id") {
        c.filters.project_id = v;
    } else if (full == "sslr.ngram") {
        c.sslr.ngram = parse_number<int>(v, err);
    } else if (full == "embedding.dim") {
        c.embed.dim = parse_number<int>(v, err);
    } else if (full == "embedding.window") {
        c.embed.window = parse_number<int>(v, err);
    } else if (full == "embedding.min_count") {
        c.embed.min_count = parse_number<int>(v, err);
    } else if (full == "embedding.negative_samples") {
        c.embed.negative_samples = parse_number<int>(v, err);
    } else if (full == "embedding.epochs") {
        c.embed.epochs = parse_number<int>(v, err);
    } else if (full == "embedding.learning_rate") {
        c.embed.initial_learning_rate = parse_real(v, err);
    } else if (full == "embedding.parallel") {
        c.embed.parallel = parse_bool(v, err);
    } else if (full == "embedding.train_folds_only") {
        c.embed_train_folds_only = parse_bool(v, err);
    } else if (full == "classifier.mode") {
        try {
            c.ensemble.mode = ensemble_mode_from_string(v);
        } catch (const ConfigError& e) {
            throw err(e.what());
        }
    } else if (full == "classifier.n_trees") {
        c.ensemble.n_trees = parse_number<int>(v, err);
    } else if (full == "classifier.max_features") {
        if (v == "sqrt") {
            c.ensemble.max_features = EnsembleParams::kSqrt;
        } else if (v == "all") {
            c.ensemble.max_features = EnsembleParams::kAll;
        } else {
            const int n = parse_number<int>(v, err);
            if (n < 1) throw err("max_features must be sqrt, all or >= 1");
            c.ensemble.max_features = n;
        }
    } else if (full == "classifier.min_samples_split") {
        c.ensemble.min_samples_split = parse_number<int>(v, err);
    } else if (full == "classifier.max_depth") {
        if (v == "none") {
            c.ensemble.max_depth.reset();
        } else {
            c.ensemble.max_depth = parse_number<int>(v, err);
        }
    } else if (full == "classifier.append_numeric_features") {
        c.append_numeric_features = parse_bool(v, err);
    } else if (full == "smote.enabled") {
        c.smote.enabled = parse_bool(v, err);
    } else if (full == "smote.on_test") {
        c.smote.on_test = parse_bool(v, err);
    } else if (full == "smote.k_neighbors") {
        c.smote.k_neighbors = parse_number<int>(v, err);
    } else {
        throw err("unknown key '" + full + "'");
    }
}

}  // namespace

void apply_config_text(PipelineConfig& config, std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw, section;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const LineError err(line_no);
        auto line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw err("unterminated section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            static const char* known[] = {"run", "corpus", "sslr", "embedding", "classifier", "evaluation", "smote"};
            if (std::find(std::begin(known), std::end(known), section) == std::end(known)) {
                throw err("unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw err("expected 'key = value'");
        const auto key = trim(std::string_view(line).substr(0, eq));
        auto rest = std::string_view(line).substr(eq + 1);
        // A '#' preceded by whitespace starts a trailing comment.
        for (std::size_t i = 1; i < rest.size(); ++i) {
            if (rest[i] == '#' && (rest[i - 1] == ' ' || rest[i - 1] == '\t')) {
                rest = rest.substr(0, i);
                break;
            }
        }
        const auto value = trim(rest);
        if (key.empty()) throw err("empty key");
        apply(config, section, key, value, err);
    }
}

void apply_config_file(PipelineConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    apply_config_text(config, buf.str());
}

}  // namespace patmine
