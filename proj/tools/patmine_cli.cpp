// Command-line front end. Each subcommand reads the artifact written by the
// previous one from --out, so stages can be rerun on their own.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "patmine/bundle.hpp"
#include "patmine/config.hpp"
#include "patmine/corpus.hpp"
#include "patmine/errors.hpp"
#include "patmine/java_parser.hpp"
#include "patmine/pipeline.hpp"

namespace fs = std::filesystem;
using namespace patmine;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitStage = 2;

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

struct Options {
    std::string config_file;
    std::string corpus;
    std::string labels;
    std::string out;
    std::optional<int> k;
    std::optional<std::uint64_t> seed;
    bool smote_on_test = false;
    bool rf_baseline = false;
    bool append_numeric = false;
    bool no_smote = false;
    bool train_folds_only = false;
    bool include_tests = false;
    std::optional<int> epochs;
    std::optional<int> trees;
    bool parallel_embedding = false;
};

// Config file first, flags on top.
PipelineConfig make_config(const Options& o) {
    PipelineConfig c;
    if (!o.config_file.empty()) apply_config_file(c, o.config_file);
    if (!o.corpus.empty()) c.corpus_root = o.corpus;
    if (!o.labels.empty()) c.labels_path = o.labels;
    if (!o.out.empty()) c.out_dir = o.out;
    if (o.k) c.k = *o.k;
    if (o.seed) c.seed = *o.seed;
    if (o.smote_on_test) c.smote.on_test = true;
    if (o.no_smote) c.smote.enabled = false;
    if (o.rf_baseline) c.ensemble.mode = EnsembleMode::RandomForest;
    if (o.append_numeric) c.append_numeric_features = true;
    if (o.train_folds_only) c.embed_train_folds_only = true;
    if (o.include_tests) c.filters.exclude_tests = false;
    if (o.epochs) c.embed.epochs = *o.epochs;
    if (o.trees) c.ensemble.n_trees = *o.trees;
    if (o.parallel_embedding) c.embed.parallel = true;
    c.validate();
    c.derive_stage_seeds();
    return c;
}

void require(const fs::path& p, const char* what) {
    if (p.empty()) throw CLI::ValidationError(std::string(what) + " is required (flag or config file)");
}

// Runs a stage body, mapping library failures to exit code 2.
template <class F>
int stage(const char* name, F&& body) {
    try {
        body();
        return 0;
    } catch (const StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        try {
            std::rethrow_if_nested(e);
        } catch (const std::exception& inner) {
            std::cerr << "  caused by: " << inner.what() << "\n";
        }
        return kExitStage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: stage '" << name << "' failed: " << e.what() << "\n";
        return kExitStage;
    }
}

CorpusManifest load_manifest(const PipelineConfig& c) {
    const auto path = c.out_dir / "manifest.json";
    if (fs::exists(path)) return manifest_from_json(read_text(path), c.corpus_root);
    return ingest_corpus(c.corpus_root, c.filters);
}

void cmd_ingest(const PipelineConfig& c) {
    const auto manifest = ingest_corpus(c.corpus_root, c.filters);
    fs::create_directories(c.out_dir);
    write_text(c.out_dir / "manifest.json", manifest_to_json(manifest));
    std::size_t n_labels = 0;
    if (!c.labels_path.empty()) n_labels = load_labels(c.labels_path, manifest).size();
    fmt::print("{} files ingested, {} excluded", manifest.files.size(), manifest.excluded.size());
    if (!c.labels_path.empty()) fmt::print(", {} labels valid", n_labels);
    fmt::print("\n");
    for (const auto& ex : manifest.excluded) fmt::print("  excluded {} ({})\n", ex.path, ex.reason);
}

void cmd_sslr(const PipelineConfig& c) {
    const auto manifest = load_manifest(c);
    const auto analysis = analyze_corpus(manifest, c.sslr);
    for (const auto& d : analysis.code.diagnostics) spdlog::warn("{}: {}", d.file.str(), d.message);
    std::vector<ClassFeatures> all;
    for (const auto& f : analysis.features) all.insert(all.end(), f.begin(), f.end());
    fs::create_directories(c.out_dir);
    write_text(c.out_dir / "class_features.csv", class_features_csv(all));
    write_text(c.out_dir / "method_features.csv", method_features_csv(all));
    write_text(c.out_dir / "callgraph.dot", analysis.graph.to_dot());
    write_text(c.out_dir / "corpus.sslr", write_sslr(analysis.sslr));
    fmt::print("{} documents written to {}\n", analysis.sslr.size(), (c.out_dir / "corpus.sslr").string());
}

void cmd_embed(const PipelineConfig& c) {
    const auto docs = read_sslr(read_text(c.out_dir / "corpus.sslr"));
    const auto model = train_cbow(docs, c.embed);
    write_text(c.out_dir / "embeddings.txt", write_embeddings(model));
    const auto& losses = model.epoch_losses();
    fmt::print("vocabulary {} x {}; loss {:.4f} -> {:.4f}\n", model.vocab_size(), model.dim(), losses.front(),
               losses.back());
}

void cmd_train(const PipelineConfig& c) {
    const auto manifest = load_manifest(c);
    const auto labels = load_labels(c.labels_path, manifest);
    const auto analysis = analyze_corpus(manifest, c.sslr);
    const auto data = build_dataset(analysis, labels);
    if (data.y.empty()) throw EmptyTrainingError("no labelled instance survived parsing");
    auto embeddings = read_embeddings(read_text(c.out_dir / "embeddings.txt"));
    const auto bundle = train_bundle(analysis, data, std::move(embeddings), c);
    save_bundle(bundle, c.out_dir / "model.bundle");
    fmt::print("trained {} trees on {} instances -> {}\n", bundle.ensemble.trees().size(), data.y.size(),
               (c.out_dir / "model.bundle").string());
}

void print_report(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    fmt::print("{:<12} {:>9} {:>9} {:>9} {:>8}\n", "label", "P", "R", "F1", "support");
    for (const auto& row : j.at("per_class")) {
        fmt::print("{:<12} {:>9.2f} {:>9.2f} {:>9.2f} {:>8}\n", row.at("label").get<std::string>(),
                   row.at("precision").get<double>(), row.at("recall").get<double>(), row.at("f1").get<double>(),
                   row.at("support").get<std::uint64_t>());
    }
    const auto& w = j.at("weighted");
    fmt::print("{:<12} {:>9.2f} {:>9.2f} {:>9.2f}\n", "weighted", w.at("precision").get<double>(),
               w.at("recall").get<double>(), w.at("f1").get<double>());
    fmt::print("misclassification M = {:.4f} (k = {}, seed = {})\n", j.at("misclassification").get<double>(),
               j.at("k").get<int>(), j.at("seed").get<std::uint64_t>());
}

void cmd_eval(const PipelineConfig& c) {
    run_pipeline(c);
    print_report(read_text(c.out_dir / "report.json"));
}

}  // namespace

int main(int argc, char** argv) {
    spdlog::set_pattern("%l: %v");
    CLI::App app{"patmine: design pattern detection for Java sources"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub, bool corpus, bool labels) {
        sub->add_option("--config", o.config_file, "key = value config file")->check(CLI::ExistingFile);
        if (corpus) sub->add_option("--corpus", o.corpus, "corpus root directory");
        if (labels) sub->add_option("--labels", o.labels, "labels CSV");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--seed", o.seed, "global seed");
        sub->add_flag("--include-tests", o.include_tests, "keep unit-test files");
    };

    auto* ingest = app.add_subcommand("ingest", "scan a corpus and write manifest.json");
    add_common(ingest, true, true);
    auto* sslr = app.add_subcommand("sslr", "parse, build the call graph, extract features, write corpus.sslr");
    add_common(sslr, true, false);
    auto* embed = app.add_subcommand("embed", "train CBOW on corpus.sslr and write embeddings.txt");
    add_common(embed, false, false);
    embed->add_option("--epochs", o.epochs, "training epochs");
    embed->add_flag("--parallel", o.parallel_embedding, "hogwild training (not bit-reproducible)");
    auto* train = app.add_subcommand("train", "fit the ensemble on all labelled files and write model.bundle");
    add_common(train, true, true);
    train->add_option("--trees", o.trees, "number of trees");
    train->add_flag("--rf-baseline", o.rf_baseline, "random-forest mode");
    train->add_flag("--append-numeric-features", o.append_numeric, "append 7 scaled numeric features");
    train->add_flag("--no-smote", o.no_smote, "disable oversampling");

    auto* eval = app.add_subcommand("eval", "run the whole pipeline with stratified k-fold evaluation");
    add_common(eval, true, true);
    eval->add_option("--k", o.k, "number of folds (default 10)");
    eval->add_flag("--paper-smote-on-test", o.smote_on_test, "oversample the test folds (inflates metrics)");
    eval->add_flag("--rf-baseline", o.rf_baseline, "random-forest mode");
    eval->add_flag("--append-numeric-features", o.append_numeric, "append 7 scaled numeric features");
    eval->add_flag("--no-smote", o.no_smote, "disable oversampling");
    eval->add_flag("--embed-train-folds-only", o.train_folds_only, "train CBOW per fold on training files only");
    eval->add_option("--epochs", o.epochs, "CBOW training epochs");
    eval->add_option("--trees", o.trees, "number of trees");

    std::string bundle_path;
    std::vector<std::string> predict_inputs;
    auto* predict = app.add_subcommand("predict", "classify Java files with a saved bundle");
    predict->add_option("--bundle", bundle_path, "model.bundle path")->required();
    predict->add_option("files", predict_inputs, "Java files");

    auto* report = app.add_subcommand("report", "print report.json from an output directory");
    report->add_option("--out", o.out, "output directory")->required();

    int per_class = 30;
    std::vector<std::string> synth_labels{"Singleton", "Adapter", "Builder", "Observer", "None"};
    auto* synth = app.add_subcommand("synth", "write a generated labelled corpus");
    synth->add_option("--out", o.out, "corpus directory")->required();
    synth->add_option("--per-class", per_class, "files per label")->check(CLI::PositiveNumber);
    synth->add_option("--labels", synth_labels, "labels to generate");
    synth->add_option("--seed", o.seed, "seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    PipelineConfig config;
    try {
        if (*synth || *predict || *report) {
            config.out_dir = o.out;
        } else {
            config = make_config(o);
            if (*ingest || *sslr || *train || *eval) require(config.corpus_root, "--corpus");
            if (*train || *eval) require(config.labels_path, "--labels");
            require(config.out_dir, "--out");
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    if (*ingest) return stage("ingest", [&] { cmd_ingest(config); });
    if (*sslr) return stage("sslr", [&] { cmd_sslr(config); });
    if (*embed) return stage("embed", [&] { cmd_embed(config); });
    if (*train) return stage("train", [&] { cmd_train(config); });
    if (*eval) return stage("eval", [&] { cmd_eval(config); });
    if (*report) return stage("report", [&] { print_report(read_text(config.out_dir / "report.json")); });
    if (*predict) {
        return stage("predict", [&] {
            std::vector<fs::path> paths(predict_inputs.begin(), predict_inputs.end());
            for (const auto& p : predict_files(fs::path(bundle_path), paths)) {
                if (p.label) {
                    fmt::print("{}\t{}\t{}\t{:.4f}\n", p.path, p.class_name, to_string(*p.label), p.confidence);
                } else {
                    fmt::print("{}\t-\t-\t-\t# {}\n", p.path, p.diagnostic);
                }
            }
        });
    }
    if (*synth) {
        std::map<PatternLabel, int> counts;
        for (const auto& name : synth_labels) {
            const auto label = parse_label(name);
            if (!label) {
                std::cerr << "usage error: unknown label '" << name << "'\n";
                return kExitUsage;
            }
            counts[*label] = per_class;
        }
        return stage("synth", [&] {
            const auto corpus = generate_synthetic_corpus(counts, o.seed.value_or(1));
            write_corpus(corpus.manifest, config.out_dir);
            write_text(fs::path(config.out_dir) / "labels.csv", labels_to_csv(corpus.labels));
            fmt::print("{} files written under {}; labels in {}\n", corpus.manifest.files.size(),
                       config.out_dir.string(), (fs::path(config.out_dir) / "labels.csv").string());
        });
    }
    return kExitUsage;
}
