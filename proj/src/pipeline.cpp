#include "patmine/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "patmine/errors.hpp"
#include "patmine/java_parser.hpp"
#include "patmine/random.hpp"

namespace patmine {

namespace fs = std::filesystem;

CorpusAnalysis analyze_corpus(const CorpusManifest& manifest, const SslrOptions& options) {
    CorpusAnalysis a;
    a.code = parse_corpus(manifest);
    a.graph = build_call_graph(a.code);
    for (const auto& file : a.code.files) {
        a.features.push_back(extract_file_features(file, a.graph));
        a.sslr.push_back(emit_sslr(file, a.features.back(), options));
    }
    return a;
}

Dataset build_dataset(const CorpusAnalysis& analysis, const std::vector<LabelledInstance>& labels) {
    std::map<FileKey, std::size_t> index;
    for (std::size_t i = 0; i < analysis.code.files.size(); ++i) index.emplace(analysis.code.files[i].file, i);
    Dataset d;
    std::size_t dropped = 0;
    for (const auto& inst : labels) {
        const auto it = index.find(inst.file);
        if (it == index.end()) {
            ++dropped;
            spdlog::warn("dropping label row for {}: file did not parse", inst.file.str());
            continue;
        }
        d.instances.push_back(inst);
        d.file_of.push_back(it->second);
        d.y.push_back(inst.label);
    }
    if (dropped) spdlog::warn("{} of {} labelled instances dropped", dropped, labels.size());
    return d;
}

std::array<double, kNumericFeatureCount> numeric_block(const std::vector<ClassFeatures>& file_features,
                                                       const std::string& class_name) {
    for (const auto& cf : file_features) {
        const auto& name = cf.record.class_name;
        const auto dot = name.rfind('.');
        if (name == class_name || (dot != std::string::npos && name.substr(dot + 1) == class_name)) {
            return numeric_features(cf);
        }
    }
    std::array<double, kNumericFeatureCount> mean{};
    if (file_features.empty()) return mean;
    for (const auto& cf : file_features) {
        const auto v = numeric_features(cf);
        for (std::size_t i = 0; i < v.size(); ++i) mean[i] += v[i];
    }
    for (auto& x : mean) x /= static_cast<double>(file_features.size());
    return mean;
}

std::vector<FeatureRow> instance_rows(const CorpusAnalysis& analysis, const Dataset& data,
                                      const std::vector<FileVector>& file_vectors,
                                      const std::vector<std::size_t>& which, bool append_numeric) {
    std::vector<FeatureRow> rows;
    rows.reserve(which.size());
    for (auto i : which) {
        const auto f = data.file_of[i];
        FeatureRow row = file_vectors[f].values;
        if (append_numeric) {
            const auto extra = numeric_block(analysis.features[f], data.instances[i].class_name);
            row.insert(row.end(), extra.begin(), extra.end());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    return v;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("failed writing " + path.string());
}

/// Keeps MANIFEST on disk current after every stage.
class RunLog {
public:
    explicit RunLog(fs::path dir) : dir_(std::move(dir)) {}

    void done(const std::string& stage, std::vector<std::string> artifacts = {}) {
        lines_.push_back("stage " + stage + " ok");
        for (auto& a : artifacts) lines_.push_back("artifact " + a);
        flush("status in-progress");
    }

    void failed(const std::string& stage, const std::string& what) {
        lines_.push_back("stage " + stage + " failed: " + what);
        flush("status incomplete");
    }

    void complete() { flush("status complete"); }

private:
    void flush(const std::string& status) {
        std::string text = "patmine run\n";
        for (const auto& l : lines_) text += l + "\n";
        text += status + "\n";
        write_text(dir_ / "MANIFEST", text);
    }

    fs::path dir_;
    std::vector<std::string> lines_;
};

}  // namespace

ModelBundle train_bundle(const CorpusAnalysis& analysis, const Dataset& data, EmbeddingModel embeddings,
                         const PipelineConfig& config) {
    const auto vectors = embed_files(analysis.sslr, embeddings);
    auto X = instance_rows(analysis, data, vectors, all_indices(data.y.size()), config.append_numeric_features);
    auto y = data.y;
    if (config.smote.enabled && !config.smote.on_test) {
        auto res = smote_oversample(X, y, config.smote.k_neighbors,
                                    derive_seed(config.smote.seed, static_cast<std::uint64_t>(config.k)));
        X = std::move(res.X);
        y = std::move(res.y);
    }
    ModelBundle bundle;
    bundle.ensemble = fit(X, y, config.ensemble);
    bundle.embeddings = std::move(embeddings);
    bundle.sslr = config.sslr;
    bundle.append_numeric_features = config.append_numeric_features;
    return bundle;
}

EvalReport run_pipeline(PipelineConfig config) {
    config.validate();
    config.derive_stage_seeds();
    const fs::path out = config.out_dir;
    if (out.empty()) throw ConfigError("no output directory configured");
    fs::create_directories(out);
    RunLog log(out);

    std::string stage;
    try {
        stage = "ingest";
        const auto manifest = ingest_corpus(config.corpus_root, config.filters);
        const auto labels = load_labels(config.labels_path, manifest);
        write_text(out / "manifest.json", manifest_to_json(manifest));
        log.done(stage, {"manifest.json"});

        stage = "parse";
        CorpusAnalysis analysis;
        analysis.code = parse_corpus(manifest);
        for (const auto& d : analysis.code.diagnostics) spdlog::warn("{}: {}", d.file.str(), d.message);
        log.done(stage);

        stage = "callgraph";
        analysis.graph = build_call_graph(analysis.code);
        write_text(out / "callgraph.dot", analysis.graph.to_dot());
        log.done(stage, {"callgraph.dot"});

        stage = "features";
        std::vector<ClassFeatures> all_features;
        for (const auto& file : analysis.code.files) {
            analysis.features.push_back(extract_file_features(file, analysis.graph));
            all_features.insert(all_features.end(), analysis.features.back().begin(), analysis.features.back().end());
        }
        write_text(out / "class_features.csv", class_features_csv(all_features));
        write_text(out / "method_features.csv", method_features_csv(all_features));
        log.done(stage, {"class_features.csv", "method_features.csv"});

        stage = "sslr";
        for (std::size_t i = 0; i < analysis.code.files.size(); ++i) {
            analysis.sslr.push_back(emit_sslr(analysis.code.files[i], analysis.features[i], config.sslr));
        }
        write_text(out / "corpus.sslr", write_sslr(analysis.sslr));
        log.done(stage, {"corpus.sslr"});

        stage = "embed";
        auto embeddings = train_cbow(analysis.sslr, config.embed);
        write_text(out / "embeddings.txt", write_embeddings(embeddings));
        log.done(stage, {"embeddings.txt"});

        stage = "vectors";
        const auto data = build_dataset(analysis, labels);
        if (data.y.empty()) throw EmptyTrainingError("no labelled instance survived parsing");
        const auto vectors = embed_files(analysis.sslr, embeddings);
        log.done(stage);

        stage = "evaluate";
        EvalReport report;
        if (config.embed_train_folds_only) {
            report = cross_validate(
                [&](int fold, const std::vector<std::size_t>& train, const std::vector<std::size_t>& test) {
                    std::set<std::size_t> files;
                    for (auto i : train) files.insert(data.file_of[i]);
                    std::vector<SslrDocument> docs;
                    for (auto f : files) docs.push_back(analysis.sslr[f]);
                    auto params = config.embed;
                    params.seed = derive_seed(config.embed.seed, static_cast<std::uint64_t>(fold) + 1);
                    const auto fold_vectors = embed_files(analysis.sslr, train_cbow(docs, params));
                    return std::make_pair(
                        instance_rows(analysis, data, fold_vectors, train, config.append_numeric_features),
                        instance_rows(analysis, data, fold_vectors, test, config.append_numeric_features));
                },
                data.y, config.k, config.seed, config.ensemble, config.smote);
        } else {
            const auto X = instance_rows(analysis, data, vectors, all_indices(data.y.size()),
                                         config.append_numeric_features);
            report = cross_validate(X, data.y, config.k, config.seed, config.ensemble, config.smote);
        }
        report.config = config.echo();
        log.done(stage);

        stage = "train";
        save_bundle(train_bundle(analysis, data, std::move(embeddings), config), out / "model.bundle");
        log.done(stage, {"model.bundle"});

        stage = "report";
        write_text(out / "report.json", report_to_json(report));
        write_text(out / "confusion.csv", confusion_to_csv(report.confusion));
        log.done(stage, {"report.json", "confusion.csv"});
        log.complete();
        return report;
    } catch (const std::exception& e) {
        try {
            log.failed(stage, e.what());
        } catch (const std::exception& inner) {
            spdlog::error("could not update MANIFEST: {}", inner.what());
        }
        std::throw_with_nested(StageError(stage, e.what()));
    }
}

std::vector<Prediction> predict_files(const fs::path& bundle_path, const std::vector<fs::path>& files) {
    return predict_files(load_bundle(bundle_path), files);
}

std::vector<Prediction> predict_files(const ModelBundle& bundle, const std::vector<fs::path>& files) {
    std::vector<Prediction> out(files.size());
    CorpusManifest manifest;
    std::vector<std::optional<FileKey>> key_of(files.size());
    for (std::size_t i = 0; i < files.size(); ++i) {
        out[i].path = files[i].string();
        std::ifstream in(files[i], std::ios::binary);
        if (!in) {
            out[i].diagnostic = "cannot read file";
            continue;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        SourceFile sf{"input", std::to_string(i) + "/" + files[i].filename().string(), buf.str()};
        key_of[i] = sf.key();
        manifest.files.push_back(std::move(sf));
    }
    std::sort(manifest.files.begin(), manifest.files.end(),
              [](const SourceFile& a, const SourceFile& b) { return a.key() < b.key(); });

    const auto analysis = analyze_corpus(manifest, bundle.sslr);
    std::map<FileKey, std::size_t> parsed;
    for (std::size_t f = 0; f < analysis.code.files.size(); ++f) parsed.emplace(analysis.code.files[f].file, f);
    std::map<FileKey, std::string> errors;
    for (const auto& d : analysis.code.diagnostics) errors.emplace(d.file, d.message);

    for (std::size_t i = 0; i < files.size(); ++i) {
        if (!key_of[i]) continue;
        const auto it = parsed.find(*key_of[i]);
        if (it == parsed.end()) {
            out[i].diagnostic = errors.count(*key_of[i]) ? errors.at(*key_of[i]) : "parse failed";
            continue;
        }
        const auto f = it->second;
        const auto& classes = analysis.code.files[f].classes;
        if (classes.empty()) {
            out[i].diagnostic = "no type declaration";
            continue;
        }
        out[i].class_name = classes.front().name;
        FeatureRow row = embed_file(analysis.sslr[f], bundle.embeddings).values;
        if (bundle.append_numeric_features) {
            const auto extra = numeric_block(analysis.features[f], out[i].class_name);
            row.insert(row.end(), extra.begin(), extra.end());
        }
        const auto proba = bundle.ensemble.predict_proba(row);
        const auto best = static_cast<std::size_t>(std::max_element(proba.begin(), proba.end()) - proba.begin());
        out[i].label = bundle.ensemble.label_order()[best];
        out[i].confidence = proba[best];
    }
    return out;
}

}  // namespace patmine
