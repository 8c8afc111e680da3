#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "patmine/bundle.hpp"
#include "patmine/callgraph.hpp"
#include "patmine/config.hpp"
#include "patmine/corpus.hpp"
#include "patmine/evaluation.hpp"
#include "patmine/features.hpp"
#include "patmine/java_model.hpp"
#include "patmine/sslr.hpp"

namespace patmine {

/// Parse, call graph, features and SSLR for a corpus. `features` and
/// `sslr` are parallel to `code.files`.
struct CorpusAnalysis {
    CodeModel code;
    CallGraph graph;
    std::vector<std::vector<ClassFeatures>> features;
    std::vector<SslrDocument> sslr;
};

CorpusAnalysis analyze_corpus(const CorpusManifest& manifest, const SslrOptions& options);

/// Classifier instances: one per label row whose file parsed.
struct Dataset {
    std::vector<LabelledInstance> instances;
    std::vector<std::size_t> file_of;  // index into CorpusAnalysis::code.files
    std::vector<PatternLabel> y;
};

/// Drops (with a warning) label rows whose file failed to parse.
Dataset build_dataset(const CorpusAnalysis& analysis, const std::vector<LabelledInstance>& labels);

/// The numeric feature block for `class_name` in a file. Falls back to
/// the mean over the file's classes when the class is not found.
std::array<double, kNumericFeatureCount> numeric_block(const std::vector<ClassFeatures>& file_features,
                                                       const std::string& class_name);

/// Feature rows for the given instances from per-file vectors.
std::vector<FeatureRow> instance_rows(const CorpusAnalysis& analysis, const Dataset& data,
                                      const std::vector<FileVector>& file_vectors,
                                      const std::vector<std::size_t>& which, bool append_numeric);

/// Fits the deployable model on every instance (SMOTE per config).
ModelBundle train_bundle(const CorpusAnalysis& analysis, const Dataset& data, EmbeddingModel embeddings,
                         const PipelineConfig& config);

/// Ingest through report, writing artifacts into config.out_dir:
/// manifest.json, class_features.csv, method_features.csv, callgraph.dot,
/// corpus.sslr, embeddings.txt, model.bundle, report.json, confusion.csv
/// and MANIFEST. A failing stage throws StageError with the original
/// exception nested; MANIFEST then records the run as incomplete.
EvalReport run_pipeline(PipelineConfig config);

struct Prediction {
    std::string path;
    std::string class_name;
    std::optional<PatternLabel> label;  // empty when the file failed
    double confidence = 0;
    std::string diagnostic;
};

/// Classifies each file with a saved bundle. Files are analysed together
/// so calls between them resolve. Throws BundleFormatError for a corrupt
/// bundle; unreadable or unparseable files become diagnostics.
std::vector<Prediction> predict_files(const std::filesystem::path& bundle_path,
                                      const std::vector<std::filesystem::path>& files);
std::vector<Prediction> predict_files(const ModelBundle& bundle, const std::vector<std::filesystem::path>& files);

}  // namespace patmine
