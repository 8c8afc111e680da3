#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patmine/labels.hpp"

namespace patmine {

/// Identity of a corpus file: project plus project-relative path.
struct FileKey {
    std::string project_id;
    std::string path;

    std::string str() const { return project_id + "/" + path; }

    auto operator<=>(const FileKey&) const = default;
};

struct SourceFile {
    std::string project_id;
    std::string relative_path;  // project-relative, '/'-separated, ends in ".java"
    std::string content;

    FileKey key() const { return {project_id, relative_path}; }
};

struct ExcludedFile {
    std::string path;  // root-relative
    std::string reason;

    bool operator==(const ExcludedFile&) const = default;
};

/// Files sorted by (project_id, relative_path).
struct CorpusManifest {
    std::vector<SourceFile> files;
    std::vector<ExcludedFile> excluded;
    std::vector<std::string> warnings;

    const SourceFile* find(const FileKey& key) const;
};

struct FilterRules {
    bool exclude_tests = true;
    /// Extra fnmatch globs tested against the root-relative path.
    std::vector<std::string> exclude_globs;
    /// When set, every file gets this project id and keeps its full
    /// root-relative path.
    std::optional<std::string> project_id;
};

struct LabelledInstance {
    FileKey file;
    std::string class_name;
    PatternLabel label;

    bool operator==(const LabelledInstance&) const = default;
};

/// Scans `root` for `.java` files. Files directly under root belong to a
/// project named after the root directory.
CorpusManifest ingest_corpus(const std::filesystem::path& root, const FilterRules& filters = {});

/// Returns the exclusion reason for a root-relative path, if any.
std::optional<std::string> exclusion_reason(const std::string& root_relative_path,
                                            const FilterRules& filters);

/// Reads the labels CSV (`project_id,path,class_name,label`).
std::vector<LabelledInstance> load_labels(const std::filesystem::path& label_file,
                                          const CorpusManifest& manifest);
std::vector<LabelledInstance> parse_labels_csv(const std::string& text,
                                               const CorpusManifest& manifest);
std::string labels_to_csv(const std::vector<LabelledInstance>& labels);

std::string manifest_to_json(const CorpusManifest& manifest);
/// Rebuilds a manifest from its JSON export, reading contents from `root`.
CorpusManifest manifest_from_json(const std::string& json, const std::filesystem::path& root);

struct SyntheticCorpus {
    CorpusManifest manifest;
    std::vector<LabelledInstance> labels;
};

/// Templated Java files exhibiting each pattern's defining shape.
/// Deterministic for a fixed (counts, seed).
SyntheticCorpus generate_synthetic_corpus(const std::map<PatternLabel, int>& counts,
                                          std::uint64_t seed);

/// Writes every manifest file under `root/<project_id>/<path>`.
void write_corpus(const CorpusManifest& manifest, const std::filesystem::path& root);

}  // namespace patmine
