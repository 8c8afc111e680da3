#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "patmine/classifier.hpp"
#include "patmine/embedding.hpp"
#include "patmine/sslr.hpp"

namespace patmine {

/// Everything needed to classify new files.
struct ModelBundle {
    EmbeddingModel embeddings;
    TreeEnsemble ensemble;
    SslrOptions sslr;
    bool append_numeric_features = false;
};

/// Archive layout: a `PATMINE-BUNDLE 1` line, then entries of the form
/// `entry <name> <byte count>\n<bytes>\n`. Entries: config, labels,
/// embeddings, ensemble.
std::string write_bundle(const ModelBundle& bundle);
/// Throws BundleFormatError on any structural problem.
ModelBundle read_bundle(std::string_view archive);

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_bundle(const std::filesystem::path& path);

}  // namespace patmine
