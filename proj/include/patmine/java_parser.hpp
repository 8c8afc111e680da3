#pragma once

#include <string_view>
#include <vector>

#include "patmine/corpus.hpp"
#include "patmine/java_model.hpp"

namespace patmine {

/// Parses a Java 7 subset. One ClassModel per top-level or nested type, in
/// pre-order; anonymous and local classes are folded into the enclosing
/// method. Throws SyntaxError for unbalanced brackets, unterminated
/// literals, lambdas/method references, and malformed declarations.
std::vector<ClassModel> parse_source(std::string_view content);

inline std::vector<ClassModel> parse_file(const SourceFile& file) {
    return parse_source(file.content);
}

/// Parses every manifest file; failures become diagnostics. Files are
/// parsed in parallel and merged in manifest order.
CodeModel parse_corpus(const CorpusManifest& manifest);

/// Single-threaded reference for parse_corpus.
CodeModel parse_corpus_serial(const CorpusManifest& manifest);

}  // namespace patmine
