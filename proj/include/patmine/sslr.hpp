#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "patmine/corpus.hpp"
#include "patmine/features.hpp"
#include "patmine/java_model.hpp"

namespace patmine {

using Sentence = std::vector<std::string>;

struct SslrDocument {
    FileKey source;
    std::vector<Sentence> sentences;

    bool operator==(const SslrDocument&) const = default;
};

/// The fixed keyword tokens of the sentence templates.
inline constexpr std::string_view kSslrKeywords[] = {"class",   "method", "extends", "implements",
                                                     "returns", "params", "calls",   "calledby"};

struct SslrOptions {
    /// 1 = unigrams only; 2 additionally appends adjacent-token joins.
    int ngram = 1;
};

/// Splits on camelCase, underscores and other punctuation; runs of
/// capitals form one acronym token; digit runs are dropped; output is
/// lowercase ASCII. Latin-1 letters are transliterated, other non-ASCII
/// characters act as separators.
std::vector<std::string> split_identifier(std::string_view id);

/// One class sentence per class followed by one sentence per method:
///   class <name> <modifiers> [extends <name>] [implements <names>]
///   method <name> returns <type> params <param names> [calls <names>]
///          [calledby <names>] <statement kinds>
/// `features` must be extract_file_features(file, graph).
SslrDocument emit_sslr(const ParsedFile& file, const std::vector<ClassFeatures>& features,
                       const SslrOptions& options = {});

/// Corpus SSLR text: a `## file <project_id>/<path>` line per document,
/// then one space-separated sentence per line.
std::string write_sslr(const std::vector<SslrDocument>& docs);
std::vector<SslrDocument> read_sslr(std::string_view text);

}  // namespace patmine
