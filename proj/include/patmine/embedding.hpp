#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "patmine/sslr.hpp"

namespace patmine {

struct EmbedHyperparams {
    int dim = 100;
    int window = 5;
    int min_count = 2;
    int negative_samples = 5;
    int epochs = 15;
    double initial_learning_rate = 0.025;  // decays linearly to 1e-4 of itself
    std::uint64_t seed = 1;
    /// Hogwild training over sentences. Not bit-reproducible with more than
    /// one thread: concurrent updates race by design of the algorithm.
    bool parallel = false;

    /// Throws ConfigError on out-of-range values.
    void validate() const;
};

class EmbeddingModel {
public:
    EmbeddingModel() = default;
    EmbeddingModel(std::vector<std::string> tokens, std::size_t dim, std::vector<float> input);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t vocab_size() const noexcept { return tokens_.size(); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    std::optional<std::size_t> index_of(std::string_view token) const;
    std::span<const float> vector(std::size_t index) const;
    /// Throws std::out_of_range for tokens outside the vocabulary.
    std::span<const float> vector(std::string_view token) const;

    /// Mean logistic loss per prediction, one entry per training epoch.
    const std::vector<double>& epoch_losses() const noexcept { return epoch_losses_; }

    bool operator==(const EmbeddingModel& other) const {
        return tokens_ == other.tokens_ && dim_ == other.dim_ && input_ == other.input_;
    }

private:
    friend EmbeddingModel train_cbow(const std::vector<SslrDocument>&, const EmbedHyperparams&);

    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t dim_ = 0;
    std::vector<float> input_;   // |V| x dim
    std::vector<float> output_;  // |V| x dim, training only
    std::vector<double> epoch_losses_;
};

/// CBOW with negative sampling; each sentence is a context boundary.
/// Vocabulary is ordered by descending count, then token. Throws
/// EmptyVocabularyError when no token reaches min_count.
EmbeddingModel train_cbow(const std::vector<SslrDocument>& documents, const EmbedHyperparams& p);

/// Throws ZeroVectorError if either vector is all zeros, DimensionError on
/// size mismatch.
double cosine_similarity(std::span<const double> u, std::span<const double> v);
double cosine_similarity(std::span<const float> u, std::span<const float> v);

struct FileVector {
    FileKey source;
    std::vector<double> values;
    std::size_t known_token_count = 0;
};

/// Uniform mean of the input vectors of every in-vocabulary token
/// occurrence. Summation runs in vocabulary order so the result does not
/// depend on token order. An all-OOV document yields zeros.
FileVector embed_file(const SslrDocument& doc, const EmbeddingModel& model);

/// embed_file over many documents, in parallel.
std::vector<FileVector> embed_files(const std::vector<SslrDocument>& docs, const EmbeddingModel& model);
std::vector<FileVector> embed_files_serial(const std::vector<SslrDocument>& docs,
                                           const EmbeddingModel& model);

/// `<vocab_size> <dim>` then `<token> <v1> ... <vdim>` per line, 9
/// significant digits so float32 values round-trip exactly.
std::string write_embeddings(const EmbeddingModel& model);
EmbeddingModel read_embeddings(std::string_view text);

}  // namespace patmine
