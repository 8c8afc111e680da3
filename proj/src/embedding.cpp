#include "patmine/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "patmine/errors.hpp"
#include "patmine/random.hpp"

namespace patmine {

void EmbedHyperparams::validate() const {
    if (dim < 1) throw ConfigError("embedding dim must be >= 1");
    if (window < 1) throw ConfigError("embedding window must be >= 1");
    if (negative_samples < 1) throw ConfigError("negative_samples must be >= 1");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (min_count < 1) throw ConfigError("min_count must be >= 1");
    if (!(initial_learning_rate > 0)) throw ConfigError("initial_learning_rate must be > 0");
}

EmbeddingModel::EmbeddingModel(std::vector<std::string> tokens, std::size_t dim, std::vector<float> input)
    : tokens_(std::move(tokens)), dim_(dim), input_(std::move(input)) {
    if (input_.size() != tokens_.size() * dim_) throw DimensionError("embedding matrix size mismatch");
    for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], i);
}

std::optional<std::size_t> EmbeddingModel::index_of(std::string_view token) const {
    if (auto it = index_.find(std::string(token)); it != index_.end()) return it->second;
    return std::nullopt;
}

std::span<const float> EmbeddingModel::vector(std::size_t index) const {
    return std::span<const float>(input_).subspan(index * dim_, dim_);
}

std::span<const float> EmbeddingModel::vector(std::string_view token) const {
    const auto idx = index_of(token);
    if (!idx) throw std::out_of_range("token not in vocabulary: " + std::string(token));
    return vector(*idx);
}

namespace {

struct Corpus {
    std::vector<std::vector<std::uint32_t>> sentences;
    std::vector<std::size_t> word_offset;  // words before each sentence
    std::size_t total_words = 0;
};

/// Cumulative unigram^(3/4) distribution.
class NoiseTable {
public:
    explicit NoiseTable(const std::vector<std::size_t>& counts) {
        double acc = 0;
        for (auto c : counts) {
            acc += std::pow(static_cast<double>(c), 0.75);
            cumulative_.push_back(acc);
        }
    }

    std::uint32_t sample(double u) const {
        const double x = u * cumulative_.back();
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
        const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
        return static_cast<std::uint32_t>(std::min(idx, cumulative_.size() - 1));
    }

private:
    std::vector<double> cumulative_;
};

// -log(sigmoid(x)) without overflow.
double neg_log_sigmoid(double x) {
    return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

/// One CBOW pass over a sentence. Returns (loss sum, predictions).
std::pair<double, std::size_t> train_sentence(const std::vector<std::uint32_t>& sentence,
                                              std::size_t words_before, std::size_t total_updates,
                                              const EmbedHyperparams& p, const NoiseTable& noise,
                                              SplitMix64& rng, std::vector<float>& input,
                                              std::vector<float>& output) {
    const auto dim = static_cast<std::size_t>(p.dim);
    const auto window = static_cast<std::size_t>(p.window);
    std::vector<float> hidden(dim);
    std::vector<float> grad(dim);
    double loss = 0;
    std::size_t predictions = 0;

    for (std::size_t pos = 0; pos < sentence.size(); ++pos) {
        const std::size_t lo = pos >= window ? pos - window : 0;
        const std::size_t hi = std::min(sentence.size() - 1, pos + window);
        const std::size_t context = hi - lo;  // excludes pos itself
        if (context == 0) continue;

        const double progress =
            static_cast<double>(words_before + pos) / static_cast<double>(total_updates + 1);
        const auto lr = static_cast<float>(p.initial_learning_rate * std::max(1e-4, 1.0 - progress));

        std::fill(hidden.begin(), hidden.end(), 0.0f);
        for (std::size_t c = lo; c <= hi; ++c) {
            if (c == pos) continue;
            const float* v = &input[sentence[c] * dim];
            for (std::size_t d = 0; d < dim; ++d) hidden[d] += v[d];
        }
        const float inv = 1.0f / static_cast<float>(context);
        for (auto& h : hidden) h *= inv;
        std::fill(grad.begin(), grad.end(), 0.0f);

        const std::uint32_t target = sentence[pos];
        for (int k = 0; k <= p.negative_samples; ++k) {
            std::uint32_t word = target;
            float label = 1.0f;
            if (k > 0) {
                word = noise.sample(rng.uniform());
                if (word == target) continue;
                label = 0.0f;
            }
            float* out = &output[word * dim];
            double f = 0;
            for (std::size_t d = 0; d < dim; ++d) f += static_cast<double>(hidden[d]) * out[d];
            loss += label > 0 ? neg_log_sigmoid(f) : neg_log_sigmoid(-f);
            const double sig = 1.0 / (1.0 + std::exp(-std::clamp(f, -30.0, 30.0)));
            const auto g = static_cast<float>((label - sig) * lr);
            for (std::size_t d = 0; d < dim; ++d) {
                grad[d] += g * out[d];
                out[d] += g * hidden[d];
            }
        }
        for (std::size_t c = lo; c <= hi; ++c) {
            if (c == pos) continue;
            float* v = &input[sentence[c] * dim];
            for (std::size_t d = 0; d < dim; ++d) v[d] += grad[d];
        }
        ++predictions;
    }
    return {loss, predictions};
}

}  // namespace

EmbeddingModel train_cbow(const std::vector<SslrDocument>& documents, const EmbedHyperparams& p) {
    p.validate();
    std::map<std::string, std::size_t> counts;
    for (const auto& doc : documents) {
        for (const auto& s : doc.sentences) {
            for (const auto& t : s) ++counts[t];
        }
    }
    std::vector<std::pair<std::string, std::size_t>> vocab;
    for (auto& [token, count] : counts) {
        if (count >= static_cast<std::size_t>(p.min_count)) vocab.emplace_back(token, count);
    }
    if (vocab.empty()) throw EmptyVocabularyError("no token reaches min_count=" + std::to_string(p.min_count));
    std::stable_sort(vocab.begin(), vocab.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    EmbeddingModel model;
    model.dim_ = static_cast<std::size_t>(p.dim);
    std::vector<std::size_t> vocab_counts;
    for (auto& [token, count] : vocab) {
        model.index_.emplace(token, model.tokens_.size());
        model.tokens_.push_back(token);
        vocab_counts.push_back(count);
    }

    Corpus corpus;
    for (const auto& doc : documents) {
        for (const auto& s : doc.sentences) {
            std::vector<std::uint32_t> ids;
            for (const auto& t : s) {
                if (auto it = model.index_.find(t); it != model.index_.end()) {
                    ids.push_back(static_cast<std::uint32_t>(it->second));
                }
            }
            if (ids.size() < 2) continue;
            corpus.word_offset.push_back(corpus.total_words);
            corpus.total_words += ids.size();
            corpus.sentences.push_back(std::move(ids));
        }
    }

    const std::size_t V = model.tokens_.size();
    const std::size_t dim = model.dim_;
    model.input_.resize(V * dim);
    model.output_.assign(V * dim, 0.0f);
    Rng init(derive_seed(p.seed, 0));
    for (auto& x : model.input_) x = static_cast<float>((init.uniform() - 0.5) / static_cast<double>(dim));

    const NoiseTable noise(vocab_counts);
    const auto n_sentences = static_cast<std::ptrdiff_t>(corpus.sentences.size());
    const std::size_t total_updates = corpus.total_words * static_cast<std::size_t>(p.epochs);

    for (int epoch = 0; epoch < p.epochs; ++epoch) {
        double loss = 0;
        std::size_t predictions = 0;
        const std::size_t epoch_base = corpus.total_words * static_cast<std::size_t>(epoch);
        const auto stream = [&](std::ptrdiff_t s) {
            return derive_seed(p.seed, 1 + static_cast<std::uint64_t>(epoch) * static_cast<std::uint64_t>(n_sentences) +
                                           static_cast<std::uint64_t>(s));
        };
        if (p.parallel) {
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : loss, predictions)
            for (std::ptrdiff_t s = 0; s < n_sentences; ++s) {
                const auto i = static_cast<std::size_t>(s);
                SplitMix64 rng(stream(s));
                auto [l, n] = train_sentence(corpus.sentences[i], epoch_base + corpus.word_offset[i],
                                             total_updates, p, noise, rng, model.input_, model.output_);
                loss += l;
                predictions += n;
            }
        } else {
            for (std::ptrdiff_t s = 0; s < n_sentences; ++s) {
                const auto i = static_cast<std::size_t>(s);
                SplitMix64 rng(stream(s));
                auto [l, n] = train_sentence(corpus.sentences[i], epoch_base + corpus.word_offset[i],
                                             total_updates, p, noise, rng, model.input_, model.output_);
                loss += l;
                predictions += n;
            }
        }
        model.epoch_losses_.push_back(predictions ? loss / static_cast<double>(predictions) : 0.0);
    }

    for (float x : model.input_) {
        if (!std::isfinite(x)) throw Error("CBOW training diverged: non-finite embedding value");
    }
    return model;
}

namespace {

template <class T>
double cosine_impl(std::span<const T> u, std::span<const T> v) {
    if (u.size() != v.size()) throw DimensionError("cosine_similarity: dimension mismatch");
    double dot = 0, nu = 0, nv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += static_cast<double>(u[i]) * static_cast<double>(v[i]);
        nu += static_cast<double>(u[i]) * static_cast<double>(u[i]);
        nv += static_cast<double>(v[i]) * static_cast<double>(v[i]);
    }
    if (nu == 0 || nv == 0) throw ZeroVectorError("cosine_similarity: zero vector");
    return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

}  // namespace

double cosine_similarity(std::span<const double> u, std::span<const double> v) { return cosine_impl(u, v); }
double cosine_similarity(std::span<const float> u, std::span<const float> v) { return cosine_impl(u, v); }

FileVector embed_file(const SslrDocument& doc, const EmbeddingModel& model) {
    FileVector fv;
    fv.source = doc.source;
    fv.values.assign(model.dim(), 0.0);
    std::map<std::size_t, std::size_t> occurrences;
    for (const auto& s : doc.sentences) {
        for (const auto& t : s) {
            if (auto idx = model.index_of(t)) {
                ++occurrences[*idx];
                ++fv.known_token_count;
            }
        }
    }
    if (fv.known_token_count == 0) {
        spdlog::warn("no in-vocabulary tokens in {}; using zero vector", doc.source.str());
        return fv;
    }
    for (const auto& [idx, count] : occurrences) {
        const auto v = model.vector(idx);
        for (std::size_t d = 0; d < v.size(); ++d) fv.values[d] += static_cast<double>(count) * v[d];
    }
    const double n = static_cast<double>(fv.known_token_count);
    for (auto& x : fv.values) x /= n;
    return fv;
}

std::vector<FileVector> embed_files(const std::vector<SslrDocument>& docs, const EmbeddingModel& model) {
    std::vector<FileVector> out(docs.size());
    const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = embed_file(docs[static_cast<std::size_t>(i)], model);
    }
    return out;
}

std::vector<FileVector> embed_files_serial(const std::vector<SslrDocument>& docs, const EmbeddingModel& model) {
    std::vector<FileVector> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(embed_file(d, model));
    return out;
}

std::string write_embeddings(const EmbeddingModel& model) {
    std::string out = fmt::format("{} {}\n", model.vocab_size(), model.dim());
    for (std::size_t i = 0; i < model.vocab_size(); ++i) {
        out += model.tokens()[i];
        for (float x : model.vector(i)) out += fmt::format(" {:.9g}", x);
        out += '\n';
    }
    return out;
}

EmbeddingModel read_embeddings(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::size_t vocab = 0, dim = 0;
    if (!(in >> vocab >> dim) || dim == 0) throw Error("embedding file: malformed header");
    std::vector<std::string> tokens;
    std::vector<float> values;
    tokens.reserve(vocab);
    values.reserve(vocab * dim);
    for (std::size_t i = 0; i < vocab; ++i) {
        std::string token;
        if (!(in >> token)) throw Error("embedding file: expected " + std::to_string(vocab) + " rows");
        tokens.push_back(token);
        for (std::size_t d = 0; d < dim; ++d) {
            std::string num;
            if (!(in >> num)) throw Error("embedding file: short row for '" + token + "'");
            try {
                values.push_back(std::stof(num));
            } catch (const std::exception&) {
                throw Error("embedding file: bad number '" + num + "' for '" + token + "'");
            }
        }
    }
    return EmbeddingModel(std::move(tokens), dim, std::move(values));
}

}  // namespace patmine
