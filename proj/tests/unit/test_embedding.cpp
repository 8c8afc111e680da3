#include <gtest/gtest.h>

#include <cmath>

#include <omp.h>

#include "patmine/embedding.hpp"
#include "patmine/errors.hpp"
#include "patmine/random.hpp"

using namespace patmine;

namespace {

SslrDocument doc(std::vector<Sentence> sentences, const std::string& path = "d.java") {
    return {{"p", path}, std::move(sentences)};
}

std::vector<SslrDocument> toy_corpus(int n_sentences, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Sentence> sentences;
    for (int i = 0; i < n_sentences; ++i) {
        sentences.push_back({"ctx1", rng.uniform() < 0.5 ? "alpha" : "beta", "ctx2"});
    }
    return {doc(std::move(sentences))};
}

EmbedHyperparams small(int dim = 8) {
    EmbedHyperparams p;
    p.dim = dim;
    p.epochs = 5;
    p.min_count = 1;
    return p;
}

}  // namespace

TEST(Cosine, Examples) {
    const std::vector<double> e1{1, 0}, e2{0, 1}, two{2, 0}, diag{1, 1};
    EXPECT_DOUBLE_EQ(cosine_similarity(e1, e2), 0.0);
    EXPECT_DOUBLE_EQ(cosine_similarity(two, e1), 1.0);
    EXPECT_NEAR(cosine_similarity(diag, e1), 0.70710678, 1e-8);
}

TEST(Cosine, ZeroVectorAndDimensionErrors) {
    const std::vector<double> zero{0, 0}, one{1, 0}, three{1, 2, 3};
    EXPECT_THROW(cosine_similarity(zero, one), ZeroVectorError);
    EXPECT_THROW(cosine_similarity(one, three), DimensionError);
}

TEST(Cosine, SymmetricAndScaleInvariant) {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(7), y(7);
        for (auto& v : x) v = rng.uniform() * 2 - 1;
        for (auto& v : y) v = rng.uniform() * 2 - 1;
        const double alpha = 0.01 + rng.uniform() * 100;
        std::vector<double> ax = x;
        for (auto& v : ax) v *= alpha;
        const double s = cosine_similarity(x, y);
        EXPECT_NEAR(s, cosine_similarity(y, x), 1e-12);
        EXPECT_NEAR(s, cosine_similarity(ax, y), 1e-9);
        EXPECT_GE(s, -1.0);
        EXPECT_LE(s, 1.0);
    }
}

TEST(Hyperparams, Validation) {
    EmbedHyperparams p;
    EXPECT_NO_THROW(p.validate());
    p.dim = 0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.window = 0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.negative_samples = 0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.epochs = 0;
    EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Cbow, VocabularyFiltersByMinCountAndSortsByFrequency) {
    const std::vector<SslrDocument> docs{doc({{"a", "b", "a", "c"}, {"b", "a", "once"}})};
    EmbedHyperparams p = small();
    p.min_count = 2;
    const auto model = train_cbow(docs, p);
    EXPECT_EQ(model.tokens(), (std::vector<std::string>{"a", "b"}));
    EXPECT_FALSE(model.index_of("once").has_value());
    EXPECT_THROW(model.vector(std::string_view("once")), std::out_of_range);
    EXPECT_EQ(model.vector(std::string_view("a")).size(), 8u);
}

TEST(Cbow, MatrixShapeMatchesVocabularyTimesDim) {
    std::vector<Sentence> sentences;
    for (int i = 0; i < 50; ++i) {
        const auto t = "tok" + std::to_string(i);
        sentences.push_back({t, "shared", t});
    }
    EmbedHyperparams p;
    p.epochs = 1;
    const auto model = train_cbow({doc(sentences)}, p);
    EXPECT_EQ(model.vocab_size(), 51u);
    EXPECT_EQ(model.dim(), 100u);
    for (std::size_t i = 0; i < model.vocab_size(); ++i) {
        for (float v : model.vector(i)) ASSERT_TRUE(std::isfinite(v));
    }
}

TEST(Cbow, EmptyVocabularyThrows) {
    EmbedHyperparams p = small();
    p.min_count = 3;
    EXPECT_THROW(train_cbow({doc({{"a", "b"}})}, p), EmptyVocabularyError);
    EXPECT_THROW(train_cbow({}, p), EmptyVocabularyError);
}

TEST(Cbow, FixedSeedIsBitReproducible) {
    const auto docs = toy_corpus(100, 3);
    const auto p = small(16);
    const auto a = train_cbow(docs, p);
    const auto b = train_cbow(docs, p);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.epoch_losses(), b.epoch_losses());
    auto q = p;
    q.seed = 99;
    EXPECT_FALSE(a == train_cbow(docs, q));
}

TEST(Cbow, ParallelOnOneThreadMatchesSerial) {
    // Per-sentence random streams make the hogwild loop deterministic
    // when it runs on a single thread.
    const auto docs = toy_corpus(60, 4);
    auto p = small(8);
    const auto serial = train_cbow(docs, p);
    p.parallel = true;
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto parallel = train_cbow(docs, p);
    omp_set_num_threads(saved);
    EXPECT_EQ(serial, parallel);
}

TEST(Cbow, LossDecreasesAndInterchangeableTokensAlign) {
    const auto docs = toy_corpus(500, 1);
    EmbedHyperparams p;
    const auto model = train_cbow(docs, p);
    ASSERT_EQ(model.epoch_losses().size(), 15u);
    EXPECT_LT(model.epoch_losses().back(), model.epoch_losses().front());
    EXPECT_GE(cosine_similarity(model.vector(std::string_view("alpha")), model.vector(std::string_view("beta"))), 0.7);
}

TEST(EmbedFile, SingleTokenPairAndAllOov) {
    const auto model = EmbeddingModel({"u", "v"}, 2, {1.0f, 2.0f, 3.0f, 6.0f});
    const auto one = embed_file(doc({{"u"}}), model);
    EXPECT_EQ(one.values, (std::vector<double>{1.0, 2.0}));
    EXPECT_EQ(one.known_token_count, 1u);
    const auto two = embed_file(doc({{"u", "zzz"}, {"v"}}), model);
    EXPECT_EQ(two.values, (std::vector<double>{2.0, 4.0}));
    EXPECT_EQ(two.known_token_count, 2u);
    const auto none = embed_file(doc({{"zzz"}}), model);
    EXPECT_EQ(none.values, (std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(none.known_token_count, 0u);
}

TEST(EmbedFile, PermutationInvariant) {
    const auto docs = toy_corpus(100, 8);
    const auto model = train_cbow(docs, small(12));
    Rng rng(2);
    std::vector<Sentence> sentences;
    for (int i = 0; i < 40; ++i) {
        Sentence s;
        for (int j = 0; j < 5; ++j) s.push_back(rng.pick(model.tokens()));
        sentences.push_back(s);
    }
    const auto base = embed_file(doc(sentences), model);
    for (int trial = 0; trial < 10; ++trial) {
        auto shuffled = sentences;
        rng.shuffle(shuffled);
        for (auto& s : shuffled) rng.shuffle(s);
        const auto v = embed_file(doc(shuffled), model);
        for (std::size_t d = 0; d < v.values.size(); ++d) EXPECT_NEAR(v.values[d], base.values[d], 1e-12);
    }
}

TEST(EmbedFile, ParallelMatchesSerial) {
    const auto docs = toy_corpus(100, 8);
    const auto model = train_cbow(docs, small(12));
    std::vector<SslrDocument> many;
    Rng rng(3);
    for (int i = 0; i < 64; ++i) {
        Sentence s;
        for (int j = 0; j < 1 + i % 7; ++j) s.push_back(rng.pick(model.tokens()));
        many.push_back(doc({s}, "f" + std::to_string(i)));
    }
    const auto a = embed_files(many, model);
    const auto b = embed_files_serial(many, model);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].values, b[i].values);
        EXPECT_EQ(a[i].source, b[i].source);
    }
}

TEST(EmbeddingText, RoundTripsExactly) {
    const auto model = train_cbow(toy_corpus(50, 9), small(10));
    const auto text = write_embeddings(model);
    EXPECT_EQ(text.substr(0, text.find('\n')), "4 10");
    const auto back = read_embeddings(text);
    EXPECT_EQ(back, model);
    EXPECT_EQ(write_embeddings(back), text);
    EXPECT_THROW(read_embeddings("2 3\na 1 2 3\n"), Error);
    EXPECT_THROW(read_embeddings("1 2\na 1 x\n"), Error);
}
