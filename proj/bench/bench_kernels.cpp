// Parallel kernels against their single-threaded references.
#include <benchmark/benchmark.h>
#include <spdlog/spdlog.h>

#include "patmine/java_parser.hpp"
#include "patmine/pipeline.hpp"
#include "patmine/random.hpp"

using namespace patmine;

namespace {

struct Rows {
    std::vector<FeatureRow> X;
    std::vector<PatternLabel> y;
};

const Rows& rows() {
    static const Rows r = [] {
        Rows out;
        Rng rng(1);
        for (int i = 0; i < 1400; ++i) {
            const auto label = kAllPatternLabels[static_cast<std::size_t>(i) % kPatternLabelCount];
            FeatureRow row(100);
            for (auto& v : row) v = rng.uniform() + 0.1 * label_index(label);
            out.X.push_back(std::move(row));
            out.y.push_back(label);
        }
        return out;
    }();
    return r;
}

const CorpusManifest& manifest() {
    static const CorpusManifest m = [] {
        std::map<PatternLabel, int> counts;
        for (auto label : kAllPatternLabels) counts[label] = 40;
        return generate_synthetic_corpus(counts, 1).manifest;
    }();
    return m;
}

const std::pair<std::vector<SslrDocument>, EmbeddingModel>& documents() {
    static const auto d = [] {
        spdlog::set_level(spdlog::level::err);
        const auto a = analyze_corpus(manifest(), SslrOptions{});
        EmbedHyperparams p;
        p.epochs = 1;
        return std::make_pair(a.sslr, train_cbow(a.sslr, p));
    }();
    return d;
}

EnsembleParams forest() {
    EnsembleParams p;
    p.n_trees = 32;
    return p;
}

void BM_fit(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(fit(rows().X, rows().y, forest()));
}
void BM_fit_serial(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(fit_serial(rows().X, rows().y, forest()));
}

std::vector<std::size_t> all_members() {
    std::vector<std::size_t> m(rows().X.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = i;
    return m;
}

void BM_nearest_neighbors(benchmark::State& s) {
    const auto m = all_members();
    for (auto _ : s) benchmark::DoNotOptimize(nearest_neighbors(rows().X, m, 5));
}
void BM_nearest_neighbors_serial(benchmark::State& s) {
    const auto m = all_members();
    for (auto _ : s) benchmark::DoNotOptimize(nearest_neighbors_serial(rows().X, m, 5));
}

void BM_parse_corpus(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(parse_corpus(manifest()));
}
void BM_parse_corpus_serial(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(parse_corpus_serial(manifest()));
}

void BM_embed_files(benchmark::State& s) {
    const auto& [docs, model] = documents();
    for (auto _ : s) benchmark::DoNotOptimize(embed_files(docs, model));
}
void BM_embed_files_serial(benchmark::State& s) {
    const auto& [docs, model] = documents();
    for (auto _ : s) benchmark::DoNotOptimize(embed_files_serial(docs, model));
}

}  // namespace

BENCHMARK(BM_fit)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_fit_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_nearest_neighbors)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_nearest_neighbors_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_parse_corpus)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_parse_corpus_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_embed_files)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_embed_files_serial)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
