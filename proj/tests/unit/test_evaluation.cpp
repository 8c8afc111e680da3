#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "patmine/errors.hpp"
#include "patmine/evaluation.hpp"
#include "patmine/random.hpp"

using namespace patmine;

namespace {

using L = PatternLabel;

// Instance counts per label for the reference 1400-file corpus.
const std::map<PatternLabel, int> kReferenceCounts{
    {L::Adapter, 112}, {L::Builder, 104},   {L::Decorator, 104}, {L::Factory, 123}, {L::Facade, 102},
    {L::Memento, 100}, {L::Observer, 102},  {L::Prototype, 102}, {L::Proxy, 111},   {L::Singleton, 102},
    {L::Wrapper, 112}, {L::Visitor, 104},   {L::None, 122},
};

std::vector<PatternLabel> repeat_labels(const std::map<PatternLabel, int>& counts) {
    std::vector<PatternLabel> y;
    for (const auto& [label, n] : counts) y.insert(y.end(), static_cast<std::size_t>(n), label);
    return y;
}

std::vector<PatternLabel> reference_labels() {
    auto y = repeat_labels(kReferenceCounts);
    Rng(17).shuffle(y);
    return y;
}

std::vector<FeatureRow> random_rows(std::size_t n, std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<FeatureRow> X(n, FeatureRow(dim));
    for (auto& row : X)
        for (auto& v : row) v = rng.uniform() * 10;
    return X;
}

ConfusionMatrix two_by_two(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    ConfusionMatrix m({L::Adapter, L::Builder});
    m.counts = {{a, b}, {c, d}};
    return m;
}

}  // namespace

TEST(StratifiedKFold, TwoBalancedClassesGiveOneOfEachPerFold) {
    std::vector<PatternLabel> y(5, L::Adapter);
    y.insert(y.end(), 5, L::Builder);
    const auto folds = stratified_kfold(y, 5, 1);
    for (int f = 0; f < 5; ++f) {
        const auto test = folds.test_indices(f);
        ASSERT_EQ(test.size(), 2u);
        EXPECT_NE(y[test[0]], y[test[1]]);
        EXPECT_EQ(folds.train_indices(f).size(), 8u);
    }
}

TEST(StratifiedKFold, ReferenceCountsSplitEvenlyForManySeeds) {
    const auto y = reference_labels();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto folds = stratified_kfold(y, 10, seed);
        std::set<std::size_t> seen;
        for (int f = 0; f < 10; ++f) {
            const auto test = folds.test_indices(f);
            EXPECT_EQ(test.size(), 140u);
            std::map<PatternLabel, int> per_class;
            for (auto i : test) {
                EXPECT_TRUE(seen.insert(i).second);
                ++per_class[y[i]];
            }
            for (const auto& [label, n] : kReferenceCounts) {
                EXPECT_GE(per_class[label], n / 10);
                EXPECT_LE(per_class[label], (n + 9) / 10);
            }
        }
        EXPECT_EQ(seen.size(), y.size());
    }
}

TEST(StratifiedKFold, SeedChangesAssignmentButIsReproducible) {
    const auto y = reference_labels();
    EXPECT_EQ(stratified_kfold(y, 10, 3).fold_of, stratified_kfold(y, 10, 3).fold_of);
    EXPECT_NE(stratified_kfold(y, 10, 3).fold_of, stratified_kfold(y, 10, 4).fold_of);
}

TEST(StratifiedKFold, InfeasibleAndInvalidRequests) {
    std::vector<PatternLabel> y(20, L::Adapter);
    y.insert(y.end(), 3, L::Proxy);
    try {
        stratified_kfold(y, 5, 1);
        FAIL() << "expected StratificationInfeasibleError";
    } catch (const StratificationInfeasibleError& e) {
        EXPECT_NE(std::string(e.what()).find("Proxy"), std::string::npos);
    }
    EXPECT_THROW(stratified_kfold(y, 1, 1), ConfigError);
}

TEST(Smote, BalancesReferenceCountsToMajority) {
    const auto y = reference_labels();
    const auto X = random_rows(y.size(), 4, 2);
    const auto res = smote_oversample(X, y, 5, 9);
    EXPECT_EQ(res.n_original, y.size());
    std::map<PatternLabel, int> counts;
    for (auto label : res.y) ++counts[label];
    for (auto label : kAllPatternLabels) EXPECT_EQ(counts[label], 123) << to_string(label);
    EXPECT_EQ(res.X.size(), 13u * 123u);
    for (std::size_t i = 0; i < X.size(); ++i) EXPECT_EQ(res.X[i], X[i]);
}

TEST(Smote, SyntheticPointsLieOnSegmentsToNearNeighbours) {
    Rng rng(4);
    std::vector<FeatureRow> X;
    std::vector<PatternLabel> y;
    for (int i = 0; i < 150; ++i) {
        X.push_back({rng.uniform(), rng.uniform()});
        y.push_back(L::Adapter);
    }
    for (int i = 0; i < 50; ++i) {
        X.push_back({5 + rng.uniform(), 5 + rng.uniform()});
        y.push_back(L::Observer);
    }
    const int k = 5;
    const auto res = smote_oversample(X, y, k, 1);
    ASSERT_EQ(res.X.size(), 300u);

    std::vector<std::size_t> minority;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] == L::Observer) minority.push_back(i);
    // Brute-force k nearest neighbours of every minority point.
    std::map<std::size_t, std::vector<std::size_t>> knn;
    for (auto i : minority) {
        std::vector<std::pair<double, std::size_t>> d;
        for (auto j : minority) {
            if (j == i) continue;
            const double dx = X[i][0] - X[j][0], dy = X[i][1] - X[j][1];
            d.emplace_back(dx * dx + dy * dy, j);
        }
        std::sort(d.begin(), d.end());
        for (int n = 0; n < k; ++n) knn[i].push_back(d[static_cast<std::size_t>(n)].second);
    }
    for (std::size_t s = res.n_original; s < res.X.size(); ++s) {
        ASSERT_EQ(res.y[s], L::Observer);
        const auto& p = res.X[s];
        bool on_segment = false;
        for (auto i : minority) {
            for (auto j : knn[i]) {
                const double ex = X[j][0] - X[i][0], ey = X[j][1] - X[i][1];
                const double t = ((p[0] - X[i][0]) * ex + (p[1] - X[i][1]) * ey) / (ex * ex + ey * ey);
                if (t < 0 || t >= 1) continue;
                const double rx = X[i][0] + t * ex - p[0], ry = X[i][1] + t * ey - p[1];
                if (std::hypot(rx, ry) < 1e-9) on_segment = true;
            }
        }
        EXPECT_TRUE(on_segment) << "synthetic point " << s;
    }
}

TEST(Smote, BalancedInputIsUnchanged) {
    const std::vector<PatternLabel> y{L::Adapter, L::Builder, L::Adapter, L::Builder};
    const auto X = random_rows(4, 3, 5);
    const auto res = smote_oversample(X, y, 5, 1);
    EXPECT_EQ(res.X, X);
    EXPECT_EQ(res.y, y);
}

TEST(Smote, SingletonMinorityClassThrows) {
    const std::vector<PatternLabel> y{L::Adapter, L::Adapter, L::Adapter, L::Builder};
    EXPECT_THROW(smote_oversample(random_rows(4, 2, 1), y, 5, 1), SmoteInfeasibleError);
}

TEST(Smote, ParallelMatchesSerial) {
    const auto y = reference_labels();
    const auto X = random_rows(y.size(), 6, 8);
    const auto a = smote_oversample(X, y, 5, 3);
    const auto b = smote_oversample_serial(X, y, 5, 3);
    EXPECT_EQ(a.X, b.X);
    EXPECT_EQ(a.y, b.y);
    std::vector<std::size_t> members(300);
    for (std::size_t i = 0; i < members.size(); ++i) members[i] = i * 3;
    EXPECT_EQ(nearest_neighbors(X, members, 7), nearest_neighbors_serial(X, members, 7));
}

TEST(Confusion, CountsTruthRowsAndPredictedColumns) {
    const auto m = confusion_matrix({L::Adapter, L::Adapter, L::Builder}, {L::Adapter, L::Builder, L::Builder},
                                    {L::Adapter, L::Builder});
    EXPECT_EQ(m.counts, (std::vector<std::vector<std::uint64_t>>{{1, 1}, {0, 1}}));
    EXPECT_EQ(m.total(), 3u);
    EXPECT_EQ(m.trace(), 2u);
    EXPECT_EQ(m.row_sum(0), 2u);
    EXPECT_EQ(m.column_sum(1), 2u);
}

TEST(Confusion, Errors) {
    EXPECT_THROW(confusion_matrix({L::Adapter}, {}, {L::Adapter}), DimensionError);
    EXPECT_THROW(confusion_matrix({L::Adapter}, {L::Proxy}, {L::Adapter}), UnknownLabelError);
}

TEST(Metrics, TwoClassExample) {
    const auto s = classification_metrics(two_by_two(8, 2, 1, 9));
    ASSERT_EQ(s.per_class.size(), 2u);
    EXPECT_NEAR(s.per_class[0].precision, 800.0 / 9, 1e-9);
    EXPECT_NEAR(s.per_class[0].recall, 80.0, 1e-9);
    EXPECT_NEAR(s.per_class[1].precision, 900.0 / 11, 1e-9);
    EXPECT_NEAR(s.per_class[1].recall, 90.0, 1e-9);
    EXPECT_NEAR(s.misclassification, 0.15, 1e-12);
    EXPECT_NEAR(s.weighted_recall, 85.0, 1e-9);
}

TEST(Metrics, F1FromReportedPrecisionAndRecall) {
    EXPECT_NEAR(f1_score(81.82, 90.0), 85.72, 0.01);
    EXPECT_NEAR(f1_score(88.24, 93.75), 90.91, 0.01);
    EXPECT_EQ(f1_score(0, 0), 0.0);
}

TEST(Metrics, MisclassificationOfThirteenClassMatrix) {
    ConfusionMatrix m(std::vector<PatternLabel>(kAllPatternLabels.begin(), kAllPatternLabels.end()));
    // 140 correct out of 180, errors spread off the diagonal.
    for (std::size_t i = 0; i < 13; ++i) m.counts[i][i] = 10;
    m.counts[0][0] += 10;
    for (std::size_t e = 0; e < 40; ++e) m.counts[e % 13][(e + 1) % 13] += 1;
    ASSERT_EQ(m.total(), 180u);
    ASSERT_EQ(m.trace(), 140u);
    EXPECT_NEAR(classification_metrics(m).misclassification, 40.0 / 180.0, 1e-12);
}

TEST(Metrics, PropertiesOnRandomMatrices) {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        ConfusionMatrix m({L::Adapter, L::Builder, L::Facade, L::None});
        for (auto& row : m.counts)
            for (auto& c : row) c = rng.index(20);
        for (std::size_t i = 0; i < 4; ++i) m.counts[i][i] += 1;
        const auto s = classification_metrics(m);
        EXPECT_NEAR(s.weighted_recall / 100.0, 1.0 - s.misclassification, 1e-12);
        EXPECT_GE(s.misclassification, 0.0);
        EXPECT_LE(s.misclassification, 1.0);
        for (const auto& c : s.per_class) {
            EXPECT_GE(c.f1, std::min(c.precision, c.recall) - 1e-9);
            EXPECT_LE(c.f1, std::max(c.precision, c.recall) + 1e-9);
        }
    }
}

TEST(Metrics, UndefinedPrecisionAndEmptyMatrix) {
    const auto s = classification_metrics(two_by_two(3, 0, 2, 0));
    EXPECT_TRUE(s.per_class[1].precision_undefined);
    EXPECT_EQ(s.per_class[1].f1, 0.0);
    EXPECT_THROW(classification_metrics(two_by_two(0, 0, 0, 0)), EmptyTrainingError);
}

TEST(Kappa, IdenticalRatersAgreePerfectly) {
    const std::vector<PatternLabel> a{L::Adapter, L::Builder, L::None, L::Adapter};
    EXPECT_DOUBLE_EQ(cohen_kappa(a, a), 1.0);
}

TEST(Kappa, HandComputedCase) {
    // 4 + 3 agreements out of 10; marginals 5/5 and 6/4 give pe = 0.5.
    std::vector<PatternLabel> a, b;
    auto add = [&](PatternLabel x, PatternLabel z, int n) {
        for (int i = 0; i < n; ++i) {
            a.push_back(x);
            b.push_back(z);
        }
    };
    add(L::Adapter, L::Adapter, 4);
    add(L::Adapter, L::Builder, 1);
    add(L::Builder, L::Adapter, 2);
    add(L::Builder, L::Builder, 3);
    EXPECT_NEAR(cohen_kappa(a, b), 0.4, 1e-12);
    EXPECT_NEAR(cohen_kappa(b, a), 0.4, 1e-12);
}

TEST(Kappa, DegenerateAndMismatchedInputs) {
    const std::vector<PatternLabel> same(4, L::Adapter);
    EXPECT_DOUBLE_EQ(cohen_kappa(same, same), 1.0);
    EXPECT_THROW(cohen_kappa(same, {L::Adapter}), DimensionError);
    EXPECT_THROW(cohen_kappa({}, {}), DimensionError);
}

TEST(CrossValidate, PoolsEveryInstanceOnceAndIsReproducible) {
    std::vector<PatternLabel> y;
    std::vector<FeatureRow> X;
    Rng rng(6);
    for (int i = 0; i < 60; ++i) {
        const auto label = i % 3 == 0 ? L::Adapter : L::Builder;
        y.push_back(label);
        X.push_back({(label == L::Adapter ? 0.0 : 4.0) + rng.uniform(), rng.uniform()});
    }
    EnsembleParams p;
    p.n_trees = 20;
    const auto report = cross_validate(X, y, 5, 2, p, SmoteSettings{});
    EXPECT_EQ(report.confusion.total(), 60u);
    EXPECT_EQ(report.folds.size(), 5u);
    for (const auto& f : report.folds) {
        EXPECT_EQ(f.test_size, 12u);
        EXPECT_EQ(f.train_size, 64u);  // 16 + 32 training rows, minority raised to 32
    }
    EXPECT_EQ(report.confusion.trace(), 60u);
    const auto again = cross_validate(X, y, 5, 2, p, SmoteSettings{});
    EXPECT_EQ(report_to_json(report), report_to_json(again));

    SmoteSettings off;
    off.enabled = false;
    for (const auto& f : cross_validate(X, y, 5, 2, p, off).folds) EXPECT_EQ(f.train_size, 48u);
}

TEST(ReportFormat, JsonLayoutAndCsv) {
    EvalReport r;
    r.k = 10;
    r.seed = 5;
    r.confusion = two_by_two(8, 2, 1, 9);
    r.metrics = classification_metrics(r.confusion);
    r.config = {{"embedding.dim", "100"}};
    const auto j = nlohmann::json::parse(report_to_json(r));
    EXPECT_EQ(j["k"], 10);
    EXPECT_EQ(j["per_class"][0]["label"], "Adapter");
    EXPECT_DOUBLE_EQ(j["per_class"][0]["precision"].get<double>(), 88.89);
    EXPECT_DOUBLE_EQ(j["misclassification"].get<double>(), 0.15);
    EXPECT_EQ(j["confusion"]["labels"], nlohmann::json::array({"Adapter", "Builder"}));
    EXPECT_EQ(j["config"]["embedding.dim"], "100");
    EXPECT_FALSE(j["per_class"][0].contains("precision_undefined"));
    EXPECT_EQ(confusion_to_csv(r.confusion), "truth\\predicted,Adapter,Builder\nAdapter,8,2\nBuilder,1,9\n");
}
