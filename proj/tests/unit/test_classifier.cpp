#include <gtest/gtest.h>

#include <numeric>

#include "patmine/classifier.hpp"
#include "patmine/errors.hpp"
#include "patmine/random.hpp"

using namespace patmine;

namespace {

using L = PatternLabel;

struct Data {
    std::vector<FeatureRow> X;
    std::vector<PatternLabel> y;
};

Data xor_points() {
    return {{{0, 0}, {1, 1}, {0, 1}, {1, 0}}, {L::Adapter, L::Adapter, L::Builder, L::Builder}};
}

Data blobs(int per_class, std::uint64_t seed) {
    Rng rng(seed);
    Data d;
    const std::vector<std::pair<L, double>> centres{{L::Adapter, 0.0}, {L::Singleton, 3.0}, {L::None, 6.0}};
    for (const auto& [label, c] : centres) {
        for (int i = 0; i < per_class; ++i) {
            d.X.push_back({c + rng.uniform(), c - rng.uniform(), rng.uniform() * 10});
            d.y.push_back(label);
        }
    }
    return d;
}

EnsembleParams params(int trees = 25, std::uint64_t seed = 7) {
    EnsembleParams p;
    p.n_trees = trees;
    p.seed = seed;
    return p;
}

}  // namespace

TEST(EnsembleParams, ValidationAndFeatureCounts) {
    EnsembleParams p;
    EXPECT_NO_THROW(p.validate());
    EXPECT_EQ(p.features_per_node(100), 10u);
    EXPECT_EQ(p.features_per_node(1), 1u);
    p.max_features = EnsembleParams::kAll;
    EXPECT_EQ(p.features_per_node(7), 7u);
    p.max_features = 3;
    EXPECT_EQ(p.features_per_node(7), 3u);
    p.n_trees = 0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.min_samples_split = 1;
    EXPECT_THROW(p.validate(), ConfigError);
    EXPECT_EQ(ensemble_mode_from_string(to_string(EnsembleMode::RandomForest)), EnsembleMode::RandomForest);
    EXPECT_THROW(ensemble_mode_from_string("bagging"), ConfigError);
}

TEST(Fit, SingleClassPredictsThatClassWithCertainty) {
    const std::vector<FeatureRow> X{{1, 2}, {3, 4}, {5, 6}};
    const std::vector<PatternLabel> y(3, L::Facade);
    const auto model = fit(X, y, params(5));
    EXPECT_EQ(model.label_order(), (std::vector<PatternLabel>{L::Facade}));
    const std::vector<double> probe{-100, 100};
    EXPECT_EQ(model.predict(probe), L::Facade);
    EXPECT_EQ(model.predict_proba(probe), (std::vector<double>{1.0}));
}

TEST(Fit, SeparatesXorTrainingPoints) {
    const auto d = xor_points();
    const auto model = fit(d.X, d.y, params(50));
    EXPECT_EQ(model.predict(d.X), d.y);
}

TEST(Fit, MemorizesDistinctTrainingRows) {
    const auto d = blobs(20, 3);
    const auto model = fit(d.X, d.y, params(10));
    EXPECT_EQ(model.predict(d.X), d.y);
    for (const auto& tree : model.trees()) {
        for (const auto& n : tree.nodes) {
            if (!n.is_leaf()) continue;
            EXPECT_EQ(std::count_if(n.counts.begin(), n.counts.end(), [](auto c) { return c > 0; }), 1);
        }
    }
}

TEST(Fit, DeterministicAndEqualToSerialReference) {
    const auto d = blobs(15, 4);
    const auto a = fit(d.X, d.y, params());
    EXPECT_EQ(a, fit(d.X, d.y, params()));
    EXPECT_EQ(a, fit_serial(d.X, d.y, params()));
    EXPECT_FALSE(a == fit(d.X, d.y, params(25, 8)));
}

TEST(Fit, RowOrderDoesNotChangeTrainingPredictions) {
    const auto d = blobs(15, 5);
    std::vector<std::size_t> perm(d.y.size());
    std::iota(perm.begin(), perm.end(), 0);
    Rng(11).shuffle(perm);
    Data shuffled;
    for (auto i : perm) {
        shuffled.X.push_back(d.X[i]);
        shuffled.y.push_back(d.y[i]);
    }
    const auto model = fit(shuffled.X, shuffled.y, params());
    EXPECT_EQ(model.predict(d.X), d.y);
}

TEST(Fit, Errors) {
    EXPECT_THROW(fit({}, {}, params()), EmptyTrainingError);
    EXPECT_THROW(fit({{1.0}}, {L::Adapter, L::Builder}, params()), DimensionError);
    EXPECT_THROW(fit({{1.0}, {1.0, 2.0}}, {L::Adapter, L::Builder}, params()), DimensionError);
    const auto model = fit({{1.0}, {2.0}}, {L::Adapter, L::Builder}, params(3));
    const std::vector<double> wide{1.0, 2.0};
    EXPECT_THROW(model.predict_proba(wide), DimensionError);
}

TEST(Predict, ProbabilitiesFormADistribution) {
    const auto d = blobs(20, 6);
    const auto model = fit(d.X, d.y, params());
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> x{rng.uniform() * 8 - 1, rng.uniform() * 8 - 1, rng.uniform() * 10};
        const auto p = model.predict_proba(x);
        ASSERT_EQ(p.size(), 3u);
        EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
        const auto best = std::max_element(p.begin(), p.end()) - p.begin();
        EXPECT_EQ(model.predict(x), model.label_order()[static_cast<std::size_t>(best)]);
    }
}

TEST(Predict, TiesGoToFirstLabelInOrder) {
    // Two identical points with different labels cannot be separated, so
    // every leaf reports one of each.
    const std::vector<FeatureRow> X{{1.0, 1.0}, {1.0, 1.0}};
    const std::vector<PatternLabel> y{L::Visitor, L::Adapter};
    const auto model = fit(X, y, params(2));
    EXPECT_EQ(model.label_order(), (std::vector<PatternLabel>{L::Adapter, L::Visitor}));
    EXPECT_EQ(model.predict_proba(X[0]), (std::vector<double>{0.5, 0.5}));
    EXPECT_EQ(model.predict(X[0]), L::Adapter);
}

TEST(Serialize, RoundTripsExactly) {
    const auto d = blobs(10, 9);
    auto p = params(8);
    p.max_depth = 4;
    p.mode = EnsembleMode::RandomForest;
    const auto model = fit(d.X, d.y, p);
    const auto text = model.serialize();
    const auto back = TreeEnsemble::deserialize(text);
    EXPECT_EQ(back, model);
    EXPECT_EQ(back.serialize(), text);
}

TEST(Serialize, RejectsCorruptText) {
    const auto d = blobs(5, 9);
    const auto text = fit(d.X, d.y, params(2)).serialize();
    EXPECT_THROW(TreeEnsemble::deserialize(""), BundleFormatError);
    EXPECT_THROW(TreeEnsemble::deserialize("PATMINE-ENSEMBLE 9\n"), BundleFormatError);
    EXPECT_THROW(TreeEnsemble::deserialize(text.substr(0, text.size() / 2)), BundleFormatError);
}

TEST(RandomForestMode, RespectsDepthLimit) {
    const auto d = blobs(20, 10);
    auto p = params(10);
    p.mode = EnsembleMode::RandomForest;
    p.max_depth = 2;
    const auto model = fit(d.X, d.y, p);
    for (const auto& tree : model.trees()) EXPECT_LE(tree.depth(), 2u);
    EXPECT_EQ(model, fit_serial(d.X, d.y, p));
}
