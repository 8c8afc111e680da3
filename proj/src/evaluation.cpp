#include "patmine/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "patmine/errors.hpp"
#include "patmine/random.hpp"

namespace patmine {

std::vector<std::size_t> FoldAssignment::test_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
        if (fold_of[i] == fold) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> FoldAssignment::train_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
        if (fold_of[i] != fold) out.push_back(i);
    }
    return out;
}

namespace {

std::map<PatternLabel, std::vector<std::size_t>> group_by_label(const std::vector<PatternLabel>& y) {
    std::map<PatternLabel, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < y.size(); ++i) groups[y[i]].push_back(i);
    return groups;
}

std::vector<PatternLabel> labels_present(const std::vector<PatternLabel>& y) {
    std::vector<PatternLabel> out;
    for (const auto& [label, members] : group_by_label(y)) out.push_back(label);
    return out;
}

}  // namespace

FoldAssignment stratified_kfold(const std::vector<PatternLabel>& y, int k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("k must be >= 2");
    const auto groups = group_by_label(y);
    for (const auto& [label, members] : groups) {
        if (members.size() < static_cast<std::size_t>(k)) {
            throw StratificationInfeasibleError("class " + std::string(to_string(label)) + " has " +
                                                std::to_string(members.size()) + " instances, fewer than k=" +
                                                std::to_string(k));
        }
    }
    FoldAssignment out;
    out.k = k;
    out.fold_of.assign(y.size(), -1);
    Rng rng(seed);
    std::size_t cursor = 0;
    for (auto [label, members] : groups) {
        rng.shuffle(members);
        for (auto i : members) out.fold_of[i] = static_cast<int>(cursor++ % static_cast<std::size_t>(k));
    }
    return out;
}

namespace {

double squared_distance(const FeatureRow& a, const FeatureRow& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        d += diff * diff;
    }
    return d;
}

std::vector<std::size_t> neighbors_of(const std::vector<FeatureRow>& X, const std::vector<std::size_t>& members,
                                      std::size_t self, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(members.size());
    for (auto j : members) {
        if (j != self) dist.emplace_back(squared_distance(X[self], X[j]), j);
    }
    k = std::min(k, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(dist[i].second);
    return out;
}

using NeighborFn = std::vector<std::vector<std::size_t>> (*)(const std::vector<FeatureRow>&,
                                                              const std::vector<std::size_t>&, std::size_t);

SmoteResult smote_impl(const std::vector<FeatureRow>& X, const std::vector<PatternLabel>& y, int k_neighbors,
                       std::uint64_t seed, NeighborFn neighbors) {
    if (k_neighbors < 1) throw ConfigError("k_neighbors must be >= 1");
    if (X.size() != y.size()) throw DimensionError("smote: X and y differ in length");
    for (const auto& row : X) {
        if (row.size() != X.front().size()) throw DimensionError("smote: feature vectors differ in width");
    }
    SmoteResult out{X, y, X.size()};
    const auto groups = group_by_label(y);
    std::size_t majority = 0;
    for (const auto& [label, members] : groups) majority = std::max(majority, members.size());

    for (const auto& [label, members] : groups) {
        const std::size_t needed = majority - members.size();
        if (needed == 0) continue;
        if (members.size() < 2) {
            throw SmoteInfeasibleError("class " + std::string(to_string(label)) +
                                       " has a single instance; no neighbour to interpolate with");
        }
        const std::size_t k = std::min(static_cast<std::size_t>(k_neighbors), members.size() - 1);
        const auto nn = neighbors(X, members, k);
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(label_index(label))));
        for (std::size_t s = 0; s < needed; ++s) {
            const std::size_t base = rng.index(members.size());
            const auto& x = X[members[base]];
            const auto& other = X[nn[base][rng.index(nn[base].size())]];
            const double t = rng.uniform();
            FeatureRow synthetic(x.size());
            for (std::size_t d = 0; d < x.size(); ++d) synthetic[d] = x[d] + t * (other[d] - x[d]);
            out.X.push_back(std::move(synthetic));
            out.y.push_back(label);
        }
    }
    return out;
}

}  // namespace

std::vector<std::vector<std::size_t>> nearest_neighbors(const std::vector<FeatureRow>& X,
                                                        const std::vector<std::size_t>& members, std::size_t k) {
    std::vector<std::vector<std::size_t>> out(members.size());
    const auto n = static_cast<std::ptrdiff_t>(members.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = neighbors_of(X, members, members[static_cast<std::size_t>(i)], k);
    }
    return out;
}

std::vector<std::vector<std::size_t>> nearest_neighbors_serial(const std::vector<FeatureRow>& X,
                                                               const std::vector<std::size_t>& members,
                                                               std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    out.reserve(members.size());
    for (auto m : members) out.push_back(neighbors_of(X, members, m, k));
    return out;
}

SmoteResult smote_oversample(const std::vector<FeatureRow>& X, const std::vector<PatternLabel>& y, int k_neighbors,
                             std::uint64_t seed) {
    return smote_impl(X, y, k_neighbors, seed, &nearest_neighbors);
}

SmoteResult smote_oversample_serial(const std::vector<FeatureRow>& X, const std::vector<PatternLabel>& y,
                                    int k_neighbors, std::uint64_t seed) {
    return smote_impl(X, y, k_neighbors, seed, &nearest_neighbors_serial);
}

ConfusionMatrix::ConfusionMatrix(std::vector<PatternLabel> order)
    : label_order(std::move(order)), counts(label_order.size(), std::vector<std::uint64_t>(label_order.size(), 0)) {}

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t t = 0;
    for (const auto& row : counts) {
        for (auto c : row) t += c;
    }
    return t;
}

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
    return t;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t i) const {
    std::uint64_t t = 0;
    for (auto c : counts[i]) t += c;
    return t;
}

std::uint64_t ConfusionMatrix::column_sum(std::size_t j) const {
    std::uint64_t t = 0;
    for (const auto& row : counts) t += row[j];
    return t;
}

std::size_t ConfusionMatrix::index_of(PatternLabel label) const {
    const auto it = std::find(label_order.begin(), label_order.end(), label);
    if (it == label_order.end()) {
        throw UnknownLabelError("label " + std::string(to_string(label)) + " is not in the confusion matrix");
    }
    return static_cast<std::size_t>(it - label_order.begin());
}

void ConfusionMatrix::add(PatternLabel truth, PatternLabel predicted) { ++counts[index_of(truth)][index_of(predicted)]; }

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
    if (other.label_order != label_order) throw DimensionError("confusion matrices have different label orders");
    for (std::size_t i = 0; i < counts.size(); ++i) {
        for (std::size_t j = 0; j < counts.size(); ++j) counts[i][j] += other.counts[i][j];
    }
}

ConfusionMatrix confusion_matrix(const std::vector<PatternLabel>& truth, const std::vector<PatternLabel>& predicted,
                                 const std::vector<PatternLabel>& label_order) {
    if (truth.size() != predicted.size()) throw DimensionError("truth and predictions differ in length");
    ConfusionMatrix m(label_order);
    for (std::size_t i = 0; i < truth.size(); ++i) m.add(truth[i], predicted[i]);
    return m;
}

double f1_score(double precision, double recall) {
    const double sum = precision + recall;
    return sum > 0 ? 2 * precision * recall / sum : 0.0;
}

MetricSummary classification_metrics(const ConfusionMatrix& m) {
    const auto total = m.total();
    if (total == 0) throw EmptyTrainingError("metrics need at least one evaluated instance");
    MetricSummary out;
    for (std::size_t i = 0; i < m.label_order.size(); ++i) {
        ClassMetrics c;
        c.label = m.label_order[i];
        const auto tp = static_cast<double>(m.counts[i][i]);
        const auto predicted = m.column_sum(i);
        c.support = m.row_sum(i);
        c.precision_undefined = predicted == 0;
        c.recall_undefined = c.support == 0;
        c.precision = c.precision_undefined ? 0.0 : 100.0 * tp / static_cast<double>(predicted);
        c.recall = c.recall_undefined ? 0.0 : 100.0 * tp / static_cast<double>(c.support);
        c.f1 = f1_score(c.precision, c.recall);
        const double w = static_cast<double>(c.support) / static_cast<double>(total);
        out.weighted_precision += w * c.precision;
        out.weighted_recall += w * c.recall;
        out.weighted_f1 += w * c.f1;
        out.per_class.push_back(c);
    }
    out.misclassification = 1.0 - static_cast<double>(m.trace()) / static_cast<double>(total);
    return out;
}

double cohen_kappa(const std::vector<PatternLabel>& a, const std::vector<PatternLabel>& b) {
    if (a.size() != b.size()) throw DimensionError("kappa: rating vectors differ in length");
    if (a.empty()) throw DimensionError("kappa: no ratings");
    const auto n = static_cast<double>(a.size());
    std::array<double, kPatternLabelCount> ma{}, mb{};
    double agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma[static_cast<std::size_t>(label_index(a[i]))] += 1;
        mb[static_cast<std::size_t>(label_index(b[i]))] += 1;
        if (a[i] == b[i]) agree += 1;
    }
    const double po = agree / n;
    double pe = 0;
    for (std::size_t c = 0; c < kPatternLabelCount; ++c) pe += (ma[c] / n) * (mb[c] / n);
    if (pe >= 1.0) {
        if (po >= 1.0) return 1.0;
        throw DegenerateMarginals("kappa undefined: chance agreement is 1");
    }
    return (po - pe) / (1.0 - pe);
}

EvalReport cross_validate(const std::vector<FeatureRow>& X, const std::vector<PatternLabel>& y, int k,
                          std::uint64_t seed, const EnsembleParams& params, const SmoteSettings& smote) {
    if (X.size() != y.size()) throw DimensionError("cross_validate: X and y differ in length");
    auto rows = [&X](const std::vector<std::size_t>& idx) {
        std::vector<FeatureRow> out;
        out.reserve(idx.size());
        for (auto i : idx) out.push_back(X[i]);
        return out;
    };
    return cross_validate(
        [&](int, const std::vector<std::size_t>& train, const std::vector<std::size_t>& test) {
            return std::make_pair(rows(train), rows(test));
        },
        y, k, seed, params, smote);
}

EvalReport cross_validate(const FoldFeatureFn& features, const std::vector<PatternLabel>& y, int k,
                          std::uint64_t seed, const EnsembleParams& params, const SmoteSettings& smote) {
    if (y.empty()) throw EmptyTrainingError("cross_validate: no instances");
    const auto folds = stratified_kfold(y, k, seed);
    const auto order = labels_present(y);
    if (smote.enabled && smote.on_test) {
        spdlog::warn("SMOTE is applied to the test folds; reported metrics are inflated by synthetic test points");
    }

    EvalReport report;
    report.k = k;
    report.seed = seed;
    report.confusion = ConfusionMatrix(order);
    for (int f = 0; f < k; ++f) {
        const auto train = folds.train_indices(f);
        const auto test = folds.test_indices(f);
        auto [X_train, X_test] = features(f, train, test);
        std::vector<PatternLabel> y_train, y_test;
        for (auto i : train) y_train.push_back(y[i]);
        for (auto i : test) y_test.push_back(y[i]);

        const auto fold_seed = static_cast<std::uint64_t>(f);
        if (smote.enabled && !smote.on_test) {
            auto res = smote_oversample(X_train, y_train, smote.k_neighbors, derive_seed(smote.seed, fold_seed));
            X_train = std::move(res.X);
            y_train = std::move(res.y);
        } else if (smote.enabled) {
            auto res = smote_oversample(X_test, y_test, smote.k_neighbors, derive_seed(smote.seed, fold_seed));
            X_test = std::move(res.X);
            y_test = std::move(res.y);
        }

        EnsembleParams fold_params = params;
        fold_params.seed = derive_seed(params.seed, fold_seed);
        const auto model = fit(X_train, y_train, fold_params);
        const auto predicted = model.predict(X_test);
        const auto cm = confusion_matrix(y_test, predicted, order);
        report.confusion.merge(cm);
        report.folds.push_back({f, X_train.size(), X_test.size(), classification_metrics(cm)});
    }
    report.metrics = classification_metrics(report.confusion);
    return report;
}

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

nlohmann::ordered_json metrics_json(const MetricSummary& m) {
    nlohmann::ordered_json per_class = nlohmann::ordered_json::array();
    for (const auto& c : m.per_class) {
        nlohmann::ordered_json row;
        row["label"] = to_string(c.label);
        row["precision"] = round2(c.precision);
        row["recall"] = round2(c.recall);
        row["f1"] = round2(c.f1);
        row["support"] = c.support;
        if (c.precision_undefined) row["precision_undefined"] = true;
        if (c.recall_undefined) row["recall_undefined"] = true;
        per_class.push_back(std::move(row));
    }
    nlohmann::ordered_json out;
    out["per_class"] = std::move(per_class);
    out["weighted"] = {{"precision", round2(m.weighted_precision)},
                       {"recall", round2(m.weighted_recall)},
                       {"f1", round2(m.weighted_f1)}};
    out["misclassification"] = std::round(m.misclassification * 1e4) / 1e4;
    return out;
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["k"] = report.k;
    j["seed"] = report.seed;
    const auto summary = metrics_json(report.metrics);
    for (auto it = summary.begin(); it != summary.end(); ++it) j[it.key()] = it.value();
    j["confusion"] = {{"labels", nlohmann::ordered_json::array()}, {"counts", report.confusion.counts}};
    for (auto label : report.confusion.label_order) j["confusion"]["labels"].push_back(to_string(label));
    nlohmann::ordered_json folds = nlohmann::ordered_json::array();
    for (const auto& f : report.folds) {
        nlohmann::ordered_json row;
        row["fold"] = f.fold;
        row["train_size"] = f.train_size;
        row["test_size"] = f.test_size;
        const auto m = metrics_json(f.metrics);
        row["weighted"] = m["weighted"];
        row["misclassification"] = m["misclassification"];
        folds.push_back(std::move(row));
    }
    j["folds"] = std::move(folds);
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (const auto& [key, value] : report.config) config[key] = value;
    j["config"] = std::move(config);
    return j.dump(2) + "\n";
}

std::string confusion_to_csv(const ConfusionMatrix& m) {
    std::string out = "truth\\predicted";
    for (auto label : m.label_order) out += "," + std::string(to_string(label));
    out += '\n';
    for (std::size_t i = 0; i < m.label_order.size(); ++i) {
        out += to_string(m.label_order[i]);
        for (auto c : m.counts[i]) out += "," + std::to_string(c);
        out += '\n';
    }
    return out;
}

}  // namespace patmine
