#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "patmine/classifier.hpp"
#include "patmine/labels.hpp"

namespace patmine {

struct FoldAssignment {
    int k = 0;
    std::vector<int> fold_of;  // instance index -> fold id in [0, k)

    std::vector<std::size_t> test_indices(int fold) const;
    std::vector<std::size_t> train_indices(int fold) const;
};

/// Within each class the indices are shuffled by `seed` and dealt to folds
/// round-robin. The dealing cursor carries over from one class to the
/// next, so fold sizes also differ by at most one overall. Throws
/// StratificationInfeasibleError when a class has fewer than k instances.
FoldAssignment stratified_kfold(const std::vector<PatternLabel>& y, int k, std::uint64_t seed);

struct SmoteResult {
    std::vector<FeatureRow> X;
    std::vector<PatternLabel> y;
    std::size_t n_original = 0;  // X[0, n_original) are the inputs, unchanged
};

/// Oversamples every class up to the majority count. A synthetic point is
/// x + t(nn - x), t uniform in [0, 1), with nn drawn from the k nearest
/// same-class neighbours of a random x (Euclidean, ties by index). Throws
/// SmoteInfeasibleError if a class that needs samples has one instance.
SmoteResult smote_oversample(const std::vector<FeatureRow>& X, const std::vector<PatternLabel>& y,
                             int k_neighbors, std::uint64_t seed);
/// Same output, neighbour search done on one thread.
SmoteResult smote_oversample_serial(const std::vector<FeatureRow>& X, const std::vector<PatternLabel>& y,
                                    int k_neighbors, std::uint64_t seed);

/// Row i lists the indices of the k nearest points to members[i] among
/// `members` (excluding itself), nearest first.
std::vector<std::vector<std::size_t>> nearest_neighbors(const std::vector<FeatureRow>& X,
                                                        const std::vector<std::size_t>& members, std::size_t k);
std::vector<std::vector<std::size_t>> nearest_neighbors_serial(const std::vector<FeatureRow>& X,
                                                               const std::vector<std::size_t>& members,
                                                               std::size_t k);

struct ConfusionMatrix {
    std::vector<PatternLabel> label_order;
    std::vector<std::vector<std::uint64_t>> counts;  // rows = truth, columns = prediction

    explicit ConfusionMatrix(std::vector<PatternLabel> order = {});

    std::uint64_t total() const;
    std::uint64_t trace() const;
    std::uint64_t row_sum(std::size_t i) const;
    std::uint64_t column_sum(std::size_t j) const;
    /// Throws UnknownLabelError for labels outside label_order.
    std::size_t index_of(PatternLabel label) const;
    void add(PatternLabel truth, PatternLabel predicted);
    void merge(const ConfusionMatrix& other);

    bool operator==(const ConfusionMatrix&) const = default;
};

/// Throws DimensionError on length mismatch, UnknownLabelError for labels
/// outside `label_order`.
ConfusionMatrix confusion_matrix(const std::vector<PatternLabel>& truth, const std::vector<PatternLabel>& predicted,
                                 const std::vector<PatternLabel>& label_order);

/// Percent-scale harmonic mean; 0 when p + r = 0.
double f1_score(double precision, double recall);

struct ClassMetrics {
    PatternLabel label = PatternLabel::None;
    double precision = 0;  // percent
    double recall = 0;
    double f1 = 0;
    std::uint64_t support = 0;
    bool precision_undefined = false;  // nothing predicted as this class
    bool recall_undefined = false;     // no true instances
};

struct MetricSummary {
    std::vector<ClassMetrics> per_class;
    double weighted_precision = 0;  // percent, support-weighted
    double weighted_recall = 0;
    double weighted_f1 = 0;
    double misclassification = 0;  // 1 - trace/total, in [0, 1]
};

/// Throws EmptyTrainingError on an empty matrix.
MetricSummary classification_metrics(const ConfusionMatrix& m);

/// Cohen's kappa for two raters. When chance agreement is 1, returns 1.0
/// if observed agreement is also 1 and throws DegenerateMarginals
/// otherwise.
double cohen_kappa(const std::vector<PatternLabel>& a, const std::vector<PatternLabel>& b);

struct SmoteSettings {
    bool enabled = true;
    /// Oversample each test fold instead of the training folds.
    bool on_test = false;
    int k_neighbors = 5;
    std::uint64_t seed = 1;
};

struct FoldResult {
    int fold = 0;
    std::size_t train_size = 0;  // after oversampling
    std::size_t test_size = 0;
    MetricSummary metrics;
};

struct EvalReport {
    int k = 0;
    std::uint64_t seed = 0;
    ConfusionMatrix confusion;  // all folds pooled
    MetricSummary metrics;
    std::vector<FoldResult> folds;
    std::vector<std::pair<std::string, std::string>> config;  // echoed into the JSON
};

/// Feature rows for one fold: (train rows, test rows), in index order.
using FoldFeatureFn = std::function<std::pair<std::vector<FeatureRow>, std::vector<FeatureRow>>(
    int fold, const std::vector<std::size_t>& train, const std::vector<std::size_t>& test)>;

EvalReport cross_validate(const std::vector<FeatureRow>& X, const std::vector<PatternLabel>& y, int k,
                          std::uint64_t seed, const EnsembleParams& params, const SmoteSettings& smote);
EvalReport cross_validate(const FoldFeatureFn& features, const std::vector<PatternLabel>& y, int k,
                          std::uint64_t seed, const EnsembleParams& params, const SmoteSettings& smote);

/// Percent values rounded to 2 decimals; no timestamps, so identical
/// inputs give identical bytes.
std::string report_to_json(const EvalReport& report);
/// Header row and column of label names, integer cells.
std::string confusion_to_csv(const ConfusionMatrix& m);

}  // namespace patmine
