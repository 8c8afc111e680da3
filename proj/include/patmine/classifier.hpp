#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "patmine/labels.hpp"

namespace patmine {

using FeatureRow = std::vector<double>;

enum class EnsembleMode { Extra, RandomForest };

struct EnsembleParams {
    int n_trees = 100;
    /// 0 means sqrt(dim); -1 means all features; otherwise a fixed count.
    int max_features = 0;
    int min_samples_split = 2;
    std::optional<int> max_depth;
    EnsembleMode mode = EnsembleMode::Extra;
    std::uint64_t seed = 1;

    static constexpr int kSqrt = 0;
    static constexpr int kAll = -1;

    void validate() const;
    bool operator==(const EnsembleParams&) const = default;
    /// Number of candidate features per node for data of width `dim`.
    std::size_t features_per_node(std::size_t dim) const;
};

std::string_view to_string(EnsembleMode mode) noexcept;
EnsembleMode ensemble_mode_from_string(std::string_view s);

/// Flat tree. Internal nodes have feature >= 0; leaves have feature = -1
/// and carry per-class counts (indexed like TreeEnsemble::label_order).
struct TreeNode {
    int feature = -1;
    double threshold = 0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::vector<std::uint32_t> counts;

    bool is_leaf() const noexcept { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    const TreeNode& leaf_for(std::span<const double> x) const;
    std::size_t depth() const;
    bool operator==(const DecisionTree&) const = default;
};

class TreeEnsemble {
public:
    const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
    const std::vector<PatternLabel>& label_order() const noexcept { return label_order_; }
    std::size_t n_classes() const noexcept { return label_order_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    const EnsembleParams& params() const noexcept { return params_; }

    /// Mean over trees of the leaf class-frequency distribution.
    /// Throws DimensionError on width mismatch.
    std::vector<double> predict_proba(std::span<const double> x) const;
    /// argmax of predict_proba, ties to the lowest label_order index.
    PatternLabel predict(std::span<const double> x) const;
    std::vector<PatternLabel> predict(const std::vector<FeatureRow>& X) const;

    /// Versioned line-oriented text layout; see the README.
    std::string serialize() const;
    static TreeEnsemble deserialize(std::string_view text);

    bool operator==(const TreeEnsemble&) const = default;

private:
    friend TreeEnsemble fit(const std::vector<FeatureRow>&, const std::vector<PatternLabel>&,
                            const EnsembleParams&);
    friend TreeEnsemble fit_serial(const std::vector<FeatureRow>&, const std::vector<PatternLabel>&,
                                   const EnsembleParams&);

    std::vector<DecisionTree> trees_;
    std::vector<PatternLabel> label_order_;
    std::size_t dim_ = 0;
    EnsembleParams params_;
};

/// Grows the trees in parallel. Each tree has its own seed derived from
/// p.seed, so the result does not depend on thread count or scheduling.
TreeEnsemble fit(const std::vector<FeatureRow>& X, const std::vector<PatternLabel>& y,
                 const EnsembleParams& p);

/// Single-threaded reference for fit; produces an identical ensemble.
TreeEnsemble fit_serial(const std::vector<FeatureRow>& X, const std::vector<PatternLabel>& y,
                        const EnsembleParams& p);

}  // namespace patmine
