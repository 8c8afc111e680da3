#include "patmine/classifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "patmine/errors.hpp"
#include "patmine/random.hpp"

namespace patmine {

void EnsembleParams::validate() const {
    if (n_trees < 1) throw ConfigError("n_trees must be >= 1");
    if (min_samples_split < 2) throw ConfigError("min_samples_split must be >= 2");
    if (max_features < kAll) throw ConfigError("max_features must be sqrt, all or a positive count");
    if (max_depth && *max_depth < 1) throw ConfigError("max_depth must be >= 1");
}

std::size_t EnsembleParams::features_per_node(std::size_t dim) const {
    if (max_features == kAll) return dim;
    if (max_features == kSqrt) {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(dim)))));
    }
    return std::min(dim, static_cast<std::size_t>(max_features));
}

std::string_view to_string(EnsembleMode mode) noexcept {
    return mode == EnsembleMode::Extra ? "extra" : "random_forest";
}

EnsembleMode ensemble_mode_from_string(std::string_view s) {
    if (s == "extra") return EnsembleMode::Extra;
    if (s == "random_forest") return EnsembleMode::RandomForest;
    throw ConfigError("unknown ensemble mode '" + std::string(s) + "'");
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const {
    const TreeNode* node = &nodes.front();
    while (!node->is_leaf()) {
        node = &nodes[x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left : node->right];
    }
    return *node;
}

std::size_t DecisionTree::depth() const {
    std::vector<std::size_t> d(nodes.size(), 0);
    std::size_t best = 0;
    // children always come after their parent
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        best = std::max(best, d[i]);
        if (!nodes[i].is_leaf()) {
            d[nodes[i].left] = d[i] + 1;
            d[nodes[i].right] = d[i] + 1;
        }
    }
    return best;
}

namespace {

double gini(const std::vector<std::uint32_t>& counts, std::size_t n) {
    if (n == 0) return 0;
    double sum_sq = 0;
    for (auto c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(n);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

class TreeBuilder {
public:
    TreeBuilder(const std::vector<FeatureRow>& X, const std::vector<std::uint32_t>& y, std::size_t n_classes,
                const EnsembleParams& p, std::uint64_t seed)
        : X_(X), y_(y), n_classes_(n_classes), p_(p), rng_(seed), dim_(X.front().size()),
          per_node_(p.features_per_node(dim_)) {}

    DecisionTree build() {
        std::vector<std::uint32_t> sample;
        if (p_.mode == EnsembleMode::RandomForest) {
            sample.resize(X_.size());
            for (auto& s : sample) s = static_cast<std::uint32_t>(rng_.index(X_.size()));
        } else {
            sample.resize(X_.size());
            std::iota(sample.begin(), sample.end(), 0u);
        }
        tree_.nodes.clear();
        grow(sample, 0);
        return std::move(tree_);
    }

private:
    struct Split {
        int feature = -1;
        double threshold = 0;
        double score = -std::numeric_limits<double>::infinity();
    };

    std::vector<std::uint32_t> class_counts(const std::vector<std::uint32_t>& sample) const {
        std::vector<std::uint32_t> counts(n_classes_, 0);
        for (auto i : sample) ++counts[y_[i]];
        return counts;
    }

    std::uint32_t grow(std::vector<std::uint32_t>& sample, int depth) {
        const auto id = static_cast<std::uint32_t>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        auto counts = class_counts(sample);
        const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
        const bool too_small = sample.size() < static_cast<std::size_t>(p_.min_samples_split);
        const bool too_deep = p_.max_depth && depth >= *p_.max_depth;
        Split split;
        if (!pure && !too_small && !too_deep) split = choose_split(sample, counts);
        if (split.feature < 0) {
            tree_.nodes[id].counts = std::move(counts);
            return id;
        }
        std::vector<std::uint32_t> left, right;
        for (auto i : sample) {
            (X_[i][static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right).push_back(i);
        }
        sample.clear();
        sample.shrink_to_fit();
        const auto l = grow(left, depth + 1);
        const auto r = grow(right, depth + 1);
        auto& node = tree_.nodes[id];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    // Visits features in a random order, skipping ones constant at this
    // node, until per_node_ non-constant candidates have been scored.
    Split choose_split(const std::vector<std::uint32_t>& sample, const std::vector<std::uint32_t>& counts) {
        std::vector<std::size_t> order(dim_);
        std::iota(order.begin(), order.end(), 0);
        const double parent = gini(counts, sample.size());
        Split best;
        std::size_t scored = 0;
        for (std::size_t k = 0; k < dim_ && scored < per_node_; ++k) {
            std::swap(order[k], order[k + rng_.index(dim_ - k)]);
            const std::size_t f = order[k];
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (auto i : sample) {
                lo = std::min(lo, X_[i][f]);
                hi = std::max(hi, X_[i][f]);
            }
            if (!(hi > lo)) continue;
            ++scored;
            Split candidate = p_.mode == EnsembleMode::Extra ? random_split(sample, f, lo, hi, parent)
                                                             : exhaustive_split(sample, f, parent);
            if (candidate.score > best.score) best = candidate;
        }
        return best;
    }

    Split random_split(const std::vector<std::uint32_t>& sample, std::size_t f, double lo, double hi,
                       double parent) {
        double t = lo + rng_.uniform() * (hi - lo);
        if (t >= hi) t = lo;  // rounding guard: keep the right side non-empty
        std::vector<std::uint32_t> left(n_classes_, 0), right(n_classes_, 0);
        std::size_t nl = 0;
        for (auto i : sample) {
            if (X_[i][f] <= t) {
                ++left[y_[i]];
                ++nl;
            } else {
                ++right[y_[i]];
            }
        }
        const std::size_t n = sample.size();
        const std::size_t nr = n - nl;
        const double child = (static_cast<double>(nl) * gini(left, nl) + static_cast<double>(nr) * gini(right, nr)) /
                             static_cast<double>(n);
        return {static_cast<int>(f), t, parent - child};
    }

    Split exhaustive_split(const std::vector<std::uint32_t>& sample, std::size_t f, double parent) {
        std::vector<std::pair<double, std::uint32_t>> values;
        values.reserve(sample.size());
        for (auto i : sample) values.emplace_back(X_[i][f], y_[i]);
        std::sort(values.begin(), values.end());
        std::vector<std::uint32_t> left(n_classes_, 0), right(n_classes_, 0);
        for (const auto& v : values) ++right[v.second];
        const std::size_t n = values.size();
        Split best;
        best.feature = static_cast<int>(f);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            ++left[values[k].second];
            --right[values[k].second];
            if (values[k].first == values[k + 1].first) continue;
            const std::size_t nl = k + 1;
            const std::size_t nr = n - nl;
            const double child =
                (static_cast<double>(nl) * gini(left, nl) + static_cast<double>(nr) * gini(right, nr)) /
                static_cast<double>(n);
            const double score = parent - child;
            if (score > best.score) {
                best.score = score;
                double mid = values[k].first + (values[k + 1].first - values[k].first) / 2;
                if (!(mid < values[k + 1].first)) mid = values[k].first;
                best.threshold = mid;
            }
        }
        return best;
    }

    const std::vector<FeatureRow>& X_;
    const std::vector<std::uint32_t>& y_;
    std::size_t n_classes_;
    const EnsembleParams& p_;
    Rng rng_;
    std::size_t dim_;
    std::size_t per_node_;
    DecisionTree tree_;
};

struct Prepared {
    std::vector<PatternLabel> label_order;
    std::vector<std::uint32_t> y;
};

Prepared prepare(const std::vector<FeatureRow>& X, const std::vector<PatternLabel>& y, const EnsembleParams& p) {
    p.validate();
    if (X.empty()) throw EmptyTrainingError("fit: no training instances");
    if (X.size() != y.size()) throw DimensionError("fit: X and y differ in length");
    const std::size_t dim = X.front().size();
    if (dim == 0) throw DimensionError("fit: zero-width feature vectors");
    for (const auto& row : X) {
        if (row.size() != dim) throw DimensionError("fit: feature vectors differ in width");
    }
    Prepared out;
    std::array<bool, kPatternLabelCount> present{};
    for (auto label : y) present[static_cast<std::size_t>(label_index(label))] = true;
    std::array<std::uint32_t, kPatternLabelCount> slot{};
    for (auto label : kAllPatternLabels) {
        const auto i = static_cast<std::size_t>(label_index(label));
        if (present[i]) {
            slot[i] = static_cast<std::uint32_t>(out.label_order.size());
            out.label_order.push_back(label);
        }
    }
    out.y.reserve(y.size());
    for (auto label : y) out.y.push_back(slot[static_cast<std::size_t>(label_index(label))]);
    return out;
}

}  // namespace

TreeEnsemble fit(const std::vector<FeatureRow>& X, const std::vector<PatternLabel>& y, const EnsembleParams& p) {
    const auto prep = prepare(X, y, p);
    TreeEnsemble e;
    e.label_order_ = prep.label_order;
    e.dim_ = X.front().size();
    e.params_ = p;
    e.trees_.resize(static_cast<std::size_t>(p.n_trees));
#pragma omp parallel for schedule(dynamic, 1)
    for (int t = 0; t < p.n_trees; ++t) {
        TreeBuilder builder(X, prep.y, prep.label_order.size(), p, derive_seed(p.seed, static_cast<std::uint64_t>(t)));
        e.trees_[static_cast<std::size_t>(t)] = builder.build();
    }
    return e;
}

TreeEnsemble fit_serial(const std::vector<FeatureRow>& X, const std::vector<PatternLabel>& y,
                        const EnsembleParams& p) {
    const auto prep = prepare(X, y, p);
    TreeEnsemble e;
    e.label_order_ = prep.label_order;
    e.dim_ = X.front().size();
    e.params_ = p;
    for (int t = 0; t < p.n_trees; ++t) {
        TreeBuilder builder(X, prep.y, prep.label_order.size(), p, derive_seed(p.seed, static_cast<std::uint64_t>(t)));
        e.trees_.push_back(builder.build());
    }
    return e;
}

std::vector<double> TreeEnsemble::predict_proba(std::span<const double> x) const {
    if (x.size() != dim_) {
        throw DimensionError(fmt::format("predict: expected {} features, got {}", dim_, x.size()));
    }
    std::vector<double> proba(label_order_.size(), 0.0);
    for (const auto& tree : trees_) {
        const auto& leaf = tree.leaf_for(x);
        const double total = std::accumulate(leaf.counts.begin(), leaf.counts.end(), 0.0);
        for (std::size_t c = 0; c < proba.size(); ++c) proba[c] += leaf.counts[c] / total;
    }
    const double n = static_cast<double>(trees_.size());
    for (auto& v : proba) v /= n;
    return proba;
}

PatternLabel TreeEnsemble::predict(std::span<const double> x) const {
    const auto proba = predict_proba(x);
    // max_element returns the first maximum, which is the tie-break we want
    const auto best = std::max_element(proba.begin(), proba.end()) - proba.begin();
    return label_order_[static_cast<std::size_t>(best)];
}

std::vector<PatternLabel> TreeEnsemble::predict(const std::vector<FeatureRow>& X) const {
    std::vector<PatternLabel> out(X.size(), PatternLabel::None);
    const auto n = static_cast<std::ptrdiff_t>(X.size());
    bool bad_width = false;
    for (const auto& row : X) bad_width = bad_width || row.size() != dim_;
    if (bad_width) throw DimensionError(fmt::format("predict: expected {} features per row", dim_));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = predict(X[static_cast<std::size_t>(i)]);
    return out;
}

// Layout:
//   PATMINE-ENSEMBLE 1
//   mode <extra|random_forest>
//   n_trees <int>  max_features <int>  min_samples_split <int>  max_depth <int|none>  seed <u64>
//   dim <int>
//   labels <name>...
//   tree <node count>
//   N <feature> <threshold> <left> <right>     (internal)
//   L <count>...                              (leaf)
std::string TreeEnsemble::serialize() const {
    std::string out = "PATMINE-ENSEMBLE 1\n";
    out += fmt::format("mode {}\n", to_string(params_.mode));
    out += fmt::format("n_trees {}\nmax_features {}\nmin_samples_split {}\n", params_.n_trees,
                       params_.max_features, params_.min_samples_split);
    out += params_.max_depth ? fmt::format("max_depth {}\n", *params_.max_depth) : std::string("max_depth none\n");
    out += fmt::format("seed {}\ndim {}\nlabels", params_.seed, dim_);
    for (auto label : label_order_) out += fmt::format(" {}", to_string(label));
    out += '\n';
    for (const auto& tree : trees_) {
        out += fmt::format("tree {}\n", tree.nodes.size());
        for (const auto& node : tree.nodes) {
            if (node.is_leaf()) {
                out += 'L';
                for (auto c : node.counts) out += fmt::format(" {}", c);
                out += '\n';
            } else {
                out += fmt::format("N {} {:.17g} {} {}\n", node.feature, node.threshold, node.left, node.right);
            }
        }
    }
    return out;
}

TreeEnsemble TreeEnsemble::deserialize(std::string_view text) {
    std::istringstream in{std::string(text)};
    auto fail = [](const std::string& what) { return BundleFormatError("ensemble: " + what); };
    std::string line;
    if (!std::getline(in, line) || line != "PATMINE-ENSEMBLE 1") throw fail("missing or unsupported header");

    auto field = [&](const char* key) {
        if (!std::getline(in, line)) throw fail(std::string("missing '") + key + "'");
        std::istringstream ls(line);
        std::string k, v;
        if (!(ls >> k >> v) || k != key) throw fail(std::string("expected '") + key + "', got '" + line + "'");
        return v;
    };
    auto to_int = [&](const std::string& v) {
        try {
            std::size_t used = 0;
            const long long n = std::stoll(v, &used);
            if (used != v.size()) throw fail("bad integer '" + v + "'");
            return n;
        } catch (const std::logic_error&) {
            throw fail("bad integer '" + v + "'");
        }
    };

    TreeEnsemble e;
    try {
        e.params_.mode = ensemble_mode_from_string(field("mode"));
    } catch (const ConfigError& err) {
        throw fail(err.what());
    }
    e.params_.n_trees = static_cast<int>(to_int(field("n_trees")));
    e.params_.max_features = static_cast<int>(to_int(field("max_features")));
    e.params_.min_samples_split = static_cast<int>(to_int(field("min_samples_split")));
    if (auto depth = field("max_depth"); depth != "none") e.params_.max_depth = static_cast<int>(to_int(depth));
    try {
        e.params_.seed = std::stoull(field("seed"));
    } catch (const std::logic_error&) {
        throw fail("bad seed");
    }
    const auto dim = to_int(field("dim"));
    if (dim < 1) throw fail("dim must be positive");
    e.dim_ = static_cast<std::size_t>(dim);

    if (!std::getline(in, line)) throw fail("missing labels");
    {
        std::istringstream ls(line);
        std::string key, name;
        ls >> key;
        if (key != "labels") throw fail("expected 'labels'");
        while (ls >> name) {
            const auto label = parse_label(name);
            if (!label) throw fail("unknown label '" + name + "'");
            e.label_order_.push_back(*label);
        }
        if (e.label_order_.empty()) throw fail("empty label list");
    }

    const std::size_t n_classes = e.label_order_.size();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        long long count = 0;
        if (!(ls >> key >> count) || key != "tree" || count < 1) throw fail("bad tree header '" + line + "'");
        DecisionTree tree;
        for (long long k = 0; k < count; ++k) {
            if (!std::getline(in, line)) throw fail("truncated tree");
            std::istringstream ns(line);
            std::string kind;
            ns >> kind;
            TreeNode node;
            if (kind == "L") {
                std::uint64_t c = 0;
                std::uint64_t total = 0;
                while (ns >> c) {
                    node.counts.push_back(static_cast<std::uint32_t>(c));
                    total += c;
                }
                if (node.counts.size() != n_classes || total == 0) throw fail("bad leaf '" + line + "'");
            } else if (kind == "N") {
                std::string threshold;
                if (!(ns >> node.feature >> threshold >> node.left >> node.right)) throw fail("bad node '" + line + "'");
                try {
                    node.threshold = std::stod(threshold);
                } catch (const std::logic_error&) {
                    throw fail("bad threshold '" + threshold + "'");
                }
                const auto n = static_cast<std::uint32_t>(count);
                if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= e.dim_ || node.left >= n ||
                    node.right >= n || node.left <= k || node.right <= k) {
                    throw fail("node out of range '" + line + "'");
                }
            } else {
                throw fail("bad node '" + line + "'");
            }
            tree.nodes.push_back(std::move(node));
        }
        e.trees_.push_back(std::move(tree));
    }
    if (e.trees_.size() != static_cast<std::size_t>(e.params_.n_trees)) throw fail("tree count mismatch");
    return e;
}

}  // namespace patmine
