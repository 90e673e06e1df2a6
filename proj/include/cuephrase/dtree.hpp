#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include "cuephrase/dataset.hpp"

namespace cuephrase::dtree {

using ClassCounts = std::array<int, kNumClassLabels>;

// Comparison slack shared by split selection and its test oracles: gains and
// ratios within kTieEps are ties and fall through to the structural
// tie-break order (larger gain, feature order, smaller threshold).
inline constexpr double kTieEps = 1e-12;

struct TreeConfig {
    int min_cases = 2;       // a split must leave >= 2 branches this big
    double cf = 0.25;        // pruning confidence
    bool grouping = false;   // greedy merging of symbolic values
};

enum class Side : int { Le = 0, Gt };

// Either a leaf (class plus the training support that reached it) or a test.
// Threshold tests hold two sided branches; symbolic tests hold one branch
// per value group (singletons unless grouping merged them). Branch order is
// significant and preserved by (de)serialization.
struct TreeNode {
    bool leaf = true;
    ClassLabel leaf_class = ClassLabel::Discourse;
    ClassCounts support{};

    FeatureCode feature = FeatureCode::PL;
    bool threshold_test = false;
    int threshold = 0;

    struct Branch {
        Side side = Side::Le;       // threshold branches
        std::vector<int> values;    // symbolic branches
        std::unique_ptr<TreeNode> child;
    };
    std::vector<Branch> branches;

    std::unique_ptr<TreeNode> clone() const {
        auto out = std::make_unique<TreeNode>();
        out->leaf = leaf;
        out->leaf_class = leaf_class;
        out->support = support;
        out->feature = feature;
        out->threshold_test = threshold_test;
        out->threshold = threshold;
        for (const Branch& b : branches) {
            Branch nb;
            nb.side = b.side;
            nb.values = b.values;
            nb.child = b.child->clone();
            out->branches.push_back(std::move(nb));
        }
        return out;
    }
};

inline std::size_t node_count(const TreeNode& t) {
    if (t.leaf) return 1;
    std::size_t n = 1;
    for (const auto& b : t.branches) n += node_count(*b.child);
    return n;
}

inline ClassCounts subtree_support(const TreeNode& t) {
    if (t.leaf) return t.support;
    ClassCounts total{};
    for (const auto& b : t.branches) {
        const ClassCounts c = subtree_support(*b.child);
        for (int i = 0; i < kNumClassLabels; ++i) total[i] += c[i];
    }
    return total;
}

// Misclassified training examples implied by the stored supports.
inline int training_errors(const TreeNode& t) {
    if (t.leaf) {
        int n = 0;
        for (int c : t.support) n += c;
        return n - t.support[static_cast<std::size_t>(t.leaf_class)];
    }
    int e = 0;
    for (const auto& b : t.branches) e += training_errors(*b.child);
    return e;
}

inline bool equal(const TreeNode& a, const TreeNode& b) {
    if (a.leaf != b.leaf) return false;
    if (a.leaf)
        return a.leaf_class == b.leaf_class && a.support == b.support;
    if (a.feature != b.feature || a.threshold_test != b.threshold_test)
        return false;
    if (a.threshold_test && a.threshold != b.threshold) return false;
    if (a.branches.size() != b.branches.size()) return false;
    for (std::size_t i = 0; i < a.branches.size(); ++i) {
        if (a.branches[i].side != b.branches[i].side) return false;
        if (a.branches[i].values != b.branches[i].values) return false;
        if (!equal(*a.branches[i].child, *b.branches[i].child)) return false;
    }
    return true;
}

// -- Split scoring ----------------------------------------------------------

inline double entropy(const ClassCounts& counts) {
    double n = 0;
    for (int c : counts) n += c;
    if (n <= 0) throw std::invalid_argument("entropy of all-zero counts");
    double h = 0;
    for (int c : counts) {
        if (c == 0) continue;
        const double p = c / n;
        h -= p * std::log2(p);
    }
    return h;
}

struct SplitScore {
    double gain = 0;
    double split_info = 0;
    double gain_ratio = 0;
};

// Scores a partition of the class counts. Degenerate partitions (fewer than
// two nonempty parts) are signaled with nullopt rather than scored.
inline std::optional<SplitScore> evaluate_partition(
    const ClassCounts& total, const std::vector<ClassCounts>& parts) {
    double n = 0;
    for (int c : total) n += c;
    int nonempty = 0;
    for (const ClassCounts& part : parts) {
        int pn = 0;
        for (int c : part) pn += c;
        if (pn > 0) ++nonempty;
    }
    if (nonempty < 2) return std::nullopt;

    SplitScore s;
    double remainder = 0;
    for (const ClassCounts& part : parts) {
        double pn = 0;
        for (int c : part) pn += c;
        if (pn == 0) continue;
        const double w = pn / n;
        remainder += w * entropy(part);
        s.split_info -= w * std::log2(w);
    }
    s.gain = entropy(total) - remainder;
    s.gain_ratio = s.split_info > 0 ? s.gain / s.split_info : 0.0;
    return s;
}

// A candidate test: a binary threshold on a numeric feature, or a grouped
// partition of a symbolic feature's domain (singleton groups unless value
// grouping is on).
struct SplitCandidate {
    FeatureCode feature = FeatureCode::PL;
    bool threshold_test = false;
    int threshold = 0;
    std::vector<std::vector<int>> groups;
};

namespace detail {

inline ClassCounts count_classes(const Dataset& d,
                                 const std::vector<std::size_t>& idx) {
    ClassCounts counts{};
    for (std::size_t i : idx)
        ++counts[static_cast<std::size_t>(d.examples[i].class_label())];
    return counts;
}

inline ClassLabel majority_class(const ClassCounts& counts) {
    int best = 0;
    for (int i = 1; i < kNumClassLabels; ++i)
        if (counts[i] > counts[best]) best = i;
    return static_cast<ClassLabel>(best);
}

// Index partition aligned with the candidate's branch order: (<=, >) for
// thresholds, group order for symbolic tests.
inline std::vector<std::vector<std::size_t>> partition_indices(
    const Dataset& d, const std::vector<std::size_t>& idx,
    const SplitCandidate& cand) {
    std::vector<std::vector<std::size_t>> parts;
    if (cand.threshold_test) {
        parts.resize(2);
        for (std::size_t i : idx) {
            const int v = d.examples[i].value_or_throw(cand.feature);
            parts[v <= cand.threshold ? 0 : 1].push_back(i);
        }
    } else {
        parts.resize(cand.groups.size());
        std::array<int, 40> group_of;  // largest domain is token (34)
        group_of.fill(-1);
        for (std::size_t g = 0; g < cand.groups.size(); ++g)
            for (int v : cand.groups[g]) group_of[static_cast<std::size_t>(v)] = static_cast<int>(g);
        for (std::size_t i : idx) {
            const int v = d.examples[i].value_or_throw(cand.feature);
            const int g = group_of[static_cast<std::size_t>(v)];
            if (g < 0) throw DataError("value not covered by any branch");
            parts[static_cast<std::size_t>(g)].push_back(i);
        }
    }
    return parts;
}

inline std::vector<ClassCounts> partition_counts(
    const Dataset& d, const std::vector<std::vector<std::size_t>>& parts) {
    std::vector<ClassCounts> out;
    out.reserve(parts.size());
    for (const auto& part : parts) out.push_back(count_classes(d, part));
    return out;
}

// Greedy pairwise merging of symbolic value groups while the gain ratio
// strictly improves.
inline std::vector<std::vector<int>> merge_groups(const Dataset& d,
                                                  const std::vector<std::size_t>& idx,
                                                  FeatureCode feature,
                                                  const ClassCounts& total) {
    std::vector<std::vector<int>> groups;
    for (int v = 0; v < domain_size(feature); ++v) groups.push_back({v});

    auto score_of = [&](const std::vector<std::vector<int>>& gs) -> double {
        SplitCandidate c{feature, false, 0, gs};
        const auto counts = partition_counts(d, partition_indices(d, idx, c));
        const auto s = evaluate_partition(total, counts);
        return s ? s->gain_ratio : -1.0;
    };

    double current = score_of(groups);
    while (groups.size() > 2) {
        double best = current;
        std::size_t bi = 0, bj = 0;
        bool found = false;
        for (std::size_t i = 0; i < groups.size(); ++i) {
            for (std::size_t j = i + 1; j < groups.size(); ++j) {
                std::vector<std::vector<int>> merged = groups;
                merged[i].insert(merged[i].end(), merged[j].begin(), merged[j].end());
                std::sort(merged[i].begin(), merged[i].end());
                merged.erase(merged.begin() + static_cast<std::ptrdiff_t>(j));
                const double s = score_of(merged);
                if (s > best + kTieEps) {
                    best = s;
                    bi = i;
                    bj = j;
                    found = true;
                }
            }
        }
        if (!found) break;
        groups[bi].insert(groups[bi].end(), groups[bj].begin(), groups[bj].end());
        std::sort(groups[bi].begin(), groups[bi].end());
        groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(bj));
        current = best;
    }
    return groups;
}

}  // namespace detail

// Spec-facing convenience: the gain ratio of one candidate over a whole
// dataset, nullopt when the split is degenerate.
inline std::optional<double> gain_ratio(const Dataset& d, const SplitCandidate& cand) {
    std::vector<std::size_t> idx(d.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    const ClassCounts total = detail::count_classes(d, idx);
    const auto counts =
        detail::partition_counts(d, detail::partition_indices(d, idx, cand));
    const auto s = evaluate_partition(total, counts);
    if (!s) return std::nullopt;
    return s->gain_ratio;
}

struct ScoredSplit {
    SplitCandidate candidate;
    double gain = 0;
    double gain_ratio = 0;
};

namespace detail {

// Chooses the split for one node. Every symbolic feature and every observed
// numeric threshold is a candidate; a candidate qualifies when it leaves at
// least two branches with min_cases examples and its gain reaches the mean
// gain of the positive-gain candidates. Among qualifiers the gain ratio
// decides, with ties broken by larger gain, then feature order, then
// smaller threshold.
inline std::optional<ScoredSplit> best_split_on(
    const Dataset& d, const std::vector<std::size_t>& idx,
    const std::vector<FeatureCode>& features, const TreeConfig& cfg) {
    const ClassCounts total = count_classes(d, idx);

    struct Entry {
        SplitCandidate cand;
        double gain;
        double ratio;
    };
    std::vector<Entry> entries;

    auto consider = [&](SplitCandidate cand) {
        const auto parts = partition_indices(d, idx, cand);
        int big_enough = 0;
        for (const auto& p : parts)
            if (static_cast<int>(p.size()) >= cfg.min_cases) ++big_enough;
        if (big_enough < 2) return;
        const auto score = evaluate_partition(total, partition_counts(d, parts));
        if (!score) return;
        entries.push_back({std::move(cand), score->gain, score->gain_ratio});
    };

    // Candidates are generated in canonical feature-code order so that the
    // tie-break below does not depend on the caller's feature ordering.
    std::vector<FeatureCode> ordered;
    for (FeatureCode f : kAllFeatures)
        if (std::find(features.begin(), features.end(), f) != features.end())
            ordered.push_back(f);

    for (FeatureCode f : ordered) {
        if (is_numeric_feature(f)) {
            std::vector<int> values;
            values.reserve(idx.size());
            for (std::size_t i : idx) values.push_back(d.examples[i].value_or_throw(f));
            std::sort(values.begin(), values.end());
            values.erase(std::unique(values.begin(), values.end()), values.end());
            for (std::size_t k = 0; k + 1 < values.size(); ++k)
                consider(SplitCandidate{f, true, values[k], {}});
        } else {
            SplitCandidate cand{f, false, 0, {}};
            if (cfg.grouping) {
                cand.groups = merge_groups(d, idx, f, total);
            } else {
                for (int v = 0; v < domain_size(f); ++v) cand.groups.push_back({v});
            }
            consider(std::move(cand));
        }
    }

    double positive_sum = 0;
    int positive_n = 0;
    for (const Entry& e : entries) {
        if (e.gain > kTieEps) {
            positive_sum += e.gain;
            ++positive_n;
        }
    }
    if (positive_n == 0) return std::nullopt;
    const double mean_gain = positive_sum / positive_n;

    const Entry* best = nullptr;
    for (const Entry& e : entries) {
        if (e.gain + kTieEps < mean_gain) continue;
        if (e.gain <= kTieEps) continue;
        if (!best) {
            best = &e;
            continue;
        }
        if (e.ratio > best->ratio + kTieEps) {
            best = &e;
        } else if (std::abs(e.ratio - best->ratio) <= kTieEps) {
            if (e.gain > best->gain + kTieEps) best = &e;
            // equal gain and ratio: keep the earlier candidate (feature
            // order, then smaller threshold) from the generation order
        }
    }
    if (!best) return std::nullopt;
    return ScoredSplit{best->cand, best->gain, best->ratio};
}

}  // namespace detail

inline std::optional<ScoredSplit> best_split(const Dataset& d,
                                             const std::vector<FeatureCode>& features,
                                             const TreeConfig& cfg = {}) {
    if (d.empty()) throw std::invalid_argument("best_split on empty dataset");
    std::vector<std::size_t> idx(d.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return detail::best_split_on(d, idx, features, cfg);
}

namespace detail {

inline std::unique_ptr<TreeNode> make_leaf(ClassLabel cls, const ClassCounts& support) {
    auto n = std::make_unique<TreeNode>();
    n->leaf = true;
    n->leaf_class = cls;
    n->support = support;
    return n;
}

inline std::unique_ptr<TreeNode> grow(const Dataset& d,
                                      const std::vector<std::size_t>& idx,
                                      const std::vector<FeatureCode>& features,
                                      const TreeConfig& cfg) {
    const ClassCounts counts = count_classes(d, idx);
    const ClassLabel majority = majority_class(counts);

    int total = 0, nonzero_classes = 0;
    for (int c : counts) {
        total += c;
        if (c > 0) ++nonzero_classes;
    }
    if (nonzero_classes <= 1 || total < 2 * cfg.min_cases)
        return make_leaf(majority, counts);

    const auto split = best_split_on(d, idx, features, cfg);
    if (!split) return make_leaf(majority, counts);

    auto node = std::make_unique<TreeNode>();
    node->leaf = false;
    node->feature = split->candidate.feature;
    node->threshold_test = split->candidate.threshold_test;
    node->threshold = split->candidate.threshold;

    const auto parts = partition_indices(d, idx, split->candidate);
    for (std::size_t b = 0; b < parts.size(); ++b) {
        TreeNode::Branch branch;
        if (split->candidate.threshold_test) {
            branch.side = b == 0 ? Side::Le : Side::Gt;
        } else {
            branch.values = split->candidate.groups[b];
        }
        if (parts[b].empty()) {
            // an outcome never seen in training inherits the node majority
            branch.child = make_leaf(majority, ClassCounts{});
        } else {
            branch.child = grow(d, parts[b], features, cfg);
        }
        node->branches.push_back(std::move(branch));
    }
    return node;
}

}  // namespace detail

// Grows an unpruned tree: recursion stops at purity, at subsets smaller than
// 2*min_cases, or when no candidate split qualifies.
inline void validate_config(const TreeConfig& cfg) {
    if (cfg.min_cases < 1) throw std::invalid_argument("min_cases must be >= 1");
    if (!(cfg.cf > 0.0 && cfg.cf <= 1.0))
        throw std::invalid_argument("cf must lie in (0, 1]");
}

inline std::unique_ptr<TreeNode> grow_tree(const Dataset& d,
                                           const std::vector<FeatureCode>& features,
                                           const TreeConfig& cfg = {}) {
    if (d.empty()) throw std::invalid_argument("grow_tree on empty dataset");
    validate_config(cfg);
    for (FeatureCode f : features)
        if (!d.active_features.contains(f))
            throw DataError("feature " + std::string(feature_name(f)) +
                            " is not present in dataset");
    std::vector<std::size_t> idx(d.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return detail::grow(d, idx, features, cfg);
}

inline std::unique_ptr<TreeNode> grow_tree(const Dataset& d, const TreeConfig& cfg = {}) {
    return grow_tree(d, d.active_features.features(), cfg);
}

// Upper confidence limit of the binomial error probability: the p with
// P(X <= errors | n, p) = cf, found by bisection. This is the pessimistic
// error estimate used by error-based pruning.
inline double pessimistic_upper_bound(int errors, int n, double cf) {
    if (n <= 0) return 0.0;
    if (cf >= 1.0) return 1.0;
    if (errors >= n) return 1.0;

    auto lchoose = [](int nn, int kk) {
        return std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0);
    };
    auto cdf = [&](double p) {
        double sum = 0;
        const double lp = std::log(p), lq = std::log1p(-p);
        for (int i = 0; i <= errors; ++i)
            sum += std::exp(lchoose(n, i) + i * lp + (n - i) * lq);
        return sum;
    };

    double lo = 1e-12, hi = 1.0 - 1e-12;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) > cf)
            lo = mid;  // cdf decreases in p; still above cf, push right
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace detail {

inline double pessimistic_errors(const TreeNode& t, double cf) {
    if (t.leaf) {
        int n = 0;
        for (int c : t.support) n += c;
        if (n == 0) return 0.0;
        const int e = n - t.support[static_cast<std::size_t>(t.leaf_class)];
        return n * pessimistic_upper_bound(e, n, cf);
    }
    double sum = 0;
    for (const auto& b : t.branches) sum += pessimistic_errors(*b.child, cf);
    return sum;
}

inline void prune_in_place(TreeNode& t, double cf) {
    if (t.leaf) return;
    for (auto& b : t.branches) prune_in_place(*b.child, cf);

    const ClassCounts counts = subtree_support(t);
    int n = 0;
    for (int c : counts) n += c;
    if (n == 0) return;
    const ClassLabel majority = majority_class(counts);
    const int errors_as_leaf = n - counts[static_cast<std::size_t>(majority)];

    const double leaf_est = n * pessimistic_upper_bound(errors_as_leaf, n, cf);
    const double subtree_est = pessimistic_errors(t, cf);
    if (leaf_est <= subtree_est + 1e-9) {
        t.leaf = true;
        t.leaf_class = majority;
        t.support = counts;
        t.branches.clear();
    }
}

}  // namespace detail

// Bottom-up subtree replacement on a copy of the tree.
inline std::unique_ptr<TreeNode> prune_tree(const TreeNode& t, const TreeConfig& cfg = {}) {
    validate_config(cfg);
    auto out = t.clone();
    detail::prune_in_place(*out, cfg.cf);
    return out;
}

inline ClassLabel predict(const TreeNode& t, const Example& e) {
    const TreeNode* node = &t;
    while (!node->leaf) {
        const int v = e.value_or_throw(node->feature);
        const TreeNode* next = nullptr;
        for (const auto& b : node->branches) {
            if (node->threshold_test) {
                if ((b.side == Side::Le && v <= node->threshold) ||
                    (b.side == Side::Gt && v > node->threshold)) {
                    next = b.child.get();
                    break;
                }
            } else if (std::find(b.values.begin(), b.values.end(), v) != b.values.end()) {
                next = b.child.get();
                break;
            }
        }
        if (!next)
            throw DataError("value " + value_token(node->feature, v) +
                            " not covered by any branch of feature " +
                            std::string(feature_name(node->feature)));
        node = next;
    }
    return node->leaf_class;
}

}  // namespace cuephrase::dtree
