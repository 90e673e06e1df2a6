#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "cuephrase/dataset.hpp"
#include "cuephrase/rng.hpp"

namespace cuephrase::rules {

inline constexpr double kTieEps = 1e-12;

enum class TestOp : int { Eq = 0, Neq, Le, Ge };

// One conjunct: = or != on a symbolic feature, <= or >= on a numeric one.
struct Test {
    FeatureCode feature = FeatureCode::PL;
    TestOp op = TestOp::Eq;
    int value = 0;

    bool matches(const Example& e) const {
        const int v = e.value_or_throw(feature);
        switch (op) {
            case TestOp::Eq: return v == value;
            case TestOp::Neq: return v != value;
            case TestOp::Le: return v <= value;
            default: return v >= value;
        }
    }

    bool operator==(const Test& other) const {
        return feature == other.feature && op == other.op && value == other.value;
    }
};

struct Rule {
    std::vector<Test> tests;  // conjunction; empty antecedent always fires
    ClassLabel cls = ClassLabel::Discourse;
    double accuracy = 0.0;    // Laplace-corrected training accuracy
    int coverage = 0;         // training examples matched

    bool matches(const Example& e) const {
        for (const Test& t : tests)
            if (!t.matches(e)) return false;
        return true;
    }
};

struct RuleSet {
    std::vector<Rule> rules;
    ClassLabel default_class = ClassLabel::Discourse;
    int num_classes = 2;
};

enum class ConflictStrategy { MostAccurate, FirstMatch };

// Applies the matching rule that is most accurate on the training data
// (ties to the earlier rule), or the first matching rule under FirstMatch.
// The default class covers everything else, so prediction is total.
inline ClassLabel predict(const RuleSet& rs, const Example& e,
                          ConflictStrategy strategy = ConflictStrategy::MostAccurate) {
    const Rule* chosen = nullptr;
    for (const Rule& r : rs.rules) {
        if (!r.matches(e)) continue;
        if (strategy == ConflictStrategy::FirstMatch) return r.cls;
        if (!chosen || r.accuracy > chosen->accuracy + kTieEps) chosen = &r;
    }
    return chosen ? chosen->cls : rs.default_class;
}

namespace detail {

struct Counts {
    int pos = 0;
    int neg = 0;
};

inline Counts covered_counts(const Dataset& d, const std::vector<std::size_t>& idx,
                             const std::vector<Test>& tests, ClassLabel cls) {
    Counts c;
    for (std::size_t i : idx) {
        const Example& e = d.examples[i];
        bool ok = true;
        for (const Test& t : tests)
            if (!t.matches(e)) {
                ok = false;
                break;
            }
        if (!ok) continue;
        (e.class_label() == cls ? c.pos : c.neg) += 1;
    }
    return c;
}

inline double laplace_accuracy(int correct, int covered, int num_classes) {
    return (correct + 1.0) / (covered + num_classes);
}

inline double laplace_on(const Dataset& d, const std::vector<std::size_t>& idx,
                         const std::vector<Test>& tests, ClassLabel cls,
                         int num_classes) {
    const Counts c = covered_counts(d, idx, tests, cls);
    return laplace_accuracy(c.pos, c.pos + c.neg, num_classes);
}

// First-order information gain of adding one test:
//   p * (log2(p / (p + n)) - log2(P / (P + N)))
// over the currently covered positives/negatives.
inline double foil_gain(int p, int n, int P, int N) {
    if (p == 0) return 0.0;
    const double after = std::log2(static_cast<double>(p) / (p + n));
    const double before = std::log2(static_cast<double>(P) / (P + N));
    return p * (after - before);
}

// Greedily conjoins the candidate test with the best gain until no negative
// is covered or no test improves. Candidates are every =/!= over a symbolic
// domain and every <=/>= over the numeric values observed in the still
// covered examples, enumerated in canonical order for deterministic ties.
inline std::vector<Test> grow_tests(const Dataset& d,
                                    std::vector<std::size_t> pos,
                                    std::vector<std::size_t> neg,
                                    const std::vector<FeatureCode>& features) {
    std::vector<FeatureCode> ordered;
    for (FeatureCode f : kAllFeatures)
        if (std::find(features.begin(), features.end(), f) != features.end())
            ordered.push_back(f);

    std::vector<Test> tests;
    while (!neg.empty()) {
        const int P = static_cast<int>(pos.size());
        const int N = static_cast<int>(neg.size());

        Test best{};
        double best_gain = 0.0;
        bool found = false;

        auto consider = [&](const Test& t) {
            int p = 0, n = 0;
            for (std::size_t i : pos)
                if (t.matches(d.examples[i])) ++p;
            if (p == 0) return;
            for (std::size_t i : neg)
                if (t.matches(d.examples[i])) ++n;
            const double gain = foil_gain(p, n, P, N);
            if (gain > best_gain + kTieEps) {
                best_gain = gain;
                best = t;
                found = true;
            }
        };

        for (FeatureCode f : ordered) {
            if (is_numeric_feature(f)) {
                std::vector<int> values;
                values.reserve(pos.size() + neg.size());
                for (std::size_t i : pos) values.push_back(d.examples[i].value_or_throw(f));
                for (std::size_t i : neg) values.push_back(d.examples[i].value_or_throw(f));
                std::sort(values.begin(), values.end());
                values.erase(std::unique(values.begin(), values.end()), values.end());
                for (int v : values) consider(Test{f, TestOp::Le, v});
                for (int v : values) consider(Test{f, TestOp::Ge, v});
            } else {
                for (int v = 0; v < domain_size(f); ++v) consider(Test{f, TestOp::Eq, v});
                for (int v = 0; v < domain_size(f); ++v) consider(Test{f, TestOp::Neq, v});
            }
        }

        if (!found) break;
        tests.push_back(best);
        std::vector<std::size_t> new_pos, new_neg;
        for (std::size_t i : pos)
            if (best.matches(d.examples[i])) new_pos.push_back(i);
        for (std::size_t i : neg)
            if (best.matches(d.examples[i])) new_neg.push_back(i);
        pos = std::move(new_pos);
        neg = std::move(new_neg);
    }
    return tests;
}

}  // namespace detail

// Grows a rule for the class of `pos` against `neg`. Both datasets must
// expose the same features; the grown rule covers at least one positive.
inline Rule grow_rule(const Dataset& pos, const Dataset& neg,
                      const std::vector<FeatureCode>& features,
                      ClassLabel cls = ClassLabel::Discourse) {
    if (pos.empty()) throw std::invalid_argument("grow_rule with no positives");
    Dataset merged;
    merged.active_features = pos.active_features;
    merged.examples = pos.examples;
    merged.examples.insert(merged.examples.end(), neg.examples.begin(),
                           neg.examples.end());
    std::vector<std::size_t> pos_idx(pos.size()), neg_idx(neg.size());
    for (std::size_t i = 0; i < pos_idx.size(); ++i) pos_idx[i] = i;
    for (std::size_t i = 0; i < neg_idx.size(); ++i) neg_idx[i] = pos.size() + i;

    Rule r;
    r.cls = cls;
    r.tests = detail::grow_tests(merged, pos_idx, neg_idx, features);
    return r;
}

// Deletes trailing tests while the Laplace accuracy on the prune set does
// not decrease. An empty prune set leaves the rule unchanged.
inline Rule prune_rule(const Rule& r, const Dataset& prune_set, int num_classes = 2) {
    if (prune_set.empty()) return r;
    std::vector<std::size_t> idx(prune_set.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;

    Rule out = r;
    while (!out.tests.empty()) {
        const double with_last =
            detail::laplace_on(prune_set, idx, out.tests, out.cls, num_classes);
        std::vector<Test> shorter(out.tests.begin(), out.tests.end() - 1);
        const double without_last =
            detail::laplace_on(prune_set, idx, shorter, out.cls, num_classes);
        if (without_last + kTieEps < with_last) break;
        out.tests = std::move(shorter);
    }
    return out;
}

namespace detail {

// 2:1 grow/prune split of the remaining data, stratified so the grow part
// always keeps at least one positive.
inline void split_grow_prune(const Dataset& d, const std::vector<std::size_t>& remaining,
                             ClassLabel cls, Rng& rng,
                             std::vector<std::size_t>& grow_pos,
                             std::vector<std::size_t>& grow_neg,
                             std::vector<std::size_t>& prune) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i : remaining)
        (d.examples[i].class_label() == cls ? pos : neg).push_back(i);
    rng.shuffle(pos);
    rng.shuffle(neg);

    const std::size_t pos_grow = std::max<std::size_t>(1, pos.size() * 2 / 3);
    const std::size_t neg_grow = neg.size() * 2 / 3;

    grow_pos.assign(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(pos_grow));
    grow_neg.assign(neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(neg_grow));
    prune.clear();
    prune.insert(prune.end(), pos.begin() + static_cast<std::ptrdiff_t>(pos_grow), pos.end());
    prune.insert(prune.end(), neg.begin() + static_cast<std::ptrdiff_t>(neg_grow), neg.end());
}

struct OrientedResult {
    RuleSet rs;
    int training_errors = 0;
    int total_tests = 0;
};

inline OrientedResult learn_oriented(const Dataset& d,
                                     const std::vector<FeatureCode>& features,
                                     std::uint64_t seed, int num_classes,
                                     ClassLabel default_class,
                                     const std::vector<ClassLabel>& targets) {
    Rng rng(seed);
    RuleSet rs;
    rs.default_class = default_class;
    rs.num_classes = num_classes;

    std::vector<std::size_t> remaining(d.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;

    for (ClassLabel cls : targets) {
        while (true) {
            std::size_t positives = 0;
            for (std::size_t i : remaining)
                if (d.examples[i].class_label() == cls) ++positives;
            if (positives == 0) break;

            std::vector<std::size_t> grow_pos, grow_neg, prune_idx;
            split_grow_prune(d, remaining, cls, rng, grow_pos, grow_neg, prune_idx);

            Rule r;
            r.cls = cls;
            r.tests = grow_tests(d, grow_pos, grow_neg, features);

            Dataset prune_set;
            prune_set.active_features = d.active_features;
            for (std::size_t i : prune_idx) prune_set.examples.push_back(d.examples[i]);
            r = prune_rule(r, prune_set, num_classes);

            // Stop when the candidate misclassifies most of the prune
            // examples it covers.
            const Counts pc = covered_counts(d, prune_idx, r.tests, cls);
            const int covered = pc.pos + pc.neg;
            if (covered > 0 && pc.neg > covered * 0.5) break;

            rs.rules.push_back(r);
            std::vector<std::size_t> kept;
            for (std::size_t i : remaining)
                if (!r.matches(d.examples[i])) kept.push_back(i);
            remaining = std::move(kept);
        }
    }

    // Rule statistics are measured on the full training set; they drive
    // conflict resolution at prediction time.
    std::vector<std::size_t> all(d.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    for (Rule& r : rs.rules) {
        const Counts c = covered_counts(d, all, r.tests, r.cls);
        r.coverage = c.pos + c.neg;
        r.accuracy = laplace_accuracy(c.pos, c.pos + c.neg, num_classes);
    }

    OrientedResult out;
    out.rs = std::move(rs);
    for (const Example& e : d.examples)
        if (predict(out.rs, e) != e.class_label()) ++out.training_errors;
    for (const Rule& r : out.rs.rules)
        out.total_tests += static_cast<int>(r.tests.size());
    return out;
}

// Class counts; frequency ties resolve toward sentential, then discourse,
// mirroring the default-class baseline.
inline ClassLabel most_frequent_class(const std::array<int, kNumClassLabels>& counts) {
    ClassLabel best = ClassLabel::Sentential;
    int best_count = counts[static_cast<std::size_t>(ClassLabel::Sentential)];
    for (ClassLabel c : {ClassLabel::Discourse, ClassLabel::Unknown}) {
        if (counts[static_cast<std::size_t>(c)] > best_count) {
            best = c;
            best_count = counts[static_cast<std::size_t>(c)];
        }
    }
    return best;
}

}  // namespace detail

// Separate-and-conquer induction of an ordered ruleset. Classes are handled
// in ascending training frequency, the most frequent becoming the default.
// For two-class data both default orientations are induced; the one with
// the lower whole-training-set error wins (ties: fewer rules, fewer total
// tests, then the orientation whose default is the rarer class, which is
// what the published rulesets show).
inline RuleSet learn_ruleset(const Dataset& d, const std::vector<FeatureCode>& features,
                             std::uint64_t seed, int num_classes = 2) {
    if (d.empty()) throw std::invalid_argument("learn_ruleset on empty dataset");
    if (num_classes != 2 && num_classes != 3)
        throw std::invalid_argument("num_classes must be 2 or 3");

    std::array<int, kNumClassLabels> counts{};
    for (const Example& e : d.examples)
        ++counts[static_cast<std::size_t>(e.class_label())];
    if (num_classes == 2 && counts[static_cast<std::size_t>(ClassLabel::Unknown)] > 0)
        throw std::invalid_argument(
            "two-class learning requires a classifiable dataset");

    std::vector<ClassLabel> present;
    for (int c = 0; c < kNumClassLabels; ++c)
        if (counts[static_cast<std::size_t>(c)] > 0)
            present.push_back(static_cast<ClassLabel>(c));

    if (present.size() == 1) {
        RuleSet rs;
        rs.default_class = present.front();
        rs.num_classes = num_classes;
        return rs;
    }

    if (num_classes == 2) {
        const ClassLabel major = detail::most_frequent_class(counts);
        const ClassLabel minor = major == ClassLabel::Discourse
                                     ? ClassLabel::Sentential
                                     : ClassLabel::Discourse;
        const auto a = detail::learn_oriented(d, features, seed, 2, major, {minor});
        const auto b = detail::learn_oriented(d, features, seed, 2, minor, {major});

        auto better = [&](const detail::OrientedResult& x,
                          const detail::OrientedResult& y) {
            if (x.training_errors != y.training_errors)
                return x.training_errors < y.training_errors;
            if (x.rs.rules.size() != y.rs.rules.size())
                return x.rs.rules.size() < y.rs.rules.size();
            if (x.total_tests != y.total_tests) return x.total_tests < y.total_tests;
            // Exhausted ties go to the orientation defaulting on the rarer
            // class.
            return x.rs.default_class == minor;
        };
        return better(a, b) ? a.rs : b.rs;
    }

    // Three classes: rules for all but the most frequent, rarest first.
    const ClassLabel default_class = detail::most_frequent_class(counts);
    std::vector<ClassLabel> targets;
    for (ClassLabel c : present)
        if (c != default_class) targets.push_back(c);
    std::stable_sort(targets.begin(), targets.end(), [&](ClassLabel x, ClassLabel y) {
        return counts[static_cast<std::size_t>(x)] < counts[static_cast<std::size_t>(y)];
    });
    return detail::learn_oriented(d, features, seed, num_classes, default_class, targets).rs;
}

inline RuleSet learn_ruleset(const Dataset& d, std::uint64_t seed, int num_classes = 2) {
    return learn_ruleset(d, d.active_features.features(), seed, num_classes);
}

}  // namespace cuephrase::rules
