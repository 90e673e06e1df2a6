#pragma once

#include "cuephrase/dataset.hpp"
#include "cuephrase/dtree.hpp"

namespace cuephrase::baselines {

// The manually derived prosodic model. A cue phrase alone in its
// intermediate phrase (composition only / only cue phrases) is discourse;
// otherwise in first position a deaccented or L* accent gives discourse and
// H* or a complex accent gives sentential; non-initial position is
// sentential. An ambiguous accent in first position is not covered by the
// model; such cases fall back to the corpus-majority class sentential and
// are flagged as a gap.
struct ManualPrediction {
    ClassLabel label;
    bool gap = false;
};

inline ManualPrediction manual_prosodic_detailed(const Example& e) {
    const auto ic = e.ic();
    if (!ic) throw DataError("manual prosodic model requires I-C");
    if (*ic != PhraseComposition::Other) return {ClassLabel::Discourse, false};

    const auto ip = e.ip();
    if (!ip) throw DataError("manual prosodic model requires I-P");
    if (*ip > 1) return {ClassLabel::Sentential, false};

    const auto a = e.accent();
    if (!a) throw DataError("manual prosodic model requires A");
    switch (*a) {
        case Accent::Deaccented:
        case Accent::LStar:
            return {ClassLabel::Discourse, false};
        case Accent::Ambiguous:
            return {ClassLabel::Sentential, true};
        default:
            return {ClassLabel::Sentential, false};  // H* and the complex accents
    }
}

inline ClassLabel manual_prosodic(const Example& e) {
    return manual_prosodic_detailed(e).label;
}

// The manually derived textual model: preceding orthography gives
// discourse, its absence sentential. NA (no transcription) goes to
// discourse, the reading the learned textual trees settled on.
inline ClassLabel manual_textual(const Example& e) {
    const auto o = e.op_star();
    if (!o) throw DataError("manual textual model requires O-P*");
    return *o == Trinary::False ? ClassLabel::Sentential : ClassLabel::Discourse;
}

// Baseline that always predicts the most frequent class of its training
// data, ties resolved toward sentential.
struct DefaultClassModel {
    ClassLabel cls = ClassLabel::Sentential;

    ClassLabel operator()(const Example&) const { return cls; }
};

inline DefaultClassModel fit_default_class(const Dataset& d) {
    if (d.empty()) throw std::invalid_argument("fit_default_class on empty dataset");
    const CorpusStats stats = corpus_stats(d);
    ClassLabel best = ClassLabel::Sentential;
    std::size_t best_count = stats.count(ClassLabel::Sentential);
    for (ClassLabel c : {ClassLabel::Discourse, ClassLabel::Unknown}) {
        if (stats.count(c) > best_count) {
            best = c;
            best_count = stats.count(c);
        }
    }
    return DefaultClassModel{best};
}

// The manual models re-expressed as decision trees, so they can be written
// in the same model formats as learned trees. The prosodic tree resolves
// the ambiguous-accent gap the same way as manual_prosodic.
inline std::unique_ptr<dtree::TreeNode> manual_prosodic_tree() {
    using dtree::TreeNode;
    auto leaf = [](ClassLabel c) {
        auto n = std::make_unique<TreeNode>();
        n->leaf = true;
        n->leaf_class = c;
        return n;
    };

    auto accent_node = std::make_unique<TreeNode>();
    accent_node->leaf = false;
    accent_node->feature = FeatureCode::A;
    for (int v = 0; v < domain_size(FeatureCode::A); ++v) {
        const Accent a = static_cast<Accent>(v);
        const bool discourse = a == Accent::Deaccented || a == Accent::LStar;
        TreeNode::Branch b;
        b.values = {v};
        b.child = leaf(discourse ? ClassLabel::Discourse : ClassLabel::Sentential);
        accent_node->branches.push_back(std::move(b));
    }

    auto position_node = std::make_unique<TreeNode>();
    position_node->leaf = false;
    position_node->feature = FeatureCode::IP;
    position_node->threshold_test = true;
    position_node->threshold = 1;
    {
        TreeNode::Branch le;
        le.side = dtree::Side::Le;
        le.child = std::move(accent_node);
        TreeNode::Branch gt;
        gt.side = dtree::Side::Gt;
        gt.child = leaf(ClassLabel::Sentential);
        position_node->branches.push_back(std::move(le));
        position_node->branches.push_back(std::move(gt));
    }

    auto root = std::make_unique<TreeNode>();
    root->leaf = false;
    root->feature = FeatureCode::IC;
    {
        TreeNode::Branch only;
        only.values = {static_cast<int>(PhraseComposition::Only)};
        only.child = leaf(ClassLabel::Discourse);
        TreeNode::Branch ocp;
        ocp.values = {static_cast<int>(PhraseComposition::OnlyCuePhrases)};
        ocp.child = leaf(ClassLabel::Discourse);
        TreeNode::Branch other;
        other.values = {static_cast<int>(PhraseComposition::Other)};
        other.child = std::move(position_node);
        root->branches.push_back(std::move(only));
        root->branches.push_back(std::move(ocp));
        root->branches.push_back(std::move(other));
    }
    return root;
}

inline std::unique_ptr<dtree::TreeNode> manual_textual_tree() {
    using dtree::TreeNode;
    auto root = std::make_unique<TreeNode>();
    root->leaf = false;
    root->feature = FeatureCode::OPStar;
    for (int v = 0; v < domain_size(FeatureCode::OPStar); ++v) {
        TreeNode::Branch b;
        b.values = {v};
        auto child = std::make_unique<TreeNode>();
        child->leaf = true;
        child->leaf_class = v == static_cast<int>(Trinary::False)
                                ? ClassLabel::Sentential
                                : ClassLabel::Discourse;
        b.child = std::move(child);
        root->branches.push_back(std::move(b));
    }
    return root;
}

inline std::unique_ptr<dtree::TreeNode> default_class_tree(ClassLabel cls) {
    auto n = std::make_unique<dtree::TreeNode>();
    n->leaf = true;
    n->leaf_class = cls;
    return n;
}

}  // namespace cuephrase::baselines
