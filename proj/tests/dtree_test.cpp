#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "support/oracles.hpp"

using namespace cuephrase;
using dtree::ClassCounts;

namespace {

std::string golden(const std::string& name) {
    std::ifstream in(std::string(CUEPHRASE_GOLDEN_DIR) + "/" + name, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// one symbolic feature -> class, built directly
Dataset symbolic_dataset(const std::vector<std::pair<PhraseComposition, ClassLabel>>& rows) {
    Dataset d;
    d.active_features = FeatureSetSpec("I-C", {FeatureCode::IC});
    for (const auto& [v, c] : rows) {
        Example e;
        e.set(FeatureCode::IC, static_cast<int>(v));
        testsupport::label(e, c);
        d.examples.push_back(e);
    }
    return d;
}

// random mixed dataset for property tests
Dataset random_dataset(Rng& rng, std::size_t max_rows, bool three_class = false) {
    Dataset d;
    d.active_features = FeatureSetSpec(
        "", {FeatureCode::PP, FeatureCode::IL, FeatureCode::IC, FeatureCode::AStar});
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(2, static_cast<int>(max_rows)));
    for (std::size_t i = 0; i < n; ++i) {
        Example e;
        e.set(FeatureCode::PP, rng.uniform_int(1, 8));
        e.set(FeatureCode::IL, rng.uniform_int(1, 8));
        e.set(FeatureCode::IC, rng.uniform_int(0, 2));
        e.set(FeatureCode::AStar, rng.uniform_int(0, 4));
        const int cls = rng.uniform_int(0, three_class ? 2 : 1);
        testsupport::label(e, static_cast<ClassLabel>(cls));
        d.examples.push_back(e);
    }
    return d;
}

int leaf_support_total(const dtree::TreeNode& t) {
    if (t.leaf) {
        int n = 0;
        for (int c : t.support) n += c;
        return n;
    }
    int n = 0;
    for (const auto& b : t.branches) n += leaf_support_total(*b.child);
    return n;
}

}  // namespace

TEST(Entropy, KnownValues) {
    EXPECT_DOUBLE_EQ(dtree::entropy(ClassCounts{1, 1, 0}), 1.0);
    EXPECT_DOUBLE_EQ(dtree::entropy(ClassCounts{4, 0, 0}), 0.0);
    // -(1/4)log2(1/4) - (3/4)log2(3/4)
    EXPECT_NEAR(dtree::entropy(ClassCounts{1, 3, 0}), 0.8113, 1e-4);
    EXPECT_THROW(dtree::entropy(ClassCounts{0, 0, 0}), std::invalid_argument);
}

TEST(GainRatio, KnownValues) {
    // perfect symmetric split
    const Dataset perfect = symbolic_dataset({{PhraseComposition::Only, ClassLabel::Discourse},
                                              {PhraseComposition::Only, ClassLabel::Discourse},
                                              {PhraseComposition::Other, ClassLabel::Sentential},
                                              {PhraseComposition::Other, ClassLabel::Sentential}});
    dtree::SplitCandidate cand;
    cand.feature = FeatureCode::IC;
    for (int v = 0; v < 3; ++v) cand.groups.push_back({v});
    EXPECT_DOUBLE_EQ(*dtree::gain_ratio(perfect, cand), 1.0);

    // gain 0.3113 over split info 1.0
    const Dataset skewed = symbolic_dataset({{PhraseComposition::Only, ClassLabel::Discourse},
                                             {PhraseComposition::Only, ClassLabel::Sentential},
                                             {PhraseComposition::Other, ClassLabel::Sentential},
                                             {PhraseComposition::Other, ClassLabel::Sentential}});
    EXPECT_NEAR(*dtree::gain_ratio(skewed, cand), 0.3113, 1e-4);

    // class-constant data: zero gain
    const Dataset constant = symbolic_dataset({{PhraseComposition::Only, ClassLabel::Discourse},
                                               {PhraseComposition::Other, ClassLabel::Discourse}});
    EXPECT_DOUBLE_EQ(*dtree::gain_ratio(constant, cand), 0.0);

    // degenerate: every row in one branch
    const Dataset onesided = symbolic_dataset({{PhraseComposition::Only, ClassLabel::Discourse},
                                               {PhraseComposition::Only, ClassLabel::Sentential}});
    EXPECT_FALSE(dtree::gain_ratio(onesided, cand).has_value());
}

TEST(PessimisticBound, ClosedFormCases) {
    // zero errors: U solves (1-p)^n = cf
    EXPECT_NEAR(dtree::pessimistic_upper_bound(0, 1, 0.25), 0.75, 1e-9);
    EXPECT_NEAR(dtree::pessimistic_upper_bound(0, 6, 0.25),
                1.0 - std::pow(0.25, 1.0 / 6.0), 1e-9);
    EXPECT_NEAR(dtree::pessimistic_upper_bound(0, 9, 0.25),
                1.0 - std::pow(0.25, 1.0 / 9.0), 1e-9);

    // general case: the bound inverts the binomial cdf
    const double u = dtree::pessimistic_upper_bound(1, 16, 0.25);
    const double cdf = std::pow(1 - u, 16) + 16 * u * std::pow(1 - u, 15);
    EXPECT_NEAR(cdf, 0.25, 1e-9);

    EXPECT_EQ(dtree::pessimistic_upper_bound(3, 3, 0.25), 1.0);
    EXPECT_EQ(dtree::pessimistic_upper_bound(0, 0, 0.25), 0.0);
}

TEST(BestSplit, OnlySeparatingCandidateWins) {
    const Dataset d = symbolic_dataset({{PhraseComposition::Only, ClassLabel::Discourse},
                                        {PhraseComposition::Other, ClassLabel::Sentential}});
    dtree::TreeConfig cfg;
    cfg.min_cases = 1;
    const auto split = dtree::best_split(d, {FeatureCode::IC}, cfg);
    ASSERT_TRUE(split.has_value());
    EXPECT_EQ(split->candidate.feature, FeatureCode::IC);
    EXPECT_FALSE(split->candidate.threshold_test);
}

TEST(BestSplit, PureDataHasNoSplit) {
    const Dataset d = symbolic_dataset({{PhraseComposition::Only, ClassLabel::Discourse},
                                        {PhraseComposition::Other, ClassLabel::Discourse}});
    EXPECT_FALSE(dtree::best_split(d, {FeatureCode::IC}).has_value());
}

TEST(BestSplit, AgreesWithBruteForceOracle) {
    Rng rng(4242);
    for (int trial = 0; trial < 60; ++trial) {
        const Dataset d = random_dataset(rng, 50, trial % 3 == 0);
        const int min_cases = rng.uniform_int(1, 2);
        dtree::TreeConfig cfg;
        cfg.min_cases = min_cases;
        const auto got = dtree::best_split(d, d.active_features.features(), cfg);
        const auto expected =
            testsupport::oracle_best_split(d, d.active_features.features(), min_cases);
        ASSERT_EQ(got.has_value(), expected.has_value()) << "trial " << trial;
        if (got) {
            EXPECT_EQ(got->candidate.feature, expected->feature) << "trial " << trial;
            EXPECT_EQ(got->candidate.threshold_test, expected->threshold_test);
            if (got->candidate.threshold_test) {
                EXPECT_EQ(got->candidate.threshold, expected->threshold);
            }
        }
    }
}

TEST(GrowTree, EqualsExhaustiveReferenceGrower) {
    Rng rng(777);
    for (int trial = 0; trial < 40; ++trial) {
        const Dataset d = random_dataset(rng, 50, trial % 3 == 0);
        const int min_cases = rng.uniform_int(1, 2);
        dtree::TreeConfig cfg;
        cfg.min_cases = min_cases;
        const auto grown = dtree::grow_tree(d, d.active_features.features(), cfg);
        const auto reference =
            testsupport::oracle_grow_tree(d, d.active_features.features(), min_cases);
        EXPECT_TRUE(dtree::equal(*grown, *reference)) << "trial " << trial;
    }
}

TEST(GrowTree, SeparableDataGivesOneTest) {
    const Classifier labeler = testsupport::pp_rule_classifier();
    const Dataset d = project(generate_synthetic(labeler, 200, 0.0, 5),
                              FeatureSetSpec("P-P", {FeatureCode::PP}));
    const auto tree = dtree::grow_tree(d);
    ASSERT_FALSE(tree->leaf);
    EXPECT_EQ(tree->feature, FeatureCode::PP);
    EXPECT_TRUE(tree->threshold_test);
    EXPECT_EQ(tree->threshold, 1);
    EXPECT_EQ(dtree::node_count(*tree), 3u);
    EXPECT_EQ(dtree::training_errors(*tree), 0);
}

TEST(GrowTree, LeafSupportsSumToDatasetSize) {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const Dataset d = random_dataset(rng, 60);
        const auto tree = dtree::grow_tree(d);
        EXPECT_EQ(leaf_support_total(*tree), static_cast<int>(d.size()));
        const auto pruned = dtree::prune_tree(*tree);
        EXPECT_EQ(leaf_support_total(*pruned), static_cast<int>(d.size()));
    }
}

TEST(GrowTree, EmptyDatasetThrows) {
    EXPECT_THROW(dtree::grow_tree(Dataset{}), std::invalid_argument);
}

TEST(PruneTree, NeverGrowsAndNeverImprovesTrainingError) {
    Rng rng(1234);
    for (int trial = 0; trial < 25; ++trial) {
        const Dataset d = random_dataset(rng, 80);
        const auto grown = dtree::grow_tree(d);
        const auto pruned = dtree::prune_tree(*grown);
        EXPECT_LE(dtree::node_count(*pruned), dtree::node_count(*grown));
        EXPECT_GE(dtree::training_errors(*pruned), dtree::training_errors(*grown));
    }
}

TEST(PruneTree, PlantedModelRecovery) {
    const Classifier mp = testsupport::manual_prosodic_classifier();
    const Dataset d = project(generate_synthetic(mp, 600, 0.0, 21),
                              *builtin_feature_set("hl93features"));
    const auto pruned = dtree::prune_tree(*dtree::grow_tree(d));
    EXPECT_EQ(dtree::training_errors(*pruned), 0);
}

TEST(Predict, GoldenTreesReproducePaperExamples) {
    const auto pp_tree = parse_tree_text(golden("fig5_pp_tree.txt"));
    Example e;
    e.set(FeatureCode::PP, 1);
    EXPECT_EQ(dtree::predict(*pp_tree, e), ClassLabel::Discourse);
    e.set(FeatureCode::PP, 3);
    EXPECT_EQ(dtree::predict(*pp_tree, e), ClassLabel::Sentential);

    const auto prosody_tree = parse_tree_text(golden("fig5_prosody_tree.txt"));
    Example f;
    f.set(FeatureCode::PP, 2);
    f.set(FeatureCode::IL, 1);
    EXPECT_EQ(dtree::predict(*prosody_tree, f), ClassLabel::Discourse);

    const auto st_tree = parse_tree_text(golden("fig7_speech_text_tree.txt"));
    Example g;
    g.set(FeatureCode::PP, 1);
    g.set(FeatureCode::OPStar, static_cast<int>(Trinary::False));
    g.set(FeatureCode::IL, 13);
    EXPECT_EQ(dtree::predict(*st_tree, g), ClassLabel::Discourse);
}

TEST(Predict, SingleLeafAndMissingFeature) {
    dtree::TreeNode leaf;
    leaf.leaf = true;
    leaf.leaf_class = ClassLabel::Sentential;
    Example e;
    EXPECT_EQ(dtree::predict(leaf, e), ClassLabel::Sentential);

    const auto pp_tree = parse_tree_text("if P-P <= 1 then discourse\n"
                                         "elseif P-P > 1 then sentential\n");
    EXPECT_THROW(dtree::predict(*pp_tree, e), DataError);
}

TEST(GrowTree, Deterministic) {
    Rng rng(7);
    const Dataset d = random_dataset(rng, 70);
    const auto a = dtree::prune_tree(*dtree::grow_tree(d));
    const auto b = dtree::prune_tree(*dtree::grow_tree(d));
    EXPECT_TRUE(dtree::equal(*a, *b));
}

TEST(Grouping, MergesValuesWithSharedOutcome) {
    Dataset d = symbolic_dataset({});
    auto add = [&](PhraseComposition v, ClassLabel c, int n) {
        for (int i = 0; i < n; ++i) {
            Example e;
            e.set(FeatureCode::IC, static_cast<int>(v));
            testsupport::label(e, c);
            d.examples.push_back(e);
        }
    };
    add(PhraseComposition::Only, ClassLabel::Discourse, 10);
    add(PhraseComposition::OnlyCuePhrases, ClassLabel::Discourse, 10);
    add(PhraseComposition::Other, ClassLabel::Sentential, 10);

    dtree::TreeConfig cfg;
    cfg.grouping = true;
    const auto tree = dtree::grow_tree(d, cfg);
    ASSERT_FALSE(tree->leaf);
    ASSERT_EQ(tree->branches.size(), 2u);
    const std::vector<int> alone = {static_cast<int>(PhraseComposition::Only),
                                    static_cast<int>(PhraseComposition::OnlyCuePhrases)};
    EXPECT_EQ(tree->branches[0].values, alone);

    // grouped trees still cover the whole domain
    for (int v = 0; v < 3; ++v) {
        Example e;
        e.set(FeatureCode::IC, v);
        EXPECT_NO_THROW(dtree::predict(*tree, e));
    }

    // and round-trip through the text form
    const std::string text = serialize_tree_text(*tree);
    EXPECT_NE(text.find("I-C in {only, only_cue_phrases}"), std::string::npos);
    const auto back = parse_tree_text(text);
    EXPECT_EQ(serialize_tree_text(*back), text);
}
