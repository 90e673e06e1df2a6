// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "support/oracles.hpp"

using namespace cuephrase;
namespace fs = std::filesystem;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
    if (!cond) throw Failure(what);
}

std::string golden(const std::string& name) {
    std::ifstream in(std::string(CUEPHRASE_GOLDEN_DIR) + "/" + name, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

// 1. The executable manual models agree with the published models over the
//    whole finite feature domain, and classify the worked corpus rows
//    correctly. Runtime < 1 s.
void criterion_manual_model_fidelity() {
    const auto start = std::chrono::steady_clock::now();

    for (int ic = 0; ic < 3; ++ic) {
        for (int ip = 1; ip <= 15; ++ip) {
            for (int a = 0; a < 8; ++a) {
                const Example e = testsupport::prosodic_example(
                    static_cast<PhraseComposition>(ic), ip, static_cast<Accent>(a));
                const auto expected = testsupport::fig1_prosodic_oracle(
                    static_cast<PhraseComposition>(ic), ip, static_cast<Accent>(a));
                if (!expected) continue;  // the one uncovered case (ambiguous accent)
                require(baselines::manual_prosodic(e) == *expected,
                        "prosodic model diverges at ic=" + std::to_string(ic) +
                            " ip=" + std::to_string(ip) + " a=" + std::to_string(a));
            }
        }
    }

    for (int v = 0; v < 3; ++v) {
        Example e;
        e.set(FeatureCode::OPStar, v);
        const ClassLabel expected = static_cast<Trinary>(v) == Trinary::False
                                        ? ClassLabel::Sentential
                                        : ClassLabel::Discourse;
        require(baselines::manual_textual(e) == expected, "textual model diverges");
    }

    const Dataset fig3 = parse_corpus(
        "P-L\tP-P\tI-L\tI-P\tI-C\tA\tC-P\tC-S\tO-P\tO-S\tPOS\tT\tJUDGE1\tJUDGE2\n"
        "9\t1\t1\t1\tonly\tH*+L\tf\tt\tpar.\tf\tadv.\tnow\tD\tD\n"
        "9\t2\t8\t1\tother\tH*\tt\tf\tf\tf\tadv.\tnow\tS\tS\n");
    require(baselines::manual_prosodic(fig3.examples[0]) == ClassLabel::Discourse,
            "worked row 1 should be discourse");
    require(baselines::manual_prosodic(fig3.examples[1]) == ClassLabel::Sentential,
            "worked row 2 should be sentential");

    require(seconds_since(start) < 1.0, "runtime budget exceeded");
}

// 2. Recomputing every published margin from its rate and sample size agrees
//    within 0.15 percentage points, and the significance conclusion (both
//    manual models beat the default class) reproduces. Runtime < 1 s.
void criterion_statistics_reproduction() {
    const auto start = std::chrono::steady_clock::now();

    struct Cell {
        double rate;
        double printed_margin;
        std::size_t n;
    };
    const Cell cells[] = {
        {0.246, 0.030, 878}, {0.147, 0.032, 495},  // prosodic
        {0.199, 0.028, 878}, {0.161, 0.034, 495},  // textual
        {0.388, 0.032, 878}, {0.408, 0.044, 495},  // default class
    };
    for (const Cell& c : cells) {
        const double recomputed = eval::holdout_ci(c.rate, c.n).margin;
        require(std::abs(recomputed - c.printed_margin) < 0.0015,
                "margin off by more than 0.15pp for rate " + std::to_string(c.rate));
    }

    const auto prosodic = eval::holdout_ci(0.246, 878);
    const auto textual = eval::holdout_ci(0.199, 878);
    const auto fallback = eval::holdout_ci(0.388, 878);
    require(eval::significant(prosodic, fallback) == eval::Significance::FirstBetter,
            "prosodic model should significantly beat the default class");
    require(eval::significant(textual, fallback) == eval::Significance::FirstBetter,
            "textual model should significantly beat the default class");

    require(seconds_since(start) < 1.0, "runtime budget exceeded");
}

// 3. A corpus file realizing the judge-pair census yields exactly the
//    published subset sizes.
void criterion_subset_counts() {
    const fs::path dir = fs::temp_directory_path() / "cuephrase_acceptance";
    fs::create_directories(dir);
    const fs::path file = dir / "table2.tsv";
    {
        std::ofstream out(file, std::ios::binary);
        out << testsupport::table2_corpus_text();
    }
    std::ifstream in(file, std::ios::binary);
    const Dataset d = parse_corpus(in, file.string());

    require(d.size() == 953, "corpus should have 953 rows");
    require(filter_classifiable(d).size() == 878, "classifiable should be 878");
    require(filter_non_conjuncts(d).size() == 509, "non-conjuncts should be 509");
    require(filter_classifiable(filter_non_conjuncts(d)).size() == 495,
            "classifiable non-conjuncts should be 495");

    const CorpusStats stats = corpus_stats(filter_classifiable(d));
    require(stats.count(ClassLabel::Discourse) == 341, "discourse should be 341");
    require(stats.count(ClassLabel::Sentential) == 537, "sentential should be 537");
}

// 4. best_split equals a brute-force enumeration oracle on 200 random
//    datasets. Runtime < 30 s.
void criterion_split_oracle() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(20240);
    for (int trial = 0; trial < 200; ++trial) {
        Dataset d;
        d.active_features = FeatureSetSpec(
            "", {FeatureCode::PP, FeatureCode::IL, FeatureCode::IC, FeatureCode::AStar});
        const int n = rng.uniform_int(2, 50);
        for (int i = 0; i < n; ++i) {
            Example e;
            e.set(FeatureCode::PP, rng.uniform_int(1, 9));
            e.set(FeatureCode::IL, rng.uniform_int(1, 9));
            e.set(FeatureCode::IC, rng.uniform_int(0, 2));
            e.set(FeatureCode::AStar, rng.uniform_int(0, 4));
            testsupport::label(
                e, static_cast<ClassLabel>(rng.uniform_int(0, trial % 4 ? 1 : 2)));
            d.examples.push_back(e);
        }
        dtree::TreeConfig cfg;
        cfg.min_cases = rng.uniform_int(1, 2);
        const auto got = dtree::best_split(d, d.active_features.features(), cfg);
        const auto expected = testsupport::oracle_best_split(
            d, d.active_features.features(), cfg.min_cases);
        require(got.has_value() == expected.has_value(),
                "split presence mismatch at trial " + std::to_string(trial));
        if (got) {
            require(got->candidate.feature == expected->feature &&
                        got->candidate.threshold_test == expected->threshold_test &&
                        (!expected->threshold_test ||
                         got->candidate.threshold == expected->threshold),
                    "split mismatch at trial " + std::to_string(trial));
        }
    }
    require(seconds_since(start) < 30.0, "runtime budget exceeded");
}

// 5. Planted-model recovery for trees: zero training error after pruning,
//    cross-validated estimate at most 1%, and decision-function equivalence
//    with the labeler over the enumerated domain. Runtime < 10 s.
void criterion_tree_recovery() {
    const auto start = std::chrono::steady_clock::now();
    const Classifier labeler = testsupport::manual_prosodic_classifier();
    const Dataset d = project(generate_synthetic(labeler, 1000, 0.0, 7),
                              *builtin_feature_set("hl93features"));

    const auto pruned = dtree::prune_tree(*dtree::grow_tree(d));
    require(dtree::training_errors(*pruned) == 0, "pruned training error should be 0");

    const auto est = eval::cross_validate(
        experiment::make_learner(experiment::LearnerKind::DTree), d, 10, 7);
    require(est.rate <= 0.01, "cv estimate should be at most 1%");

    for (int ic = 0; ic < 3; ++ic)
        for (int ip = 1; ip <= 15; ++ip)
            for (int a = 0; a < 8; ++a) {
                const Example e = testsupport::prosodic_example(
                    static_cast<PhraseComposition>(ic), ip, static_cast<Accent>(a));
                require(dtree::predict(*pruned, e) == labeler(e),
                        "tree diverges from the labeler on the enumerated domain");
            }

    require(seconds_since(start) < 10.0, "runtime budget exceeded");
}

// 6. Planted-model recovery for rules: separable position data yields the
//    published one-rule ruleset with its default on discourse; under 5%
//    noise the learned ruleset disagrees with the planted rule on at most 2%
//    of the feature space.
void criterion_rule_recovery() {
    const Classifier planted = testsupport::pp_rule_classifier();

    const Dataset clean = generate_synthetic(planted, 800, 0.0, 1);
    const rules::RuleSet rs = rules::learn_ruleset(clean, 1);
    require(rs.rules.size() == 1, "expected exactly one rule");
    require(rs.default_class == ClassLabel::Discourse, "default should be discourse");
    require(rs.rules[0].cls == ClassLabel::Sentential, "rule should predict sentential");
    bool has_pp_ge_2 = false;
    for (const rules::Test& t : rs.rules[0].tests)
        if (t.feature == FeatureCode::PP && t.op == rules::TestOp::Ge && t.value == 2)
            has_pp_ge_2 = true;
    require(has_pp_ge_2 && rs.rules[0].tests.size() == 1,
            "rule should be the single test P-P >= 2");

    const Dataset noisy = generate_synthetic(planted, 1500, 0.05, 7);
    const rules::RuleSet learned = rules::learn_ruleset(noisy, 7);
    // disagreement measured under the uniform generator distribution
    const Dataset probe = generate_synthetic(planted, 50000, 0.0, 1007);
    std::size_t disagree = 0;
    for (const Example& e : probe.examples)
        if (rules::predict(learned, e) != e.class_label()) ++disagree;
    require(static_cast<double>(disagree) / static_cast<double>(probe.size()) <= 0.02,
            "noisy recovery disagreement above 2%");
}

// 7. Cross-validation mechanics: partitions are disjoint, covering and
//    balanced at the published sample sizes, and a fixed seed reproduces
//    fold assignments and reports byte-identically, sequentially or in
//    parallel.
void criterion_cv_mechanics() {
    for (std::size_t n : {495u, 878u, 953u}) {
        const auto fa = eval::partition_folds(n, 10, 17);
        require(fa.assignment.size() == n, "assignment must cover all indices");
        std::vector<int> counts(10, 0);
        for (int f : fa.assignment) {
            require(f >= 0 && f < 10, "fold index out of range");
            ++counts[static_cast<std::size_t>(f)];
        }
        int lo = counts[0], hi = counts[0];
        for (int c : counts) {
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        require(hi - lo <= 1, "fold sizes must differ by at most one");
        const auto again = eval::partition_folds(n, 10, 17);
        require(fa.assignment == again.assignment, "assignment must be reproducible");
    }

    experiment::ExperimentPlan p;
    p.set_id = 2;
    p.k = 10;
    p.seed = 99;
    p.subsets = {experiment::Subset::Classifiable};
    p.learners = {experiment::LearnerKind::Rules};
    p.feature_filter = {"P-P", "position"};
    const Dataset corpus =
        generate_synthetic(testsupport::manual_prosodic_classifier(), 300, 0.05, 2);

    const auto a = experiment::run_plan(p, corpus);
    const auto b = experiment::run_plan(p, corpus);
    experiment::ExperimentPlan parallel = p;
    parallel.threads = 4;
    const auto c = experiment::run_plan(parallel, corpus);

    require(experiment::render_report(a) == experiment::render_report(b),
            "reports must be byte-identical across runs");
    require(experiment::render_report(a) == experiment::render_report(c),
            "reports must be byte-identical across fold-level parallelism");
    require(a.fold_assignments == c.fold_assignments,
            "fold assignments must not depend on parallelism");
}

// 8. The hand-encoded figure models parse, re-serialize byte-identically,
//    and reproduce the quoted predictions.
void criterion_serialization_goldens() {
    const char* files[] = {"fig5_pp_tree.txt",      "fig5_pp_ruleset.txt",
                           "fig5_prosody_tree.txt", "fig5_prosody_ruleset.txt",
                           "fig6_opstar_tree.txt",  "fig6_opstar_ruleset.txt",
                           "fig6_text_ruleset.txt", "fig7_speech_text_tree.txt",
                           "fig8_aplus_ruleset.txt"};
    for (const char* name : files) {
        const std::string text = golden(name);
        require(!text.empty(), std::string("missing golden ") + name);
        const Model m = parse_model(text);
        require(m.to_text() == text, std::string("round trip not byte-identical: ") + name);
    }

    const auto pp_tree = parse_tree_text(golden("fig5_pp_tree.txt"));
    Example e;
    e.set(FeatureCode::PP, 1);
    require(dtree::predict(*pp_tree, e) == ClassLabel::Discourse, "P-P tree at pp=1");
    e.set(FeatureCode::PP, 3);
    require(dtree::predict(*pp_tree, e) == ClassLabel::Sentential, "P-P tree at pp=3");

    const rules::RuleSet pp_rules = parse_ruleset_text(golden("fig5_pp_ruleset.txt"));
    require(rules::predict(pp_rules, e) == ClassLabel::Sentential, "P-P ruleset at pp=3");

    Example na;
    na.set(FeatureCode::OPStar, static_cast<int>(Trinary::NA));
    const auto opstar_tree = parse_tree_text(golden("fig6_opstar_tree.txt"));
    require(dtree::predict(*opstar_tree, na) == ClassLabel::Discourse,
            "O-P* tree routes NA to discourse");

    const rules::RuleSet aplus = parse_ruleset_text(golden("fig8_aplus_ruleset.txt"));
    Example say;
    say.set(FeatureCode::A, static_cast<int>(Accent::Deaccented));
    say.set(FeatureCode::T, *parse_value(FeatureCode::T, "say"));
    require(rules::predict(aplus, say) == ClassLabel::Discourse,
            "A+ ruleset: deaccented say is discourse");

    const auto prosody_tree = parse_tree_text(golden("fig5_prosody_tree.txt"));
    Example short_phrase;
    short_phrase.set(FeatureCode::PP, 2);
    short_phrase.set(FeatureCode::IL, 1);
    require(dtree::predict(*prosody_tree, short_phrase) == ClassLabel::Discourse,
            "prosody tree: pp=2, il=1 is discourse");

    const auto st_tree = parse_tree_text(golden("fig7_speech_text_tree.txt"));
    Example long_phrase;
    long_phrase.set(FeatureCode::PP, 1);
    long_phrase.set(FeatureCode::OPStar, static_cast<int>(Trinary::False));
    long_phrase.set(FeatureCode::IL, 13);
    require(dtree::predict(*st_tree, long_phrase) == ClassLabel::Discourse,
            "speech-text tree: pp=1, no orthography, il=13 is discourse");
}

// 9. The built-in feature sets reproduce the published memberships: all 13
//    multiple sets, the 14 singles, the tokenized variants, and the set-1
//    exclusions.
void criterion_feature_set_algebra() {
    using F = FeatureCode;
    const std::vector<std::pair<std::string, std::vector<F>>> expected = {
        {"prosody", {F::PL, F::PP, F::IL, F::IP, F::IC, F::A, F::AStar}},
        {"hl93features", {F::IP, F::IC, F::A, F::AStar}},
        {"phrasing", {F::PL, F::PP, F::IL, F::IP, F::IC}},
        {"length", {F::PL, F::IL}},
        {"position", {F::PP, F::IP}},
        {"intonational", {F::PL, F::PP}},
        {"intermediate", {F::IL, F::IP, F::IC}},
        {"text", {F::CP, F::CS, F::OP, F::OPStar, F::OS, F::OSStar, F::POS}},
        {"adjacency", {F::CP, F::CS}},
        {"orthography", {F::OP, F::OPStar, F::OS, F::OSStar}},
        {"preceding", {F::CP, F::OP, F::OPStar}},
        {"succeeding", {F::CS, F::OS, F::OSStar}},
        {"speech-text",
         {F::PL, F::PP, F::IL, F::IP, F::IC, F::A, F::AStar, F::CP, F::CS, F::OP,
          F::OPStar, F::OS, F::OSStar, F::POS}},
    };

    const auto set2 = builtin_feature_sets(2);
    require(set2.size() == 27, "set 2 must have 27 feature sets");
    int singles = 0;
    for (const auto& s : set2)
        if (s.size() == 1) ++singles;
    require(singles == 14, "set 2 must contain the 14 single sets");
    for (const auto& [name, features] : expected) {
        bool found = false;
        for (const auto& s : set2)
            if (s.name() == name) {
                require(s.features() == features, "membership mismatch for " + name);
                found = true;
            }
        require(found, "missing multiple set " + name);
    }

    const auto set3 = builtin_feature_sets(3);
    require(set3.size() == 27, "set 3 must have 27 feature sets");
    for (const auto& s : set3) {
        require(s.tokenized() && s.contains(F::T), "set 3 must be tokenized");
        require(!s.name().empty() && s.name().back() == '+',
                "tokenized names carry a + suffix");
    }
    const auto st = builtin_feature_set("speech-text+");
    require(st.has_value() && st->size() == 15, "speech-text+ holds all 15 codes");

    const auto set1 = builtin_feature_sets(1);
    require(set1.size() == 11, "set 1: 5 singles plus 6 multiples");
    for (const auto& s : set1) {
        require(!s.contains(F::PL) && !s.contains(F::IL),
                "set 1 excludes the phrasal lengths");
        require(s.name() != "length", "set 1 drops the emptied length set");
    }
    for (const auto& s : set1)
        if (s.name() == "prosody")
            require(s.features() == std::vector<F>({F::PP, F::IP, F::IC, F::A, F::AStar}),
                    "set 1 prosody membership");
}

// 10. Three-class learning: a minority unknown class carved out by one rule
//     is learned explicitly, and the error measure treats unknown as an
//     ordinary class.
void criterion_three_class_mode() {
    const Classifier labeler = [](const Example& e) {
        if (kCueTokens[static_cast<std::size_t>(*e.token())] == "say")
            return ClassLabel::Unknown;
        return *e.pp() >= 2 ? ClassLabel::Sentential : ClassLabel::Discourse;
    };
    const Dataset d = generate_synthetic(labeler, 900, 0.0, 4);

    const CorpusStats stats = corpus_stats(d);
    require(stats.count(ClassLabel::Unknown) > 0, "corpus should contain unknowns");
    require(stats.count(ClassLabel::Unknown) < stats.count(ClassLabel::Discourse),
            "unknown should be a minority class");

    const rules::RuleSet rs = rules::learn_ruleset(d, 4, 3);
    bool has_unknown_rule = false;
    for (const rules::Rule& r : rs.rules)
        if (r.cls == ClassLabel::Unknown) has_unknown_rule = true;
    require(has_unknown_rule, "at least one rule must predict unknown");

    const Classifier model = [&rs](const Example& e) { return rules::predict(rs, e); };
    const double err = eval::error_rate(model, d);
    std::size_t wrong = 0;
    for (const Example& e : d.examples)
        if (rules::predict(rs, e) != e.class_label()) ++wrong;
    require(err == static_cast<double>(wrong) / static_cast<double>(d.size()),
            "error_rate must count unknown mismatches like any other class");
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* description;
        std::function<void()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "manual-model fidelity over the full feature domain",
         criterion_manual_model_fidelity},
        {2, "published confidence intervals and significance reproduce",
         criterion_statistics_reproduction},
        {3, "judge-pair census yields the published subset counts",
         criterion_subset_counts},
        {4, "best_split matches the brute-force oracle on 200 datasets",
         criterion_split_oracle},
        {5, "planted-model recovery for decision trees", criterion_tree_recovery},
        {6, "planted-model recovery for ordered rules", criterion_rule_recovery},
        {7, "cross-validation mechanics are balanced and reproducible",
         criterion_cv_mechanics},
        {8, "figure models round-trip and predict as published",
         criterion_serialization_goldens},
        {9, "built-in feature sets match the published memberships",
         criterion_feature_set_algebra},
        {10, "three-class mode learns the unknown class", criterion_three_class_mode},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        try {
            c.run();
            std::cout << "[PASS] criterion " << c.id << ": " << c.description << "\n";
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "[FAIL] criterion " << c.id << ": " << c.description << " ("
                      << e.what() << ")\n";
        }
    }
    if (failures == 0)
        std::cout << "all " << criteria.size() << " acceptance criteria passed\n";
    else
        std::cout << failures << " acceptance criteria failed\n";
    return failures;
}
