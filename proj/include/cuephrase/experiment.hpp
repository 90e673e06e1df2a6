#pragma once

#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "cuephrase/baselines.hpp"
#include "cuephrase/corpus_io.hpp"
#include "cuephrase/eval.hpp"
#include "cuephrase/model_io.hpp"

namespace cuephrase::experiment {

enum class Subset { Classifiable, NonConjuncts, All };

inline std::string_view subset_name(Subset s) {
    switch (s) {
        case Subset::Classifiable: return "classifiable";
        case Subset::NonConjuncts: return "non_conjuncts";
        default: return "all";
    }
}

inline std::optional<Subset> subset_from_name(std::string_view name) {
    if (name == "classifiable") return Subset::Classifiable;
    if (name == "non_conjuncts") return Subset::NonConjuncts;
    if (name == "all") return Subset::All;
    return std::nullopt;
}

// non_conjuncts means the classifiable non-conjuncts, as in the published
// test sets.
inline Dataset apply_subset(const Dataset& d, Subset s) {
    switch (s) {
        case Subset::Classifiable: return filter_classifiable(d);
        case Subset::NonConjuncts: return filter_classifiable(filter_non_conjuncts(d));
        default: return d;
    }
}

enum class LearnerKind { DTree, Rules, ManualProsodic, ManualTextual, DefaultClass };

inline std::string_view learner_name(LearnerKind k) {
    switch (k) {
        case LearnerKind::DTree: return "dtree";
        case LearnerKind::Rules: return "rules";
        case LearnerKind::ManualProsodic: return "manual-prosodic";
        case LearnerKind::ManualTextual: return "manual-textual";
        default: return "default";
    }
}

inline std::optional<LearnerKind> learner_from_name(std::string_view name) {
    for (LearnerKind k : {LearnerKind::DTree, LearnerKind::Rules,
                          LearnerKind::ManualProsodic, LearnerKind::ManualTextual,
                          LearnerKind::DefaultClass})
        if (learner_name(k) == name) return k;
    return std::nullopt;
}

// True for learners that depend on the training features; the manual models
// and the default baseline get one report row instead of one per feature set.
inline bool is_inducer(LearnerKind k) {
    return k == LearnerKind::DTree || k == LearnerKind::Rules;
}

inline eval::Learner make_learner(LearnerKind kind, const dtree::TreeConfig& cfg = {},
                                  int num_classes = 2) {
    switch (kind) {
        case LearnerKind::DTree:
            return [cfg](const Dataset& d, std::uint64_t) -> Classifier {
                auto grown = dtree::grow_tree(d, cfg);
                std::shared_ptr<const dtree::TreeNode> tree =
                    dtree::prune_tree(*grown, cfg);
                return [tree](const Example& e) { return dtree::predict(*tree, e); };
            };
        case LearnerKind::Rules:
            return [num_classes](const Dataset& d, std::uint64_t seed) -> Classifier {
                auto rs = std::make_shared<const rules::RuleSet>(
                    rules::learn_ruleset(d, seed, num_classes));
                return [rs](const Example& e) { return rules::predict(*rs, e); };
            };
        case LearnerKind::ManualProsodic:
            return [](const Dataset&, std::uint64_t) -> Classifier {
                return [](const Example& e) { return baselines::manual_prosodic(e); };
            };
        case LearnerKind::ManualTextual:
            return [](const Dataset&, std::uint64_t) -> Classifier {
                return [](const Example& e) { return baselines::manual_textual(e); };
            };
        default:
            return [](const Dataset& d, std::uint64_t) -> Classifier {
                return baselines::fit_default_class(d);
            };
    }
}

struct ExperimentPlan {
    int set_id = 2;
    std::string train_source;
    std::string test_source;
    bool cv = true;
    int k = 10;
    std::uint64_t seed = 1;
    std::vector<Subset> subsets = {Subset::Classifiable, Subset::NonConjuncts};
    std::vector<LearnerKind> learners = {LearnerKind::DTree, LearnerKind::Rules,
                                         LearnerKind::ManualProsodic,
                                         LearnerKind::ManualTextual,
                                         LearnerKind::DefaultClass};
    dtree::TreeConfig tree;
    int threads = 1;
    bool stratified = false;  // stratified cv folds (off: plain random folds)
    std::vector<std::string> feature_filter;  // restrict to these set names
};

// Set 1 replays the published holdout design and needs a separate test
// corpus; sets 2-4 cross-validate one corpus; set 4 always evaluates on the
// full corpus with the unknown class enabled.
inline void validate_plan(const ExperimentPlan& p) {
    if (p.set_id < 1 || p.set_id > 4)
        throw std::invalid_argument("experiment set must be 1..4");
    if (p.set_id == 1) {
        if (p.cv) throw std::invalid_argument("set 1 uses the holdout design, not cv");
        if (p.test_source.empty() || p.test_source == p.train_source)
            throw std::invalid_argument("set 1 requires a distinct test source");
    } else if (!p.cv) {
        throw std::invalid_argument("sets 2-4 use cross-validation");
    }
    if (p.k < 2) throw std::invalid_argument("k must be >= 2");
}

struct RunRecord {
    std::string learner;
    std::string mode;         // "2-class", "3-class", "replay", "manual"
    std::string feature_set;  // row label
    std::string subset;
    eval::ErrorEstimate est;
};

struct RunLog {
    int set_id = 0;
    std::uint64_t seed = 0;
    int k = 0;
    std::string method;  // "cv" or "holdout"
    std::string train_source;
    std::string test_source;
    std::vector<std::string> subsets;
    std::vector<RunRecord> records;
    std::map<std::string, std::vector<int>> fold_assignments;  // key: mode/subset
};

namespace detail {

inline std::string pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", fraction * 100.0);
    return buf;
}

inline std::vector<FeatureSetSpec> plan_feature_sets(const ExperimentPlan& p) {
    std::vector<FeatureSetSpec> sets = builtin_feature_sets(p.set_id);
    if (p.feature_filter.empty()) return sets;
    std::vector<FeatureSetSpec> kept;
    for (const std::string& name : p.feature_filter) {
        bool found = false;
        for (const FeatureSetSpec& s : sets)
            if (s.name() == name) {
                kept.push_back(s);
                found = true;
                break;
            }
        if (!found)
            throw DataError("feature set '" + name + "' is not part of set " +
                            std::to_string(p.set_id));
    }
    return kept;
}

}  // namespace detail

// Runs the full experiment matrix of a plan. Randomness flows from the plan
// seed alone: fold partitions depend on (seed, mode, subset) so that every
// learner and feature set of one subset shares folds, and per-fold learner
// seeds come from the partition seed and fold index.
inline RunLog run_plan(const ExperimentPlan& p, const Dataset& train,
                       const Dataset* test = nullptr) {
    validate_plan(p);
    if (!p.cv && test == nullptr)
        throw std::invalid_argument("the holdout design requires a test dataset");

    RunLog log;
    log.set_id = p.set_id;
    log.seed = p.seed;
    log.k = p.k;
    log.method = p.cv ? "cv" : "holdout";
    log.train_source = p.train_source;
    log.test_source = p.test_source;

    std::vector<Subset> subsets = p.subsets;
    if (p.set_id == 4) subsets = {Subset::All};
    for (Subset s : subsets) log.subsets.emplace_back(subset_name(s));

    const std::vector<FeatureSetSpec> sets = detail::plan_feature_sets(p);

    struct Mode {
        std::string name;
        bool three_class;
        bool replay;  // train two-class on the classifiable subset
    };
    std::vector<Mode> modes;
    if (p.set_id == 4) {
        modes.push_back({"replay", false, true});
        modes.push_back({"3-class", true, false});
    } else {
        modes.push_back({"2-class", false, false});
    }

    const eval::TrainFilter classifiable_filter = [](const Dataset& d) {
        return filter_classifiable(d);
    };

    for (LearnerKind kind : p.learners) {
        for (const Mode& mode : modes) {
            // Manual and default baselines are feature-set independent; the
            // 3-class mode only makes sense for the inducers.
            if (!is_inducer(kind) && mode.three_class) continue;

            const int num_classes = mode.three_class ? 3 : 2;
            const eval::Learner learner = make_learner(kind, p.tree, num_classes);

            std::vector<FeatureSetSpec> row_sets;
            if (is_inducer(kind))
                row_sets = sets;
            else
                row_sets.emplace_back(std::string(learner_name(kind)),
                                      std::vector<FeatureCode>{});

            for (const FeatureSetSpec& fs : row_sets) {
                for (std::size_t si = 0; si < subsets.size(); ++si) {
                    const Subset subset = subsets[si];
                    RunRecord rec;
                    rec.learner = std::string(learner_name(kind));
                    rec.mode = mode.name;
                    rec.feature_set = fs.name();
                    rec.subset = std::string(subset_name(subset));

                    if (p.cv) {
                        Dataset d = apply_subset(train, subset);
                        if (is_inducer(kind)) d = project(d, fs);
                        const std::uint64_t cell_seed = mix_seed(
                            p.seed, (mode.three_class ? 1000u : mode.replay ? 2000u : 0u) +
                                        si);
                        // Two-class learners facing the full corpus train on
                        // the classifiable part of each fold complement and
                        // are scored against everything, unknowns included.
                        const eval::TrainFilter* filter = nullptr;
                        if (mode.replay ||
                            (!mode.three_class && subset == Subset::All))
                            filter = &classifiable_filter;
                        eval::CvRun run = eval::cross_validate_run(
                            learner, d, p.k, cell_seed, p.threads,
                            filter ? *filter : eval::TrainFilter(), p.stratified);
                        rec.est = run.estimate;
                        log.fold_assignments.emplace(
                            mode.name + "/" + rec.subset, std::move(run.folds.assignment));
                    } else {
                        // Holdout: train once per cell, evaluate on the
                        // requested subset of the test corpus.
                        Dataset train_d = mode.replay || !mode.three_class
                                              ? filter_classifiable(train)
                                              : train;
                        Dataset test_d = apply_subset(*test, subset);
                        if (test_d.empty())
                            throw DataError("test subset '" + rec.subset + "' is empty");
                        if (is_inducer(kind)) {
                            train_d = project(train_d, fs);
                            test_d = project(test_d, fs);
                        }
                        const Classifier model =
                            learner(train_d, mix_seed(p.seed, 3000u + si));
                        const double rate = eval::error_rate(model, test_d);
                        rec.est = eval::holdout_ci(rate, test_d.size());
                    }
                    log.records.push_back(std::move(rec));
                }
            }
        }
    }
    return log;
}

// Renders the stored run log as tab-separated sections, one per
// learner/mode, one row per feature set, one `rate ± margin` cell (in
// percent) per subset.
inline std::string render_report(const RunLog& log) {
    std::string out = "# set=" + std::to_string(log.set_id) + " method=" + log.method +
                      " k=" + std::to_string(log.k) + " seed=" + std::to_string(log.seed);
    if (!log.train_source.empty()) out += " train=" + log.train_source;
    if (!log.test_source.empty()) out += " test=" + log.test_source;
    out += '\n';

    std::string section;
    std::string row;
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        const RunRecord& r = log.records[i];
        const std::string key = r.learner + " mode=" + r.mode;
        if (key != section) {
            section = key;
            out += "\n== model=" + key + "\n";
            out += "feature-set";
            for (const std::string& s : log.subsets) out += '\t' + s;
            out += '\n';
            row.clear();
        }
        if (r.feature_set != row) {
            row = r.feature_set;
            out += r.feature_set;
        }
        out += '\t' + detail::pct(r.est.rate) + " ± " + detail::pct(r.est.margin);
        const bool row_done = i + 1 == log.records.size() ||
                              log.records[i + 1].feature_set != r.feature_set ||
                              log.records[i + 1].learner != r.learner ||
                              log.records[i + 1].mode != r.mode;
        if (row_done) out += '\n';
    }
    return out;
}

inline nlohmann::json runlog_to_json(const RunLog& log) {
    nlohmann::json j;
    j["set"] = log.set_id;
    j["seed"] = log.seed;
    j["k"] = log.k;
    j["method"] = log.method;
    j["train"] = log.train_source;
    j["test"] = log.test_source;
    j["subsets"] = log.subsets;
    nlohmann::json records = nlohmann::json::array();
    for (const RunRecord& r : log.records) {
        nlohmann::json jr;
        jr["learner"] = r.learner;
        jr["mode"] = r.mode;
        jr["feature_set"] = r.feature_set;
        jr["subset"] = r.subset;
        jr["rate"] = r.est.rate;
        jr["margin"] = r.est.margin;
        jr["method"] = r.est.method == eval::EstimateMethod::CvT ? "cv_t" : "holdout_normal";
        jr["n"] = r.est.n;
        jr["fold_errors"] = r.est.fold_errors;
        records.push_back(std::move(jr));
    }
    j["records"] = std::move(records);
    nlohmann::json folds;
    for (const auto& [key, assignment] : log.fold_assignments) folds[key] = assignment;
    j["fold_assignments"] = std::move(folds);
    return j;
}

inline RunLog runlog_from_json(const nlohmann::json& j) {
    RunLog log;
    log.set_id = j.value("set", 0);
    log.seed = j.value("seed", std::uint64_t{0});
    log.k = j.value("k", 0);
    log.method = j.value("method", "");
    log.train_source = j.value("train", "");
    log.test_source = j.value("test", "");
    log.subsets = j.value("subsets", std::vector<std::string>{});
    for (const nlohmann::json& jr : j.at("records")) {
        RunRecord r;
        r.learner = jr.at("learner").get<std::string>();
        r.mode = jr.at("mode").get<std::string>();
        r.feature_set = jr.at("feature_set").get<std::string>();
        r.subset = jr.at("subset").get<std::string>();
        r.est.rate = jr.at("rate").get<double>();
        r.est.margin = jr.at("margin").get<double>();
        r.est.method = jr.value("method", "cv_t") == "cv_t"
                           ? eval::EstimateMethod::CvT
                           : eval::EstimateMethod::HoldoutNormal;
        r.est.n = jr.value("n", std::size_t{0});
        r.est.fold_errors = jr.value("fold_errors", std::vector<double>{});
        log.records.push_back(std::move(r));
    }
    if (j.contains("fold_assignments"))
        for (const auto& [key, assignment] : j.at("fold_assignments").items())
            log.fold_assignments[key] = assignment.get<std::vector<int>>();
    return log;
}

}  // namespace cuephrase::experiment
