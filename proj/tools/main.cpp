// Command-line workbench: corpus ingestion, model training, prediction,
// error estimation, synthetic corpora, and the four experiment-set designs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cuephrase/cuephrase.hpp"

namespace {

using namespace cuephrase;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << content;
}

Dataset load_corpus(const std::string& path) {
    std::string text = read_file(path);
    return parse_corpus(text, path);
}

nlohmann::json load_json(const std::string& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed json in " + path + ": " + e.what());
    }
}

// --features accepts a builtin set name ("prosody", "P-P+", ...) or a comma
// list of feature codes ("P-P,I-C").
FeatureSetSpec parse_feature_arg(const std::string& arg) {
    if (auto builtin = builtin_feature_set(arg)) return *builtin;
    std::vector<FeatureCode> codes;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto code = feature_from_name(item);
        if (!code) throw DataError("unknown feature set or code '" + item + "'");
        codes.push_back(*code);
    }
    if (codes.empty()) throw DataError("empty feature set");
    FeatureSetSpec spec("", codes);
    return FeatureSetSpec(canonical_set_name(spec), codes);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

experiment::Subset parse_subset(const std::string& s) {
    auto subset = experiment::subset_from_name(s);
    if (!subset) throw DataError("unknown subset '" + s + "'");
    return *subset;
}

Classifier labeler_from_arg(const std::string& arg, std::shared_ptr<Model>& keep_alive) {
    if (arg == "manual-prosodic")
        return [](const Example& e) { return baselines::manual_prosodic(e); };
    if (arg == "manual-textual")
        return [](const Example& e) { return baselines::manual_textual(e); };
    keep_alive = std::make_shared<Model>(parse_model(read_file(arg)));
    std::shared_ptr<Model> m = keep_alive;
    return [m](const Example& e) { return m->predict(e); };
}

struct TreeOptions {
    int min_cases = 2;
    double cf = 0.25;
    bool grouping = false;

    dtree::TreeConfig config() const { return {min_cases, cf, grouping}; }
};

struct TreeOptionHandles {
    CLI::Option* min_cases = nullptr;
    CLI::Option* cf = nullptr;
    CLI::Option* grouping = nullptr;
};

TreeOptionHandles add_tree_options(CLI::App* cmd, TreeOptions& opts) {
    TreeOptionHandles h;
    h.min_cases =
        cmd->add_option("--min-cases", opts.min_cases, "Minimum examples per split branch");
    h.cf = cmd->add_option("--cf", opts.cf, "Pruning confidence (0,1]");
    h.grouping =
        cmd->add_flag("--grouping", opts.grouping, "Group symbolic values into shared branches");
    return h;
}

// -- subcommands -------------------------------------------------------------

int cmd_ingest(const std::string& train, const std::string& out) {
    const Dataset d = load_corpus(train);
    const std::string text = serialize_corpus(d);
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_file(out, text);
    std::cerr << "ingested " << d.size() << " examples, features "
              << d.active_features.name() << "\n";
    return 0;
}

int cmd_train(const std::string& model_name, const std::string& train,
              const std::string& features, experiment::Subset subset, bool three_class,
              std::uint64_t seed, const TreeOptions& tree_opts, const std::string& out) {
    Dataset d = load_corpus(train);
    d = experiment::apply_subset(d, subset);
    if (!three_class) d = filter_classifiable(d);
    if (d.empty()) throw DataError("no training examples left after subsetting");
    if (!features.empty()) d = project(d, parse_feature_arg(features));

    std::unique_ptr<Model> model;
    if (model_name == "dtree") {
        auto grown = dtree::grow_tree(d, tree_opts.config());
        model = std::make_unique<Model>(dtree::prune_tree(*grown, tree_opts.config()));
    } else if (model_name == "rules") {
        model = std::make_unique<Model>(
            rules::learn_ruleset(d, seed, three_class ? 3 : 2));
    } else if (model_name == "manual-prosodic") {
        model = std::make_unique<Model>(baselines::manual_prosodic_tree());
    } else if (model_name == "manual-textual") {
        model = std::make_unique<Model>(baselines::manual_textual_tree());
    } else if (model_name == "default") {
        model = std::make_unique<Model>(
            baselines::default_class_tree(baselines::fit_default_class(d).cls));
    } else {
        throw DataError("unknown model '" + model_name + "'");
    }

    write_file(out, model->to_text());
    write_file(out + ".json", model->to_json().dump(2) + "\n");
    std::cerr << "wrote " << out << " and " << out << ".json\n";
    return 0;
}

int cmd_predict(const std::string& model_arg, const std::string& test,
                const std::string& out, bool verbose, const std::string& conflict) {
    const Dataset d = load_corpus(test);

    std::ostringstream lines;
    auto emit = [&](std::size_t i, ClassLabel cls, const char* gap) {
        lines << (i + 1) << '\t' << class_name(cls);
        if (verbose) lines << '\t' << gap;
        lines << '\n';
    };

    if (model_arg == "manual-prosodic") {
        for (std::size_t i = 0; i < d.size(); ++i) {
            const auto p = baselines::manual_prosodic_detailed(d.examples[i]);
            emit(i, p.label, p.gap ? "gap" : "-");
        }
    } else if (model_arg == "manual-textual") {
        for (std::size_t i = 0; i < d.size(); ++i)
            emit(i, baselines::manual_textual(d.examples[i]), "-");
    } else {
        const Model model = parse_model(read_file(model_arg));
        const auto strategy = conflict == "first" ? rules::ConflictStrategy::FirstMatch
                                                  : rules::ConflictStrategy::MostAccurate;
        for (std::size_t i = 0; i < d.size(); ++i) {
            const ClassLabel cls =
                model.is_tree() ? dtree::predict(model.tree(), d.examples[i])
                                : rules::predict(model.ruleset(), d.examples[i], strategy);
            emit(i, cls, "-");
        }
    }

    if (out.empty() || out == "-")
        std::cout << lines.str();
    else
        write_file(out, lines.str());
    return 0;
}

int cmd_evaluate(const std::string& model_name, const std::string& train,
                 const std::string& test, bool cv, int k, std::uint64_t seed,
                 const std::string& subsets_arg, const std::string& features,
                 bool three_class, const TreeOptions& tree_opts, int threads,
                 bool stratify, const std::string& out, const std::string& log_path) {
    const auto kind = experiment::learner_from_name(model_name);
    if (!kind) throw DataError("unknown model '" + model_name + "'");

    const Dataset train_d = load_corpus(train);
    std::optional<Dataset> test_d;
    if (!test.empty()) test_d = load_corpus(test);
    if (!cv && !test_d) throw DataError("holdout evaluation requires --test");

    std::vector<experiment::Subset> subsets;
    for (const std::string& s : split_commas(subsets_arg)) subsets.push_back(parse_subset(s));
    if (three_class) subsets = {experiment::Subset::All};

    const int num_classes = three_class ? 3 : 2;
    const eval::Learner learner =
        experiment::make_learner(*kind, tree_opts.config(), num_classes);

    experiment::RunLog log;
    log.set_id = 0;
    log.seed = seed;
    log.k = cv ? k : 0;
    log.method = cv ? "cv" : "holdout";
    log.train_source = train;
    log.test_source = test;
    for (auto s : subsets) log.subsets.emplace_back(experiment::subset_name(s));

    const std::string row_name = features.empty() ? model_name : features;
    for (std::size_t si = 0; si < subsets.size(); ++si) {
        experiment::RunRecord rec;
        rec.learner = model_name;
        rec.mode = three_class ? "3-class" : "2-class";
        rec.feature_set = row_name;
        rec.subset = std::string(experiment::subset_name(subsets[si]));

        if (cv) {
            Dataset d = experiment::apply_subset(train_d, subsets[si]);
            if (!features.empty()) d = project(d, parse_feature_arg(features));
            // two-class learners tested on the full corpus still train on
            // the classifiable part of each fold complement
            eval::TrainFilter filter;
            if (!three_class && subsets[si] == experiment::Subset::All)
                filter = [](const Dataset& t) { return filter_classifiable(t); };
            auto run = eval::cross_validate_run(learner, d, k, mix_seed(seed, si), threads,
                                                filter, stratify);
            rec.est = run.estimate;
            log.fold_assignments.emplace(rec.subset, std::move(run.folds.assignment));
        } else {
            Dataset tr = three_class ? train_d : filter_classifiable(train_d);
            Dataset te = experiment::apply_subset(*test_d, subsets[si]);
            if (te.empty()) throw DataError("empty test subset " + rec.subset);
            if (!features.empty()) {
                const FeatureSetSpec fs = parse_feature_arg(features);
                tr = project(tr, fs);
                te = project(te, fs);
            }
            const Classifier model = learner(tr, mix_seed(seed, si));
            rec.est = eval::holdout_ci(eval::error_rate(model, te), te.size());
        }
        log.records.push_back(std::move(rec));
    }

    const std::string report = experiment::render_report(log);
    if (out.empty() || out == "-")
        std::cout << report;
    else
        write_file(out, report);
    if (!log_path.empty())
        write_file(log_path, experiment::runlog_to_json(log).dump(2) + "\n");
    return 0;
}

int cmd_synth(const std::string& labeler_arg, std::size_t n, double noise,
              std::uint64_t seed, const std::string& out) {
    std::shared_ptr<Model> keep_alive;
    const Classifier labeler = labeler_from_arg(labeler_arg, keep_alive);
    const Dataset d = generate_synthetic(labeler, n, noise, seed);
    const std::string text = serialize_corpus(d);
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_file(out, text);
    return 0;
}

int cmd_run(int set_id, const std::string& train, const std::string& test, bool cv_flag,
            int k, std::uint64_t seed, const std::string& subsets_arg,
            const std::string& models_arg, const std::string& features_arg,
            const TreeOptions& tree_opts, int threads, bool stratify,
            const std::string& out, const std::string& log_path) {
    if (set_id < 1) throw DataError("an experiment set is required (--set or plan file)");
    if (train.empty()) throw DataError("a training corpus is required (--train or plan file)");
    experiment::ExperimentPlan plan;
    plan.set_id = set_id;
    plan.train_source = train;
    plan.test_source = test;
    plan.cv = cv_flag || set_id != 1;  // sets 2-4 imply cv; --cv on set 1 is rejected
    plan.k = k;
    plan.seed = seed;
    plan.tree = tree_opts.config();
    plan.threads = threads;
    plan.stratified = stratify;

    plan.subsets.clear();
    for (const std::string& s : split_commas(subsets_arg)) plan.subsets.push_back(parse_subset(s));

    plan.learners.clear();
    for (const std::string& m : split_commas(models_arg)) {
        auto kind = experiment::learner_from_name(m);
        if (!kind) throw DataError("unknown model '" + m + "'");
        plan.learners.push_back(*kind);
    }

    if (!features_arg.empty()) plan.feature_filter = split_commas(features_arg);

    const Dataset train_d = load_corpus(train);
    std::optional<Dataset> test_d;
    if (!test.empty()) test_d = load_corpus(test);

    const experiment::RunLog log =
        experiment::run_plan(plan, train_d, test_d ? &*test_d : nullptr);

    const std::string report = experiment::render_report(log);
    if (out.empty() || out == "-")
        std::cout << report;
    else
        write_file(out, report);
    if (!log_path.empty())
        write_file(log_path, experiment::runlog_to_json(log).dump(2) + "\n");
    return 0;
}

int cmd_report(const std::string& log_path, const std::string& out) {
    const experiment::RunLog log = experiment::runlog_from_json(load_json(log_path));
    const std::string report = experiment::render_report(log);
    if (out.empty() || out == "-")
        std::cout << report;
    else
        write_file(out, report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cue phrase classification workbench"};
    app.require_subcommand(1);

    // ingest
    std::string in_train, in_out;
    auto* ingest = app.add_subcommand("ingest", "Validate and normalize a corpus file");
    ingest->add_option("--train", in_train, "Corpus file")->required();
    ingest->add_option("--out", in_out, "Normalized output file (- for stdout)");

    // train
    std::string tr_model, tr_train, tr_features, tr_subset = "classifiable", tr_out;
    bool tr_three_class = false;
    std::uint64_t tr_seed = 1;
    TreeOptions tr_tree;
    auto* train = app.add_subcommand("train", "Fit one model and write both serializations");
    train->add_option("--model", tr_model,
                      "dtree|rules|manual-prosodic|manual-textual|default")
        ->required();
    train->add_option("--train", tr_train, "Training corpus")->required();
    train->add_option("--features", tr_features, "Feature set name or code list");
    train->add_option("--subset", tr_subset, "classifiable|non_conjuncts|all");
    train->add_flag("--three-class", tr_three_class, "Learn the unknown class too");
    train->add_option("--seed", tr_seed, "Learner seed");
    add_tree_options(train, tr_tree);
    train->add_option("--out", tr_out, "Output model path (text; .json added)")->required();

    // predict
    std::string pr_model, pr_test, pr_out, pr_conflict = "accurate";
    bool pr_verbose = false;
    auto* predict = app.add_subcommand("predict", "Label a feature file with a model");
    predict->add_option("--model", pr_model, "Model file, manual-prosodic or manual-textual")
        ->required();
    predict->add_option("--test", pr_test, "Feature file to label")->required();
    predict->add_option("--out", pr_out, "Output file (- for stdout)");
    predict->add_option("--conflict", pr_conflict, "Rule conflict strategy: accurate|first");
    predict->add_flag("--verbose", pr_verbose, "Add a gap column for manual-prosodic");

    // evaluate
    std::string ev_model, ev_train, ev_test, ev_subsets = "classifiable", ev_features,
                ev_out, ev_log;
    bool ev_cv = false, ev_three_class = false;
    int ev_k = 10, ev_threads = 1;
    std::uint64_t ev_seed = 1;
    TreeOptions ev_tree;
    auto* evaluate = app.add_subcommand("evaluate", "Estimate a model's error rate");
    evaluate->add_option("--model", ev_model, "Learner name")->required();
    evaluate->add_option("--train", ev_train, "Corpus file")->required();
    evaluate->add_option("--test", ev_test, "Held-out test corpus");
    evaluate->add_flag("--cv", ev_cv, "Cross-validate instead of holdout");
    evaluate->add_option("--k", ev_k, "Fold count");
    evaluate->add_option("--seed", ev_seed, "Run seed");
    evaluate->add_option("--subset", ev_subsets, "Comma list of test subsets");
    evaluate->add_option("--features", ev_features, "Feature set name or code list");
    evaluate->add_flag("--three-class", ev_three_class, "Enable the unknown class");
    evaluate->add_option("--threads", ev_threads, "Parallel fold evaluation");
    bool ev_stratify = false;
    evaluate->add_flag("--stratify", ev_stratify, "Stratified cv folds");
    add_tree_options(evaluate, ev_tree);
    evaluate->add_option("--out", ev_out, "Report file (- for stdout)");
    evaluate->add_option("--log", ev_log, "Machine-readable run log (json)");

    // synth
    std::string sy_labeler, sy_out;
    std::size_t sy_n = 1000;
    double sy_noise = 0.0;
    std::uint64_t sy_seed = 1;
    auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic corpus");
    synth->add_option("--labeler", sy_labeler,
                      "manual-prosodic, manual-textual, or a model file")
        ->required();
    synth->add_option("--n", sy_n, "Number of examples");
    synth->add_option("--noise", sy_noise, "Label flip probability");
    synth->add_option("--seed", sy_seed, "Generator seed");
    synth->add_option("--out", sy_out, "Corpus output file (- for stdout)");

    // run
    int rn_set = 0, rn_k = 10, rn_threads = 1;
    std::string rn_plan, rn_train, rn_test, rn_subsets = "classifiable,non_conjuncts",
                rn_models = "dtree,rules,manual-prosodic,manual-textual,default",
                rn_features, rn_out, rn_log;
    std::uint64_t rn_seed = 1;
    bool rn_cv = false, rn_stratify = false;
    TreeOptions rn_tree;
    auto* run = app.add_subcommand("run", "Run one of the four experiment-set designs");
    run->add_option("--plan", rn_plan, "Plan file (json); explicit flags win");
    auto* o_set = run->add_option("--set", rn_set, "Experiment set 1..4");
    auto* o_train = run->add_option("--train", rn_train, "Corpus file");
    auto* o_test = run->add_option("--test", rn_test, "Test corpus (set 1)");
    run->add_flag("--cv", rn_cv, "Cross-validation (implied for sets 2-4)");
    auto* o_k = run->add_option("--k", rn_k, "Fold count");
    auto* o_seed = run->add_option("--seed", rn_seed, "Plan seed");
    auto* o_subset = run->add_option("--subset", rn_subsets, "Comma list of test subsets");
    auto* o_model = run->add_option("--model", rn_models, "Comma list of learners");
    auto* o_features =
        run->add_option("--features", rn_features, "Restrict to these feature set names");
    auto* o_threads = run->add_option("--threads", rn_threads, "Parallel fold evaluation");
    auto* o_stratify = run->add_flag("--stratify", rn_stratify, "Stratified cv folds");
    const TreeOptionHandles rn_tree_opts = add_tree_options(run, rn_tree);
    auto* o_out = run->add_option("--out", rn_out, "Report file (- for stdout)");
    auto* o_log = run->add_option("--log", rn_log, "Machine-readable run log (json)");

    // report
    std::string rp_log, rp_out;
    auto* report = app.add_subcommand("report", "Render a stored run log as a table");
    report->add_option("--log", rp_log, "Run log (json)")->required();
    report->add_option("--out", rp_out, "Report file (- for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*ingest) return cmd_ingest(in_train, in_out);
        if (*train)
            return cmd_train(tr_model, tr_train, tr_features, parse_subset(tr_subset),
                             tr_three_class, tr_seed, tr_tree, tr_out);
        if (*predict) return cmd_predict(pr_model, pr_test, pr_out, pr_verbose, pr_conflict);
        if (*evaluate)
            return cmd_evaluate(ev_model, ev_train, ev_test, ev_cv, ev_k, ev_seed,
                                ev_subsets, ev_features, ev_three_class, ev_tree,
                                ev_threads, ev_stratify, ev_out, ev_log);
        if (*synth) return cmd_synth(sy_labeler, sy_n, sy_noise, sy_seed, sy_out);
        if (*run) {
            if (!rn_plan.empty()) {
                // plan-file values apply wherever no explicit flag was given
                const auto j = load_json(rn_plan);
                auto merge = [&](const CLI::Option* opt, auto& var, const char* key) {
                    if (opt->count() == 0 && j.contains(key))
                        var = j.at(key).get<std::decay_t<decltype(var)>>();
                };
                merge(o_set, rn_set, "set");
                merge(o_train, rn_train, "train");
                merge(o_test, rn_test, "test");
                merge(o_k, rn_k, "k");
                merge(o_seed, rn_seed, "seed");
                merge(o_subset, rn_subsets, "subset");
                merge(o_model, rn_models, "model");
                merge(o_features, rn_features, "features");
                merge(o_threads, rn_threads, "threads");
                merge(o_stratify, rn_stratify, "stratify");
                merge(rn_tree_opts.min_cases, rn_tree.min_cases, "min_cases");
                merge(rn_tree_opts.cf, rn_tree.cf, "cf");
                merge(rn_tree_opts.grouping, rn_tree.grouping, "grouping");
                merge(o_out, rn_out, "out");
                merge(o_log, rn_log, "log");
            }
            return cmd_run(rn_set, rn_train, rn_test, rn_cv, rn_k, rn_seed, rn_subsets,
                           rn_models, rn_features, rn_tree, rn_threads, rn_stratify,
                           rn_out, rn_log);
        }
        if (*report) return cmd_report(rp_log, rp_out);
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
