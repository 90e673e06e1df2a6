#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <numeric>
#include <vector>

#include "cuephrase/dataset.hpp"
#include "cuephrase/rng.hpp"
#include "cuephrase/synthetic.hpp"  // Classifier

namespace cuephrase::eval {

// A learner builds a fresh classifier from training data; the seed feeds
// any internal randomness (the rule learner's grow/prune splits).
using Learner = std::function<Classifier(const Dataset&, std::uint64_t)>;

enum class EstimateMethod { HoldoutNormal, CvT };

// An error rate with its 95% margin. Holdout margins come from the normal
// approximation to the binomial; cross-validation margins from a t-quantile
// over the per-fold errors.
struct ErrorEstimate {
    double rate = 0;
    double margin = 0;
    EstimateMethod method = EstimateMethod::HoldoutNormal;
    std::size_t n = 0;                 // holdout sample size
    std::vector<double> fold_errors;   // cv folds

    double lower() const { return rate - margin; }
    double upper() const { return rate + margin; }
};

inline double error_rate(const Classifier& model, const Dataset& d) {
    if (d.empty()) throw std::invalid_argument("error_rate on empty dataset");
    std::size_t wrong = 0;
    for (const Example& e : d.examples)
        if (model(e) != e.class_label()) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(d.size());
}

inline ErrorEstimate holdout_ci(double rate, std::size_t n) {
    if (n == 0) throw std::invalid_argument("holdout_ci with n = 0");
    ErrorEstimate est;
    est.rate = rate;
    est.margin = 2.0 * std::sqrt(rate * (1.0 - rate) / static_cast<double>(n));
    est.method = EstimateMethod::HoldoutNormal;
    est.n = n;
    return est;
}

// Two-tailed 95% t multipliers by degrees of freedom. Above the table the
// lookup falls back conservatively to the nearest smaller tabulated row.
inline double t_multiplier_95(int dof) {
    static constexpr double table[] = {
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
        2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
        2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
    if (dof < 1) throw std::invalid_argument("t multiplier requires dof >= 1");
    if (dof <= 30) return table[dof - 1];
    if (dof < 60) return 2.021;   // tabulated at 40
    if (dof < 120) return 2.000;  // tabulated at 60
    return 1.980;                 // tabulated at 120
}

inline ErrorEstimate cv_ci(const std::vector<double>& fold_errors) {
    const std::size_t k = fold_errors.size();
    if (k < 2) throw std::invalid_argument("cv_ci needs at least two folds");
    ErrorEstimate est;
    est.method = EstimateMethod::CvT;
    est.fold_errors = fold_errors;
    est.n = k;
    est.rate = std::accumulate(fold_errors.begin(), fold_errors.end(), 0.0) /
               static_cast<double>(k);
    double ss = 0;
    for (double e : fold_errors) ss += (e - est.rate) * (e - est.rate);
    const double sd = std::sqrt(ss / static_cast<double>(k - 1));
    est.margin = t_multiplier_95(static_cast<int>(k) - 1) * sd /
                 std::sqrt(static_cast<double>(k));
    return est;
}

struct FoldAssignment {
    int k = 0;
    std::vector<int> assignment;  // example index -> fold index
    std::uint64_t seed = 0;
};

// Seeded uniform shuffle followed by round-robin slicing; folds are
// disjoint, cover everything, and differ in size by at most one.
inline FoldAssignment partition_folds(std::size_t n, int k, std::uint64_t seed) {
    if (k < 1 || n < static_cast<std::size_t>(k))
        throw std::invalid_argument("partition_folds requires n >= k >= 1");
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    FoldAssignment fa;
    fa.k = k;
    fa.seed = seed;
    fa.assignment.assign(n, 0);
    for (std::size_t j = 0; j < n; ++j)
        fa.assignment[order[j]] = static_cast<int>(j % static_cast<std::size_t>(k));
    return fa;
}

// Stratified variant, offered behind a flag: folds keep each class's
// examples balanced to within one while fold sizes still differ by at most
// one overall.
inline FoldAssignment partition_folds_stratified(const std::vector<ClassLabel>& labels,
                                                 int k, std::uint64_t seed) {
    const std::size_t n = labels.size();
    if (k < 1 || n < static_cast<std::size_t>(k))
        throw std::invalid_argument("partition_folds requires n >= k >= 1");
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    FoldAssignment fa;
    fa.k = k;
    fa.seed = seed;
    fa.assignment.assign(n, 0);
    int next = 0;
    for (int cls = 0; cls < kNumClassLabels; ++cls)
        for (std::size_t j = 0; j < n; ++j)
            if (labels[order[j]] == static_cast<ClassLabel>(cls))
                fa.assignment[order[j]] = next++ % k;
    return fa;
}

// Optional hook applied to each fold's training complement before learning
// (experiment set 4 trains its two-class replay on the classifiable subset
// while testing on everything).
using TrainFilter = std::function<Dataset(const Dataset&)>;

struct CvRun {
    ErrorEstimate estimate;
    FoldAssignment folds;
};

// k-fold cross-validation: each fold's model is learned from scratch on the
// complement and scored on the fold. Per-fold learner seeds derive from the
// run seed and the fold index, so results do not depend on execution order;
// with threads > 1 folds run concurrently and must (and do) reproduce the
// sequential result exactly.
inline CvRun cross_validate_run(const Learner& learner, const Dataset& d, int k,
                                std::uint64_t seed, int threads = 1,
                                const TrainFilter& train_filter = nullptr,
                                bool stratified = false) {
    if (d.size() < static_cast<std::size_t>(k))
        throw std::invalid_argument("cross_validate requires |d| >= k");
    CvRun run;
    if (stratified) {
        std::vector<ClassLabel> labels;
        labels.reserve(d.size());
        for (const Example& e : d.examples) labels.push_back(e.class_label());
        run.folds = partition_folds_stratified(labels, k, seed);
    } else {
        run.folds = partition_folds(d.size(), k, seed);
    }

    auto eval_fold = [&](int fold) -> double {
        Dataset train, test;
        train.active_features = d.active_features;
        test.active_features = d.active_features;
        train.provenance = d.provenance;
        test.provenance = d.provenance;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (run.folds.assignment[i] == fold)
                test.examples.push_back(d.examples[i]);
            else
                train.examples.push_back(d.examples[i]);
        }
        try {
            if (train_filter) train = train_filter(train);
            const Classifier model =
                learner(train, mix_seed(seed, static_cast<std::uint64_t>(fold)));
            return error_rate(model, test);
        } catch (const std::exception& ex) {
            throw DataError("fold " + std::to_string(fold) + ": " + ex.what());
        }
    };

    std::vector<double> fold_errors(static_cast<std::size_t>(k), 0.0);
    if (threads <= 1) {
        for (int f = 0; f < k; ++f) fold_errors[static_cast<std::size_t>(f)] = eval_fold(f);
    } else {
        std::vector<std::future<double>> futures;
        futures.reserve(static_cast<std::size_t>(k));
        for (int f = 0; f < k; ++f)
            futures.push_back(std::async(std::launch::async, eval_fold, f));
        for (int f = 0; f < k; ++f)
            fold_errors[static_cast<std::size_t>(f)] = futures[static_cast<std::size_t>(f)].get();
    }
    run.estimate = cv_ci(fold_errors);
    return run;
}

inline ErrorEstimate cross_validate(const Learner& learner, const Dataset& d, int k,
                                    std::uint64_t seed, int threads = 1) {
    return cross_validate_run(learner, d, k, seed, threads).estimate;
}

enum class Significance { FirstBetter, SecondBetter, Neither };

// Interval-overlap test: one estimate is significantly better when its
// upper bound sits below the other's lower bound.
inline Significance significant(const ErrorEstimate& a, const ErrorEstimate& b) {
    if (a.upper() < b.lower()) return Significance::FirstBetter;
    if (b.upper() < a.lower()) return Significance::SecondBetter;
    return Significance::Neither;
}

}  // namespace cuephrase::eval
