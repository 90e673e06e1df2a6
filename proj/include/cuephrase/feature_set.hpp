#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "cuephrase/schema.hpp"

namespace cuephrase {

// A named, ordered subset of feature codes. A set containing the lexical
// feature T is "tokenized" and carries a trailing "+" in its name.
class FeatureSetSpec {
public:
    FeatureSetSpec() = default;

    FeatureSetSpec(std::string name, std::vector<FeatureCode> features)
        : name_(std::move(name)), features_(std::move(features)) {
        for (std::size_t i = 0; i < features_.size(); ++i)
            for (std::size_t j = i + 1; j < features_.size(); ++j)
                if (features_[i] == features_[j])
                    throw std::invalid_argument("duplicate feature code in set");
        tokenized_ = contains(FeatureCode::T);
        if (tokenized_ && (name_.empty() || name_.back() != '+')) name_ += '+';
    }

    const std::string& name() const { return name_; }
    const std::vector<FeatureCode>& features() const { return features_; }
    bool tokenized() const { return tokenized_; }
    std::size_t size() const { return features_.size(); }

    bool contains(FeatureCode code) const {
        return std::find(features_.begin(), features_.end(), code) !=
               features_.end();
    }

    // Same membership, order ignored.
    bool same_features(const FeatureSetSpec& other) const {
        if (features_.size() != other.features_.size()) return false;
        for (FeatureCode c : features_)
            if (!other.contains(c)) return false;
        return true;
    }

    // Adds T and the "+" name suffix.
    FeatureSetSpec tokenized_variant() const {
        std::vector<FeatureCode> f = features_;
        if (!contains(FeatureCode::T)) f.push_back(FeatureCode::T);
        return FeatureSetSpec(name_, std::move(f));
    }

    bool operator==(const FeatureSetSpec& other) const {
        return name_ == other.name_ && features_ == other.features_ &&
               tokenized_ == other.tokenized_;
    }
    bool operator!=(const FeatureSetSpec& other) const { return !(*this == other); }

private:
    std::string name_;
    std::vector<FeatureCode> features_;
    bool tokenized_ = false;
};

namespace detail {

inline FeatureSetSpec make_set(std::string name, std::vector<FeatureCode> codes) {
    return FeatureSetSpec(std::move(name), std::move(codes));
}

}  // namespace detail

// The 14 single feature sets, one per prosodic/textual feature (T excluded).
inline std::vector<FeatureSetSpec> single_feature_sets() {
    std::vector<FeatureSetSpec> out;
    for (FeatureCode code : kAllFeatures) {
        if (code == FeatureCode::T) continue;
        out.emplace_back(std::string(feature_name(code)),
                         std::vector<FeatureCode>{code});
    }
    return out;
}

// The 13 multiple feature sets with their tabulated memberships.
inline std::vector<FeatureSetSpec> multiple_feature_sets() {
    using F = FeatureCode;
    std::vector<FeatureSetSpec> out;
    out.push_back(detail::make_set(
        "prosody", {F::PL, F::PP, F::IL, F::IP, F::IC, F::A, F::AStar}));
    out.push_back(detail::make_set("hl93features", {F::IP, F::IC, F::A, F::AStar}));
    out.push_back(detail::make_set("phrasing", {F::PL, F::PP, F::IL, F::IP, F::IC}));
    out.push_back(detail::make_set("length", {F::PL, F::IL}));
    out.push_back(detail::make_set("position", {F::PP, F::IP}));
    out.push_back(detail::make_set("intonational", {F::PL, F::PP}));
    out.push_back(detail::make_set("intermediate", {F::IL, F::IP, F::IC}));
    out.push_back(detail::make_set(
        "text", {F::CP, F::CS, F::OP, F::OPStar, F::OS, F::OSStar, F::POS}));
    out.push_back(detail::make_set("adjacency", {F::CP, F::CS}));
    out.push_back(detail::make_set("orthography", {F::OP, F::OPStar, F::OS, F::OSStar}));
    out.push_back(detail::make_set("preceding", {F::CP, F::OP, F::OPStar}));
    out.push_back(detail::make_set("succeeding", {F::CS, F::OS, F::OSStar}));
    std::vector<FeatureCode> all(kAllFeatures.begin(), kAllFeatures.end());
    all.pop_back();  // drop T
    out.push_back(detail::make_set("speech-text", std::move(all)));
    return out;
}

// Feature sets for one of the four experiment-set designs.
//
// Set 1 replays the original holdout design: prosodic features only, with
// the phrasal lengths removed (they were not coded in the holdout training
// corpus). The multiple set "length" becomes empty under that exclusion and
// is dropped. Set 2 is all 27 sets, set 3 their tokenized variants, set 4
// the union of sets 2 and 3.
inline std::vector<FeatureSetSpec> builtin_feature_sets(int experiment_set) {
    using F = FeatureCode;
    switch (experiment_set) {
        case 1: {
            std::vector<FeatureSetSpec> out;
            for (F code : {F::PP, F::IP, F::IC, F::A, F::AStar})
                out.emplace_back(std::string(feature_name(code)),
                                 std::vector<F>{code});
            const std::vector<FeatureSetSpec> multiples = multiple_feature_sets();
            for (std::size_t i = 0; i < 7; ++i) {  // the prosodic multiples
                const FeatureSetSpec& s = multiples[i];
                std::vector<F> kept;
                for (F code : s.features())
                    if (code != F::PL && code != F::IL) kept.push_back(code);
                if (kept.empty()) continue;
                out.emplace_back(s.name(), std::move(kept));
            }
            return out;
        }
        case 2: {
            std::vector<FeatureSetSpec> out = single_feature_sets();
            for (FeatureSetSpec& s : multiple_feature_sets())
                out.push_back(std::move(s));
            return out;
        }
        case 3: {
            std::vector<FeatureSetSpec> out;
            for (const FeatureSetSpec& s : builtin_feature_sets(2))
                out.push_back(s.tokenized_variant());
            return out;
        }
        case 4: {
            std::vector<FeatureSetSpec> out = builtin_feature_sets(2);
            for (FeatureSetSpec& s : builtin_feature_sets(3))
                out.push_back(std::move(s));
            return out;
        }
        default:
            throw std::invalid_argument("experiment set must be 1..4");
    }
}

// Looks up a builtin set (any experiment-set flavor) by name.
inline std::optional<FeatureSetSpec> builtin_feature_set(const std::string& name) {
    for (const FeatureSetSpec& s : builtin_feature_sets(4))
        if (s.name() == name) return s;
    return std::nullopt;
}

// Canonical name for a membership: the matching builtin name if there is
// one, the bare code for singletons, otherwise the joined code list (with T
// folded into the "+" suffix).
inline std::string canonical_set_name(const FeatureSetSpec& spec) {
    for (const FeatureSetSpec& s : builtin_feature_sets(4))
        if (s.same_features(spec)) return s.name();
    std::string joined;
    for (FeatureCode c : spec.features()) {
        if (c == FeatureCode::T) continue;
        if (!joined.empty()) joined += ',';
        joined += std::string(feature_name(c));
    }
    if (spec.tokenized()) joined += '+';
    return joined;
}

}  // namespace cuephrase
