#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "cuephrase/example.hpp"
#include "cuephrase/feature_set.hpp"

namespace cuephrase {

// A sequence of examples together with the set of features they expose.
// Every example carries a value for every active feature; inactive slots
// are cleared on projection.
struct Dataset {
    std::vector<Example> examples;
    FeatureSetSpec active_features;
    std::string provenance;

    std::size_t size() const { return examples.size(); }
    bool empty() const { return examples.empty(); }
};

// Restricts a dataset to the features of `spec`, clearing everything else.
// Class labels and judges are untouched. A derived feature counts as
// available when its raw source is active, and derived slots stay populated
// alongside a retained raw source so the derivation invariant holds.
// Requesting a feature the dataset cannot supply is an error.
inline Dataset project(const Dataset& d, const FeatureSetSpec& spec) {
    for (FeatureCode code : spec.features()) {
        if (d.active_features.contains(code)) continue;
        const auto raw = derived_source(code);
        if (raw && d.active_features.contains(*raw)) continue;
        throw DataError("feature " + std::string(feature_name(code)) +
                        " is not present in dataset " + d.provenance);
    }
    Dataset out;
    out.active_features = spec;
    out.provenance = d.provenance;
    out.examples.reserve(d.examples.size());
    for (const Example& e : d.examples) {
        Example p = e;
        for (FeatureCode code : kAllFeatures) {
            if (spec.contains(code)) continue;
            const auto raw = derived_source(code);
            if (raw && spec.contains(*raw)) continue;  // rides along with its source
            p.clear(code);
        }
        p.derive_features();
        out.examples.push_back(std::move(p));
    }
    return out;
}

// Keeps the examples whose judges agreed on discourse or sentential.
inline Dataset filter_classifiable(const Dataset& d) {
    Dataset out;
    out.active_features = d.active_features;
    out.provenance = d.provenance;
    for (const Example& e : d.examples)
        if (e.class_label() != ClassLabel::Unknown) out.examples.push_back(e);
    return out;
}

// Removes the conjunctions "and", "or" and "but". Examples without a token
// feature are kept.
inline Dataset filter_non_conjuncts(const Dataset& d) {
    Dataset out;
    out.active_features = d.active_features;
    out.provenance = d.provenance;
    for (const Example& e : d.examples) {
        auto t = e.token();
        if (t && is_conjunct(*t)) continue;
        out.examples.push_back(e);
    }
    return out;
}

struct CorpusStats {
    std::array<std::size_t, kNumClassLabels> class_counts{};
    std::map<CueToken, std::size_t> token_counts;

    std::size_t count(ClassLabel c) const {
        return class_counts[static_cast<std::size_t>(c)];
    }
};

inline CorpusStats corpus_stats(const Dataset& d) {
    CorpusStats stats;
    for (const Example& e : d.examples) {
        ++stats.class_counts[static_cast<std::size_t>(e.class_label())];
        if (auto t = e.token()) ++stats.token_counts[*t];
    }
    return stats;
}

}  // namespace cuephrase
