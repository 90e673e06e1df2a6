#pragma once

#include <functional>
#include <stdexcept>

#include "cuephrase/corpus_io.hpp"
#include "cuephrase/dataset.hpp"
#include "cuephrase/rng.hpp"

namespace cuephrase {

using Classifier = std::function<ClassLabel(const Example&)>;

namespace detail {

// Phrase lengths are uniform on 1..15 and positions uniform within them.
// Composition respects "only implies length 1". Preceding orthography is
// drawn over its full six-value domain; drawing NA stands for a missing
// transcription, which forces NA across all textual features.
inline Example sample_example(Rng& rng) {
    Example e;
    const int pl = rng.uniform_int(1, 15);
    e.set(FeatureCode::PL, pl);
    e.set(FeatureCode::PP, rng.uniform_int(1, pl));
    const int il = rng.uniform_int(1, 15);
    e.set(FeatureCode::IL, il);
    e.set(FeatureCode::IP, rng.uniform_int(1, il));
    if (il == 1) {
        e.set(FeatureCode::IC, rng.uniform_int(0, 2));
    } else {
        e.set(FeatureCode::IC,
              rng.uniform_int(static_cast<int>(PhraseComposition::OnlyCuePhrases),
                              static_cast<int>(PhraseComposition::Other)));
    }
    e.set(FeatureCode::A, rng.uniform_int(0, 7));

    const int op = rng.uniform_int(0, domain_size(FeatureCode::OP) - 1);
    e.set(FeatureCode::OP, op);
    if (op == static_cast<int>(PrecedingOrtho::NA)) {
        e.set(FeatureCode::CP, static_cast<int>(Trinary::NA));
        e.set(FeatureCode::CS, static_cast<int>(Trinary::NA));
        e.set(FeatureCode::OS, static_cast<int>(SucceedingOrtho::NA));
        e.set(FeatureCode::POS, static_cast<int>(PartOfSpeech::NA));
    } else {
        e.set(FeatureCode::CP, rng.uniform_int(0, 1));
        e.set(FeatureCode::CS, rng.uniform_int(0, 1));
        e.set(FeatureCode::OS,
              rng.uniform_int(0, static_cast<int>(SucceedingOrtho::False)));
        e.set(FeatureCode::POS,
              rng.uniform_int(0, static_cast<int>(PartOfSpeech::NA) - 1));
    }
    e.set(FeatureCode::T, rng.uniform_int(0, kCueTokenCount - 1));
    e.derive_features();
    return e;
}

inline void apply_label(Example& e, ClassLabel label) {
    switch (label) {
        case ClassLabel::Discourse: e.set_judges(JudgeLabel::D, JudgeLabel::D); break;
        case ClassLabel::Sentential: e.set_judges(JudgeLabel::S, JudgeLabel::S); break;
        default: e.set_judges(JudgeLabel::Amb, JudgeLabel::Amb); break;
    }
}

}  // namespace detail

// Draws n feature vectors uniformly over the declared domains, labels each
// with `labeler`, then flips the label with probability `noise`. A flipped
// discourse/sentential label becomes the other; a flipped unknown becomes
// discourse or sentential by coin toss. Deterministic for a fixed seed.
inline Dataset generate_synthetic(const Classifier& labeler, std::size_t n,
                                  double noise, std::uint64_t seed) {
    if (noise < 0.0 || noise > 1.0)
        throw std::invalid_argument("noise must lie in [0, 1]");
    Rng rng(seed);
    Dataset d;
    d.active_features = FeatureSetSpec(
        "speech-text", std::vector<FeatureCode>(kAllFeatures.begin(), kAllFeatures.end()));
    d.provenance = "synthetic seed=" + std::to_string(seed);
    d.examples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Example e = detail::sample_example(rng);
        ClassLabel label = labeler(e);
        if (rng.bernoulli(noise)) {
            switch (label) {
                case ClassLabel::Discourse: label = ClassLabel::Sentential; break;
                case ClassLabel::Sentential: label = ClassLabel::Discourse; break;
                default:
                    label = rng.bernoulli(0.5) ? ClassLabel::Discourse
                                               : ClassLabel::Sentential;
                    break;
            }
        }
        detail::apply_label(e, label);
        d.examples.push_back(std::move(e));
    }
    return d;
}

}  // namespace cuephrase
