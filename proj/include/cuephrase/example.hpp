#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "cuephrase/error.hpp"
#include "cuephrase/schema.hpp"

namespace cuephrase {

// How the two judges' labels combine into a class: agreement on D or S gives
// that class, every other pair (including any ambiguity) gives unknown.
inline ClassLabel derive_class(JudgeLabel j1, JudgeLabel j2) {
    if (j1 == JudgeLabel::D && j2 == JudgeLabel::D) return ClassLabel::Discourse;
    if (j1 == JudgeLabel::S && j2 == JudgeLabel::S) return ClassLabel::Sentential;
    return ClassLabel::Unknown;
}

// The four bitonal accents collapse to the superclass complex; simple
// accents, deaccented and ambiguous map to themselves.
inline AccentStar derive_abstract_accent(Accent a) {
    switch (a) {
        case Accent::HStar: return AccentStar::HStar;
        case Accent::LStar: return AccentStar::LStar;
        case Accent::LStarH:
        case Accent::LHStar:
        case Accent::HStarL:
        case Accent::HLStar: return AccentStar::Complex;
        case Accent::Deaccented: return AccentStar::Deaccented;
        default: return AccentStar::Ambiguous;
    }
}

inline Trinary derive_abstract_orthography(PrecedingOrtho o) {
    switch (o) {
        case PrecedingOrtho::False: return Trinary::False;
        case PrecedingOrtho::NA: return Trinary::NA;
        default: return Trinary::True;  // comma, dash, period, paragraph
    }
}

inline Trinary derive_abstract_orthography(SucceedingOrtho o) {
    switch (o) {
        case SucceedingOrtho::False: return Trinary::False;
        case SucceedingOrtho::NA: return Trinary::NA;
        default: return Trinary::True;
    }
}

// One cue-phrase occurrence. Feature slots are independent so that a
// projected example can retain a derived feature (say A*) without its raw
// source; absent slots are simply unset. Judges are optional: prediction
// inputs may be unlabeled, in which case the class is unknown.
class Example {
public:
    Example() { values_.fill(kAbsent); }

    bool has(FeatureCode code) const {
        return values_[static_cast<std::size_t>(code)] != kAbsent;
    }

    std::optional<int> value(FeatureCode code) const {
        const std::int16_t v = values_[static_cast<std::size_t>(code)];
        if (v == kAbsent) return std::nullopt;
        return static_cast<int>(v);
    }

    int value_or_throw(FeatureCode code) const {
        const std::int16_t v = values_[static_cast<std::size_t>(code)];
        if (v == kAbsent)
            throw DataError("missing value for feature " +
                            std::string(feature_name(code)));
        return static_cast<int>(v);
    }

    void set(FeatureCode code, int value) {
        if (is_numeric_feature(code)) {
            if (value < 1)
                throw std::invalid_argument("numeric feature values are positive");
        } else if (value < 0 || value >= domain_size(code)) {
            throw std::invalid_argument("value outside feature domain");
        }
        values_[static_cast<std::size_t>(code)] = static_cast<std::int16_t>(value);
    }

    void clear(FeatureCode code) {
        values_[static_cast<std::size_t>(code)] = kAbsent;
    }

    // Typed accessors.
    std::optional<int> pl() const { return value(FeatureCode::PL); }
    std::optional<int> pp() const { return value(FeatureCode::PP); }
    std::optional<int> il() const { return value(FeatureCode::IL); }
    std::optional<int> ip() const { return value(FeatureCode::IP); }
    std::optional<PhraseComposition> ic() const { return as<PhraseComposition>(FeatureCode::IC); }
    std::optional<Accent> accent() const { return as<Accent>(FeatureCode::A); }
    std::optional<AccentStar> accent_star() const { return as<AccentStar>(FeatureCode::AStar); }
    std::optional<Trinary> cp() const { return as<Trinary>(FeatureCode::CP); }
    std::optional<Trinary> cs() const { return as<Trinary>(FeatureCode::CS); }
    std::optional<PrecedingOrtho> op() const { return as<PrecedingOrtho>(FeatureCode::OP); }
    std::optional<Trinary> op_star() const { return as<Trinary>(FeatureCode::OPStar); }
    std::optional<SucceedingOrtho> os() const { return as<SucceedingOrtho>(FeatureCode::OS); }
    std::optional<Trinary> os_star() const { return as<Trinary>(FeatureCode::OSStar); }
    std::optional<PartOfSpeech> pos() const { return as<PartOfSpeech>(FeatureCode::POS); }
    std::optional<CueToken> token() const { return as<CueToken>(FeatureCode::T); }

    std::optional<JudgeLabel> judge1() const { return judge1_; }
    std::optional<JudgeLabel> judge2() const { return judge2_; }

    void set_judges(JudgeLabel j1, JudgeLabel j2) {
        judge1_ = j1;
        judge2_ = j2;
        class_ = derive_class(j1, j2);
    }

    void clear_judges() {
        judge1_.reset();
        judge2_.reset();
        class_ = ClassLabel::Unknown;
    }

    ClassLabel class_label() const { return class_; }

    // Fills A*, O-P*, O-S* from their raw sources where present.
    void derive_features() {
        if (auto a = accent())
            set(FeatureCode::AStar, static_cast<int>(derive_abstract_accent(*a)));
        if (auto o = op())
            set(FeatureCode::OPStar, static_cast<int>(derive_abstract_orthography(*o)));
        if (auto o = os())
            set(FeatureCode::OSStar, static_cast<int>(derive_abstract_orthography(*o)));
    }

    bool operator==(const Example& other) const {
        return values_ == other.values_ && judge1_ == other.judge1_ &&
               judge2_ == other.judge2_ && class_ == other.class_;
    }
    bool operator!=(const Example& other) const { return !(*this == other); }

private:
    template <typename E>
    std::optional<E> as(FeatureCode code) const {
        auto v = value(code);
        if (!v) return std::nullopt;
        return static_cast<E>(*v);
    }

    static constexpr std::int16_t kAbsent = -1;

    std::array<std::int16_t, kFeatureCount> values_;
    std::optional<JudgeLabel> judge1_;
    std::optional<JudgeLabel> judge2_;
    ClassLabel class_ = ClassLabel::Unknown;
};

// Cross-field invariants, checked over whatever slots are present:
//  - a position never exceeds its phrase's length,
//  - composition only implies an intermediate phrase of length 1,
//  - the untranscribed textual features are NA all together or not at all,
//  - derived slots agree with their raw sources.
// Throws DataError naming the offending column.
inline void validate_example(const Example& e) {
    if (e.pp() && e.pl() && *e.pp() > *e.pl())
        throw DataError("position exceeds length (P-P > P-L)", 0, "P-P");
    if (e.ip() && e.il() && *e.ip() > *e.il())
        throw DataError("position exceeds length (I-P > I-L)", 0, "I-P");
    if (e.ic() && e.il() && *e.ic() == PhraseComposition::Only && *e.il() != 1)
        throw DataError("I-C = only requires I-L = 1", 0, "I-C");

    // NA marks a missing transcription, which removes every textual feature
    // at once; partially-NA rows are malformed.
    bool any_na = false;
    bool any_value = false;
    auto note = [&](bool present, bool na) {
        if (!present) return;
        (na ? any_na : any_value) = true;
    };
    note(e.cp().has_value(), e.cp() == Trinary::NA);
    note(e.cs().has_value(), e.cs() == Trinary::NA);
    note(e.op().has_value(), e.op() == PrecedingOrtho::NA);
    note(e.op_star().has_value(), e.op_star() == Trinary::NA);
    note(e.os().has_value(), e.os() == SucceedingOrtho::NA);
    note(e.os_star().has_value(), e.os_star() == Trinary::NA);
    note(e.pos().has_value(), e.pos() == PartOfSpeech::NA);
    if (any_na && any_value)
        throw DataError("textual features must be NA all together", 0, "O-P");

    if (e.accent() && e.accent_star() &&
        *e.accent_star() != derive_abstract_accent(*e.accent()))
        throw DataError("A* disagrees with A", 0, "A*");
    if (e.op() && e.op_star() &&
        *e.op_star() != derive_abstract_orthography(*e.op()))
        throw DataError("O-P* disagrees with O-P", 0, "O-P*");
    if (e.os() && e.os_star() &&
        *e.os_star() != derive_abstract_orthography(*e.os()))
        throw DataError("O-S* disagrees with O-S", 0, "O-S*");
}

}  // namespace cuephrase
