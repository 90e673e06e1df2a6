#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cuephrase {

// The fixed feature vocabulary: four prosodic integers, prosodic and textual
// symbolic features (including the abstracted A*, O-P*, O-S*), part of
// speech, and the lexical token.
enum class FeatureCode : int {
    PL = 0,   // length of intonational phrase
    PP,       // position in intonational phrase
    IL,       // length of intermediate phrase
    IP,       // position in intermediate phrase
    IC,       // composition of intermediate phrase
    A,        // accent
    AStar,    // accent*
    CP,       // preceding cue phrase
    CS,       // succeeding cue phrase
    OP,       // preceding orthography
    OPStar,   // preceding orthography*
    OS,       // succeeding orthography
    OSStar,   // succeeding orthography*
    POS,      // part of speech
    T,        // token (lexical identity of the cue phrase)
};

inline constexpr int kFeatureCount = 15;

inline constexpr std::array<FeatureCode, kFeatureCount> kAllFeatures = {
    FeatureCode::PL, FeatureCode::PP,     FeatureCode::IL, FeatureCode::IP,
    FeatureCode::IC, FeatureCode::A,      FeatureCode::AStar,
    FeatureCode::CP, FeatureCode::CS,     FeatureCode::OP, FeatureCode::OPStar,
    FeatureCode::OS, FeatureCode::OSStar, FeatureCode::POS, FeatureCode::T};

enum class JudgeLabel : int { D = 0, S, Amb };

enum class ClassLabel : int { Discourse = 0, Sentential, Unknown };

inline constexpr int kNumClassLabels = 3;

enum class PhraseComposition : int { Only = 0, OnlyCuePhrases, Other };

enum class Accent : int {
    HStar = 0,
    LStar,
    LStarH,   // L*+H
    LHStar,   // L+H*
    HStarL,   // H*+L
    HLStar,   // H+L*
    Deaccented,
    Ambiguous,
};

enum class AccentStar : int { HStar = 0, LStar, Complex, Deaccented, Ambiguous };

// C-P, C-S, O-P*, O-S*.
enum class Trinary : int { True = 0, False, NA };

enum class PrecedingOrtho : int { Comma = 0, Dash, Period, Paragraph, False, NA };

// O-S has no paragraph value.
enum class SucceedingOrtho : int { Comma = 0, Dash, Period, False, NA };

enum class PartOfSpeech : int {
    Article = 0,
    CoordinatingConjunction,
    CardinalNumeral,
    SubordinatingConjunction,
    Preposition,
    Adjective,
    SingularOrMassNoun,
    SingularProperNoun,
    Intensifier,
    Adverb,
    VerbBaseForm,
    NA,
};

// The 34 single-word cue phrases of the multiple cue phrase corpus.
inline constexpr std::array<std::string_view, 34> kCueTokens = {
    "actually", "also",    "although",  "and",     "basically", "because",
    "but",      "essentially", "except", "finally", "first",     "further",
    "generally", "however", "indeed",   "like",    "look",      "next",
    "no",       "now",     "ok",        "or",      "otherwise", "right",
    "say",      "second",  "see",       "similarly", "since",   "so",
    "then",     "therefore", "well",    "yes"};

enum class CueToken : int {};  // index into kCueTokens

inline constexpr int kCueTokenCount = static_cast<int>(kCueTokens.size());

inline bool is_conjunct(CueToken t) {
    const std::string_view name = kCueTokens[static_cast<std::size_t>(t)];
    return name == "and" || name == "or" || name == "but";
}

inline std::string_view feature_name(FeatureCode code) {
    static constexpr std::array<std::string_view, kFeatureCount> names = {
        "P-L", "P-P", "I-L", "I-P", "I-C", "A", "A*", "C-P",
        "C-S", "O-P", "O-P*", "O-S", "O-S*", "POS", "T"};
    return names[static_cast<std::size_t>(code)];
}

inline std::optional<FeatureCode> feature_from_name(std::string_view name) {
    for (FeatureCode code : kAllFeatures)
        if (feature_name(code) == name) return code;
    return std::nullopt;
}

// The raw feature a derived (starred) feature abstracts, if any.
inline std::optional<FeatureCode> derived_source(FeatureCode code) {
    switch (code) {
        case FeatureCode::AStar: return FeatureCode::A;
        case FeatureCode::OPStar: return FeatureCode::OP;
        case FeatureCode::OSStar: return FeatureCode::OS;
        default: return std::nullopt;
    }
}

inline bool is_numeric_feature(FeatureCode code) {
    switch (code) {
        case FeatureCode::PL:
        case FeatureCode::PP:
        case FeatureCode::IL:
        case FeatureCode::IP:
            return true;
        default:
            return false;
    }
}

// Size of a symbolic feature's declared value domain (0 for numeric features).
inline int domain_size(FeatureCode code) {
    switch (code) {
        case FeatureCode::IC: return 3;
        case FeatureCode::A: return 8;
        case FeatureCode::AStar: return 5;
        case FeatureCode::CP:
        case FeatureCode::CS:
        case FeatureCode::OPStar:
        case FeatureCode::OSStar: return 3;
        case FeatureCode::OP: return 6;
        case FeatureCode::OS: return 5;
        case FeatureCode::POS: return 12;
        case FeatureCode::T: return kCueTokenCount;
        default: return 0;
    }
}

namespace detail {

inline constexpr std::array<std::string_view, 3> kIcTokens = {
    "only", "only_cue_phrases", "other"};
inline constexpr std::array<std::string_view, 8> kAccentTokens = {
    "H*", "L*", "L*+H", "L+H*", "H*+L", "H+L*", "deaccented", "ambiguous"};
inline constexpr std::array<std::string_view, 5> kAccentStarTokens = {
    "H*", "L*", "complex", "deaccented", "ambiguous"};
inline constexpr std::array<std::string_view, 3> kTrinaryTokens = {
    "true", "false", "NA"};
inline constexpr std::array<std::string_view, 6> kPrecedingOrthoTokens = {
    "comma", "dash", "period", "paragraph", "false", "NA"};
inline constexpr std::array<std::string_view, 5> kSucceedingOrthoTokens = {
    "comma", "dash", "period", "false", "NA"};
inline constexpr std::array<std::string_view, 12> kPosTokens = {
    "article",
    "coordinating_conjunction",
    "cardinal_numeral",
    "subordinating_conjunction",
    "preposition",
    "adjective",
    "singular_or_mass_noun",
    "singular_proper_noun",
    "intensifier",
    "adverb",
    "verb_base_form",
    "NA"};

inline const std::string_view* domain_tokens(FeatureCode code, int& size) {
    switch (code) {
        case FeatureCode::IC: size = 3; return kIcTokens.data();
        case FeatureCode::A: size = 8; return kAccentTokens.data();
        case FeatureCode::AStar: size = 5; return kAccentStarTokens.data();
        case FeatureCode::CP:
        case FeatureCode::CS:
        case FeatureCode::OPStar:
        case FeatureCode::OSStar: size = 3; return kTrinaryTokens.data();
        case FeatureCode::OP: size = 6; return kPrecedingOrthoTokens.data();
        case FeatureCode::OS: size = 5; return kSucceedingOrthoTokens.data();
        case FeatureCode::POS: size = 12; return kPosTokens.data();
        case FeatureCode::T:
            size = kCueTokenCount;
            return kCueTokens.data();
        default: size = 0; return nullptr;
    }
}

}  // namespace detail

// Canonical spelling of a symbolic value (used in model files); numeric
// features render their integer value directly.
inline std::string value_token(FeatureCode code, int value) {
    if (is_numeric_feature(code)) return std::to_string(value);
    int size = 0;
    const std::string_view* tokens = detail::domain_tokens(code, size);
    if (value < 0 || value >= size) return "<invalid>";
    return std::string(tokens[value]);
}

// Spelling used in corpus files: booleans abbreviate to t/f, matching the
// figure-style tabular layout.
inline std::string corpus_value_token(FeatureCode code, int value) {
    switch (code) {
        case FeatureCode::CP:
        case FeatureCode::CS:
        case FeatureCode::OPStar:
        case FeatureCode::OSStar:
            if (value == static_cast<int>(Trinary::True)) return "t";
            if (value == static_cast<int>(Trinary::False)) return "f";
            return "NA";
        case FeatureCode::OP:
            if (value == static_cast<int>(PrecedingOrtho::False)) return "f";
            return value_token(code, value);
        case FeatureCode::OS:
            if (value == static_cast<int>(SucceedingOrtho::False)) return "f";
            return value_token(code, value);
        default:
            return value_token(code, value);
    }
}

// Parses a feature value. Accepts the canonical spellings plus the
// abbreviations that appear in the corpus figures (t/f, par., adv.).
// Returns the value's ordinal, or nullopt when the token is not in the
// feature's domain.
inline std::optional<int> parse_value(FeatureCode code, std::string_view token) {
    if (is_numeric_feature(code)) {
        if (token.empty()) return std::nullopt;
        long v = 0;
        for (char c : token) {
            if (c < '0' || c > '9') return std::nullopt;
            v = v * 10 + (c - '0');
            if (v > 1000000) return std::nullopt;
        }
        if (v < 1) return std::nullopt;
        return static_cast<int>(v);
    }

    std::string_view canon = token;
    switch (code) {
        case FeatureCode::CP:
        case FeatureCode::CS:
        case FeatureCode::OPStar:
        case FeatureCode::OSStar:
            if (token == "t") canon = "true";
            if (token == "f") canon = "false";
            break;
        case FeatureCode::OP:
            if (token == "f") canon = "false";
            if (token == "par.") canon = "paragraph";
            break;
        case FeatureCode::OS:
            if (token == "f") canon = "false";
            break;
        case FeatureCode::POS:
            if (token == "adv.") canon = "adverb";
            break;
        default:
            break;
    }

    int size = 0;
    const std::string_view* tokens = detail::domain_tokens(code, size);
    for (int i = 0; i < size; ++i)
        if (tokens[i] == canon) return i;
    return std::nullopt;
}

inline std::string_view class_name(ClassLabel c) {
    switch (c) {
        case ClassLabel::Discourse: return "discourse";
        case ClassLabel::Sentential: return "sentential";
        default: return "unknown";
    }
}

inline std::optional<ClassLabel> class_from_name(std::string_view name) {
    if (name == "discourse") return ClassLabel::Discourse;
    if (name == "sentential") return ClassLabel::Sentential;
    if (name == "unknown") return ClassLabel::Unknown;
    return std::nullopt;
}

inline std::string_view judge_token(JudgeLabel j) {
    switch (j) {
        case JudgeLabel::D: return "D";
        case JudgeLabel::S: return "S";
        default: return "?";
    }
}

inline std::optional<JudgeLabel> parse_judge(std::string_view token) {
    if (token == "D") return JudgeLabel::D;
    if (token == "S") return JudgeLabel::S;
    if (token == "?") return JudgeLabel::Amb;
    return std::nullopt;
}

}  // namespace cuephrase
