#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cuephrase/dataset.hpp"

namespace cuephrase {

// Corpus files are UTF-8, tab-delimited, one header row. The header names a
// subset of the feature codes plus JUDGE1/JUDGE2; derived columns (A*,
// O-P*, O-S*) are accepted and checked against their raw sources when both
// appear. `?` encodes an ambiguous judge label, `NA` a missing textual
// transcription, and t/f are accepted for booleans. Line numbers in errors
// count from the header line (line 1).

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r')
        fields.back().pop_back();
    return fields;
}

}  // namespace detail

inline Dataset parse_corpus(std::istream& in, const std::string& provenance = "") {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty corpus: missing header row");

    struct Column {
        bool is_judge1 = false;
        bool is_judge2 = false;
        FeatureCode code = FeatureCode::PL;
        std::string name;
    };
    std::vector<Column> columns;
    bool saw_judge1 = false, saw_judge2 = false;
    std::vector<bool> saw_feature(kFeatureCount, false);
    for (const std::string& name : detail::split_tabs(line)) {
        Column col;
        col.name = name;
        if (name == "JUDGE1") {
            if (saw_judge1) throw DataError("duplicate column", 1, name);
            col.is_judge1 = saw_judge1 = true;
        } else if (name == "JUDGE2") {
            if (saw_judge2) throw DataError("duplicate column", 1, name);
            col.is_judge2 = saw_judge2 = true;
        } else if (auto code = feature_from_name(name)) {
            if (saw_feature[static_cast<std::size_t>(*code)])
                throw DataError("duplicate column", 1, name);
            saw_feature[static_cast<std::size_t>(*code)] = true;
            col.code = *code;
        } else {
            throw DataError("unknown header code '" + name + "'", 1, name);
        }
        columns.push_back(std::move(col));
    }
    if (saw_judge1 != saw_judge2)
        throw DataError("JUDGE1 and JUDGE2 must appear together", 1, "JUDGE1");

    Dataset d;
    d.provenance = provenance;

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = detail::split_tabs(line);
        if (fields.size() != columns.size())
            throw DataError("expected " + std::to_string(columns.size()) +
                                " fields, found " + std::to_string(fields.size()),
                            row, "");
        Example e;
        std::optional<JudgeLabel> j1, j2;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            const Column& col = columns[i];
            const std::string& field = fields[i];
            if (col.is_judge1 || col.is_judge2) {
                auto j = parse_judge(field);
                if (!j) throw DataError("bad judge label '" + field + "'", row, col.name);
                (col.is_judge1 ? j1 : j2) = *j;
                continue;
            }
            auto v = parse_value(col.code, field);
            if (!v)
                throw DataError("value '" + field + "' outside the domain of " +
                                    col.name,
                                row, col.name);
            e.set(col.code, *v);
        }
        if (j1) e.set_judges(*j1, *j2);
        // Fill the derived slots the file did not provide; provided ones are
        // checked against their raw sources by validate_example below.
        auto fill = [&](FeatureCode raw, FeatureCode derived, auto deriver) {
            if (!saw_feature[static_cast<std::size_t>(derived)] && e.has(raw))
                e.set(derived, static_cast<int>(deriver(e.value_or_throw(raw))));
        };
        fill(FeatureCode::A, FeatureCode::AStar, [](int v) {
            return derive_abstract_accent(static_cast<Accent>(v));
        });
        fill(FeatureCode::OP, FeatureCode::OPStar, [](int v) {
            return derive_abstract_orthography(static_cast<PrecedingOrtho>(v));
        });
        fill(FeatureCode::OS, FeatureCode::OSStar, [](int v) {
            return derive_abstract_orthography(static_cast<SucceedingOrtho>(v));
        });
        try {
            validate_example(e);
        } catch (const DataError& err) {
            throw DataError(err.raw_message(), row, err.column());
        }
        d.examples.push_back(std::move(e));
    }

    // The active set is exactly what the file carried, in canonical feature
    // order; derived values ride along in the examples either way.
    std::vector<FeatureCode> active;
    for (FeatureCode code : kAllFeatures)
        if (saw_feature[static_cast<std::size_t>(code)]) active.push_back(code);
    FeatureSetSpec spec("", active);
    d.active_features = FeatureSetSpec(canonical_set_name(spec), active);
    return d;
}

inline Dataset parse_corpus(const std::string& text, const std::string& provenance = "") {
    std::istringstream in(text);
    return parse_corpus(in, provenance);
}

inline void serialize_corpus(const Dataset& d, std::ostream& out) {
    const std::vector<FeatureCode>& features = d.active_features.features();
    const bool with_judges = !d.examples.empty() && d.examples.front().judge1().has_value();
    for (const Example& e : d.examples)
        if (e.judge1().has_value() != with_judges)
            throw std::invalid_argument(
                "cannot serialize a dataset with mixed judge presence");

    bool first = true;
    for (FeatureCode code : features) {
        if (!first) out << '\t';
        out << feature_name(code);
        first = false;
    }
    if (with_judges) {
        if (!first) out << '\t';
        out << "JUDGE1\tJUDGE2";
    }
    out << '\n';

    for (const Example& e : d.examples) {
        first = true;
        for (FeatureCode code : features) {
            if (!first) out << '\t';
            out << corpus_value_token(code, e.value_or_throw(code));
            first = false;
        }
        if (with_judges) {
            if (!first) out << '\t';
            out << judge_token(*e.judge1()) << '\t' << judge_token(*e.judge2());
        }
        out << '\n';
    }
}

inline std::string serialize_corpus(const Dataset& d) {
    std::ostringstream out;
    serialize_corpus(d, out);
    return out.str();
}

}  // namespace cuephrase
