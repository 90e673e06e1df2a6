#pragma once

#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cuephrase/dtree.hpp"
#include "cuephrase/rules.hpp"

namespace cuephrase {

// Text model formats follow the published figure style. Trees are one node
// per line with two-space indentation:
//
//     if P-P <= 1 then discourse
//     elseif P-P > 1 then
//       if I-L <= 1 then discourse
//       elseif I-L > 1 then sentential
//
// Rulesets are one rule per line with a closing default:
//
//     if (A = deaccented) ∧ (T = say) then discourse
//     default is on sentential
//
// Adjacent >= / <= tests on one numeric feature render as an interval
// ("4 <= P-P <= 6"). Both serializations round-trip byte-identically; the
// JSON forms additionally carry supports, accuracies and coverage.

namespace detail {

inline constexpr std::string_view kConjunction = " ∧ ";  // " ∧ "

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::size_t indent_of(std::string_view line) {
    std::size_t n = 0;
    while (n < line.size() && line[n] == ' ') ++n;
    return n;
}

inline std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < text.size()) lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    return lines;
}

}  // namespace detail

// -- Decision tree text form -------------------------------------------------

namespace detail {

inline std::string branch_condition(const dtree::TreeNode& node,
                                    const dtree::TreeNode::Branch& b) {
    std::string code(feature_name(node.feature));
    if (node.threshold_test) {
        if (b.side == dtree::Side::Le)
            return code + " <= " + std::to_string(node.threshold);
        return code + " > " + std::to_string(node.threshold);
    }
    if (b.values.size() == 1) return code + " = " + value_token(node.feature, b.values[0]);
    std::string out = code + " in {";
    for (std::size_t i = 0; i < b.values.size(); ++i) {
        if (i) out += ", ";
        out += value_token(node.feature, b.values[i]);
    }
    return out + "}";
}

inline void write_tree_node(std::string& out, const dtree::TreeNode& node,
                            std::size_t depth) {
    const std::string indent(depth * 2, ' ');
    for (std::size_t i = 0; i < node.branches.size(); ++i) {
        const auto& b = node.branches[i];
        out += indent;
        out += i == 0 ? "if " : "elseif ";
        out += branch_condition(node, b);
        out += " then";
        if (b.child->leaf) {
            out += ' ';
            out += std::string(class_name(b.child->leaf_class));
            out += '\n';
        } else {
            out += '\n';
            write_tree_node(out, *b.child, depth + 1);
        }
    }
}

}  // namespace detail

inline std::string serialize_tree_text(const dtree::TreeNode& t) {
    if (t.leaf) return std::string(class_name(t.leaf_class)) + "\n";
    std::string out;
    detail::write_tree_node(out, t, 0);
    return out;
}

namespace detail {

struct ParsedCondition {
    FeatureCode feature;
    bool threshold_test;
    int threshold;
    dtree::Side side;
    std::vector<int> values;
};

inline ParsedCondition parse_condition(std::string_view cond, std::size_t line_no) {
    auto fail = [&](const std::string& msg) -> ParsedCondition {
        throw DataError(msg, line_no, "");
    };
    for (const std::string_view op : {" <= ", " > ", " in {", " = "}) {
        const std::size_t at = cond.find(op);
        if (at == std::string_view::npos) continue;
        const std::string_view code_text = trim(cond.substr(0, at));
        const auto code = feature_from_name(code_text);
        if (!code) return fail("unknown feature '" + std::string(code_text) + "'");
        std::string_view rest = cond.substr(at + op.size());
        ParsedCondition p{};
        p.feature = *code;
        if (op == " <= " || op == " > ") {
            if (!is_numeric_feature(*code))
                return fail("threshold test on symbolic feature");
            const auto v = parse_value(*code, trim(rest));
            if (!v) return fail("bad threshold '" + std::string(rest) + "'");
            p.threshold_test = true;
            p.threshold = *v;
            p.side = op == " <= " ? dtree::Side::Le : dtree::Side::Gt;
            return p;
        }
        if (is_numeric_feature(*code)) return fail("value test on numeric feature");
        p.threshold_test = false;
        if (op == " = ") {
            const auto v = parse_value(*code, trim(rest));
            if (!v) return fail("value '" + std::string(rest) + "' outside domain");
            p.values = {*v};
            return p;
        }
        // value group: "CODE in {a, b}"
        if (rest.empty() || rest.back() != '}') return fail("unterminated value group");
        rest.remove_suffix(1);
        while (!rest.empty()) {
            const std::size_t comma = rest.find(',');
            const std::string_view tok =
                trim(comma == std::string_view::npos ? rest : rest.substr(0, comma));
            const auto v = parse_value(*code, tok);
            if (!v) return fail("value '" + std::string(tok) + "' outside domain");
            p.values.push_back(*v);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (p.values.empty()) return fail("empty value group");
        return p;
    }
    return fail("unparseable condition '" + std::string(cond) + "'");
}

inline std::unique_ptr<dtree::TreeNode> parse_tree_node(
    const std::vector<std::string>& lines, std::size_t& pos, std::size_t indent) {
    auto node = std::make_unique<dtree::TreeNode>();
    node->leaf = false;
    bool first = true;

    while (pos < lines.size()) {
        const std::string& raw = lines[pos];
        if (indent_of(raw) != indent) break;
        std::string_view line = trim(raw);
        const std::string_view keyword = first ? "if " : "elseif ";
        if (!line.starts_with(keyword)) {
            if (first) throw DataError("expected 'if'", pos + 1, "");
            break;
        }
        line.remove_prefix(keyword.size());

        const std::size_t then_at = line.rfind(" then");
        if (then_at == std::string_view::npos)
            throw DataError("missing 'then'", pos + 1, "");
        const std::string_view cond_text = line.substr(0, then_at);
        const std::string_view tail = trim(line.substr(then_at + 5));

        const ParsedCondition cond = parse_condition(cond_text, pos + 1);
        if (first) {
            node->feature = cond.feature;
            node->threshold_test = cond.threshold_test;
            node->threshold = cond.threshold;
        } else {
            if (cond.feature != node->feature || cond.threshold_test != node->threshold_test)
                throw DataError("branch tests a different feature", pos + 1, "");
            if (cond.threshold_test && cond.threshold != node->threshold)
                throw DataError("branch threshold mismatch", pos + 1, "");
        }

        dtree::TreeNode::Branch branch;
        branch.side = cond.side;
        branch.values = cond.values;
        ++pos;
        if (tail.empty()) {
            branch.child = parse_tree_node(lines, pos, indent + 2);
        } else {
            const auto cls = class_from_name(tail);
            if (!cls) throw DataError("unknown class '" + std::string(tail) + "'", pos, "");
            auto leaf = std::make_unique<dtree::TreeNode>();
            leaf->leaf = true;
            leaf->leaf_class = *cls;
            branch.child = std::move(leaf);
        }
        node->branches.push_back(std::move(branch));
        first = false;
    }

    if (node->branches.empty())
        throw DataError("expected a subtree", pos + 1, "");
    if (node->threshold_test && node->branches.size() != 2)
        throw DataError("threshold test requires exactly two branches", pos, "");
    return node;
}

}  // namespace detail

inline std::unique_ptr<dtree::TreeNode> parse_tree_text(std::string_view text) {
    const std::vector<std::string> lines = detail::split_lines(text);
    if (lines.empty()) throw DataError("empty tree");
    if (auto cls = class_from_name(detail::trim(lines[0]))) {
        if (lines.size() > 1) throw DataError("trailing lines after leaf", 2, "");
        auto leaf = std::make_unique<dtree::TreeNode>();
        leaf->leaf = true;
        leaf->leaf_class = *cls;
        return leaf;
    }
    std::size_t pos = 0;
    auto node = detail::parse_tree_node(lines, pos, 0);
    if (pos != lines.size()) throw DataError("trailing lines after tree", pos + 1, "");
    return node;
}

// -- Ruleset text form --------------------------------------------------------

namespace detail {

inline std::string render_test(const rules::Test& t) {
    std::string code(feature_name(t.feature));
    switch (t.op) {
        case rules::TestOp::Eq: return code + " = " + value_token(t.feature, t.value);
        case rules::TestOp::Neq: return code + " != " + value_token(t.feature, t.value);
        case rules::TestOp::Le: return code + " <= " + std::to_string(t.value);
        default: return code + " >= " + std::to_string(t.value);
    }
}

inline std::vector<std::string> render_units(const std::vector<rules::Test>& tests) {
    std::vector<std::string> units;
    for (std::size_t i = 0; i < tests.size(); ++i) {
        const rules::Test& t = tests[i];
        if (t.op == rules::TestOp::Ge && i + 1 < tests.size()) {
            const rules::Test& next = tests[i + 1];
            if (next.feature == t.feature && next.op == rules::TestOp::Le) {
                units.push_back(std::to_string(t.value) + " <= " +
                                std::string(feature_name(t.feature)) + " <= " +
                                std::to_string(next.value));
                ++i;
                continue;
            }
        }
        units.push_back(render_test(t));
    }
    return units;
}

}  // namespace detail

inline std::string serialize_ruleset_text(const rules::RuleSet& rs) {
    std::string out;
    for (const rules::Rule& r : rs.rules) {
        out += "if ";
        const std::vector<std::string> units = detail::render_units(r.tests);
        if (units.empty()) {
            out += "true";
        } else if (units.size() == 1) {
            out += units[0];
        } else {
            for (std::size_t i = 0; i < units.size(); ++i) {
                if (i) out += detail::kConjunction;
                out += '(' + units[i] + ')';
            }
        }
        out += " then ";
        out += std::string(class_name(r.cls));
        out += '\n';
    }
    out += "default is on ";
    out += std::string(class_name(rs.default_class));
    out += '\n';
    return out;
}

namespace detail {

inline void parse_rule_unit(std::string_view unit, std::vector<rules::Test>& tests,
                            std::size_t line_no) {
    unit = trim(unit);
    if (!unit.empty() && unit.front() == '(' && unit.back() == ')')
        unit = trim(unit.substr(1, unit.size() - 2));
    auto fail = [&](const std::string& msg) {
        throw DataError(msg, line_no, "");
    };

    // Interval forms: "a <= F <= b" and "b >= F >= a".
    for (const std::string_view op : {" <= ", " >= "}) {
        const std::size_t first = unit.find(op);
        if (first == std::string_view::npos) continue;
        const std::size_t second = unit.find(op, first + op.size());
        if (second == std::string_view::npos) continue;
        const std::string_view lo_text = trim(unit.substr(0, first));
        const std::string_view code_text =
            trim(unit.substr(first + op.size(), second - first - op.size()));
        const std::string_view hi_text = trim(unit.substr(second + op.size()));
        const auto code = feature_from_name(code_text);
        if (!code || !is_numeric_feature(*code))
            fail("interval test requires a numeric feature");
        const auto a = parse_value(*code, lo_text);
        const auto b = parse_value(*code, hi_text);
        if (!a || !b) fail("bad interval bound");
        if (op == " <= ") {
            tests.push_back({*code, rules::TestOp::Ge, *a});
            tests.push_back({*code, rules::TestOp::Le, *b});
        } else {
            tests.push_back({*code, rules::TestOp::Ge, *b});
            tests.push_back({*code, rules::TestOp::Le, *a});
        }
        return;
    }

    struct OpSpelling {
        std::string_view text;
        rules::TestOp op;
    };
    for (const OpSpelling& s :
         {OpSpelling{" != ", rules::TestOp::Neq}, OpSpelling{" <= ", rules::TestOp::Le},
          OpSpelling{" >= ", rules::TestOp::Ge}, OpSpelling{" = ", rules::TestOp::Eq}}) {
        const std::size_t at = unit.find(s.text);
        if (at == std::string_view::npos) continue;
        const std::string_view code_text = trim(unit.substr(0, at));
        const std::string_view value_text = trim(unit.substr(at + s.text.size()));
        const auto code = feature_from_name(code_text);
        if (!code) fail("unknown feature '" + std::string(code_text) + "'");
        const bool numeric_op = s.op == rules::TestOp::Le || s.op == rules::TestOp::Ge;
        if (numeric_op != is_numeric_feature(*code))
            fail("operator does not fit the feature kind");
        const auto v = parse_value(*code, value_text);
        if (!v) fail("value '" + std::string(value_text) + "' outside domain");
        tests.push_back({*code, s.op, *v});
        return;
    }
    fail("unparseable test '" + std::string(unit) + "'");
}

}  // namespace detail

inline rules::RuleSet parse_ruleset_text(std::string_view text) {
    const std::vector<std::string> lines = detail::split_lines(text);
    if (lines.empty()) throw DataError("empty ruleset");

    rules::RuleSet rs;
    bool saw_default = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view line = detail::trim(lines[i]);
        if (line.empty()) continue;
        if (line.starts_with("default is on ")) {
            const auto cls = class_from_name(detail::trim(line.substr(14)));
            if (!cls) throw DataError("unknown default class", i + 1, "");
            rs.default_class = *cls;
            saw_default = true;
            if (i + 1 != lines.size())
                throw DataError("default must be the last line", i + 2, "");
            break;
        }
        if (!line.starts_with("if "))
            throw DataError("expected 'if' or 'default is on'", i + 1, "");
        line.remove_prefix(3);
        const std::size_t then_at = line.rfind(" then ");
        if (then_at == std::string_view::npos)
            throw DataError("missing 'then'", i + 1, "");
        const std::string_view antecedent = detail::trim(line.substr(0, then_at));
        const auto cls = class_from_name(detail::trim(line.substr(then_at + 6)));
        if (!cls) throw DataError("unknown class", i + 1, "");

        rules::Rule r;
        r.cls = *cls;
        if (antecedent != "true") {
            std::string_view rest = antecedent;
            while (true) {
                const std::size_t sep = rest.find(detail::kConjunction);
                if (sep == std::string_view::npos) {
                    detail::parse_rule_unit(rest, r.tests, i + 1);
                    break;
                }
                detail::parse_rule_unit(rest.substr(0, sep), r.tests, i + 1);
                rest.remove_prefix(sep + detail::kConjunction.size());
            }
        }
        rs.rules.push_back(std::move(r));
    }
    if (!saw_default) throw DataError("ruleset has no default line");

    rs.num_classes = 2;
    if (rs.default_class == ClassLabel::Unknown) rs.num_classes = 3;
    for (const rules::Rule& r : rs.rules)
        if (r.cls == ClassLabel::Unknown) rs.num_classes = 3;
    return rs;
}

// -- JSON forms ---------------------------------------------------------------

namespace detail {

inline nlohmann::json tree_node_to_json(const dtree::TreeNode& n) {
    nlohmann::json j;
    if (n.leaf) {
        j["class"] = std::string(class_name(n.leaf_class));
        nlohmann::json support;
        for (int c = 0; c < kNumClassLabels; ++c)
            support[std::string(class_name(static_cast<ClassLabel>(c)))] =
                n.support[static_cast<std::size_t>(c)];
        j["support"] = support;
        return j;
    }
    j["feature"] = std::string(feature_name(n.feature));
    if (n.threshold_test) j["threshold"] = n.threshold;
    nlohmann::json branches = nlohmann::json::array();
    for (const auto& b : n.branches) {
        nlohmann::json jb;
        if (n.threshold_test) {
            jb["side"] = b.side == dtree::Side::Le ? "le" : "gt";
        } else {
            nlohmann::json values = nlohmann::json::array();
            for (int v : b.values) values.push_back(value_token(n.feature, v));
            jb["values"] = values;
        }
        jb["node"] = tree_node_to_json(*b.child);
        branches.push_back(std::move(jb));
    }
    j["branches"] = std::move(branches);
    return j;
}

inline std::unique_ptr<dtree::TreeNode> tree_node_from_json(const nlohmann::json& j) {
    auto n = std::make_unique<dtree::TreeNode>();
    if (j.contains("class")) {
        n->leaf = true;
        const auto cls = class_from_name(j.at("class").get<std::string>());
        if (!cls) throw DataError("bad class in tree json");
        n->leaf_class = *cls;
        if (j.contains("support")) {
            for (int c = 0; c < kNumClassLabels; ++c) {
                const std::string key(class_name(static_cast<ClassLabel>(c)));
                if (j.at("support").contains(key))
                    n->support[static_cast<std::size_t>(c)] = j.at("support").at(key).get<int>();
            }
        }
        return n;
    }
    n->leaf = false;
    const auto code = feature_from_name(j.at("feature").get<std::string>());
    if (!code) throw DataError("bad feature in tree json");
    n->feature = *code;
    n->threshold_test = j.contains("threshold");
    if (n->threshold_test) n->threshold = j.at("threshold").get<int>();
    for (const nlohmann::json& jb : j.at("branches")) {
        dtree::TreeNode::Branch b;
        if (n->threshold_test) {
            b.side = jb.at("side").get<std::string>() == "le" ? dtree::Side::Le
                                                              : dtree::Side::Gt;
        } else {
            for (const nlohmann::json& jv : jb.at("values")) {
                const auto v = parse_value(n->feature, jv.get<std::string>());
                if (!v) throw DataError("bad value in tree json");
                b.values.push_back(*v);
            }
        }
        b.child = tree_node_from_json(jb.at("node"));
        n->branches.push_back(std::move(b));
    }
    if (n->branches.empty()) throw DataError("test node with no branches");
    return n;
}

inline std::string_view test_op_name(rules::TestOp op) {
    switch (op) {
        case rules::TestOp::Eq: return "eq";
        case rules::TestOp::Neq: return "neq";
        case rules::TestOp::Le: return "le";
        default: return "ge";
    }
}

inline rules::TestOp test_op_from_name(const std::string& s) {
    if (s == "eq") return rules::TestOp::Eq;
    if (s == "neq") return rules::TestOp::Neq;
    if (s == "le") return rules::TestOp::Le;
    if (s == "ge") return rules::TestOp::Ge;
    throw DataError("bad test op '" + s + "'");
}

}  // namespace detail

inline nlohmann::json tree_to_json(const dtree::TreeNode& t) {
    nlohmann::json j;
    j["model"] = "tree";
    j["root"] = detail::tree_node_to_json(t);
    return j;
}

inline std::unique_ptr<dtree::TreeNode> tree_from_json(const nlohmann::json& j) {
    if (j.value("model", "") != "tree") throw DataError("json is not a tree model");
    return detail::tree_node_from_json(j.at("root"));
}

inline nlohmann::json ruleset_to_json(const rules::RuleSet& rs) {
    nlohmann::json j;
    j["model"] = "ruleset";
    j["default"] = std::string(class_name(rs.default_class));
    j["num_classes"] = rs.num_classes;
    nlohmann::json jrules = nlohmann::json::array();
    for (const rules::Rule& r : rs.rules) {
        nlohmann::json jr;
        jr["class"] = std::string(class_name(r.cls));
        jr["accuracy"] = r.accuracy;
        jr["coverage"] = r.coverage;
        nlohmann::json jtests = nlohmann::json::array();
        for (const rules::Test& t : r.tests) {
            nlohmann::json jt;
            jt["feature"] = std::string(feature_name(t.feature));
            jt["op"] = std::string(detail::test_op_name(t.op));
            if (is_numeric_feature(t.feature))
                jt["value"] = t.value;
            else
                jt["value"] = value_token(t.feature, t.value);
            jtests.push_back(std::move(jt));
        }
        jr["tests"] = std::move(jtests);
        jrules.push_back(std::move(jr));
    }
    j["rules"] = std::move(jrules);
    return j;
}

inline rules::RuleSet ruleset_from_json(const nlohmann::json& j) {
    if (j.value("model", "") != "ruleset") throw DataError("json is not a ruleset model");
    rules::RuleSet rs;
    const auto def = class_from_name(j.at("default").get<std::string>());
    if (!def) throw DataError("bad default class in ruleset json");
    rs.default_class = *def;
    rs.num_classes = j.value("num_classes", 2);
    for (const nlohmann::json& jr : j.at("rules")) {
        rules::Rule r;
        const auto cls = class_from_name(jr.at("class").get<std::string>());
        if (!cls) throw DataError("bad class in ruleset json");
        r.cls = *cls;
        r.accuracy = jr.value("accuracy", 0.0);
        r.coverage = jr.value("coverage", 0);
        for (const nlohmann::json& jt : jr.at("tests")) {
            rules::Test t;
            const auto code = feature_from_name(jt.at("feature").get<std::string>());
            if (!code) throw DataError("bad feature in ruleset json");
            t.feature = *code;
            t.op = detail::test_op_from_name(jt.at("op").get<std::string>());
            if (is_numeric_feature(*code)) {
                t.value = jt.at("value").get<int>();
            } else {
                const auto v = parse_value(*code, jt.at("value").get<std::string>());
                if (!v) throw DataError("bad value in ruleset json");
                t.value = *v;
            }
            r.tests.push_back(t);
        }
        rs.rules.push_back(std::move(r));
    }
    return rs;
}

// -- Model wrapper ------------------------------------------------------------

// A stored classification model: a decision tree or an ordered ruleset.
// (The manual models and the default-class baseline export as trees.)
class Model {
public:
    explicit Model(std::unique_ptr<dtree::TreeNode> tree) : value_(std::move(tree)) {}
    explicit Model(rules::RuleSet rs) : value_(std::move(rs)) {}

    bool is_tree() const {
        return std::holds_alternative<std::unique_ptr<dtree::TreeNode>>(value_);
    }
    const dtree::TreeNode& tree() const {
        return *std::get<std::unique_ptr<dtree::TreeNode>>(value_);
    }
    const rules::RuleSet& ruleset() const { return std::get<rules::RuleSet>(value_); }

    ClassLabel predict(const Example& e) const {
        if (is_tree()) return dtree::predict(tree(), e);
        return rules::predict(ruleset(), e);
    }

    std::string to_text() const {
        return is_tree() ? serialize_tree_text(tree()) : serialize_ruleset_text(ruleset());
    }

    nlohmann::json to_json() const {
        return is_tree() ? tree_to_json(tree()) : ruleset_to_json(ruleset());
    }

private:
    std::variant<std::unique_ptr<dtree::TreeNode>, rules::RuleSet> value_;
};

// Detects the serialization: JSON when the text opens with '{', otherwise a
// text model, a ruleset if and only if it closes with a default line.
inline Model parse_model(std::string_view text) {
    std::string_view t = text;
    while (!t.empty() && (t.front() == ' ' || t.front() == '\n' || t.front() == '\r' ||
                          t.front() == '\t'))
        t.remove_prefix(1);
    if (t.empty()) throw DataError("empty model");
    if (t.front() == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(t);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string("malformed json model: ") + e.what());
        }
        if (j.value("model", "") == "tree") return Model(tree_from_json(j));
        if (j.value("model", "") == "ruleset") return Model(ruleset_from_json(j));
        throw DataError("json model of unknown kind");
    }
    const std::vector<std::string> lines = detail::split_lines(t);
    for (const std::string& line : lines)
        if (detail::trim(line).starts_with("default is on "))
            return Model(parse_ruleset_text(t));
    return Model(parse_tree_text(t));
}

}  // namespace cuephrase
