#pragma once

/// \file io.hpp
/// \brief JSON tree documents, Graphviz export and ASCII mass diagrams.
///
/// Document schema (version "1"):
///
///     { "version": "1", "root": 0,
///       "nodes": [ { "id": 0,
///                    "statements": [ { "var": "O", "val": 1 } ],
///                    "transitions": [ { "p": "1/2", "child": 1 }, ... ] }, ... ] }
///
/// "p" may be a "num/den" string, a decimal string or a JSON number; all
/// are converted exactly. save_json() always writes "num/den" strings.

#include "ptree/cut.hpp"
#include "ptree/tree.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

namespace ptree {

/// The document is well-formed JSON but does not follow the tree schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

inline constexpr std::string_view kSchemaVersion = "1";

namespace detail {

using ojson = nlohmann::ordered_json;

inline Prob prob_from_json(const ojson& p, NodeId node) {
    try {
        if (p.is_string()) return Prob::parse(p.get<std::string>());
        if (p.is_number_unsigned()) return Prob(static_cast<long>(p.get<std::uint64_t>()));
        if (p.is_number_integer()) return Prob(p.get<long>());
        if (p.is_number_float()) return Prob::from_double(p.get<double>());
    } catch (const std::invalid_argument& e) {
        throw SchemaError("node " + std::to_string(node) + ": " + e.what());
    }
    throw SchemaError("node " + std::to_string(node) + ": \"p\" must be a string or a number");
}

inline NodeId id_from_json(const ojson& v, std::string_view what) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        throw SchemaError(std::string(what) + " must be a nonnegative integer");
    return v.get<NodeId>();
}

inline const ojson& member(const ojson& obj, const char* key, std::string_view where) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(std::string(where) + ": missing \"" + key + "\"");
    return *it;
}

}  // namespace detail

/// Parses a tree document without validating the tree it describes.
/// \throws ParseError on malformed JSON, SchemaError on schema violations.
inline ProbabilityTree load_json_unchecked(std::string_view text) {
    detail::ojson doc;
    try {
        doc = detail::ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte > 0 ? e.byte - 1 : 0);
    }
    if (!doc.is_object()) throw SchemaError("document must be a JSON object");
    if (const auto v = doc.find("version"); v != doc.end()) {
        if (!v->is_string() || v->get<std::string>() != kSchemaVersion)
            throw SchemaError("unsupported document version " + v->dump());
    }
    const NodeId root = detail::id_from_json(detail::member(doc, "root", "document"), "\"root\"");
    const auto& node_docs = detail::member(doc, "nodes", "document");
    if (!node_docs.is_array()) throw SchemaError("\"nodes\" must be an array");

    std::vector<Node> nodes;
    nodes.reserve(node_docs.size());
    for (const auto& nd : node_docs) {
        if (!nd.is_object()) throw SchemaError("node records must be objects");
        Node n;
        n.id = detail::id_from_json(detail::member(nd, "id", "node record"), "\"id\"");
        const std::string where = "node " + std::to_string(n.id);
        if (const auto st = nd.find("statements"); st != nd.end()) {
            if (!st->is_array()) throw SchemaError(where + ": \"statements\" must be an array");
            for (const auto& sd : *st) {
                if (!sd.is_object()) throw SchemaError(where + ": statements must be objects");
                const auto& var = detail::member(sd, "var", where);
                const auto& val = detail::member(sd, "val", where);
                if (!var.is_string()) throw SchemaError(where + ": \"var\" must be a string");
                Value value;
                if (val.is_number_integer()) value = val.get<std::int64_t>();
                else if (val.is_string()) value = val.get<std::string>();
                else throw SchemaError(where + ": \"val\" must be an integer or a string");
                n.statements.push_back({var.get<std::string>(), std::move(value)});
            }
        }
        if (const auto tr = nd.find("transitions"); tr != nd.end()) {
            if (!tr->is_array()) throw SchemaError(where + ": \"transitions\" must be an array");
            for (const auto& td : *tr) {
                if (!td.is_object()) throw SchemaError(where + ": transitions must be objects");
                Transition t;
                t.prob = detail::prob_from_json(detail::member(td, "p", where), n.id);
                t.child = detail::id_from_json(detail::member(td, "child", where), "\"child\"");
                n.transitions.push_back(std::move(t));
            }
        }
        nodes.push_back(std::move(n));
    }
    return ProbabilityTree(root, std::move(nodes));
}

/// Parses and validates a tree document.
/// \throws InvalidTreeError carrying the validation report.
inline ProbabilityTree load_json(std::string_view text) {
    ProbabilityTree tree = load_json_unchecked(text);
    require_valid(tree);
    return tree;
}

inline std::string save_json(const ProbabilityTree& tree) {
    detail::ojson doc;
    doc["version"] = kSchemaVersion;
    doc["root"] = tree.root();
    auto& nodes = doc["nodes"] = detail::ojson::array();
    for (const auto& n : tree.nodes()) {
        detail::ojson nd;
        nd["id"] = n.id;
        nd["statements"] = detail::ojson::array();
        for (const auto& s : n.statements) {
            detail::ojson sd;
            sd["var"] = s.variable;
            std::visit([&](const auto& v) { sd["val"] = v; }, s.value);
            nd["statements"].push_back(std::move(sd));
        }
        nd["transitions"] = detail::ojson::array();
        for (const auto& t : n.transitions) {
            detail::ojson td;
            td["p"] = t.prob.str();
            td["child"] = t.child;
            nd["transitions"].push_back(std::move(td));
        }
        nodes.push_back(std::move(nd));
    }
    return doc.dump(2) + "\n";
}

inline std::string save_cut_json(const MinCut& cut) {
    detail::ojson doc;
    doc["true"] = cut.true_set;
    doc["false"] = cut.false_set;
    return doc.dump();
}

// =============================================================================
// Graphviz
// =============================================================================

namespace detail {

inline std::string dot_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

inline std::string node_label(const Node& n) {
    std::string label = std::to_string(n.id) + ":";
    for (std::size_t i = 0; i < n.statements.size(); ++i) label += (i ? ", " : " ") + n.statements[i].str();
    return label;
}

}  // namespace detail

/// Graphviz digraph of the tree. Min-cut true nodes are filled green, false
/// nodes red; critical nodes get a purple outline. Output is deterministic.
inline std::string export_dot(const ProbabilityTree& tree, const std::optional<MinCut>& cut = std::nullopt,
                              const std::optional<CriticalSet>& crit = std::nullopt) {
    std::unordered_set<NodeId> t, f, c;
    if (cut) {
        t.insert(cut->true_set.begin(), cut->true_set.end());
        f.insert(cut->false_set.begin(), cut->false_set.end());
    }
    if (crit) c.insert(crit->nodes.begin(), crit->nodes.end());

    std::ostringstream os;
    os << "digraph ptree {\n";
    os << "  rankdir=LR;\n";
    os << "  node [shape=box];\n";
    for (const auto& n : tree.nodes()) {
        os << "  n" << n.id << " [label=\"" << detail::dot_escape(detail::node_label(n)) << "\"";
        if (t.contains(n.id)) os << ", style=filled, fillcolor=green";
        else if (f.contains(n.id)) os << ", style=filled, fillcolor=red";
        if (c.contains(n.id)) os << ", color=purple, penwidth=3";
        os << "];\n";
    }
    for (const auto& n : tree.nodes())
        for (const auto& tr : n.transitions)
            os << "  n" << n.id << " -> n" << tr.child << " [label=\"" << tr.prob.short_str() << "\"];\n";
    os << "}\n";
    return os.str();
}

// =============================================================================
// Probability mass diagram
// =============================================================================

/// One box of the mass diagram: a node drawn in the column of its depth,
/// spanning `height` character rows starting at `row`.
struct MassBox {
    NodeId node = 0;
    std::size_t depth = 0;
    std::size_t row = 0;
    std::size_t height = 0;  ///< Rows of mass; a zero-mass leaf has height 0.
    std::size_t rows = 0;    ///< Rows drawn, counting one marker row per zero-height leaf.
    Prob mass;
};

struct MassLayout {
    std::size_t width = 0;  ///< Rows allotted to positive mass.
    std::size_t rows = 0;   ///< width plus one marker row per zero-height leaf.
    std::vector<std::vector<MassBox>> columns;
};

/// Apportions `width` rows among the leaves by largest remainder so every
/// column sums to exactly `width`; inner boxes span their leaves.
inline MassLayout mass_layout(const ProbabilityTree& tree, std::size_t width) {
    const auto leaves = enumerate_realizations(tree);
    if (width < leaves.size())
        throw std::invalid_argument("mass diagram width " + std::to_string(width) + " is below the leaf count " +
                                    std::to_string(leaves.size()));

    std::vector<std::size_t> heights(leaves.size());
    std::vector<std::pair<mpq_class, std::size_t>> remainders;
    std::size_t used = 0;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        const mpq_class scaled = leaves[i].prob.value() * static_cast<unsigned long>(width);
        const mpz_class whole = scaled.get_num() / scaled.get_den();
        heights[i] = whole.get_ui();
        used += heights[i];
        remainders.emplace_back(scaled - mpq_class(whole), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; used < width && k < remainders.size(); ++k, ++used) ++heights[remainders[k].second];

    MassLayout layout;
    layout.width = width;
    const auto masses = node_masses(tree);
    std::unordered_map<NodeId, std::size_t> box_index;  // node -> index within its column
    std::size_t row = 0;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        const std::size_t span = std::max<std::size_t>(heights[i], 1);
        const auto& path = leaves[i].path;
        for (std::size_t d = 0; d < path.size(); ++d) {
            if (layout.columns.size() <= d) layout.columns.emplace_back();
            auto& col = layout.columns[d];
            if (const auto it = box_index.find(path[d]); it != box_index.end()) {
                col[it->second].height += heights[i];
                col[it->second].rows += span;
                continue;
            }
            box_index.emplace(path[d], col.size());
            col.push_back({path[d], d, row, heights[i], span, masses.at(path[d])});
        }
        row += span;
    }
    layout.rows = row;
    return layout;
}

/// ASCII rendering of mass_layout(). Informational only.
inline std::string render_mass_diagram(const ProbabilityTree& tree, std::size_t width) {
    const MassLayout layout = mass_layout(tree, width);
    std::vector<std::vector<std::string>> grid(layout.rows, std::vector<std::string>(layout.columns.size()));
    std::vector<std::size_t> col_width(layout.columns.size(), 0);

    for (std::size_t d = 0; d < layout.columns.size(); ++d) {
        for (const MassBox& box : layout.columns[d]) {
            std::string label;
            for (const auto& s : tree.node(box.node).statements) label += (label.empty() ? "" : ",") + s.str();
            label += " (" + box.mass.short_str() + ")";
            const std::string head = (box.height == 0 ? "+~ " : "+- ") + label;
            col_width[d] = std::max(col_width[d], head.size());
            grid[box.row][d] = head;
            for (std::size_t r = box.row + 1; r < box.row + box.rows; ++r) grid[r][d] = "|";
        }
    }
    std::ostringstream os;
    for (const auto& line : grid) {
        std::string text;
        for (std::size_t d = 0; d < line.size(); ++d) {
            std::string cell = line[d];
            cell.resize(col_width[d] + 2, ' ');
            text += cell;
        }
        while (!text.empty() && text.back() == ' ') text.pop_back();
        os << text << "\n";
    }
    return os.str();
}

}  // namespace ptree
