#pragma once

/// \file tree.hpp
/// \brief Probability trees: nodes, transitions, validation and realizations.
///
/// A node is a tuple (id, statements, transitions). Entering a node binds
/// its statements; each transition carries the probability of moving to
/// the child. Trees are immutable values: transforms build new trees.

#include "ptree/errors.hpp"
#include "ptree/prob.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

namespace ptree {

using NodeId = std::uint64_t;

/// Statement values are either integers (X=0) or strings (W="rainy").
using Value = std::variant<std::int64_t, std::string>;

inline std::string format_value(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    std::string out = "\"";
    for (char c : std::get<std::string>(v)) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

/// Checks `[A-Za-z_][A-Za-z0-9_]*` followed by any number of `*` scope markers.
inline bool is_valid_variable_name(std::string_view name) {
    if (name.empty()) return false;
    const auto head = [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
    };
    const auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
    if (!head(name.front())) return false;
    std::size_t i = 1;
    while (i < name.size() && tail(name[i])) ++i;
    while (i < name.size() && name[i] == '*') ++i;
    return i == name.size();
}

/// A binding `variable = value`, e.g. `X = 0`.
struct Statement {
    std::string variable;
    Value value;

    friend bool operator==(const Statement&, const Statement&) = default;

    std::string str() const { return variable + "=" + format_value(value); }
};

struct Transition {
    Prob prob;
    NodeId child = 0;

    friend bool operator==(const Transition&, const Transition&) = default;
};

struct Node {
    NodeId id = 0;
    std::vector<Statement> statements;
    std::vector<Transition> transitions;  ///< Ordered; empty iff leaf.

    bool is_leaf() const { return transitions.empty(); }

    const Statement* binding(std::string_view variable) const {
        for (const auto& s : statements)
            if (s.variable == variable) return &s;
        return nullptr;
    }

    friend bool operator==(const Node&, const Node&) = default;
};

/// A finite probability tree.
///
/// Nodes are stored sorted by id. Construction accepts arbitrary candidate
/// structures (duplicate ids, dangling children, bad sums); use
/// validate_tree() before handing a tree to the algorithms.
class ProbabilityTree {
public:
    ProbabilityTree() = default;
    ProbabilityTree(NodeId root, std::vector<Node> nodes) : root_(root), nodes_(std::move(nodes)) {
        std::stable_sort(nodes_.begin(), nodes_.end(),
                         [](const Node& a, const Node& b) { return a.id < b.id; });
        index_.reserve(nodes_.size());
        for (std::size_t i = 0; i < nodes_.size(); ++i) index_.try_emplace(nodes_[i].id, i);
    }

    NodeId root() const { return root_; }
    std::span<const Node> nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }

    bool contains(NodeId id) const { return index_.contains(id); }

    const Node* find(NodeId id) const {
        const auto it = index_.find(id);
        return it == index_.end() ? nullptr : &nodes_[it->second];
    }

    const Node& node(NodeId id) const {
        if (const Node* n = find(id)) return *n;
        throw std::out_of_range("unknown node id " + std::to_string(id));
    }

    const Node& root_node() const { return node(root_); }

    /// Copy of the node list, for building derived trees.
    std::vector<Node> node_list() const { return nodes_; }

    friend bool operator==(const ProbabilityTree& a, const ProbabilityTree& b) {
        return a.root_ == b.root_ && a.nodes_ == b.nodes_;
    }

private:
    NodeId root_ = 0;
    std::vector<Node> nodes_;
    std::unordered_map<NodeId, std::size_t> index_;
};

/// A root-to-leaf path and its probability.
struct Realization {
    std::vector<NodeId> path;
    Prob prob;

    friend bool operator==(const Realization&, const Realization&) = default;
};

inline std::string format_path(std::span<const NodeId> path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += "→";
        out += std::to_string(path[i]);
    }
    return out;
}

// =============================================================================
// Validation
// =============================================================================

enum class IssueKind {
    MissingRoot,
    DuplicateId,
    UnknownChild,
    MultipleParents,
    Unreachable,
    ProbabilityRange,
    Normalization,
    InvalidVariableName,
    UnboundVariable,
    RebindVariable,
};

inline std::string_view to_string(IssueKind kind) {
    switch (kind) {
        case IssueKind::MissingRoot: return "missing-root";
        case IssueKind::DuplicateId: return "duplicate-id";
        case IssueKind::UnknownChild: return "unknown-child";
        case IssueKind::MultipleParents: return "multiple-parents";
        case IssueKind::Unreachable: return "unreachable";
        case IssueKind::ProbabilityRange: return "probability-range";
        case IssueKind::Normalization: return "normalization";
        case IssueKind::InvalidVariableName: return "invalid-variable-name";
        case IssueKind::UnboundVariable: return "unbound-variable";
        case IssueKind::RebindVariable: return "rebind-variable";
    }
    return "unknown";
}

struct ValidationIssue {
    NodeId node = 0;
    IssueKind kind{};
    std::string message;
};

struct ValidationReport {
    bool ok = true;  ///< Equivalent to issues.empty().
    std::vector<ValidationIssue> issues;
    std::vector<std::string> warnings;  ///< Do not affect `ok`.

    void add(NodeId node, IssueKind kind, std::string message) {
        issues.push_back({node, kind, std::move(message)});
        ok = false;
    }

    bool has(IssueKind kind) const {
        return std::any_of(issues.begin(), issues.end(),
                           [&](const ValidationIssue& i) { return i.kind == kind; });
    }

    std::string str() const {
        std::ostringstream os;
        if (ok) os << "ok\n";
        for (const auto& i : issues)
            os << "error: node " << i.node << " [" << to_string(i.kind) << "] " << i.message << "\n";
        for (const auto& w : warnings) os << "warning: " << w << "\n";
        return os.str();
    }
};

/// The tree failed validation where a valid tree was required.
class InvalidTreeError : public Error {
public:
    explicit InvalidTreeError(ValidationReport report)
        : Error("invalid probability tree:\n" + report.str()), report_(std::move(report)) {}

    const ValidationReport& report() const { return report_; }

private:
    ValidationReport report_;
};

namespace detail {

/// Well-formedness scan: every variable bound somewhere must be bound exactly
/// once on every root-to-leaf path. Iterative so deep chains do not recurse.
inline void check_bindings(const ProbabilityTree& tree, ValidationReport& report) {
    std::vector<std::string> all_vars;
    {
        std::unordered_set<std::string> seen;
        for (const auto& n : tree.nodes())
            for (const auto& s : n.statements)
                if (seen.insert(s.variable).second) all_vars.push_back(s.variable);
    }
    std::sort(all_vars.begin(), all_vars.end());

    std::unordered_map<std::string, NodeId> bound;  // variable -> binding node
    std::vector<NodeId> path;
    struct Frame {
        NodeId id;
        std::size_t next_child;
        std::vector<std::string> added;
    };
    std::vector<Frame> stack;

    const auto enter = [&](NodeId id) {
        const Node& n = tree.node(id);
        Frame f{id, 0, {}};
        for (const auto& s : n.statements) {
            if (const auto it = bound.find(s.variable); it != bound.end()) {
                report.add(id, IssueKind::RebindVariable,
                           "variable " + s.variable + " already bound at node " +
                               std::to_string(it->second));
                continue;
            }
            bound.emplace(s.variable, id);
            f.added.push_back(s.variable);
        }
        path.push_back(id);
        if (n.is_leaf() && bound.size() < all_vars.size()) {
            for (const auto& v : all_vars)
                if (!bound.contains(v))
                    report.add(id, IssueKind::UnboundVariable,
                               "variable " + v + " unbound on realization " + format_path(path));
        }
        stack.push_back(std::move(f));
    };

    enter(tree.root());
    while (!stack.empty()) {
        Frame& top = stack.back();
        const Node& n = tree.node(top.id);
        if (top.next_child < n.transitions.size()) {
            enter(n.transitions[top.next_child++].child);
            continue;
        }
        for (const auto& v : top.added) bound.erase(v);
        path.pop_back();
        stack.pop_back();
    }
}

}  // namespace detail

/// Reports every structural, numeric and well-formedness problem of `tree`.
inline ValidationReport validate_tree(const ProbabilityTree& tree) {
    ValidationReport report;
    const auto nodes = tree.nodes();

    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (nodes[i].id == nodes[i - 1].id)
            report.add(nodes[i].id, IssueKind::DuplicateId,
                       "node id " + std::to_string(nodes[i].id) + " appears more than once");

    if (!tree.contains(tree.root())) {
        report.add(tree.root(), IssueKind::MissingRoot,
                   "root id " + std::to_string(tree.root()) + " has no node record");
        return report;
    }

    std::unordered_map<NodeId, NodeId> parent_of;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i > 0 && nodes[i].id == nodes[i - 1].id) continue;
        const Node& n = nodes[i];
        for (const auto& s : n.statements)
            if (!is_valid_variable_name(s.variable))
                report.add(n.id, IssueKind::InvalidVariableName,
                           "invalid variable name '" + s.variable + "'");
        Prob sum;
        for (const auto& t : n.transitions) {
            if (!t.prob.in_unit_interval())
                report.add(n.id, IssueKind::ProbabilityRange,
                           "transition probability " + t.prob.short_str() + " to node " +
                               std::to_string(t.child) + " is outside [0, 1]");
            sum += t.prob;
            if (!tree.contains(t.child)) {
                report.add(n.id, IssueKind::UnknownChild,
                           "transition to unknown node " + std::to_string(t.child));
                continue;
            }
            if (t.child == tree.root()) {
                report.add(t.child, IssueKind::MultipleParents,
                           "root node has parent " + std::to_string(n.id));
                continue;
            }
            if (const auto [it, fresh] = parent_of.try_emplace(t.child, n.id); !fresh)
                report.add(t.child, IssueKind::MultipleParents,
                           "node has parents " + std::to_string(it->second) + " and " +
                               std::to_string(n.id));
        }
        if (!n.transitions.empty() && !sum.is_one())
            report.add(n.id, IssueKind::Normalization,
                       "probabilities sum to " + sum.short_str() + " ≠ 1 at node " +
                           std::to_string(n.id));
    }

    // Reachability; a visited set guards against cycles in malformed input.
    std::unordered_set<NodeId> reached{tree.root()};
    std::vector<NodeId> todo{tree.root()};
    while (!todo.empty()) {
        const NodeId id = todo.back();
        todo.pop_back();
        for (const auto& t : tree.node(id).transitions)
            if (tree.contains(t.child) && reached.insert(t.child).second) todo.push_back(t.child);
    }
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (!reached.contains(nodes[i].id) && (i == 0 || nodes[i].id != nodes[i - 1].id))
            report.add(nodes[i].id, IssueKind::Unreachable, "node is not reachable from the root");

    // Path scans are only meaningful on a proper tree.
    const bool shape_ok = !report.has(IssueKind::DuplicateId) && !report.has(IssueKind::UnknownChild) &&
                          !report.has(IssueKind::MultipleParents) && !report.has(IssueKind::Unreachable);
    if (shape_ok) detail::check_bindings(tree, report);

    const Statement omega{"O", std::int64_t{1}};
    const auto& root_statements = tree.root_node().statements;
    if (std::find(root_statements.begin(), root_statements.end(), omega) == root_statements.end())
        report.warnings.push_back("root node does not bind O=1");
    return report;
}

/// Throws InvalidTreeError unless `tree` validates.
inline void require_valid(const ProbabilityTree& tree) {
    auto report = validate_tree(tree);
    if (!report.ok) throw InvalidTreeError(std::move(report));
}

// =============================================================================
// Structural queries
// =============================================================================

/// Maps every non-root node to its parent.
inline std::unordered_map<NodeId, NodeId> parent_map(const ProbabilityTree& tree) {
    std::unordered_map<NodeId, NodeId> parents;
    parents.reserve(tree.size());
    for (const auto& n : tree.nodes())
        for (const auto& t : n.transitions) parents.emplace(t.child, n.id);
    return parents;
}

/// Product of transition probabilities from the root down to `id`.
inline Prob node_mass(const ProbabilityTree& tree, NodeId id) {
    if (!tree.contains(id)) throw std::out_of_range("unknown node id " + std::to_string(id));
    const auto parents = parent_map(tree);
    Prob mass = Prob::one();
    NodeId cur = id;
    while (cur != tree.root()) {
        const NodeId parent = parents.at(cur);
        for (const auto& t : tree.node(parent).transitions)
            if (t.child == cur) {
                mass *= t.prob;
                break;
            }
        cur = parent;
    }
    return mass;
}

/// node_mass() for every reachable node in one top-down pass.
inline std::unordered_map<NodeId, Prob> node_masses(const ProbabilityTree& tree) {
    std::unordered_map<NodeId, Prob> masses;
    masses.reserve(tree.size());
    masses.emplace(tree.root(), Prob::one());
    std::vector<NodeId> todo{tree.root()};
    while (!todo.empty()) {
        const NodeId id = todo.back();
        todo.pop_back();
        const Prob mass = masses.at(id);
        for (const auto& t : tree.node(id).transitions) {
            masses.emplace(t.child, mass * t.prob);
            todo.push_back(t.child);
        }
    }
    return masses;
}

/// All total realizations in depth-first child order.
inline std::vector<Realization> enumerate_realizations(const ProbabilityTree& tree) {
    std::vector<Realization> out;
    std::vector<NodeId> path{tree.root()};
    std::vector<Prob> mass{Prob::one()};
    std::vector<std::size_t> next{0};
    while (!path.empty()) {
        const Node& n = tree.node(path.back());
        if (n.is_leaf()) {
            out.push_back({path, mass.back()});
        } else if (next.back() < n.transitions.size()) {
            const auto& t = n.transitions[next.back()++];
            mass.push_back(mass.back() * t.prob);
            path.push_back(t.child);
            next.push_back(0);
            continue;
        }
        path.pop_back();
        mass.pop_back();
        next.pop_back();
    }
    return out;
}

}  // namespace ptree
