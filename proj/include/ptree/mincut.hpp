#pragma once

/// \file mincut.hpp
/// \brief Min-cuts of events, critical sets and event probabilities.
///
/// A min-cut is the frontier of nodes at which an event first becomes
/// decided on every realization, split into the nodes that make it true and
/// those that make it false. It depends only on the tree's skeleton and
/// statements, never on transition probabilities.

#include "ptree/cut.hpp"
#include "ptree/event.hpp"

#include <algorithm>
#include <unordered_set>
#include <vector>

namespace ptree {

namespace detail {

inline void count_visit(TraversalStats* stats) {
    if (stats) ++stats->visits;
}

/// Accumulates cut nodes for a whole traversal. A subtree's contribution is
/// the tail of each vector past the marks taken on entry, so consolidation
/// is a truncate-and-push instead of a set union.
class CutBuilder {
public:
    struct Mark {
        std::size_t t, f;
    };

    Mark mark() const { return {true_.size(), false_.size()}; }
    void add_true(NodeId u) { true_.push_back(u); }
    void add_false(NodeId u) { false_.push_back(u); }

    /// If the subtree below `u` produced only true (only false) nodes, replace
    /// them by `u` itself.
    void consolidate(NodeId u, Mark m) {
        if (false_.size() == m.f) {
            true_.resize(m.t);
            true_.push_back(u);
        } else if (true_.size() == m.t) {
            false_.resize(m.f);
            false_.push_back(u);
        }
    }

    MinCut finish() && {
        std::sort(true_.begin(), true_.end());
        std::sort(false_.begin(), false_.end());
        return {std::move(true_), std::move(false_)};
    }

private:
    std::vector<NodeId> true_, false_;
};

struct CutIndex {
    std::unordered_set<NodeId> t, f;

    explicit CutIndex(const MinCut& c) : t(c.true_set.begin(), c.true_set.end()), f(c.false_set.begin(), c.false_set.end()) {}
};

inline void prop_r(const ProbabilityTree& tree, NodeId u, const Statement& s, CutBuilder& out,
                   TraversalStats* stats) {
    count_visit(stats);
    const Node& n = tree.node(u);
    if (const Statement* b = n.binding(s.variable)) {
        if (b->value == s.value) out.add_true(u);
        else out.add_false(u);
        return;
    }
    if (n.is_leaf())
        throw ResolutionError(s.str() + " cannot be resolved: variable " + s.variable +
                              " is unbound at leaf " + std::to_string(u));
    const auto m = out.mark();
    for (const auto& t : n.transitions) prop_r(tree, t.child, s, out, stats);
    out.consolidate(u, m);
}

inline void and_r(const ProbabilityTree& tree, NodeId u, const CutIndex& c1, const CutIndex& c2,
                  bool e1, bool e2, CutBuilder& out, TraversalStats* stats) {
    count_visit(stats);
    if (c1.f.contains(u) || c2.f.contains(u)) {
        out.add_false(u);
        return;
    }
    e1 = e1 || c1.t.contains(u);
    e2 = e2 || c2.t.contains(u);
    if (e1 && e2) {
        out.add_true(u);
        return;
    }
    const auto m = out.mark();
    for (const auto& t : tree.node(u).transitions) and_r(tree, t.child, c1, c2, e1, e2, out, stats);
    out.consolidate(u, m);
}

inline void prec_r(const ProbabilityTree& tree, NodeId u, const CutIndex& cause, const CutIndex& effect,
                   bool fired, CutBuilder& out, TraversalStats* stats) {
    count_visit(stats);
    if (!fired) {
        if (effect.t.contains(u) || effect.f.contains(u) || cause.f.contains(u)) {
            out.add_false(u);
            return;
        }
        fired = cause.t.contains(u);
    } else {
        if (effect.t.contains(u)) {
            out.add_true(u);
            return;
        }
        if (effect.f.contains(u)) {
            out.add_false(u);
            return;
        }
    }
    const auto m = out.mark();
    for (const auto& t : tree.node(u).transitions) prec_r(tree, t.child, cause, effect, fired, out, stats);
    out.consolidate(u, m);
}

}  // namespace detail

/// Min-cut of the simple event `s`.
/// \throws ResolutionError if some realization never binds `s.variable`.
inline MinCut mincut_prop(const ProbabilityTree& tree, const Statement& s, TraversalStats* stats = nullptr) {
    detail::CutBuilder out;
    detail::prop_r(tree, tree.root(), s, out, stats);
    return std::move(out).finish();
}

inline MinCut mincut_neg(MinCut cut) {
    std::swap(cut.true_set, cut.false_set);
    return cut;
}

/// Conjunction: per realization, the first false node or the node where
/// both operands have become true.
inline MinCut mincut_and(const ProbabilityTree& tree, const MinCut& c1, const MinCut& c2,
                         TraversalStats* stats = nullptr) {
    const detail::CutIndex i1(c1), i2(c2);
    detail::CutBuilder out;
    detail::and_r(tree, tree.root(), i1, i2, false, false, out, stats);
    return std::move(out).finish();
}

inline MinCut mincut_or(const ProbabilityTree& tree, const MinCut& c1, const MinCut& c2,
                        TraversalStats* stats = nullptr) {
    return mincut_neg(mincut_and(tree, mincut_neg(c1), mincut_neg(c2), stats));
}

/// Precedence: true where the cause has resolved true strictly before the
/// effect resolves, and the effect then resolves true.
inline MinCut mincut_prec(const ProbabilityTree& tree, const MinCut& cause, const MinCut& effect,
                          TraversalStats* stats = nullptr) {
    const detail::CutIndex ic(cause), ie(effect);
    detail::CutBuilder out;
    detail::prec_r(tree, tree.root(), ic, ie, false, out, stats);
    return std::move(out).finish();
}

inline MinCut mincut_of_expr(const ProbabilityTree& tree, const Event& e, TraversalStats* stats = nullptr) {
    return std::visit(
        [&](const auto& x) -> MinCut {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, event::Atom>) {
                return mincut_prop(tree, x.statement, stats);
            } else if constexpr (std::is_same_v<T, event::Not>) {
                return mincut_neg(mincut_of_expr(tree, *x.operand, stats));
            } else if constexpr (std::is_same_v<T, event::And>) {
                return mincut_and(tree, mincut_of_expr(tree, *x.lhs, stats), mincut_of_expr(tree, *x.rhs, stats),
                                  stats);
            } else if constexpr (std::is_same_v<T, event::Or>) {
                return mincut_or(tree, mincut_of_expr(tree, *x.lhs, stats), mincut_of_expr(tree, *x.rhs, stats),
                                 stats);
            } else {
                return mincut_prec(tree, mincut_of_expr(tree, *x.cause, stats),
                                   mincut_of_expr(tree, *x.effect, stats), stats);
            }
        },
        e.variant());
}

/// Parents of the false-set nodes: the mechanisms to manipulate in order to
/// bring the event about.
inline CriticalSet critical_set(const ProbabilityTree& tree, const MinCut& cut) {
    const auto parents = parent_map(tree);
    CriticalSet out;
    for (NodeId u : cut.false_set)
        if (const auto it = parents.find(u); it != parents.end()) out.nodes.push_back(it->second);
    std::sort(out.nodes.begin(), out.nodes.end());
    out.nodes.erase(std::unique(out.nodes.begin(), out.nodes.end()), out.nodes.end());
    return out;
}

/// Sum of the masses of the true-set nodes.
inline Prob event_probability(const ProbabilityTree& tree, const MinCut& cut) {
    if (cut.true_set.empty()) return Prob::zero();
    const auto masses = node_masses(tree);
    Prob total;
    for (NodeId u : cut.true_set) total += masses.at(u);
    return total;
}

}  // namespace ptree
