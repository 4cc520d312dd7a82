#pragma once

/// \file oracle.hpp
/// \brief Brute-force reference semantics for differential testing.
///
/// Nothing here calls into mincut.hpp or transforms.hpp. Events are
/// evaluated as truth tables over the leaves; min-cuts, conditioning,
/// interventions and counterfactuals are rebuilt from those tables by
/// exhaustive scans. Exponential in places, which is fine for the small
/// trees used in tests.

#include "ptree/cut.hpp"
#include "ptree/event.hpp"
#include "ptree/tree.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ptree::oracle {

/// Where along one realization an event's truth becomes fixed.
struct ResolutionPoint {
    NodeId node = 0;
    bool value = false;
};

/// Leaves in depth-first order and, per node, the contiguous range of leaves
/// below it.
class LeafIndex {
public:
    explicit LeafIndex(const ProbabilityTree& tree) : realizations_(enumerate_realizations(tree)) {
        for (std::size_t i = 0; i < realizations_.size(); ++i)
            for (NodeId u : realizations_[i].path) {
                auto [it, fresh] = range_.try_emplace(u, i, i + 1);
                if (!fresh) it->second.second = i + 1;
            }
    }

    std::size_t leaf_count() const { return realizations_.size(); }
    const std::vector<Realization>& realizations() const { return realizations_; }
    std::pair<std::size_t, std::size_t> range(NodeId u) const { return range_.at(u); }

    std::size_t leaf_of(const std::vector<NodeId>& path) const {
        for (std::size_t i = 0; i < realizations_.size(); ++i)
            if (realizations_[i].path == path) return i;
        throw std::invalid_argument("path is not a realization of the tree");
    }

private:
    std::vector<Realization> realizations_;
    std::unordered_map<NodeId, std::pair<std::size_t, std::size_t>> range_;
};

using TruthTable = std::vector<bool>;

/// Truth constant over all leaves below `u`?
inline std::optional<bool> constant_below(const LeafIndex& leaves, const TruthTable& table, NodeId u) {
    const auto [b, e] = leaves.range(u);
    for (std::size_t i = b + 1; i < e; ++i)
        if (table[i] != table[b]) return std::nullopt;
    return static_cast<bool>(table[b]);
}

/// First node on the leaf's path where the event becomes constant, as an
/// index into the path.
inline std::size_t resolution_depth(const LeafIndex& leaves, const TruthTable& table, std::size_t leaf) {
    const auto& path = leaves.realizations()[leaf].path;
    for (std::size_t k = 0; k < path.size(); ++k)
        if (constant_below(leaves, table, path[k])) return k;
    return path.size() - 1;  // unreachable: a leaf is trivially constant
}

inline TruthTable truth_table(const ProbabilityTree& tree, const LeafIndex& leaves, const Event& e) {
    const std::size_t n = leaves.leaf_count();
    TruthTable out(n);
    if (const auto* a = e.as<event::Atom>()) {
        for (std::size_t i = 0; i < n; ++i) {
            const Statement* found = nullptr;
            for (NodeId u : leaves.realizations()[i].path)
                if (const Statement* s = tree.node(u).binding(a->statement.variable)) found = s;
            if (!found)
                throw ResolutionError(a->statement.str() + " cannot be resolved on realization " +
                                      format_path(leaves.realizations()[i].path));
            out[i] = found->value == a->statement.value;
        }
    } else if (const auto* x = e.as<event::Not>()) {
        const auto t = truth_table(tree, leaves, *x->operand);
        for (std::size_t i = 0; i < n; ++i) out[i] = !t[i];
    } else if (const auto* x = e.as<event::And>()) {
        const auto l = truth_table(tree, leaves, *x->lhs), r = truth_table(tree, leaves, *x->rhs);
        for (std::size_t i = 0; i < n; ++i) out[i] = l[i] && r[i];
    } else if (const auto* x = e.as<event::Or>()) {
        const auto l = truth_table(tree, leaves, *x->lhs), r = truth_table(tree, leaves, *x->rhs);
        for (std::size_t i = 0; i < n; ++i) out[i] = l[i] || r[i];
    } else if (const auto* x = e.as<event::Prec>()) {
        const auto c = truth_table(tree, leaves, *x->cause), f = truth_table(tree, leaves, *x->effect);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = c[i] && f[i] && resolution_depth(leaves, c, i) < resolution_depth(leaves, f, i);
    }
    return out;
}

inline bool event_truth(const ProbabilityTree& tree, const Event& e, const Realization& r) {
    const LeafIndex leaves(tree);
    return truth_table(tree, leaves, e)[leaves.leaf_of(r.path)];
}

inline ResolutionPoint resolution_point(const ProbabilityTree& tree, const Event& e, const Realization& r) {
    const LeafIndex leaves(tree);
    const auto table = truth_table(tree, leaves, e);
    const auto leaf = leaves.leaf_of(r.path);
    return {r.path[resolution_depth(leaves, table, leaf)], static_cast<bool>(table[leaf])};
}

/// Nodes where truth is constant below but not below the parent.
inline MinCut mincut(const ProbabilityTree& tree, const Event& e) {
    const LeafIndex leaves(tree);
    const auto table = truth_table(tree, leaves, e);
    const auto parents = parent_map(tree);
    MinCut out;
    for (const auto& n : tree.nodes()) {
        const auto here = constant_below(leaves, table, n.id);
        if (!here) continue;
        if (const auto p = parents.find(n.id); p != parents.end() && constant_below(leaves, table, p->second))
            continue;
        (*here ? out.true_set : out.false_set).push_back(n.id);
    }
    return out;  // tree.nodes() is id-sorted, so both sets are too
}

/// A realization distribution restricted to its positive-mass support.
using Distribution = std::vector<Realization>;

inline Distribution support(const std::vector<Realization>& rs) {
    Distribution out;
    for (const auto& r : rs)
        if (!r.prob.is_zero()) out.push_back(r);
    return out;
}

/// Global filter-and-renormalize.
inline Distribution condition_distribution(const ProbabilityTree& tree, const Event& e) {
    const LeafIndex leaves(tree);
    const auto table = truth_table(tree, leaves, e);
    Prob total;
    for (std::size_t i = 0; i < table.size(); ++i)
        if (table[i]) total += leaves.realizations()[i].prob;
    if (total.is_zero())
        throw EvaluationError("oracle undefined; zero-probability conditioning excluded from differential tests");
    Distribution out;
    for (std::size_t i = 0; i < table.size(); ++i)
        if (table[i] && !leaves.realizations()[i].prob.is_zero())
            out.push_back({leaves.realizations()[i].path, leaves.realizations()[i].prob / total});
    return out;
}

/// Zeroes the edges into the false set and rescales each critical node's
/// remaining edges to sum to one. Every other edge is copied.
inline ProbabilityTree intervened_tree(const ProbabilityTree& tree, const Event& e) {
    const MinCut cut = mincut(tree, e);
    const auto parents = parent_map(tree);
    const std::set<NodeId> false_nodes(cut.false_set.begin(), cut.false_set.end());
    std::set<NodeId> critical;
    for (NodeId u : cut.false_set)
        if (parents.contains(u)) critical.insert(parents.at(u));

    auto nodes = tree.node_list();
    for (auto& n : nodes) {
        if (!critical.contains(n.id)) continue;
        Prob retained;
        for (const auto& t : n.transitions)
            if (!false_nodes.contains(t.child)) retained += t.prob;
        if (retained.is_zero())
            throw EvaluationError("oracle undefined; critical node " + std::to_string(n.id) +
                                  " retains no mass");
        for (auto& t : n.transitions) t.prob = false_nodes.contains(t.child) ? Prob::zero() : t.prob / retained;
    }
    return ProbabilityTree(tree.root(), std::move(nodes));
}

inline Distribution intervention_distribution(const ProbabilityTree& tree, const Event& e) {
    return support(enumerate_realizations(intervened_tree(tree, e)));
}

/// Counterfactual by slicing: edges leaving a node take the factual
/// probabilities when neither the node nor any ancestor is critical or in
/// the cut; all other edges take the intervened probabilities. Variables
/// bound strictly below a critical node get `suffix` throughout.
inline ProbabilityTree counterfactual_tree(const ProbabilityTree& reference, const ProbabilityTree& factual,
                                           const Event& e, const std::string& suffix = "*") {
    const MinCut cut = mincut(reference, e);
    const auto parents = parent_map(reference);
    std::set<NodeId> critical, in_cut(cut.true_set.begin(), cut.true_set.end());
    in_cut.insert(cut.false_set.begin(), cut.false_set.end());
    for (NodeId u : cut.false_set)
        if (parents.contains(u)) critical.insert(parents.at(u));

    const auto ancestors_or_self = [&](NodeId u) {
        std::vector<NodeId> chain{u};
        while (parents.contains(chain.back())) chain.push_back(parents.at(chain.back()));
        return chain;
    };

    const ProbabilityTree intervened = intervened_tree(reference, e);
    std::set<std::string> rescoped;
    auto nodes = intervened.node_list();
    for (auto& n : nodes) {
        const auto chain = ancestors_or_self(n.id);
        const bool factual_edges = std::none_of(chain.begin(), chain.end(), [&](NodeId a) {
            return critical.contains(a) || in_cut.contains(a);
        });
        if (factual_edges) n.transitions = factual.node(n.id).transitions;
        if (std::any_of(chain.begin() + 1, chain.end(), [&](NodeId a) { return critical.contains(a); }))
            for (const auto& s : n.statements) rescoped.insert(s.variable);
    }
    for (auto& n : nodes)
        for (auto& s : n.statements)
            if (rescoped.contains(s.variable)) s.variable += suffix;
    return ProbabilityTree(reference.root(), std::move(nodes));
}

// =============================================================================
// Random instances
// =============================================================================

struct GenParams {
    std::size_t max_depth = 3;
    std::size_t max_branching = 2;
    std::int64_t value_range = 2;
    bool strictly_positive = true;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace detail

/// A random well-formed tree. Every realization binds the same set of
/// variables, in a per-branch random order (context-specific causal order).
/// Node ids are a random permutation so nothing can rely on their order.
inline ProbabilityTree random_tree(const GenParams& params) {
    if (params.max_depth < 1 || params.max_branching < 2)
        throw std::invalid_argument("random_tree needs max_depth >= 1 and max_branching >= 2");
    std::mt19937_64 rng(params.seed);
    const std::size_t var_count = detail::uniform(rng, 1, params.max_depth);
    std::vector<std::string> vars;
    for (std::size_t i = 0; i < var_count; ++i) vars.push_back(std::string(1, static_cast<char>('A' + i)));

    std::vector<Node> nodes;
    struct Pending {
        std::size_t node;
        std::vector<std::string> unbound;
    };
    nodes.push_back({0, {{"O", std::int64_t{1}}}, {}});
    std::vector<Pending> todo{{0, vars}};
    while (!todo.empty()) {
        Pending p = std::move(todo.back());
        todo.pop_back();
        if (p.unbound.empty()) continue;
        const std::size_t kids = detail::uniform(rng, 2, params.max_branching);
        std::vector<std::uint64_t> weights(kids);
        std::uint64_t total = 0;
        do {
            total = 0;
            for (auto& w : weights) total += (w = detail::uniform(rng, params.strictly_positive ? 1 : 0, 9));
        } while (total == 0);
        for (std::size_t k = 0; k < kids; ++k) {
            auto unbound = p.unbound;
            Node child{nodes.size(), {}, {}};
            // Usually one variable per node, occasionally two.
            const std::size_t binds = (unbound.size() > 1 && detail::uniform(rng, 0, 5) == 0) ? 2 : 1;
            for (std::size_t b = 0; b < binds; ++b) {
                const std::size_t pick = detail::uniform(rng, 0, unbound.size() - 1);
                const auto value = static_cast<std::int64_t>(
                    detail::uniform(rng, 0, static_cast<std::size_t>(params.value_range - 1)));
                child.statements.push_back({unbound[pick], value});
                unbound.erase(unbound.begin() + static_cast<std::ptrdiff_t>(pick));
            }
            nodes[p.node].transitions.push_back(
                {Prob(static_cast<long>(weights[k]), static_cast<long>(total)), child.id});
            todo.push_back({nodes.size(), std::move(unbound)});
            nodes.push_back(std::move(child));
        }
    }

    std::vector<NodeId> ids(nodes.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = 3 * i + 10;
    std::shuffle(ids.begin(), ids.end(), rng);
    for (auto& n : nodes) {
        n.id = ids[n.id];
        for (auto& t : n.transitions) t.child = ids[t.child];
    }
    const NodeId root = nodes.front().id;
    return ProbabilityTree(root, std::move(nodes));
}

/// A random event over the tree's variables, nested at most `depth` deep.
/// Atom values come from the observed ranges plus, occasionally, one value
/// no node binds.
inline Event random_expr(const ProbabilityTree& tree, std::size_t depth, std::uint64_t seed) {
    std::map<std::string, std::set<std::int64_t>> ranges;
    for (const auto& n : tree.nodes())
        for (const auto& s : n.statements)
            if (const auto* v = std::get_if<std::int64_t>(&s.value)) ranges[s.variable].insert(*v);
    if (ranges.empty()) throw std::invalid_argument("random_expr: tree binds no integer variables");

    std::mt19937_64 rng(seed);
    const auto atom = [&] {
        auto it = ranges.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(detail::uniform(rng, 0, ranges.size() - 1)));
        const auto& values = it->second;
        std::int64_t value = *values.rbegin() + 1;
        if (detail::uniform(rng, 0, 7) != 0) {
            auto v = values.begin();
            std::advance(v, static_cast<std::ptrdiff_t>(detail::uniform(rng, 0, values.size() - 1)));
            value = *v;
        }
        return Event::atom(it->first, value);
    };
    const auto gen = [&](const auto& self, std::size_t d) -> Event {
        if (d == 0) return atom();
        switch (detail::uniform(rng, 0, 5)) {
            case 0: return atom();
            case 1: return Event::negate(self(self, d - 1));
            case 2: {
                auto a = self(self, d - 1);
                return Event::conj(std::move(a), self(self, d - 1));
            }
            case 3: {
                auto a = self(self, d - 1);
                return Event::disj(std::move(a), self(self, d - 1));
            }
            default: {
                auto a = self(self, d - 1);
                return Event::prec(std::move(a), self(self, d - 1));
            }
        }
    };
    return gen(gen, depth);
}

}  // namespace ptree::oracle
