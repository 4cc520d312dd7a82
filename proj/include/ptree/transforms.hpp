#pragma once

/// \file transforms.hpp
/// \brief Conditioning (see), intervention (do) and counterfactuals (cf).
///
/// All three keep the tree's skeleton and only rewrite transition
/// probabilities; counterfactuals additionally move re-scoped variables
/// into a starred namespace.

#include "ptree/mincut.hpp"

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ptree {

/// One child of a node being rebuilt: `reaches_true` says whether the child
/// can still lead into the true set, `mass` how much probability flows
/// toward the true set through it.
struct NormalizeEntry {
    NodeId child = 0;
    int reaches_true = 0;
    Prob mass;
};

/// Rescales entries by their total mass, or, when that mass is zero, spreads
/// probability uniformly over the true-reaching entries.
inline std::vector<Transition> normalize(const std::vector<NormalizeEntry>& entries, long sigma_l,
                                         const Prob& sigma_p) {
    if (sigma_l <= 0) throw EvaluationError("event unreachable below this node");
    std::vector<Transition> out;
    out.reserve(entries.size());
    const bool by_mass = !sigma_p.is_zero();
    for (const auto& e : entries)
        out.push_back({by_mass ? e.mass / sigma_p : Prob(e.reaches_true, sigma_l), e.child});
    return out;
}

namespace detail {

/// Node id -> replacement transition list, applied on top of a base tree.
using TransitionEdits = std::unordered_map<NodeId, std::vector<Transition>>;

inline ProbabilityTree apply_edits(const ProbabilityTree& base, TransitionEdits edits) {
    auto nodes = base.node_list();
    for (auto& n : nodes)
        if (auto it = edits.find(n.id); it != edits.end()) n.transitions = std::move(it->second);
    return ProbabilityTree(base.root(), std::move(nodes));
}

struct SeeResult {
    int reaches_true;
    Prob mass;
};

inline SeeResult see_r(const ProbabilityTree& tree, NodeId u, const CutIndex& cut, const Prob& q,
                       TransitionEdits& edits, TraversalStats* stats) {
    count_visit(stats);
    if (cut.t.contains(u)) return {1, q};
    if (cut.f.contains(u)) return {0, Prob::zero()};
    const Node& n = tree.node(u);
    std::vector<NormalizeEntry> entries;
    entries.reserve(n.transitions.size());
    long sigma_l = 0;
    Prob sigma_p;
    for (const auto& t : n.transitions) {
        auto r = see_r(tree, t.child, cut, q * t.prob, edits, stats);
        sigma_l += r.reaches_true;
        sigma_p += r.mass;
        entries.push_back({t.child, r.reaches_true, std::move(r.mass)});
    }
    try {
        edits[u] = normalize(entries, sigma_l, sigma_p);
    } catch (const EvaluationError&) {
        throw EvaluationError("event unreachable below node " + std::to_string(u));
    }
    return {1, sigma_p};
}

inline bool do_r(const ProbabilityTree& tree, NodeId u, const CutIndex& cut, TransitionEdits& edits,
                 TraversalStats* stats) {
    count_visit(stats);
    if (cut.t.contains(u)) return true;
    if (cut.f.contains(u)) return false;
    const Node& n = tree.node(u);
    std::vector<NormalizeEntry> entries;
    entries.reserve(n.transitions.size());
    long sigma_l = 0;
    Prob sigma_p;
    for (const auto& t : n.transitions) {
        if (do_r(tree, t.child, cut, edits, stats)) {
            entries.push_back({t.child, 1, t.prob});
            ++sigma_l;
            sigma_p += t.prob;
        } else {
            // False branches lose all their mass.
            entries.push_back({t.child, 0, Prob::zero()});
        }
    }
    try {
        edits[u] = normalize(entries, sigma_l, sigma_p);
    } catch (const EvaluationError&) {
        throw EvaluationError("event unreachable below node " + std::to_string(u));
    }
    return true;
}

inline void require_true_set(const MinCut& cut, std::string_view what) {
    if (cut.true_set.empty()) throw EvaluationError(std::string(what) + " on logically false event");
}

}  // namespace detail

/// Conditions `tree` on the event with min-cut `cut`: removes the mass of
/// realizations through the false set and renormalizes upstream of the cut.
inline ProbabilityTree see(const ProbabilityTree& tree, const MinCut& cut, TraversalStats* stats = nullptr) {
    detail::require_true_set(cut, "conditioning");
    const detail::CutIndex index(cut);
    detail::TransitionEdits edits;
    detail::see_r(tree, tree.root(), index, Prob::one(), edits, stats);
    return detail::apply_edits(tree, std::move(edits));
}

/// Intervenes so that the event with min-cut `cut` occurs with probability
/// one. Only transitions leaving critical nodes change.
inline ProbabilityTree do_intervention(const ProbabilityTree& tree, const MinCut& cut,
                                       TraversalStats* stats = nullptr) {
    detail::require_true_set(cut, "intervening");
    const detail::CutIndex index(cut);
    detail::TransitionEdits edits;
    detail::do_r(tree, tree.root(), index, edits, stats);
    return detail::apply_edits(tree, std::move(edits));
}

namespace detail {

inline void require_same_skeleton(const ProbabilityTree& a, const ProbabilityTree& b) {
    if (a.root() != b.root() || a.size() != b.size())
        throw EvaluationError("counterfactual: reference and factual trees differ in shape");
    const auto na = a.nodes(), nb = b.nodes();
    for (std::size_t i = 0; i < na.size(); ++i) {
        const Node &x = na[i], &y = nb[i];
        bool same = x.id == y.id && x.statements == y.statements && x.transitions.size() == y.transitions.size();
        for (std::size_t k = 0; same && k < x.transitions.size(); ++k)
            same = x.transitions[k].child == y.transitions[k].child;
        if (!same)
            throw EvaluationError("counterfactual: reference and factual trees differ at node " +
                                  std::to_string(x.id));
    }
}

struct CfWalk {
    const ProbabilityTree& intervened;
    const ProbabilityTree& factual;
    const CutIndex& cut;
    TraversalStats* stats;
    std::vector<std::pair<NodeId, std::vector<Transition>>> edits;  // stack-like log
    std::vector<NodeId> bifurcations;

    // Returns false iff `u` is in the false set.
    bool walk(NodeId u) {
        count_visit(stats);
        if (cut.t.contains(u)) return true;
        if (cut.f.contains(u)) return false;
        const auto mark = edits.size();
        bool critical = false;
        const Node& n = intervened.node(u);
        for (const auto& t : n.transitions)
            if (!walk(t.child)) critical = true;
        if (critical) {
            // Keep the intervened node and everything below it.
            edits.resize(mark);
            bifurcations.push_back(u);
        } else {
            edits.emplace_back(u, factual.node(u).transitions);
        }
        return true;
    }
};

}  // namespace detail

/// Builds the counterfactual tree: probabilities upstream of the critical
/// bifurcations come from `factual`, those at and below them from the
/// intervention of `reference` on `cut`. Variables bound strictly below a
/// bifurcation are renamed with `suffix` everywhere in the result.
inline ProbabilityTree counterfactual(const ProbabilityTree& reference, const ProbabilityTree& factual,
                                      const MinCut& cut, const std::string& suffix = "*",
                                      TraversalStats* stats = nullptr) {
    detail::require_same_skeleton(reference, factual);
    const ProbabilityTree intervened = do_intervention(reference, cut, stats);
    const detail::CutIndex index(cut);
    detail::CfWalk w{intervened, factual, index, stats, {}, {}};
    w.walk(reference.root());

    detail::TransitionEdits edits;
    for (auto& [id, ts] : w.edits) edits[id] = std::move(ts);
    ProbabilityTree result = detail::apply_edits(intervened, std::move(edits));
    if (w.bifurcations.empty() || suffix.empty()) return result;

    std::unordered_set<std::string> rescoped;
    std::vector<NodeId> todo;
    for (NodeId b : w.bifurcations)
        for (const auto& t : result.node(b).transitions) todo.push_back(t.child);
    std::unordered_set<NodeId> seen;
    while (!todo.empty()) {
        const NodeId id = todo.back();
        todo.pop_back();
        if (!seen.insert(id).second) continue;
        const Node& n = result.node(id);
        for (const auto& s : n.statements) rescoped.insert(s.variable);
        for (const auto& t : n.transitions) todo.push_back(t.child);
    }
    auto nodes = result.node_list();
    for (auto& n : nodes)
        for (auto& s : n.statements)
            if (rescoped.contains(s.variable)) s.variable += suffix;
    return ProbabilityTree(result.root(), std::move(nodes));
}

// =============================================================================
// Pipelines
// =============================================================================

struct PipelineStep {
    enum class Kind { See, Do, Cf };
    Kind kind = Kind::See;
    Event event;

    static PipelineStep see(Event e) { return {Kind::See, std::move(e)}; }
    static PipelineStep intervene(Event e) { return {Kind::Do, std::move(e)}; }
    static PipelineStep cf(Event e) { return {Kind::Cf, std::move(e)}; }

    friend bool operator==(const PipelineStep&, const PipelineStep&) = default;
};

/// The pair of trees a pipeline threads through its steps. `reference` is
/// the world counterfactuals are taken against; `current` the result so far.
struct PipelineState {
    ProbabilityTree reference;
    ProbabilityTree current;

    explicit PipelineState(ProbabilityTree tree) : reference(tree), current(std::move(tree)) {}

    void apply(const PipelineStep& step) {
        switch (step.kind) {
            case PipelineStep::Kind::See:
                current = see(current, mincut_of_expr(current, step.event));
                break;
            case PipelineStep::Kind::Do:
                current = do_intervention(current, mincut_of_expr(current, step.event));
                break;
            case PipelineStep::Kind::Cf:
                current = counterfactual(reference, current, mincut_of_expr(reference, step.event));
                reference = current;
                break;
        }
    }
};

struct PipelineResult {
    Prob prob;
    ProbabilityTree tree;
};

/// Applies `steps` left to right starting from `reference`, then evaluates
/// the probability of `target` on the resulting tree.
inline PipelineResult apply_pipeline(const ProbabilityTree& reference, const std::vector<PipelineStep>& steps,
                                     const Event& target) {
    PipelineState state(reference);
    for (const auto& step : steps) state.apply(step);
    Prob p = event_probability(state.current, mincut_of_expr(state.current, target));
    return {std::move(p), std::move(state.current)};
}

}  // namespace ptree
