#include "ptree/mincut.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

namespace ptree {
namespace {

using testing::cut;
using testing::ev;
using testing::t1;

MinCut cut_of(const ProbabilityTree& tree, std::string_view text) { return mincut_of_expr(tree, ev(text)); }

TEST(MinCutTest, SimpleEvents) {
    EXPECT_EQ(cut_of(t1(), "X=0"), cut({1}, {2}));
    EXPECT_EQ(cut_of(t1(), "X=1"), cut({2}, {1}));
    EXPECT_EQ(cut_of(t1(), "Y=1"), cut({4, 6}, {3, 5}));
    EXPECT_EQ(cut_of(t1(), "O=1"), cut({0}, {}));
    EXPECT_EQ(cut_of(t1(), "O=2"), cut({}, {0}));
}

TEST(MinCutTest, UnresolvableVariableThrows) {
    EXPECT_THROW(cut_of(t1(), "W=0"), ResolutionError);
    try {
        cut_of(t1(), "W=0");
    } catch (const ResolutionError& e) {
        EXPECT_NE(std::string(e.what()).find("cannot be resolved"), std::string::npos);
    }
}

TEST(MinCutTest, Negation) {
    EXPECT_EQ(cut_of(t1(), "!Y=1"), cut({3, 5}, {4, 6}));
    EXPECT_EQ(cut_of(t1(), "!!Y=1"), cut_of(t1(), "Y=1"));
}

TEST(MinCutTest, ConjunctionAndDisjunction) {
    EXPECT_EQ(cut_of(t1(), "X=0 & Y=1"), cut({4}, {2, 3}));
    EXPECT_EQ(cut_of(t1(), "Y=1 & X=0"), cut({4}, {2, 3}));
    EXPECT_EQ(cut_of(t1(), "X=0 | Y=1"), cut({1, 6}, {5}));
    EXPECT_EQ(cut_of(t1(), "X=0 | X=1"), cut({0}, {}));
    EXPECT_EQ(cut_of(t1(), "X=0 & X=1"), cut({}, {0}));
}

TEST(MinCutTest, Precedence) {
    EXPECT_EQ(cut_of(t1(), "X=0 ~> Y=1"), cut({4}, {2, 3}));
    // The effect resolves first, so the order is wrong everywhere.
    EXPECT_EQ(cut_of(t1(), "Y=1 ~> X=0"), cut({}, {0}));
    // Both resolve at the same node: not strictly before.
    EXPECT_EQ(cut_of(t1(), "X=0 ~> X=0"), cut({}, {0}));
    EXPECT_EQ(cut_of(t1(), "O=1 ~> X=0"), cut({1}, {2}));
}

TEST(MinCutTest, PrecedenceChecksEffectAfterCauseFires) {
    // X at 1, then Y, then Z below; cause fires at 1.
    using testing::make_node;
    using testing::st;
    const ProbabilityTree tree(0, {
        make_node(0, {st("O", 1)}, {{Prob(1), 1}}),
        make_node(1, {st("X", 0)}, {{Prob(1, 2), 2}, {Prob(1, 2), 3}}),
        make_node(2, {st("Y", 0)}),
        make_node(3, {st("Y", 1)}),
    });
    EXPECT_EQ(cut_of(tree, "X=0 ~> Y=1"), cut({3}, {2}));
    EXPECT_EQ(cut_of(tree, "X=0 ~> Y=0"), cut({2}, {3}));
}

TEST(MinCutTest, CutsAreIndependentOfProbabilities) {
    auto nodes = t1().node_list();
    nodes[0].transitions = {{Prob(0), 1}, {Prob(1), 2}};
    const ProbabilityTree skewed(0, nodes);
    for (const char* e : {"X=0", "Y=1", "X=0 & Y=1", "X=0 | Y=1", "X=0 ~> Y=1"})
        EXPECT_EQ(cut_of(skewed, e), cut_of(t1(), e)) << e;
}

TEST(MinCutTest, VisitCountsAreBounded) {
    TraversalStats stats;
    mincut_of_expr(t1(), ev("X=0 & Y=1"), &stats);
    EXPECT_GT(stats.visits, 0u);
    EXPECT_LE(stats.visits, 3 * t1().size());
}

TEST(CriticalSetTest, ParentsOfFalseNodes) {
    EXPECT_EQ(critical_set(t1(), cut_of(t1(), "X=0")).nodes, std::vector<NodeId>({0}));
    EXPECT_EQ(critical_set(t1(), cut_of(t1(), "Y=1")).nodes, std::vector<NodeId>({1, 2}));
    EXPECT_EQ(critical_set(t1(), cut_of(t1(), "X=0 & Y=1")).nodes, std::vector<NodeId>({0, 1}));
    EXPECT_TRUE(critical_set(t1(), cut_of(t1(), "O=1")).nodes.empty());
    // The root has no parent.
    EXPECT_TRUE(critical_set(t1(), cut_of(t1(), "O=2")).nodes.empty());
}

TEST(EventProbabilityTest, SumsTrueSetMasses) {
    EXPECT_EQ(event_probability(t1(), cut_of(t1(), "X=0")), Prob(1, 2));
    EXPECT_EQ(event_probability(t1(), cut_of(t1(), "Y=1")), Prob(13, 24));
    EXPECT_EQ(event_probability(t1(), cut_of(t1(), "X=0 & Y=1")), Prob(3, 8));
    EXPECT_EQ(event_probability(t1(), cut_of(t1(), "X=0 | Y=1")), Prob(2, 3));
    EXPECT_EQ(event_probability(t1(), cut_of(t1(), "O=1")), Prob(1));
    EXPECT_EQ(event_probability(t1(), cut_of(t1(), "O=2")), Prob(0));
}

TEST(FormatIdsTest, Brackets) {
    EXPECT_EQ(format_ids(std::vector<NodeId>{4, 6}), "[4, 6]");
    EXPECT_EQ(format_ids(std::vector<NodeId>{}), "[]");
}

}  // namespace
}  // namespace ptree
