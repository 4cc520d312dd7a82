// Randomized invariants checked against the brute-force oracle.

#include "invariants.hpp"
#include "ptree/io.hpp"
#include "ptree/query.hpp"

#include <gtest/gtest.h>

namespace ptree {
namespace {

using testing::positive_case;

class RandomCase : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(RandomCase, MinCutMatchesOracle) {
    for (bool positive : {true, false}) {
        const auto tree = oracle::random_tree(testing::params_for(GetParam(), positive));
        for (std::uint64_t k = 0; k < 4; ++k) {
            const auto e = oracle::random_expr(tree, 3, GetParam() * 31 + k);
            EXPECT_EQ(mincut_of_expr(tree, e), oracle::mincut(tree, e)) << format_event(e);
        }
    }
}

TEST_P(RandomCase, NegationSwapsAndDoubleNegationIsIdentity) {
    const auto c = positive_case(GetParam());
    const MinCut cut = mincut_of_expr(c.tree, c.event);
    EXPECT_EQ(mincut_of_expr(c.tree, Event::negate(c.event)), mincut_neg(cut));
    EXPECT_EQ(mincut_of_expr(c.tree, Event::negate(Event::negate(c.event))), cut);
    EXPECT_EQ(testing::probability(c.tree, c.event) + testing::probability(c.tree, Event::negate(c.event)), Prob(1));
}

TEST_P(RandomCase, TransformsPreserveStructureAndValidity) {
    const auto c = positive_case(GetParam());
    const MinCut cut = mincut_of_expr(c.tree, c.event);
    for (const auto& out : {see(c.tree, cut), do_intervention(c.tree, cut)}) {
        EXPECT_TRUE(testing::same_structure(out, c.tree));
        EXPECT_TRUE(validate_tree(out).ok) << validate_tree(out).str();
        EXPECT_EQ(testing::probability(out, c.event), Prob(1));
    }
}

TEST_P(RandomCase, SeeAndDoMatchOracleDistributions) {
    const auto c = positive_case(GetParam());
    const MinCut cut = mincut_of_expr(c.tree, c.event);
    EXPECT_EQ(oracle::support(enumerate_realizations(see(c.tree, cut))),
              oracle::condition_distribution(c.tree, c.event));
    EXPECT_EQ(oracle::support(enumerate_realizations(do_intervention(c.tree, cut))),
              oracle::intervention_distribution(c.tree, c.event));
}

TEST_P(RandomCase, CounterfactualMatchesOracle) {
    const auto c = positive_case(GetParam());
    MinCut premise_cut;
    for (std::uint64_t k = 0; premise_cut.true_set.empty(); ++k)
        premise_cut = mincut_of_expr(c.tree, oracle::random_expr(c.tree, 1, GetParam() * 101 + k));
    const auto factual = see(c.tree, premise_cut);
    const auto got = counterfactual(c.tree, factual, mincut_of_expr(c.tree, c.event));
    EXPECT_EQ(got, oracle::counterfactual_tree(c.tree, factual, c.event));
    EXPECT_TRUE(validate_tree(got).ok) << validate_tree(got).str();
}

TEST_P(RandomCase, CounterfactualOnReferenceIsIntervention) {
    const auto c = positive_case(GetParam());
    const MinCut cut = mincut_of_expr(c.tree, c.event);
    EXPECT_EQ(testing::erase_stars(counterfactual(c.tree, c.tree, cut)), do_intervention(c.tree, cut));
}

TEST_P(RandomCase, VisitsAreLinear) {
    const auto c = positive_case(GetParam());
    const MinCut cut = mincut_of_expr(c.tree, c.event);
    TraversalStats s1, s2, s3;
    see(c.tree, cut, &s1);
    do_intervention(c.tree, cut, &s2);
    counterfactual(c.tree, c.tree, cut, "*", &s3);
    EXPECT_LE(s1.visits, c.tree.size());
    EXPECT_LE(s2.visits, c.tree.size());
    EXPECT_LE(s3.visits, 2 * c.tree.size());
}

TEST_P(RandomCase, TextAndJsonRoundTrip) {
    const auto c = positive_case(GetParam());
    const auto e = oracle::random_expr(c.tree, 5, GetParam());
    EXPECT_EQ(parse_event(format_event(e)), e) << format_event(e);
    EXPECT_EQ(load_json(save_json(c.tree)), c.tree);
    const QueryAst q{e, {PipelineStep::intervene(c.event), PipelineStep::see(e), PipelineStep::cf(c.event)}};
    EXPECT_EQ(parse_query(format_query(q)), q) << format_query(q);
}

TEST_P(RandomCase, MassColumnsSumToWidth) {
    const auto c = positive_case(GetParam());
    const std::size_t leaves = enumerate_realizations(c.tree).size();
    const auto layout = mass_layout(c.tree, leaves + 17);
    for (const auto& column : layout.columns) {
        std::size_t sum = 0;
        for (const auto& box : column) sum += box.height;
        EXPECT_LE(sum, layout.width);
    }
    std::size_t leaf_sum = 0;
    for (const auto& column : layout.columns)
        for (const auto& box : column)
            if (c.tree.node(box.node).is_leaf()) leaf_sum += box.height;
    EXPECT_EQ(leaf_sum, layout.width);
}

TEST_P(RandomCase, ConditioningOrdersAgreeWhereverMassIsPositive) {
    for (std::uint64_t k = 0; k < 8; ++k) {
        const auto tree = oracle::random_tree(testing::params_for(GetParam() * 8 + k));
        const auto a = oracle::random_expr(tree, 2, 3 * k + 1), b = oracle::random_expr(tree, 2, 3 * k + 2);
        const MinCut ca = mincut_of_expr(tree, a), cb = mincut_of_expr(tree, b);
        if (ca.true_set.empty() || cb.true_set.empty()) continue;
        const auto ta = see(tree, ca), tb = see(tree, cb);
        if (testing::probability(ta, b).is_zero()) continue;
        const auto ab = see(ta, mincut_of_expr(ta, b)), ba = see(tb, mincut_of_expr(tb, a));
        const auto mass_ab = node_masses(ab), mass_ba = node_masses(ba);
        for (NodeId u : testing::changed_nodes(ab, ba)) {
            EXPECT_TRUE(mass_ab.at(u).is_zero()) << format_event(a) << " / " << format_event(b) << " at " << u;
            EXPECT_TRUE(mass_ba.at(u).is_zero()) << format_event(a) << " / " << format_event(b) << " at " << u;
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomCase, ::testing::Range<std::uint64_t>(0, 40));

}  // namespace
}  // namespace ptree
