#include "ptree/io.hpp"

#include "ptree/mincut.hpp"
#include "ptree/query.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <regex>

namespace ptree {
namespace {

using testing::t1;

// =============================================================================
// JSON
// =============================================================================

TEST(JsonTest, FixturesRoundTripByteForByte) {
    for (const char* name : {"t1.json", "t2.json", "fig1d.json", "three_zero.json"}) {
        const std::string text = testing::read_fixture(name);
        const auto tree = load_json(text);
        EXPECT_EQ(load_json(save_json(tree)), tree) << name;
        EXPECT_EQ(save_json(load_json(save_json(tree))), save_json(tree)) << name;
    }
    EXPECT_EQ(save_json(t1()), testing::read_fixture("t1.json"));
}

TEST(JsonTest, FixtureMatchesBuiltTree) {
    EXPECT_EQ(testing::load_fixture("t1.json"), t1());
    EXPECT_EQ(testing::load_fixture("t2.json"), testing::t2());
}

TEST(JsonTest, NumericProbabilitiesAreExact) {
    const auto tree = load_json(R"({"root":0,"nodes":[
        {"id":0,"statements":[{"var":"O","val":1}],"transitions":[{"p":0.2,"child":1},{"p":"0.8","child":2}]},
        {"id":1,"statements":[{"var":"X","val":0}]},
        {"id":2,"statements":[{"var":"X","val":"one"}]}]})");
    EXPECT_EQ(tree.node(0).transitions[0].prob, Prob(1, 5));
    EXPECT_EQ(tree.node(0).transitions[1].prob, Prob(4, 5));
    EXPECT_EQ(tree.node(2).statements[0].value, Value(std::string("one")));
}

TEST(JsonTest, InvalidTreeIsRejected) {
    const std::string text = R"({"root":0,"nodes":[
        {"id":0,"statements":[{"var":"O","val":1}],"transitions":[{"p":"1/2","child":1},{"p":"3/8","child":2}]},
        {"id":1,"statements":[{"var":"X","val":0}]},
        {"id":2,"statements":[{"var":"X","val":1}]}]})";
    EXPECT_NO_THROW(load_json_unchecked(text));
    try {
        load_json(text);
        FAIL() << "expected InvalidTreeError";
    } catch (const InvalidTreeError& e) {
        EXPECT_TRUE(e.report().has(IssueKind::Normalization));
        EXPECT_NE(std::string(e.what()).find("7/8"), std::string::npos);
    }
}

TEST(JsonTest, MalformedDocuments) {
    EXPECT_THROW(load_json("{"), ParseError);
    EXPECT_THROW(load_json("[]"), SchemaError);
    EXPECT_THROW(load_json(R"({"nodes":[]})"), SchemaError);
    EXPECT_THROW(load_json(R"({"version":"2","root":0,"nodes":[]})"), SchemaError);
    EXPECT_THROW(load_json(R"({"root":-1,"nodes":[]})"), SchemaError);
    EXPECT_THROW(load_json(R"({"root":0,"nodes":[{"id":0,"transitions":[{"p":"x","child":1}]}]})"), SchemaError);
    EXPECT_THROW(load_json(R"({"root":0,"nodes":[{"id":0,"statements":[{"var":"O","val":1.5}]}]})"),
                 SchemaError);
}

TEST(JsonTest, CutDocument) {
    EXPECT_EQ(save_cut_json(testing::cut({4, 6}, {3, 5})), R"({"true":[4,6],"false":[3,5]})");
}

// =============================================================================
// Graphviz
// =============================================================================

/// Accepts the subset of DOT that export_dot writes.
bool is_well_formed_dot(const std::string& text) {
    static const std::regex header_re(R"(digraph [A-Za-z_]\w* \{)");
    static const std::regex attr_re(R"(  (rankdir=LR|node \[shape=box\]);)");
    static const std::regex node_re(R"(  n\d+( \[label="(\\.|[^"\\])*"(, \w+=\w+)*\]);)");
    static const std::regex edge_re(R"(  n\d+ -> n\d+ \[label="-?\d+(/\d+)?"\];)");
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || !std::regex_match(line, header_re)) return false;
    bool closed = false;
    while (std::getline(in, line)) {
        if (closed) return false;
        if (line == "}") closed = true;
        else if (!std::regex_match(line, attr_re) && !std::regex_match(line, node_re) &&
                 !std::regex_match(line, edge_re))
            return false;
    }
    return closed;
}

std::size_t count_lines(const std::string& text, const std::regex& re) {
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) n += std::regex_search(line, re) ? 1 : 0;
    return n;
}

TEST(DotTest, OneLinePerNodeAndEdge) {
    const std::string dot = export_dot(t1());
    EXPECT_TRUE(is_well_formed_dot(dot)) << dot;
    EXPECT_EQ(count_lines(dot, std::regex(R"(^  n\d+ \[label=)")), 7u);
    EXPECT_EQ(count_lines(dot, std::regex(R"(^  n\d+ -> n\d+)")), 6u);
    EXPECT_NE(dot.find("  n0 -> n1 [label=\"1/2\"];"), std::string::npos);
    EXPECT_NE(dot.find("  n4 [label=\"4: Y=1\"];"), std::string::npos);
}

TEST(DotTest, CutColoring) {
    const auto tree = t1();
    const MinCut cut = mincut_of_expr(tree, parse_event("Y=1"));
    const std::string dot = export_dot(tree, cut, critical_set(tree, cut));
    EXPECT_TRUE(is_well_formed_dot(dot)) << dot;
    EXPECT_EQ(count_lines(dot, std::regex("fillcolor=green")), 2u);
    EXPECT_EQ(count_lines(dot, std::regex("fillcolor=red")), 2u);
    EXPECT_EQ(count_lines(dot, std::regex("color=purple")), 2u);
    EXPECT_NE(dot.find("  n4 [label=\"4: Y=1\", style=filled, fillcolor=green];"), std::string::npos);
    EXPECT_NE(dot.find("  n1 [label=\"1: X=0\", color=purple, penwidth=3];"), std::string::npos);
}

TEST(DotTest, EscapesStringValues) {
    using testing::make_node;
    const ProbabilityTree tree(0, {make_node(0, {{"W", std::string("say \"hi\"")}})});
    const std::string dot = export_dot(tree);
    EXPECT_TRUE(is_well_formed_dot(dot)) << dot;
    EXPECT_NE(dot.find(R"(W=\"say \\\"hi\\\"\")"), std::string::npos) << dot;
}

TEST(DotTest, MatchesGoldenFile) {
    const auto tree = testing::load_fixture("fig1d.json");
    const MinCut cut = mincut_of_expr(tree, parse_event("Y=1"));
    EXPECT_EQ(export_dot(tree, cut, critical_set(tree, cut)), testing::read_fixture("fig1d_y1.dot"));
}

TEST(DotTest, ByteStable) {
    const auto tree = testing::load_fixture("fig1d.json");
    const std::string first = export_dot(tree);
    for (int i = 0; i < 5; ++i) EXPECT_EQ(export_dot(testing::load_fixture("fig1d.json")), first);
    auto shuffled = tree.node_list();
    std::reverse(shuffled.begin(), shuffled.end());
    EXPECT_EQ(export_dot(ProbabilityTree(tree.root(), shuffled)), first);
}

// =============================================================================
// Mass diagram
// =============================================================================

TEST(MassLayoutTest, LeafHeightsFollowMass) {
    const auto layout = mass_layout(t1(), 24);
    ASSERT_EQ(layout.columns.size(), 3u);
    std::vector<std::size_t> heights;
    for (const auto& box : layout.columns[2]) heights.push_back(box.height);
    EXPECT_EQ(heights, (std::vector<std::size_t>{3, 9, 8, 4}));
    EXPECT_EQ(layout.columns[0][0].height, 24u);
    EXPECT_EQ(layout.columns[1][0].height, 12u);
    EXPECT_EQ(layout.columns[1][1].row, 12u);
}

TEST(MassLayoutTest, ColumnsSumToWidth) {
    const auto tree = testing::load_fixture("fig1d.json");
    for (std::size_t width : {8u, 13u, 24u, 97u}) {
        const auto layout = mass_layout(tree, width);
        std::size_t sum = 0;
        for (const auto& box : layout.columns.back()) sum += box.height;
        EXPECT_EQ(sum, width);
    }
    EXPECT_THROW(mass_layout(tree, 7), std::invalid_argument);
}

TEST(MassLayoutTest, ZeroMassLeavesGetAMarkerRow) {
    const auto layout = mass_layout(testing::t2(), 10);
    EXPECT_EQ(layout.rows, 11u);
    EXPECT_EQ(layout.columns[1][0].height, 0u);
    const std::string text = render_mass_diagram(testing::t2(), 10);
    EXPECT_NE(text.find("+~ X=0 (0)"), std::string::npos) << text;
    EXPECT_NE(text.find("+- X=1 (1)"), std::string::npos) << text;
}

TEST(MassLayoutTest, SingleNodeIsOneFullBox) {
    const auto layout = mass_layout(testing::single_node(), 5);
    ASSERT_EQ(layout.columns.size(), 1u);
    ASSERT_EQ(layout.columns[0].size(), 1u);
    EXPECT_EQ(layout.columns[0][0].height, 5u);
    EXPECT_EQ(render_mass_diagram(testing::single_node(), 3), "+- O=1 (1)\n|\n|\n");
}

TEST(MassDiagramTest, RendersOneLinePerRow) {
    const std::string text = render_mass_diagram(t1(), 24);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 24);
    EXPECT_EQ(text.rfind("+- O=1 (1)", 0), 0u) << text;
}

}  // namespace
}  // namespace ptree
