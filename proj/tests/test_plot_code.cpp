#include "geoforge/errors.hpp"
#include "geoforge/plot_code.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace geoforge;
using namespace geoforge::schema;

namespace {

const char* kTriangle = R"J({
  "points": {"A": [0, 0], "B": [4, 0], "C": [0, 3]},
  "segments": [["A", "B"], ["B", "C"], ["C", "A"]],
  "circles": [],
  "quantities": ["length(B, C)"],
  "annotations": {"right_angles": [["B", "A", "C"]], "length_of_line": [[["A", "B"], "4"]], "measure_of_angle": []}
})J";

}  // namespace

TEST(PlotCode, ParsesExample) {
    const auto pc = parse_plotcode(kTriangle);
    ASSERT_EQ(pc.points.size(), 3u);
    EXPECT_EQ(pc.points.at("B"), (Point2{4, 0}));
    EXPECT_EQ(pc.segments.size(), 3u);
    ASSERT_EQ(pc.annotations.right_angles.size(), 1u);
    EXPECT_EQ(pc.annotations.right_angles[0], (Triple{"B", "A", "C"}));
    ASSERT_EQ(pc.annotations.length_of_line.size(), 1u);
    EXPECT_EQ(pc.annotations.length_of_line[0].second, "4");
    EXPECT_EQ(pc.quantities, std::vector<std::string>{"length(B, C)"});
}

TEST(PlotCode, AcceptsPythonTuples) {
    const auto pc = parse_plotcode(R"J({"points": {"A": (0, 0), "B": (1, 2)}, "segments": [("A", "B")],
                                       "circles": [], "quantities": [], "annotations": {}})J");
    EXPECT_EQ(pc.points.at("B"), (Point2{1, 2}));
    ASSERT_EQ(pc.segments.size(), 1u);
}

TEST(PlotCode, DanglingLabel) {
    EXPECT_THROW(parse_plotcode(R"J({"points": {"A": [0, 0]}, "segments": [["A", "Z"]], "circles": [],
                                    "quantities": [], "annotations": {}})J"),
                 DanglingLabel);
    EXPECT_THROW(parse_plotcode(R"J({"points": {"A": [0, 0], "B": [1, 0]}, "segments": [], "circles": [],
                                    "quantities": [], "annotations": {"right_angles": [["A", "B", "Q"]]}})J"),
                 DanglingLabel);
}

TEST(PlotCode, DuplicateCircleId) {
    EXPECT_THROW(parse_plotcode(R"J({"points": {"O": [0, 0]}, "segments": [],
                                    "circles": [["C1", "O", 2], ["C1", "O", 3]],
                                    "quantities": [], "annotations": {}})J"),
                 DuplicateCircleId);
}

TEST(PlotCode, RejectsBadInput) {
    EXPECT_THROW(parse_plotcode("not json"), SchemaError);
    EXPECT_THROW(parse_plotcode(R"J({"points": {"A": [0, "x"]}, "segments": [], "circles": [],
                                    "quantities": [], "annotations": {}})J"),
                 CoordError);
    EXPECT_THROW(parse_plotcode(R"J({"points": {"C1": [0, 0]}, "segments": [], "circles": [],
                                    "quantities": [], "annotations": {}})J"),
                 SchemaError);
    EXPECT_THROW(parse_plotcode(R"J({"points": {"O": [0, 0]}, "segments": [], "circles": [["C1", "O", 0]],
                                    "quantities": [], "annotations": {}})J"),
                 DegenerateCircle);
}

TEST(PlotCode, StrictModeRejectsUnknownKeys) {
    const char* extra = R"J({"points": {"A": [0, 0]}, "segments": [], "circles": [], "quantities": [],
                            "annotations": {}, "title": "x"})J";
    EXPECT_NO_THROW(parse_plotcode(extra, SchemaMode::lenient));
    EXPECT_THROW(parse_plotcode(extra, SchemaMode::strict), SchemaError);
}

TEST(PlotCode, CircleForms) {
    const auto pc = parse_plotcode(R"J({
      "points": {"O": [1, 1], "P": [4, 5], "A": [-1, 0], "B": [3, 0], "X": [0, 0], "Y": [2, 0], "Z": [0, 2]},
      "segments": [],
      "circles": [["C1", "O", 2.5], ["C2", "O", "P"], ["C3", "A", "B", "diameter"], ["C4", "X", "Y", "Z"]],
      "quantities": [], "annotations": {}})J");
    const auto c = resolve_circles(pc);
    EXPECT_DOUBLE_EQ(c.at("C1").radius, 2.5);
    EXPECT_DOUBLE_EQ(c.at("C2").radius, 5.0);
    EXPECT_EQ(c.at("C3").center, (Point2{1, 0}));
    EXPECT_DOUBLE_EQ(c.at("C3").radius, 2.0);
    EXPECT_NEAR(c.at("C4").center.x, 1.0, 1e-12);
    EXPECT_NEAR(c.at("C4").center.y, 1.0, 1e-12);
    EXPECT_NEAR(c.at("C4").radius, std::sqrt(2.0), 1e-12);
}

TEST(PlotCode, CollinearThreePointCircleIsDegenerate) {
    CircleSpec spec{"C1", CircleSpec::Form::three_points, {"A", "B", "C"}, 0};
    const std::map<Label, Point2> pts{{"A", {0, 0}}, {"B", {1, 1}}, {"C", {2, 2}}};
    EXPECT_THROW(resolve_circle(spec, pts), DegenerateCircle);
    CircleSpec repeated{"C1", CircleSpec::Form::center_point, {"A", "A"}, 0};
    EXPECT_THROW(resolve_circle(repeated, pts), DegenerateCircle);
    CircleSpec missing{"C1", CircleSpec::Form::diameter, {"A", "Q"}, 0};
    EXPECT_THROW(resolve_circle(missing, pts), DanglingLabel);
}

TEST(PlotCode, CircumcircleMatchesEquidistanceOracle) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-20, 20);
    for (int i = 0; i < 200; ++i) {
        const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
        if (std::abs(orient(a, b, c)) < 1.0) continue;
        const std::map<Label, Point2> pts{{"A", a}, {"B", b}, {"C", c}};
        const auto r = resolve_circle({"C1", CircleSpec::Form::three_points, {"A", "B", "C"}, 0}, pts);
        for (const Point2 p : {a, b, c}) EXPECT_NEAR(distance(r.center, p), r.radius, 1e-9 * std::max(1.0, r.radius));
    }
}

TEST(PlotCode, SerializationIsCanonical) {
    auto a = parse_plotcode(kTriangle);
    auto b = a;
    b.segments = {{"C", "B"}, {"A", "C"}, {"B", "A"}, {"A", "B"}};
    EXPECT_TRUE(structurally_equal(a, b));
    EXPECT_EQ(canonical_serialize(a), canonical_serialize(b));
    EXPECT_TRUE(structurally_equal(parse_plotcode(canonical_serialize(a)), a));
    EXPECT_EQ(canonical_serialize(parse_plotcode(canonical_serialize(a))), canonical_serialize(a));
}

TEST(PlotCode, StructuralInequality) {
    auto a = parse_plotcode(kTriangle);
    auto b = a;
    b.points["C"].y = 3.5;
    EXPECT_FALSE(structurally_equal(a, b));
}

TEST(SimplifyForTraining, FloorsRadiusAndNamesCenter) {
    const auto pc = parse_plotcode(R"J({
      "points": {"O": [0, 0], "P": [3, 4], "A": [-2.5, 0], "B": [2.5, 0], "X": [10, 0], "Y": [13.7, 0], "Z": [10, 3.7]},
      "segments": [],
      "circles": [["C1", "O", "P"], ["C2", "A", "B", "diameter"], ["C3", "X", "Y", "Z"], ["C4", "O", 2.99]],
      "quantities": [], "annotations": {}})J");
    const auto s = simplify_for_training(pc);
    ASSERT_EQ(s.circles.size(), 4u);
    for (const auto& c : s.circles) EXPECT_EQ(c.form, CircleSpec::Form::center_radius);
    EXPECT_EQ(s.circles[0].points[0], "O");
    EXPECT_EQ(s.circles[0].radius, 5.0);
    // The diameter midpoint coincides with O, so O is reused.
    EXPECT_EQ(s.circles[1].points[0], "O");
    EXPECT_EQ(s.circles[1].radius, 2.0);
    EXPECT_EQ(s.circles[2].points[0], "O1");
    EXPECT_NEAR(s.points.at("O1").x, 11.85, 1e-12);
    EXPECT_EQ(s.circles[2].radius, std::floor(std::hypot(1.85, 1.85)));
    EXPECT_EQ(s.circles[3].radius, 2.0);
}

TEST(SimplifyForTraining, SubUnitRadiusIsDegenerate) {
    const auto pc = parse_plotcode(R"J({"points": {"O": [0, 0]}, "segments": [], "circles": [["C1", "O", 0.6]],
                                       "quantities": [], "annotations": {}})J");
    EXPECT_THROW(simplify_for_training(pc), DegenerateCircle);
}
