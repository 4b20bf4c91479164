#include "geoforge/errors.hpp"
#include "geoforge/quantity_dsl.hpp"

#include "support/dsl_oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace geoforge;
using namespace geoforge::dsl;

namespace {

struct Fixture {
    std::map<Label, Point2> points;
    std::map<std::string, Circle2> circles;
    Scene scene() const { return {points, circles}; }
};

Fixture from_oracle(const oracle::OracleScene& o) {
    Fixture f;
    for (const auto& [l, p] : o.pts) f.points[l] = {p.x, p.y};
    for (const auto& [id, c] : o.circles) f.circles[id] = {{c.c.x, c.c.y}, c.r};
    return f;
}

// 3-4-5 right triangle at B, unit circle centered at B.
Fixture right_triangle() {
    Fixture f;
    f.points = {{"A", {0, 3}}, {"B", {0, 0}}, {"C", {4, 0}}, {"D", {4, 3}}, {"P", {1, 0}}, {"Q", {0, 1}}};
    f.circles = {{"C1", {{0, 0}, 1.0}}};
    return f;
}

double ev(const std::string& text, const Fixture& f) { return eval_quantity(*parse_quantity(text), f.scene()); }

}  // namespace

TEST(QuantityDsl, FunctionTableHasTwentyEntries) {
    EXPECT_EQ(function_table().size(), 20u);
    EXPECT_NE(find_function("segment_area"), nullptr);
    EXPECT_EQ(find_function("volume"), nullptr);
}

TEST(QuantityDsl, EvaluatesExamples) {
    const auto f = right_triangle();
    EXPECT_DOUBLE_EQ(ev("length(A, C)", f), 5.0);
    EXPECT_NEAR(ev("angle(A, B, C)", f), 90.0, 1e-12);
    EXPECT_NEAR(ev("tan(A, C, B)", f), 0.75, 1e-12);
    EXPECT_NEAR(ev("sin(B, C, A)", f), 0.6, 1e-12);
    EXPECT_DOUBLE_EQ(ev("area(A, B, C)", f), 6.0);
    EXPECT_DOUBLE_EQ(ev("area(A, B, C, D)", f), 12.0);
    EXPECT_DOUBLE_EQ(ev("perimeter(A, B, C)", f), 12.0);
    EXPECT_NEAR(ev("angle_between_lines(A, B, B, C)", f), 90.0, 1e-12);
    EXPECT_NEAR(ev("angle_between_lines(B, A, D, C)", f), 0.0, 1e-12);
    EXPECT_NEAR(ev("central_angle(C1, P, Q)", f), 90.0, 1e-12);
    EXPECT_NEAR(ev("arc_inscribed_angle(C1, P, Q)", f), 45.0, 1e-12);
    EXPECT_NEAR(ev("arc_length(C1, P, Q)", f), std::numbers::pi / 2, 1e-12);
    EXPECT_NEAR(ev("sector_area(C1, P, Q)", f), std::numbers::pi / 4, 1e-12);
    EXPECT_NEAR(ev("segment_area(C1, P, Q)", f), std::numbers::pi / 4 - 0.5, 1e-12);
    EXPECT_DOUBLE_EQ(ev("diameter(C1)", f), 2.0);
    EXPECT_NEAR(ev("circle_area(C1)", f), std::numbers::pi, 1e-12);
    EXPECT_NEAR(ev("length(A, C) * 2 - -1", f), 11.0, 1e-12);
    EXPECT_NEAR(ev("1 + 2 * 3", f), 7.0, 0);
    EXPECT_NEAR(ev("(1 + 2) * 3", f), 9.0, 0);
    EXPECT_NEAR(ev("8 / 4 / 2", f), 1.0, 0);
}

TEST(QuantityDsl, ParseErrors) {
    EXPECT_THROW(parse_quantity("radius(A)"), CircleIdRequired);
    EXPECT_THROW(parse_quantity("length(A)"), ArityError);
    EXPECT_THROW(parse_quantity("angle(A, B, C, D)"), ArityError);
    EXPECT_THROW(parse_quantity("area(A, B)"), ArityError);
    EXPECT_THROW(parse_quantity("length(C1, A)"), PointLabelRequired);
    EXPECT_THROW(parse_quantity("volume(A, B)"), UnknownFunction);
    EXPECT_THROW(parse_quantity("length(A, B"), DslSyntaxError);
    EXPECT_THROW(parse_quantity("1 +"), DslSyntaxError);
    EXPECT_THROW(parse_quantity(""), DslSyntaxError);
}

TEST(QuantityDsl, EvaluationErrors) {
    const auto f = right_triangle();
    EXPECT_THROW(ev("length(A, Z)", f), UnknownReference);
    EXPECT_THROW(ev("radius(C9)", f), UnknownReference);
    EXPECT_THROW(ev("angle(A, A, C)", f), DegenerateAngle);
    EXPECT_THROW(ev("length(A, C) / (length(A, B) - 3)", f), DivisionByZero);
}

TEST(QuantityDsl, TextRoundTrip) {
    for (const char* t : {"length(A, B)", "(length(A, B) + 2) * 3 - angle(A, B, C) / 4", "-radius(C1)",
                          "area(A, B, C, D, E)", "1.5e-3 - -2"}) {
        const auto e = parse_quantity(t);
        EXPECT_EQ(*parse_quantity(to_text(*e)), *e) << t;
        EXPECT_EQ(to_text(*parse_quantity(to_text(*e))), to_text(*e)) << t;
    }
}

TEST(QuantityDsl, MatchesIndependentOracle) {
    int checked = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto o = oracle::random_scene(s);
        const auto f = from_oracle(o);
        oracle::Generator gen(o, 1000 + s);
        for (int i = 0; i < 20; ++i) {
            const auto expr = gen.expression(3);
            if (!expr) continue;
            const double got = ev(expr->first, f);
            EXPECT_NEAR(got, expr->second.v, 1e-9 * std::max(expr->second.scale, 1.0)) << expr->first;
            ++checked;
        }
    }
    EXPECT_GT(checked, 200);
}

TEST(QuantityDsl, Identities) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto f = from_oracle(oracle::random_scene(s));
        EXPECT_NEAR(ev("sin(A, B, C) * sin(A, B, C) + cos(A, B, C) * cos(A, B, C)", f), 1.0, 1e-12);
        EXPECT_NEAR(ev("angle(A, B, C) + angle(B, C, A) + angle(C, A, B)", f), 180.0, 1e-12 * 180);
        EXPECT_NEAR(ev("length(A, B) - length(B, A)", f), 0.0, 1e-12);
        const double sector = ev("sector_area(C2, D, E)", f);
        EXPECT_NEAR(ev("arc_length(C2, D, E) * radius(C2) / 2", f), sector, 1e-12 * std::max(sector, 1.0));
        EXPECT_NEAR(ev("central_angle(C1, A, B) - 2 * arc_inscribed_angle(C1, A, B)", f), 0.0, 1e-12);
        EXPECT_NEAR(ev("angle_between_lines(A, B, C, D) - angle_between_lines(D, C, B, A)", f), 0.0, 1e-12);
        const double area = ev("area(A, B, C)", f);
        EXPECT_NEAR(ev("length(B, A) * length(B, C) * sin(A, B, C) / 2", f), area, 1e-12 * std::max(area, 1.0));
    }
}

TEST(ValueLiteral, Forms) {
    using V = ValueContext;
    EXPECT_DOUBLE_EQ(parse_value_literal("3/2", V::length), 1.5);
    EXPECT_NEAR(parse_value_literal("2*sqrt(3)", V::length), 2 * std::sqrt(3.0), 1e-12);
    EXPECT_NEAR(parse_value_literal("2\\sqrt{3}", V::length), 2 * std::sqrt(3.0), 1e-12);
    EXPECT_NEAR(parse_value_literal("2√3", V::length), 2 * std::sqrt(3.0), 1e-12);
    EXPECT_NEAR(parse_value_literal("$\\frac{\\sqrt{3}}{2}$", V::length), std::sqrt(3.0) / 2, 1e-12);
    EXPECT_NEAR(parse_value_literal("pi/6", V::angle), 30.0, 1e-12);
    EXPECT_NEAR(parse_value_literal("30°", V::angle), 30.0, 1e-12);
    EXPECT_NEAR(parse_value_literal("45^\\circ", V::angle), 45.0, 1e-12);
    EXPECT_NEAR(parse_value_literal("60", V::angle), 60.0, 1e-12);
    EXPECT_NEAR(parse_value_literal("pi", V::length), std::numbers::pi, 1e-12);
    EXPECT_THROW(parse_value_literal("abc", V::length), ValueParseError);
    EXPECT_THROW(parse_value_literal("\\int x", V::length), ValueParseError);
    EXPECT_THROW(parse_value_literal("1/0", V::length), ValueParseError);
}
