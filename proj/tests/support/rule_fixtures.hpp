#pragma once

// Hand-built configurations for individual deduction rules: given facts, a
// witness where they hold, and the conclusion the rule must produce.

#include "geoforge/geometry.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace fixtures {

using geoforge::Point2;

struct RuleFixture {
    std::string name;
    std::string rule;
    std::vector<std::string> given;
    std::map<std::string, Point2> coords;
    std::string conclusion;
};

inline void PrintTo(const RuleFixture& f, std::ostream* os) { *os << f.name; }

inline Point2 mid(Point2 a, Point2 b) { return {(a.x + b.x) / 2, (a.y + b.y) / 2}; }

// Circumcenter by solving the two perpendicular-bisector equations directly.
inline Point2 circumcenter(Point2 a, Point2 b, Point2 c) {
    const double d = 2 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    const double a2 = a.x * a.x + a.y * a.y, b2 = b.x * b.x + b.y * b.y, c2 = c.x * c.x + c.y * c.y;
    return {(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
            (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
}

inline Point2 incenter(Point2 a, Point2 b, Point2 c) {
    const double la = std::hypot(b.x - c.x, b.y - c.y);
    const double lb = std::hypot(c.x - a.x, c.y - a.y);
    const double lc = std::hypot(a.x - b.x, a.y - b.y);
    const double s = la + lb + lc;
    return {(la * a.x + lb * b.x + lc * c.x) / s, (la * a.y + lb * b.y + lc * c.y) / s};
}

inline Point2 on_circle(double r, double deg) {
    const double t = deg * 3.14159265358979323846 / 180.0;
    return {r * std::cos(t), r * std::sin(t)};
}

inline std::vector<RuleFixture> rule_fixtures() {
    std::vector<RuleFixture> out;

    out.push_back({"perpendiculars give parallel", "r00", {"perp A B C D", "perp C D E F"},
                   {{"A", {0, 0}}, {"B", {1, 0}}, {"C", {2, -1}}, {"D", {2, 1}}, {"E", {0, 2}}, {"F", {3, 2}}},
                   "para A B E F"});
    out.push_back({"perpendiculars give parallel, tilted", "r00", {"perp A B C D", "perp C D E F"},
                   {{"A", {0, 0}}, {"B", {2, 1}}, {"C", {5, 0}}, {"D", {4, 2}}, {"E", {1, 4}}, {"F", {5, 6}}},
                   "para A B E F"});
    out.push_back({"parallel from inclination", "r02", {"eqangle A B P Q C D P Q"},
                   {{"A", {0, 0}}, {"B", {2, 1}}, {"C", {0, 3}}, {"D", {2, 4}}, {"P", {5, 0}}, {"Q", {6, 3}}},
                   "para A B C D"});
    {
        const Point2 A{0, 4}, B{-2, 0}, C{3, 0};
        out.push_back({"midline", "r06", {"midp E A B", "midp F A C"},
                       {{"A", A}, {"B", B}, {"C", C}, {"E", mid(A, B)}, {"F", mid(A, C)}}, "para E F B C"});
        const Point2 A2{7, 1}, B2{-1, 0}, C2{1, 2};
        out.push_back({"midline, obtuse", "r06", {"midp E A B", "midp F A C"},
                       {{"A", A2}, {"B", B2}, {"C", C2}, {"E", mid(A2, B2)}, {"F", mid(A2, C2)}}, "para E F B C"});
    }
    // 3-4-5 right angle at A; D on BC with DB:DC = AB:AC = 3:4.
    const std::map<std::string, Point2> bisector{{"A", {0, 0}}, {"B", {3, 0}}, {"C", {0, 4}}, {"D", {12.0 / 7, 12.0 / 7}}};
    out.push_back({"bisector from ratio", "r11", {"eqratio D B D C A B A C", "coll D B C"}, bisector,
                   "eqangle A B A D A D A C"});
    out.push_back({"ratio from bisector", "r12", {"eqangle A B A D A D A C", "coll D B C"}, bisector,
                   "eqratio D B D C A B A C"});
    const std::map<std::string, Point2> iso{{"O", {0, 3}}, {"A", {-2, 0}}, {"B", {2, 0}}};
    out.push_back({"isosceles base angles", "r13", {"cong O A O B"}, iso, "eqangle O A A B A B O B"});
    out.push_back({"equal base angles", "r14", {"eqangle A O A B B A B O"}, iso, "cong O A O B"});
    out.push_back({"hypotenuse midpoint", "r19", {"perp A B B C", "midp M A C"},
                   {{"A", {0, 3}}, {"B", {0, 0}}, {"C", {4, 0}}, {"M", {2, 1.5}}}, "cong A M B M"});
    out.push_back({"hypotenuse midpoint, rotated", "r19", {"perp A B B C", "midp M A C"},
                   {{"A", {1, 1}}, {"B", {3, 2}}, {"C", {2, 4}}, {"M", {1.5, 2.5}}}, "cong A M B M"});
    out.push_back({"diameter subtends a right angle", "r20", {"circle O A B C", "coll O A C"},
                   {{"O", {0, 0}}, {"A", {-5, 0}}, {"B", {3, 4}}, {"C", {5, 0}}}, "perp A B B C"});
    out.push_back({"perpendicular bisector point", "r22", {"midp M A B", "perp O M A B"},
                   {{"A", {-2, 0}}, {"B", {2, 0}}, {"M", {0, 0}}, {"O", {0, 3}}}, "cong O A O B"});
    out.push_back({"two equidistant points", "r23", {"cong A P B P", "cong A Q B Q"},
                   {{"A", {-2, 0}}, {"B", {2, 0}}, {"P", {0, 3}}, {"Q", {0, -1}}}, "perp A B P Q"});
    out.push_back({"proportional division", "r27", {"eqratio O A A C O B B D", "coll O A C", "coll O B D"},
                   {{"O", {0, 0}}, {"A", {1, 0}}, {"C", {3, 0}}, {"B", {1, 2}}, {"D", {3, 6}}}, "para A B C D"});
    {
        const Point2 A{0, 0}, B{4, 0}, C{1, 3};
        auto img = [](Point2 p) { return Point2{2 * p.x + 10, 2 * p.y + 10}; };
        const std::map<std::string, Point2> sim{{"A", A}, {"B", B}, {"C", C}, {"P", img(A)}, {"Q", img(B)}, {"R", img(C)}};
        out.push_back({"similar by two angles", "r34", {"eqangle B A B C Q P Q R", "eqangle C A C B R P R Q"}, sim,
                       "simtri A B C P Q R"});
        out.push_back({"similar triangles give angles", "r52", {"simtri A B C P Q R"}, sim, "eqangle B A B C Q P Q R"});
        auto rot = [](Point2 p) { return Point2{-p.y + 10, p.x}; };
        out.push_back({"side-side-side", "r64", {"cong A B P Q", "cong B C Q R", "cong C A R P"},
                       {{"A", A}, {"B", B}, {"C", C}, {"P", rot(A)}, {"Q", rot(B)}, {"R", rot(C)}},
                       "contri A B C P Q R"});
        out.push_back({"incenter", "r46", {"eqangle A B A X A X A C", "eqangle B A B X B X B C"},
                       {{"A", A}, {"B", B}, {"C", C}, {"X", incenter(A, B, C)}}, "eqangle C B C X C X C A"});
        const Point2 X = circumcenter(A, B, C);
        out.push_back({"circumcenter", "r47",
                       {"midp M A B", "perp X M A B", "midp N B C", "perp X N B C", "midp P C A"},
                       {{"A", A}, {"B", B}, {"C", C}, {"X", X}, {"M", mid(A, B)}, {"N", mid(B, C)}, {"P", mid(C, A)}},
                       "perp X P C A"});
        const Point2 G{(A.x + B.x + C.x) / 3, (A.y + B.y + C.y) / 3};
        out.push_back({"centroid", "r48", {"midp M A B", "coll M X C", "midp N B C", "coll N X A", "midp P C A"},
                       {{"A", A}, {"B", B}, {"C", C}, {"X", G}, {"M", mid(A, B)}, {"N", mid(B, C)}, {"P", mid(C, A)}},
                       "coll X P B"});
    }
    // Trapezoid ABCD (AB || DC) cut at one third of both legs.
    out.push_back({"parallel through proportional points", "r41",
                   {"para A B C D", "coll M A D", "coll N B C", "eqratio M A M D N B N C"},
                   {{"A", {0, 0}}, {"B", {4, 0}}, {"C", {3, 2}}, {"D", {1, 2}}, {"M", {1.0 / 3, 2.0 / 3}},
                    {"N", {11.0 / 3, 2.0 / 3}}},
                   "para M N A B"});
    // Chords AB and PQ of equal length; R is C rotated with the chord.
    out.push_back({"equal chords, equal inscribed angles", "r58", {"cyclic A B C P Q R", "cong A B P Q"},
                   {{"A", on_circle(5, 0)}, {"B", on_circle(5, 60)}, {"C", on_circle(5, 200)},
                    {"P", on_circle(5, 100)}, {"Q", on_circle(5, 160)}, {"R", on_circle(5, 300)}},
                   "eqangle C A C B R P R Q"});
    return out;
}

}  // namespace fixtures
