#pragma once

#include "geoforge/geometry.hpp"

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace geoforge::dsl {

using Label = std::string;

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { number, atom, binary, negate };

    Kind kind = Kind::number;
    double value = 0.0;             // number
    std::string function;           // atom
    std::vector<std::string> args;  // atom: point labels, or a circle ID first
    char op = '+';                  // binary: + - * /
    ExprPtr lhs;                    // binary, negate
    ExprPtr rhs;                    // binary
};

bool operator==(const Expr& a, const Expr& b);

enum class ArgClass { point, circle };

struct FunctionSpec {
    std::string_view name;
    bool takes_circle = false;  // first argument is a circle ID
    std::size_t points = 0;     // point arguments after the optional circle
    bool variadic = false;      // `points` is a minimum
};

/// The full function table, in documentation order.
const std::vector<FunctionSpec>& function_table();
const FunctionSpec* find_function(std::string_view name);

/// Throws DslSyntaxError, UnknownFunction, CircleIdRequired,
/// PointLabelRequired or ArityError.
ExprPtr parse_quantity(std::string_view text);

/// Canonical text; parse_quantity(to_text(e)) equals e.
std::string to_text(const Expr& e);

struct Scene {
    const std::map<Label, Point2>& points;
    const std::map<std::string, Circle2>& circles;
};

/// Angles in degrees. Throws UnknownReference, DegenerateAngle or
/// DivisionByZero.
double eval_quantity(const Expr& e, const Scene& scene);

enum class ValueContext { length, angle };

/// Annotation and answer literals: "3/2", "2*sqrt(3)", "2\sqrt{3}", "pi/6",
/// "$\frac{\sqrt{3}}{2}$", "30°". In angle context an expression mentioning
/// pi is read as radians and returned in degrees. Throws ValueParseError.
double parse_value_literal(std::string_view text, ValueContext context);

}  // namespace geoforge::dsl
