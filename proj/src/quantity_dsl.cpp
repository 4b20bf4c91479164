#include "geoforge/quantity_dsl.hpp"

#include "geoforge/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

namespace geoforge::dsl {

namespace {

bool is_circle_id(std::string_view s) {
    return s.size() >= 2 && s[0] == 'C' &&
           std::all_of(s.begin() + 1, s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// Unicode operators to their ASCII spelling.
std::string ascii_operators(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        auto starts = [&](std::string_view s) { return in.substr(i, s.size()) == s; };
        if (starts("×")) {
            out += '*';
            i += std::string_view("×").size() - 1;
        } else if (starts("÷")) {
            out += '/';
            i += std::string_view("÷").size() - 1;
        } else if (starts("−")) {
            out += '-';
            i += std::string_view("−").size() - 1;
        } else {
            out += in[i];
        }
    }
    return out;
}

// Shared recursive-descent core. Quantity mode parses atoms from the
// function table; literal mode allows sqrt, pi and implicit products.
template <class Error>
class Parser {
public:
    Parser(std::string_view text, bool literal_mode) : s_(text), literal_(literal_mode) {}

    ExprPtr parse_all() {
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

    bool saw_pi = false;

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw Error("at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "': " + why);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static ExprPtr binary(char op, ExprPtr l, ExprPtr r) {
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::binary;
        e->op = op;
        e->lhs = std::move(l);
        e->rhs = std::move(r);
        return e;
    }

    static ExprPtr number(double v) {
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::number;
        e->value = v;
        return e;
    }

    ExprPtr parse_sum() {
        ExprPtr lhs = parse_product();
        for (;;) {
            if (eat('+')) lhs = binary('+', lhs, parse_product());
            else if (eat('-')) lhs = binary('-', lhs, parse_product());
            else return lhs;
        }
    }

    bool starts_factor() {
        skip_ws();
        if (pos_ >= s_.size()) return false;
        const char c = s_[pos_];
        return c == '(' || ident_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '.';
    }

    ExprPtr parse_product() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            if (eat('*')) lhs = binary('*', lhs, parse_unary());
            else if (eat('/')) lhs = binary('/', lhs, parse_unary());
            else if (literal_ && starts_factor()) lhs = binary('*', lhs, parse_unary());
            else return lhs;
        }
    }

    ExprPtr parse_unary() {
        if (eat('-')) {
            ExprPtr inner = parse_unary();
            if (inner->kind == Expr::Kind::number) return number(-inner->value);
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::negate;
            e->lhs = std::move(inner);
            return e;
        }
        if (eat('+')) return parse_unary();
        return parse_primary();
    }

    ExprPtr parse_primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = parse_sum();
            if (!eat(')')) fail("missing ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (ident_start(c)) return parse_identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    ExprPtr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
            if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
                pos_ = p;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            }
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (ec != std::errc{} || ptr != s_.data() + pos_) fail("malformed number");
        return number(v);
    }

    std::string identifier() {
        skip_ws();
        const std::size_t start = pos_;
        if (pos_ >= s_.size() || !ident_start(s_[pos_])) fail("expected a name");
        while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    ExprPtr parse_identifier() {
        const std::string name = identifier();
        if (literal_) {
            if (name == "pi") {
                saw_pi = true;
                return number(std::numbers::pi);
            }
            if (name == "sqrt") {
                if (!eat('(')) fail("sqrt needs parentheses");
                ExprPtr arg = parse_sum();
                if (!eat(')')) fail("missing ')'");
                auto e = std::make_shared<Expr>();
                e->kind = Expr::Kind::atom;
                e->function = "sqrt";
                e->lhs = std::move(arg);
                return e;
            }
            fail("unknown name '" + name + "'");
        }
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != '(') fail("expected '(' after '" + name + "'");
        const FunctionSpec* spec = find_function(name);
        if (!spec) throw UnknownFunction(name);
        ++pos_;
        std::vector<std::string> args;
        if (!eat(')')) {
            do args.push_back(identifier());
            while (eat(','));
            if (!eat(')')) fail("missing ')'");
        }
        check_call(*spec, args);
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::atom;
        e->function = name;
        e->args = std::move(args);
        return e;
    }

    static void check_call(const FunctionSpec& spec, const std::vector<std::string>& args) {
        const std::string fn(spec.name);
        std::size_t first_point = 0;
        if (spec.takes_circle) {
            if (args.empty()) throw ArityError(fn + " needs a circle ID");
            if (!is_circle_id(args[0]))
                throw CircleIdRequired(fn + "(" + args[0] + "): '" + args[0] + "' is not a circle ID");
            first_point = 1;
        }
        const std::size_t n = args.size() - first_point;
        if (spec.variadic ? n < spec.points : n != spec.points)
            throw ArityError(fn + " takes " + (spec.variadic ? "at least " : "") +
                             std::to_string(spec.points + first_point) + " arguments, got " +
                             std::to_string(args.size()));
        for (std::size_t i = first_point; i < args.size(); ++i)
            if (is_circle_id(args[i]))
                throw PointLabelRequired(fn + ": '" + args[i] + "' is a circle ID, not a point");
    }

    std::string_view s_;
    bool literal_;
    std::size_t pos_ = 0;
};

int precedence(const Expr& e) {
    if (e.kind != Expr::Kind::binary) return 3;
    return (e.op == '+' || e.op == '-') ? 1 : 2;
}

// --- evaluation -------------------------------------------------------------

Point2 point(const Scene& scene, const std::string& label) {
    auto it = scene.points.find(label);
    if (it == scene.points.end()) throw UnknownReference("point '" + label + "'");
    return it->second;
}

Circle2 circle(const Scene& scene, const std::string& id) {
    auto it = scene.circles.find(id);
    if (it == scene.circles.end()) throw UnknownReference("circle '" + id + "'");
    return it->second;
}

double angle_rad(Point2 a, Point2 v, Point2 c, const std::string& what) {
    if (norm(a - v) < 1e-12 || norm(c - v) < 1e-12) throw DegenerateAngle(what + ": coincident points");
    return vertex_angle(a, v, c);
}

double lines_rad(Point2 a, Point2 b, Point2 c, Point2 d, const std::string& what) {
    if (norm(b - a) < 1e-12 || norm(d - c) < 1e-12) throw DegenerateAngle(what + ": zero-length line");
    return line_angle(a, b, c, d);
}

double eval_atom(const Expr& e, const Scene& scene) {
    const auto& f = e.function;
    const auto& a = e.args;
    auto P = [&](std::size_t i) { return point(scene, a.at(i)); };
    if (f == "length") return distance(P(0), P(1));
    if (f == "angle") return rad_to_deg(angle_rad(P(0), P(1), P(2), f));
    if (f == "sin") return std::sin(angle_rad(P(0), P(1), P(2), f));
    if (f == "cos") return std::cos(angle_rad(P(0), P(1), P(2), f));
    if (f == "tan") return std::tan(angle_rad(P(0), P(1), P(2), f));
    if (f == "angle_between_lines") return rad_to_deg(lines_rad(P(0), P(1), P(2), P(3), f));
    if (f == "sin_between_lines") return std::sin(lines_rad(P(0), P(1), P(2), P(3), f));
    if (f == "cos_between_lines") return std::cos(lines_rad(P(0), P(1), P(2), P(3), f));
    if (f == "tan_between_lines") return std::tan(lines_rad(P(0), P(1), P(2), P(3), f));
    if (f == "area" || f == "perimeter") {
        std::vector<Point2> pts;
        for (std::size_t i = 0; i < a.size(); ++i) pts.push_back(P(i));
        if (f == "area") return polygon_area(pts);
        double sum = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) sum += distance(pts[i], pts[(i + 1) % pts.size()]);
        return sum;
    }
    const Circle2 c = circle(scene, a.at(0));
    if (f == "radius") return c.radius;
    if (f == "diameter") return 2.0 * c.radius;
    if (f == "circle_area") return std::numbers::pi * c.radius * c.radius;
    if (f == "circle_perimeter") return 2.0 * std::numbers::pi * c.radius;
    const double theta = angle_rad(P(1), c.center, P(2), f);
    if (f == "central_angle") return rad_to_deg(theta);
    if (f == "arc_inscribed_angle") return rad_to_deg(theta) / 2.0;
    if (f == "arc_length") return c.radius * theta;
    if (f == "sector_area") return c.radius * c.radius * theta / 2.0;
    if (f == "segment_area") return c.radius * c.radius * (theta - std::sin(theta)) / 2.0;
    throw UnknownFunction(f);
}

double eval_literal(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::number:
        return e.value;
    case Expr::Kind::negate:
        return -eval_literal(*e.lhs);
    case Expr::Kind::atom: {
        const double v = eval_literal(*e.lhs);
        if (v < 0) throw ValueParseError("negative radicand");
        return std::sqrt(v);
    }
    case Expr::Kind::binary: {
        const double l = eval_literal(*e.lhs);
        const double r = eval_literal(*e.rhs);
        switch (e.op) {
        case '+': return l + r;
        case '-': return l - r;
        case '*': return l * r;
        default:
            if (r == 0.0) throw ValueParseError("division by zero");
            return l / r;
        }
    }
    }
    return 0.0;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

// Reads a {...} group starting at `pos` (which must hold '{').
std::string brace_group(const std::string& s, std::size_t& pos) {
    if (pos >= s.size() || s[pos] != '{') throw ValueParseError("expected '{' in '" + s + "'");
    int depth = 0;
    const std::size_t start = pos;
    for (; pos < s.size(); ++pos) {
        if (s[pos] == '{') ++depth;
        if (s[pos] == '}' && --depth == 0) {
            ++pos;
            return s.substr(start + 1, pos - start - 2);
        }
    }
    throw ValueParseError("unbalanced braces in '" + s + "'");
}

// LaTeX and typographic spellings to the plain literal grammar.
std::string normalize_literal(std::string_view raw, bool& degrees_marked) {
    std::string s = ascii_operators(raw);
    replace_all(s, "$", "");
    replace_all(s, "\\left", "");
    replace_all(s, "\\right", "");
    replace_all(s, "\\cdot", "*");
    replace_all(s, "\\times", "*");
    replace_all(s, "\\dfrac", "\\frac");
    replace_all(s, "\\tfrac", "\\frac");
    replace_all(s, "\\pi", "pi");
    replace_all(s, "π", "pi");
    replace_all(s, "√", "sqrt");
    for (std::string_view deg : {"^\\circ", "^{\\circ}", "\\circ", "°", "degrees", "degree", "deg"}) {
        if (s.find(deg) != std::string::npos) {
            degrees_marked = true;
            replace_all(s, deg, "");
        }
    }
    std::string out;
    for (std::size_t i = 0; i < s.size();) {
        if (s.compare(i, 5, "\\frac") == 0) {
            i += 5;
            while (i < s.size() && s[i] == ' ') ++i;
            const std::string num = brace_group(s, i);
            while (i < s.size() && s[i] == ' ') ++i;
            const std::string den = brace_group(s, i);
            bool inner = false;
            out += "((" + normalize_literal(num, inner) + ")/(" + normalize_literal(den, inner) + "))";
        } else if (s.compare(i, 5, "\\sqrt") == 0) {
            i += 5;
            while (i < s.size() && s[i] == ' ') ++i;
            bool inner = false;
            out += "sqrt(" + normalize_literal(brace_group(s, i), inner) + ")";
        } else if (s.compare(i, 4, "sqrt") == 0 && i + 4 < s.size() &&
                   std::isdigit(static_cast<unsigned char>(s[i + 4]))) {
            // "sqrt3" as written after replacing the radical sign
            i += 4;
            std::size_t j = i;
            while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
            out += "sqrt(" + s.substr(i, j - i) + ")";
            i = j;
        } else if (s[i] == '{' || s[i] == '}') {
            out += s[i] == '{' ? '(' : ')';
            ++i;
        } else if (s[i] == '\\') {
            throw ValueParseError("unsupported LaTeX command in '" + std::string(raw) + "'");
        } else {
            out += s[i++];
        }
    }
    return out;
}

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    auto same = [](const ExprPtr& x, const ExprPtr& y) {
        if (!x || !y) return !x && !y;
        return *x == *y;
    };
    switch (a.kind) {
    case Expr::Kind::number: return a.value == b.value;
    case Expr::Kind::atom: return a.function == b.function && a.args == b.args && same(a.lhs, b.lhs);
    case Expr::Kind::binary: return a.op == b.op && same(a.lhs, b.lhs) && same(a.rhs, b.rhs);
    case Expr::Kind::negate: return same(a.lhs, b.lhs);
    }
    return false;
}

const std::vector<FunctionSpec>& function_table() {
    static const std::vector<FunctionSpec> table{
        {"length", false, 2, false},
        {"angle", false, 3, false},
        {"tan", false, 3, false},
        {"sin", false, 3, false},
        {"cos", false, 3, false},
        {"area", false, 3, true},
        {"perimeter", false, 3, true},
        {"angle_between_lines", false, 4, false},
        {"tan_between_lines", false, 4, false},
        {"sin_between_lines", false, 4, false},
        {"cos_between_lines", false, 4, false},
        {"central_angle", true, 2, false},
        {"arc_length", true, 2, false},
        {"sector_area", true, 2, false},
        {"arc_inscribed_angle", true, 2, false},
        {"circle_area", true, 0, false},
        {"circle_perimeter", true, 0, false},
        {"segment_area", true, 2, false},
        {"radius", true, 0, false},
        {"diameter", true, 0, false},
    };
    return table;
}

const FunctionSpec* find_function(std::string_view name) {
    for (const auto& f : function_table())
        if (f.name == name) return &f;
    return nullptr;
}

ExprPtr parse_quantity(std::string_view text) {
    const std::string ascii = ascii_operators(text);
    return Parser<DslSyntaxError>(ascii, false).parse_all();
}

std::string to_text(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::number:
        return format_number(e.value);
    case Expr::Kind::atom: {
        if (e.function == "sqrt") return "sqrt(" + to_text(*e.lhs) + ")";
        std::string out = e.function + "(";
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            if (i) out += ", ";
            out += e.args[i];
        }
        return out + ")";
    }
    case Expr::Kind::negate: {
        const std::string inner = to_text(*e.lhs);
        return e.lhs->kind == Expr::Kind::binary ? "-(" + inner + ")" : "-" + inner;
    }
    case Expr::Kind::binary: {
        const int p = precedence(e);
        std::string l = to_text(*e.lhs);
        std::string r = to_text(*e.rhs);
        // Left-associative: the right operand needs parentheses at equal
        // precedence, the left one only at lower precedence.
        if (precedence(*e.lhs) < p) l = "(" + l + ")";
        if (precedence(*e.rhs) <= p && e.rhs->kind == Expr::Kind::binary) r = "(" + r + ")";
        return l + " " + e.op + " " + r;
    }
    }
    return {};
}

double eval_quantity(const Expr& e, const Scene& scene) {
    switch (e.kind) {
    case Expr::Kind::number:
        return e.value;
    case Expr::Kind::negate:
        return -eval_quantity(*e.lhs, scene);
    case Expr::Kind::atom:
        return eval_atom(e, scene);
    case Expr::Kind::binary: {
        const double l = eval_quantity(*e.lhs, scene);
        const double r = eval_quantity(*e.rhs, scene);
        switch (e.op) {
        case '+': return l + r;
        case '-': return l - r;
        case '*': return l * r;
        default:
            if (std::abs(r) < 1e-12) throw DivisionByZero("divisor " + format_number(r) + " in " + to_text(e));
            return l / r;
        }
    }
    }
    return 0.0;
}

double parse_value_literal(std::string_view text, ValueContext context) {
    bool degrees_marked = false;
    const std::string normalized = normalize_literal(text, degrees_marked);
    Parser<ValueParseError> parser(normalized, true);
    const ExprPtr e = parser.parse_all();
    const double v = eval_literal(*e);
    if (!std::isfinite(v)) throw ValueParseError("'" + std::string(text) + "' is not finite");
    if (context == ValueContext::angle && parser.saw_pi && !degrees_marked) return rad_to_deg(v);
    return v;
}

}  // namespace geoforge::dsl
