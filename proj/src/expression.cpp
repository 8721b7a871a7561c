#include "dsde/expression.hpp"

#include "dsde/error.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <system_error>
#include <utility>
#include <vector>

namespace dsde {

struct Expression::Node {
    Kind kind = Kind::Literal;
    double value = 0.0;
    Function fn = Function::Sign;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

constexpr std::array<std::pair<std::string_view, Expression::Function>, 6> kFunctions{{
    {"sign", Expression::Function::Sign},
    {"abs", Expression::Function::Abs},
    {"exp", Expression::Function::Exp},
    {"sin", Expression::Function::Sin},
    {"cos", Expression::Function::Cos},
    {"sqrt", Expression::Function::Sqrt},
}};

double apply(Expression::Function fn, double v) {
    switch (fn) {
    case Expression::Function::Sign: return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    case Expression::Function::Abs: return std::fabs(v);
    case Expression::Function::Exp: return std::exp(v);
    case Expression::Function::Sin: return std::sin(v);
    case Expression::Function::Cos: return std::cos(v);
    case Expression::Function::Sqrt: return std::sqrt(v);
    }
    return v;
}

double eval_node(const Expression::Node& n, double x) {
    using K = Expression::Kind;
    switch (n.kind) {
    case K::Literal: return n.value;
    case K::Variable: return x;
    case K::Add: return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
    case K::Sub: return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
    case K::Mul: return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
    case K::Div: return eval_node(*n.lhs, x) / eval_node(*n.rhs, x);
    case K::Pow: {
        const double base = eval_node(*n.lhs, x);
        const double expo = eval_node(*n.rhs, x);
        if (expo == 2.0) return base * base;
        return std::pow(base, expo);
    }
    case K::Neg: return -eval_node(*n.lhs, x);
    case K::Call: return apply(n.fn, eval_node(*n.lhs, x));
    }
    return 0.0;
}

bool equal_nodes(const Expression::Node* a, const Expression::Node* b) {
    if (a == b) return true;
    if (a == nullptr || b == nullptr) return false;
    if (a->kind != b->kind) return false;
    using K = Expression::Kind;
    switch (a->kind) {
    case K::Literal: return a->value == b->value;
    case K::Variable: return true;
    case K::Call:
        return a->fn == b->fn && equal_nodes(a->lhs.get(), b->lhs.get());
    case K::Neg: return equal_nodes(a->lhs.get(), b->lhs.get());
    default:
        return equal_nodes(a->lhs.get(), b->lhs.get()) && equal_nodes(a->rhs.get(), b->rhs.get());
    }
}

std::string format_literal(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

void print_node(const Expression::Node& n, std::string& out) {
    using K = Expression::Kind;
    auto binop = [&](const char* op) {
        out += '(';
        print_node(*n.lhs, out);
        out += op;
        print_node(*n.rhs, out);
        out += ')';
    };
    switch (n.kind) {
    case K::Literal:
        if (std::signbit(n.value)) {
            out += "(-" + format_literal(-n.value) + ")";
        } else {
            out += format_literal(n.value);
        }
        break;
    case K::Variable: out += 'x'; break;
    case K::Add: binop(" + "); break;
    case K::Sub: binop(" - "); break;
    case K::Mul: binop(" * "); break;
    case K::Div: binop(" / "); break;
    case K::Pow: binop(" ^ "); break;
    case K::Neg:
        out += "(-";
        print_node(*n.lhs, out);
        out += ')';
        break;
    case K::Call:
        out += function_name(n.fn);
        out += '(';
        print_node(*n.lhs, out);
        out += ')';
        break;
    }
}

// Recursive-descent parser over a byte string.
class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip_space();
        if (pos_ != src_.size()) {
            fail("expected operator or end of input");
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& message) const { throw ParseError(pos_, message); }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    static NodePtr make(Expression::Kind k, NodePtr lhs, NodePtr rhs = nullptr) {
        auto n = std::make_shared<Expression::Node>();
        n->kind = k;
        n->lhs = std::move(lhs);
        n->rhs = std::move(rhs);
        return n;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = make(Expression::Kind::Add, lhs, term());
            else if (accept('-')) lhs = make(Expression::Kind::Sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (accept('*')) lhs = make(Expression::Kind::Mul, lhs, factor());
            else if (accept('/')) lhs = make(Expression::Kind::Div, lhs, factor());
            else return lhs;
        }
    }

    NodePtr factor() {
        if (accept('-')) return make(Expression::Kind::Neg, factor());
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (accept('^')) return make(Expression::Kind::Pow, base, factor());
        return base;
    }

    NodePtr atom() {
        skip_space();
        if (pos_ >= src_.size()) fail("expected number, 'x', function call or '('");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = expr();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t mantissa = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) {
            pos_ = start;
            fail("malformed number");
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) fail("expected exponent digits");
        }
        double value = 0.0;
        const char* first = src_.data() + start;
        const char* last = src_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
            pos_ = start;
            fail("number out of range");
        }
        auto n = std::make_shared<Expression::Node>();
        n->kind = Expression::Kind::Literal;
        n->value = value;
        return n;
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name == "x") {
            auto n = std::make_shared<Expression::Node>();
            n->kind = Expression::Kind::Variable;
            return n;
        }
        std::optional<Expression::Function> fn;
        for (const auto& [fname, f] : kFunctions) {
            if (fname == name) fn = f;
        }
        if (!fn) {
            pos_ = start;
            fail("unknown identifier '" + std::string(name) + "'");
        }
        const std::size_t call_pos = pos_;
        if (!accept('(')) fail("expected '(' after function name '" + std::string(name) + "'");
        std::vector<NodePtr> args;
        skip_space();
        if (!(pos_ < src_.size() && src_[pos_] == ')')) {
            args.push_back(expr());
            while (accept(',')) args.push_back(expr());
        }
        expect(')');
        if (args.size() != 1) {
            pos_ = call_pos;
            fail("function '" + std::string(name) + "' takes 1 argument, got " +
                 std::to_string(args.size()));
        }
        auto n = std::make_shared<Expression::Node>();
        n->kind = Expression::Kind::Call;
        n->fn = *fn;
        n->lhs = std::move(args.front());
        return n;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

Expression Expression::literal(double value) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Literal;
    n->value = value;
    return Expression(std::move(n));
}

Expression Expression::variable() {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    return Expression(std::move(n));
}

Expression Expression::binary(Kind op, Expression lhs, Expression rhs) {
    if (op != Kind::Add && op != Kind::Sub && op != Kind::Mul && op != Kind::Div && op != Kind::Pow) {
        throw std::invalid_argument("Expression::binary: not a binary operator");
    }
    auto n = std::make_shared<Node>();
    n->kind = op;
    n->lhs = std::move(lhs.root_);
    n->rhs = std::move(rhs.root_);
    return Expression(std::move(n));
}

Expression Expression::negate(Expression operand) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Neg;
    n->lhs = std::move(operand.root_);
    return Expression(std::move(n));
}

Expression Expression::call(Function fn, Expression argument) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Call;
    n->fn = fn;
    n->lhs = std::move(argument.root_);
    return Expression(std::move(n));
}

double Expression::evaluate(double x) const { return eval_node(*root_, x); }

std::string Expression::to_string() const {
    std::string out;
    print_node(*root_, out);
    return out;
}

Expression::Kind Expression::kind() const { return root_->kind; }

bool operator==(const Expression& a, const Expression& b) {
    return equal_nodes(a.root_.get(), b.root_.get());
}

std::string_view function_name(Expression::Function fn) {
    for (const auto& [name, f] : kFunctions) {
        if (f == fn) return name;
    }
    return "?";
}

Expression parse_expression(std::string_view src) {
    Parser parser(src);
    return Expression(parser.parse());
}

}  // namespace dsde
