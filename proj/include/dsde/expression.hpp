#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace dsde {

/// Immutable syntax tree of a univariate scalar expression in `x`.
///
/// The language covers real literals, the variable `x`, the binary operators
/// `+ - * / ^`, unary minus and the functions sign, abs, exp, sin, cos, sqrt.
/// `^` is right-associative and binds tighter than unary minus, so `-x^2`
/// means `-(x^2)`. `sign(0)` is 0.
///
/// Nodes are shared and never mutated, so copies are cheap and an Expression
/// may be evaluated concurrently from any number of threads.
class Expression {
public:
    enum class Kind { Literal, Variable, Add, Sub, Mul, Div, Pow, Neg, Call };
    enum class Function { Sign, Abs, Exp, Sin, Cos, Sqrt };

    static Expression literal(double value);
    static Expression variable();
    static Expression binary(Kind op, Expression lhs, Expression rhs);
    static Expression negate(Expression operand);
    static Expression call(Function fn, Expression argument);

    double evaluate(double x) const;

    /// Fully parenthesized text; parsing it yields an identical tree.
    std::string to_string() const;

    Kind kind() const;

    friend bool operator==(const Expression& a, const Expression& b);
    friend Expression parse_expression(std::string_view src);

    struct Node;

private:
    explicit Expression(std::shared_ptr<const Node> root);
    std::shared_ptr<const Node> root_;
};

/// Parses `src` using the grammar
///
///     expr   := term (('+'|'-') term)*
///     term   := factor (('*'|'/') factor)*
///     factor := '-' factor | power
///     power  := atom ('^' factor)?
///     atom   := number | 'x' | ident '(' expr ')' | '(' expr ')'
///
/// Throws ParseError carrying the byte offset of the offending token.
Expression parse_expression(std::string_view src);

std::string_view function_name(Expression::Function fn);

}  // namespace dsde
