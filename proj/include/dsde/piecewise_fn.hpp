#pragma once

#include "dsde/expression.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dsde {

enum class Side { Left, Right };

/// Tolerance under which two breakpoints count as duplicates.
inline constexpr double kBreakpointTolerance = 1e-12;

/// Throws ValidationError naming the first offending index unless the
/// breakpoints are finite and strictly increasing with gaps above
/// kBreakpointTolerance.
void validate_breakpoints(std::span<const double> breakpoints);

/// Scalar function given by ordered breakpoints ξ₁ < … < ξ_m and m+1 branch
/// expressions. Branch i lives on (ξ_i, ξ_{i+1}) with ξ₀ = -∞, ξ_{m+1} = +∞.
///
/// The representation is right-continuous: at x = ξ_k the right-hand branch
/// owns the value. Each branch must extend continuously to the closure of its
/// interval, which makes one-sided limits a plain branch evaluation at ξ_k.
class PiecewiseFn {
public:
    PiecewiseFn(std::vector<double> breakpoints, std::vector<Expression> branches);

    /// Parses every branch with parse_expression.
    static PiecewiseFn parse(std::vector<double> breakpoints, const std::vector<std::string>& branches);
    static PiecewiseFn constant(double value);

    /// Throws EvaluationError if the owning branch yields a non-finite value.
    double eval(double x) const;
    double operator()(double x) const { return eval(x); }

    /// Limit of f(y) as y → xi from the requested side. Away from breakpoints
    /// this is eval(xi).
    double one_sided_limit(double xi, Side side) const;

    /// Index of the branch that owns x under the right-continuous convention.
    std::size_t branch_index(double x) const;

    std::span<const double> breakpoints() const { return breakpoints_; }
    const std::vector<Expression>& branches() const { return branches_; }

    /// Evaluates branch `index` directly, bypassing ownership rules.
    double eval_branch(std::size_t index, double x) const;

private:
    std::vector<double> breakpoints_;
    std::vector<Expression> branches_;
};

}  // namespace dsde
