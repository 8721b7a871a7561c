#include "dsde/piecewise_fn.hpp"

#include "dsde/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dsde {

namespace {

// Half-width of the probe window used for unbounded outer branches.
constexpr double kProbeReach = 10.0;
constexpr int kProbePoints = 33;

std::string describe(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

void validate_breakpoints(std::span<const double> breakpoints) {
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (!std::isfinite(breakpoints[i])) {
            throw ValidationError("breakpoint " + std::to_string(i) + " is not finite");
        }
        if (i == 0) continue;
        const double gap = breakpoints[i] - breakpoints[i - 1];
        if (std::fabs(gap) <= kBreakpointTolerance) {
            throw ValidationError("breakpoint " + std::to_string(i) + " duplicates breakpoint " +
                                  std::to_string(i - 1) + " (" + describe(breakpoints[i]) + ")");
        }
        if (gap < 0.0) {
            throw ValidationError("breakpoint " + std::to_string(i) + " (" + describe(breakpoints[i]) +
                                  ") is not greater than breakpoint " + std::to_string(i - 1) + " (" +
                                  describe(breakpoints[i - 1]) + ")");
        }
    }
}

PiecewiseFn::PiecewiseFn(std::vector<double> breakpoints, std::vector<Expression> branches)
    : breakpoints_(std::move(breakpoints))
    , branches_(std::move(branches))
{
    validate_breakpoints(breakpoints_);
    if (branches_.size() != breakpoints_.size() + 1) {
        throw ValidationError("piecewise function with " + std::to_string(breakpoints_.size()) +
                              " breakpoints needs " + std::to_string(breakpoints_.size() + 1) +
                              " branches, got " + std::to_string(branches_.size()));
    }

    // Probe every branch on a grid over the closure of its interval.
    const std::size_t m = breakpoints_.size();
    for (std::size_t i = 0; i <= m; ++i) {
        double lo = 0.0;
        double hi = 0.0;
        if (m == 0) {
            lo = -kProbeReach;
            hi = kProbeReach;
        } else {
            lo = i == 0 ? breakpoints_.front() - kProbeReach : breakpoints_[i - 1];
            hi = i == m ? breakpoints_.back() + kProbeReach : breakpoints_[i];
        }
        for (int j = 0; j < kProbePoints; ++j) {
            const double x = j + 1 == kProbePoints ? hi : lo + (hi - lo) * j / (kProbePoints - 1);
            const double v = branches_[i].evaluate(x);
            if (!std::isfinite(v)) {
                throw ValidationError("branch " + std::to_string(i) + " (" + branches_[i].to_string() +
                                      ") is not finite at x = " + describe(x));
            }
        }
    }
}

PiecewiseFn PiecewiseFn::parse(std::vector<double> breakpoints, const std::vector<std::string>& branches) {
    std::vector<Expression> parsed;
    parsed.reserve(branches.size());
    for (const auto& src : branches) parsed.push_back(parse_expression(src));
    return PiecewiseFn(std::move(breakpoints), std::move(parsed));
}

PiecewiseFn PiecewiseFn::constant(double value) {
    return PiecewiseFn({}, {Expression::literal(value)});
}

std::size_t PiecewiseFn::branch_index(double x) const {
    return static_cast<std::size_t>(
        std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) - breakpoints_.begin());
}

double PiecewiseFn::eval_branch(std::size_t index, double x) const {
    const double v = branches_[index].evaluate(x);
    if (!std::isfinite(v)) {
        throw EvaluationError("branch " + std::to_string(index) + " (" + branches_[index].to_string() +
                              ") is not finite at x = " + describe(x));
    }
    return v;
}

double PiecewiseFn::eval(double x) const { return eval_branch(branch_index(x), x); }

double PiecewiseFn::one_sided_limit(double xi, Side side) const {
    auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), xi);
    if (it == breakpoints_.end() || *it != xi) return eval(xi);
    const auto k = static_cast<std::size_t>(it - breakpoints_.begin());
    return eval_branch(side == Side::Left ? k : k + 1, xi);
}

}  // namespace dsde
