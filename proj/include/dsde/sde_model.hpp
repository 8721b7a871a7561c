#pragma once

#include "dsde/piecewise_fn.hpp"
#include "dsde/transform.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace dsde {

/// dX = μ(X) dt + σ(X) dW, X₀ = x0, on [0, horizon].
struct SdeProblem {
    PiecewiseFn drift;
    PiecewiseFn diffusion;
    double x0 = 0.0;
    double horizon = 1.0;
    /// c̄: required lower bound of σ² at every drift breakpoint.
    double ellipticity_floor = 1e-6;
};

/// Largest sampled difference quotient of one branch.
struct BranchQuotient {
    std::string function;  ///< "drift" or "diffusion"
    std::size_t branch = 0;
    double max_quotient = 0.0;
    double at = 0.0;  ///< left end of the steepest sample pair
};

/// Outcome of validate_assumptions. The Lipschitz part is a sampling
/// heuristic: a small quotient does not prove a branch Lipschitz.
struct AssumptionReport {
    std::vector<BranchQuotient> quotients;
    std::vector<double> breakpoint_variances;  ///< σ²(ξ_k) per drift breakpoint
    double lipschitz_cap = 0.0;
    bool heuristic = true;
};

inline constexpr double kDefaultLipschitzCap = 1e6;

/// Checks σ²(ξ_k) ≥ c̄ exactly, continuity of σ at its own breakpoints, and
/// bounds sampled branch difference quotients of μ and σ by `lipschitz_cap`.
/// Throws ValidationError on the first failure.
AssumptionReport validate_assumptions(const SdeProblem& problem,
                                      double lipschitz_cap = kDefaultLipschitzCap);

/// The problem rewritten in Z = g(X):
///   μ̃(z) = μ(h(z))·g'(h(z)) + ½σ²(h(z))·g''(h(z)),   σ̃(z) = σ(h(z))·g'(h(z)).
/// μ̃ is continuous because g''(ξ_k±) cancel the drift jumps exactly.
class TransformedSde {
public:
    /// Validates the problem and builds g for the given κ.
    TransformedSde(SdeProblem problem, double kappa);

    const SdeProblem& base() const { return problem_; }
    const Transform& transform() const { return transform_; }
    double z0() const { return z0_; }

    double drift(double z) const;
    double diffusion(double z) const;

private:
    SdeProblem problem_;
    Transform transform_;
    double z0_;
};

/// One row of the transform dump. mu_tilde and sigma_tilde are sampled at z = x.
struct TransformSample {
    double x = 0.0;
    double g = 0.0;
    double g_prime = 0.0;
    double g_second_left = 0.0;
    double g_second_right = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
    double mu_tilde = 0.0;
    double sigma_tilde = 0.0;
};

/// `count` uniform samples over [lo, hi], both ends included.
std::vector<TransformSample> sample_transform(const TransformedSde& model,
                                              double lo, double hi, std::size_t count);

/// Default dump window [ξ₁ − 2, ξ_m + 2] (or [−2, 2] with no breakpoints).
std::pair<double, double> default_window(const SdeProblem& problem);

}  // namespace dsde
