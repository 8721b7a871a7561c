#pragma once

#include "dsde/piecewise_fn.hpp"

#include <optional>
#include <span>
#include <vector>

namespace dsde {

/// One-sided second-derivative targets at a drift discontinuity ξ.
struct JumpCoefficients {
    double alpha = 0.0;       ///< g''(ξ+) = 2(μ̄ − μ(ξ+)) / σ²(ξ)
    double beta = 0.0;        ///< g''(ξ−) = 2(μ̄ − μ(ξ−)) / σ²(ξ)
    double mean_drift = 0.0;  ///< μ̄ = (μ(ξ−) + μ(ξ+)) / 2
};

/// Throws ValidationError when σ²(ξ) < ellipticity_floor.
JumpCoefficients compute_jump_coefficients(const PiecewiseFn& drift,
                                           const PiecewiseFn& diffusion,
                                           double xi,
                                           double ellipticity_floor);

/// Bump half-widths on either side of ξ. An empty side carries no bump.
struct BumpWidths {
    std::optional<double> left;
    std::optional<double> right;
};

/// Largest admissible widths: d = min(gap/4, 6κ / ((1+κ)|coefficient|)).
///
/// The first bound keeps the bump support [ξ, ξ+2d] inside the half gap to
/// the neighbour; the second caps the peak |g'−1| = |coefficient|·d/6 at
/// κ/(1+κ). A zero coefficient yields no bump on that side.
BumpWidths choose_bump_width(double xi_prev, double xi, double xi_next,
                             double alpha, double beta, double kappa);

/// Discontinuity data for one breakpoint of the drift.
struct BumpSpec {
    double xi = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    std::optional<double> d_left;
    std::optional<double> d_right;
    double mean_drift = 0.0;
};

/// The C¹ piecewise-cubic map g and its inverse h.
///
/// g'' is piecewise linear: zero away from the discontinuities and, on each
/// side of every ξ_k, a five-piece spline of width 2d with g''(ξ_k+) = α_k and
/// g''(ξ_k−) = β_k whose first and second antiderivatives vanish at both ends
/// of its support. Hence g(x) = x and g'(x) = 1 outside the supports and at
/// every ξ_k, and |g'−1| ≤ κ/(1+κ) everywhere.
///
/// Immutable after construction.
class Transform {
public:
    struct Support {
        double lo = 0.0;
        double hi = 0.0;
    };

    /// Throws ValidationError if κ ∉ (0,1), the bumps are unordered, or a
    /// width breaks the neighbour or peak constraints.
    Transform(double kappa, std::vector<BumpSpec> bumps);

    static Transform identity(double kappa = 0.5) { return Transform(kappa, {}); }

    double g(double x) const;
    double g_prime(double x) const;
    /// g'' with the requested side convention at knots and at ξ_k.
    double g_second(double x, Side side = Side::Right) const;

    /// Inverse of g via safeguarded Newton; |g(h(z)) − z| ≤ 1e-12·max(1,|z|).
    double h(double z) const;
    double h_prime(double z) const;

    double kappa() const { return kappa_; }
    /// sup |g(x) − x|.
    double sup_offset() const { return sup_offset_; }
    std::span<const BumpSpec> bumps() const { return bumps_; }
    /// Closed intervals outside which g is the identity, sorted and disjoint.
    std::span<const Support> supports() const { return supports_; }
    /// Sorted spline knots, including every support endpoint and every ξ_k.
    std::vector<double> knots() const;

    /// True when x lies outside every half-open support [lo, hi), where
    /// g(x) = x, g'(x) = 1 and g''(x) = 0 hold exactly.
    bool is_identity_at(double x) const;

    /// Iteration cap of h; reaching it raises InternalError.
    static constexpr int kMaxInversionSteps = 100;

private:
    // On [start, end): g(x) = x + offset + slope_offset·s + curvature·s²/2 + rate·s³/6,
    // with s = x − start.
    struct Piece {
        double start = 0.0;
        double end = 0.0;
        double offset = 0.0;
        double slope_offset = 0.0;
        double curvature = 0.0;
        double rate = 0.0;
    };

    const Piece* find_right(double x) const;
    const Piece* find_left(double x) const;
    void append_bump(double xi, double coefficient, double d, bool mirrored);

    double kappa_;
    std::vector<BumpSpec> bumps_;
    std::vector<Piece> pieces_;
    std::vector<double> starts_;
    std::vector<double> ends_;
    std::vector<Support> supports_;
    double sup_offset_ = 0.0;
};

/// Builds g for the drift's breakpoints. Neighbour gaps use the guards
/// ξ₀ = ξ₁ − 1 and ξ_{m+1} = ξ_m + 1.
Transform build_transform(const PiecewiseFn& drift,
                          const PiecewiseFn& diffusion,
                          double kappa,
                          double ellipticity_floor = 1e-6);

}  // namespace dsde
