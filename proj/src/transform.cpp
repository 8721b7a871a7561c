#include "dsde/transform.hpp"

#include "dsde/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace dsde {

namespace {

void check_kappa(double kappa) {
    if (!(kappa > 0.0 && kappa < 1.0)) {
        throw ValidationError("kappa must be in (0,1), got " + std::to_string(kappa));
    }
}

// One linear piece of the right-hand bump profile in the local coordinate
// u = x − ξ, with d = c − ξ the bump half-width:
//   (0, d/2]       α − 3αu/d
//   (d/2, d]       α(u − d)/d
//   (d, 5d/4]      −8α(u − d)/(3d)
//   (5d/4, 7d/4]   4α(2(u − d) − d)/(3d)
//   (7d/4, 2d]     −8α(u − 2d)/(3d)
// Values at the ends of each piece are exact multiples of α; slopes are the
// closed-form coefficients of u.
struct ProfilePiece {
    double u0;           // in units of d
    double u1;           // in units of d
    double value0;       // in units of α
    double value1;       // in units of α
    double slope;        // in units of α/d
};

constexpr std::array<ProfilePiece, 5> kProfile{{
    {0.0, 0.5, 1.0, -0.5, -3.0},
    {0.5, 1.0, -0.5, 0.0, 1.0},
    {1.0, 1.25, 0.0, -2.0 / 3.0, -8.0 / 3.0},
    {1.25, 1.75, -2.0 / 3.0, 2.0 / 3.0, 8.0 / 3.0},
    {1.75, 2.0, 2.0 / 3.0, 0.0, -8.0 / 3.0},
}};

}  // namespace

JumpCoefficients compute_jump_coefficients(const PiecewiseFn& drift,
                                           const PiecewiseFn& diffusion,
                                           double xi,
                                           double ellipticity_floor) {
    const double sigma = diffusion.eval(xi);
    const double variance = sigma * sigma;
    if (!(variance >= ellipticity_floor)) {
        throw ValidationError("ellipticity violated at breakpoint " + std::to_string(xi) +
                              ": sigma^2 = " + std::to_string(variance) + " < cbar = " +
                              std::to_string(ellipticity_floor));
    }
    const double left = drift.one_sided_limit(xi, Side::Left);
    const double right = drift.one_sided_limit(xi, Side::Right);
    JumpCoefficients jc;
    jc.mean_drift = 0.5 * (left + right);
    jc.alpha = 2.0 * (jc.mean_drift - right) / variance;
    jc.beta = 2.0 * (jc.mean_drift - left) / variance;
    return jc;
}

BumpWidths choose_bump_width(double xi_prev, double xi, double xi_next,
                             double alpha, double beta, double kappa) {
    const double peak = 6.0 * kappa / (1.0 + kappa);
    BumpWidths w;
    if (alpha != 0.0) w.right = std::min(0.25 * (xi_next - xi), peak / std::fabs(alpha));
    if (beta != 0.0) w.left = std::min(0.25 * (xi - xi_prev), peak / std::fabs(beta));
    return w;
}

Transform::Transform(double kappa, std::vector<BumpSpec> bumps)
    : kappa_(kappa)
    , bumps_(std::move(bumps))
{
    check_kappa(kappa_);
    const double cap = kappa_ / (1.0 + kappa_);
    for (std::size_t k = 0; k < bumps_.size(); ++k) {
        const BumpSpec& b = bumps_[k];
        if (!std::isfinite(b.xi)) throw ValidationError("bump " + std::to_string(k) + " has non-finite xi");
        if (k > 0 && !(b.xi > bumps_[k - 1].xi)) {
            throw ValidationError("bumps must be ordered by xi (index " + std::to_string(k) + ")");
        }
        const double prev = k == 0 ? b.xi - 1.0 : bumps_[k - 1].xi;
        const double next = k + 1 == bumps_.size() ? b.xi + 1.0 : bumps_[k + 1].xi;
        auto check = [&](const std::optional<double>& d, double coefficient, double gap, const char* side) {
            if (!d) return;
            const std::string where = "bump " + std::to_string(k) + " " + side + " width";
            if (!(*d > 0.0)) throw ValidationError(where + " must be positive");
            if (*d > 0.25 * gap * (1.0 + 1e-12)) throw ValidationError(where + " exceeds a quarter of the gap");
            if (std::fabs(coefficient) * *d / 6.0 > cap * (1.0 + 1e-12)) {
                throw ValidationError(where + " lets |g'-1| exceed kappa/(1+kappa)");
            }
        };
        check(b.d_left, b.beta, b.xi - prev, "left");
        check(b.d_right, b.alpha, next - b.xi, "right");
    }

    for (const BumpSpec& b : bumps_) {
        const bool left = b.d_left && b.beta != 0.0;
        const bool right = b.d_right && b.alpha != 0.0;
        const std::size_t first_piece = pieces_.size();
        if (left) append_bump(b.xi, b.beta, *b.d_left, true);
        if (right) append_bump(b.xi, b.alpha, *b.d_right, false);
        if (left || right) {
            supports_.push_back({left ? pieces_[first_piece].start : b.xi,
                                 right ? b.xi + 2.0 * *b.d_right : b.xi});
        }
    }

    starts_.reserve(pieces_.size());
    ends_.reserve(pieces_.size());
    for (const Piece& p : pieces_) {
        starts_.push_back(p.start);
        ends_.push_back(p.end);
    }
}

// Lays down the five pieces of one bump and integrates them twice from the
// bump's outer end, where g − x and g' − 1 both start at zero. The mirrored
// (left) bump is the profile reflected through ξ: x ↦ 2ξ − x.
void Transform::append_bump(double xi, double coefficient, double d, bool mirrored) {
    const std::size_t first = pieces_.size();
    const double floor = pieces_.empty() ? -HUGE_VAL : pieces_.back().end;
    const double rate_scale = coefficient / d;
    if (mirrored) {
        for (auto it = kProfile.rbegin(); it != kProfile.rend(); ++it) {
            Piece p;
            p.start = xi - it->u1 * d;
            p.end = it->u0 == 0.0 ? xi : xi - it->u0 * d;
            p.curvature = it->value1 * coefficient;
            p.rate = -it->slope * rate_scale;
            // Adjacent supports may touch; rounding must not make them overlap.
            p.start = std::max(p.start, floor);
            pieces_.push_back(p);
        }
    } else {
        for (const ProfilePiece& pp : kProfile) {
            Piece p;
            p.start = pp.u0 == 0.0 ? xi : xi + pp.u0 * d;
            p.end = xi + pp.u1 * d;
            p.curvature = pp.value0 * coefficient;
            p.rate = pp.slope * rate_scale;
            pieces_.push_back(p);
        }
    }

    double offset = 0.0;
    double slope_offset = 0.0;
    for (std::size_t i = first; i < pieces_.size(); ++i) {
        Piece& p = pieces_[i];
        p.offset = offset;
        p.slope_offset = slope_offset;
        sup_offset_ = std::max(sup_offset_, std::fabs(offset));
        const double len = p.end - p.start;
        offset += slope_offset * len + p.curvature * len * len / 2.0 + p.rate * len * len * len / 6.0;
        slope_offset += p.curvature * len + p.rate * len * len / 2.0;
    }
    // Interior maximum of |g − x| sits at the profile's zero of g' − 1 (u = d),
    // a knot, so it is covered above; the analytic value |c|d²/12 guards rounding.
    sup_offset_ = std::max(sup_offset_, std::fabs(coefficient) * d * d / 12.0);

    // Drop pieces collapsed by rounding for extremely narrow bumps.
    pieces_.erase(std::remove_if(pieces_.begin() + static_cast<std::ptrdiff_t>(first), pieces_.end(),
                                 [](const Piece& p) { return !(p.end > p.start); }),
                  pieces_.end());
}

const Transform::Piece* Transform::find_right(double x) const {
    auto it = std::upper_bound(starts_.begin(), starts_.end(), x);
    if (it == starts_.begin()) return nullptr;
    const auto idx = static_cast<std::size_t>(it - starts_.begin()) - 1;
    return x < ends_[idx] ? &pieces_[idx] : nullptr;
}

const Transform::Piece* Transform::find_left(double x) const {
    auto it = std::lower_bound(ends_.begin(), ends_.end(), x);
    if (it == ends_.end()) return nullptr;
    const auto idx = static_cast<std::size_t>(it - ends_.begin());
    return starts_[idx] < x ? &pieces_[idx] : nullptr;
}

double Transform::g(double x) const {
    const Piece* p = find_right(x);
    if (p == nullptr) return x;
    const double s = x - p->start;
    return x + (p->offset + s * (p->slope_offset + s * (p->curvature / 2.0 + s * p->rate / 6.0)));
}

double Transform::g_prime(double x) const {
    const Piece* p = find_right(x);
    if (p == nullptr) return 1.0;
    const double s = x - p->start;
    return 1.0 + (p->slope_offset + s * (p->curvature + s * p->rate / 2.0));
}

double Transform::g_second(double x, Side side) const {
    const Piece* p = side == Side::Right ? find_right(x) : find_left(x);
    if (p == nullptr) return 0.0;
    return p->curvature + (x - p->start) * p->rate;
}

bool Transform::is_identity_at(double x) const {
    return find_right(x) == nullptr;
}

double Transform::h(double z) const {
    auto it = std::upper_bound(supports_.begin(), supports_.end(), z,
                               [](double v, const Support& s) { return v < s.lo; });
    if (it == supports_.begin()) return z;
    const Support& support = *(it - 1);
    if (!(z < support.hi)) return z;

    // g maps the support onto itself and |g(x) − x| ≤ sup_offset, so the root
    // of g(x) − z lies in [z − s, z + s] ∩ support.
    const double reach = sup_offset_ * (1.0 + 1e-12) + 1e-300;
    double lo = std::max(support.lo, z - reach);
    double hi = std::min(support.hi, z + reach);
    const double tol = 1e-12 * std::max(1.0, std::fabs(z));

    double x = z;
    for (int step = 0; step < kMaxInversionSteps; ++step) {
        const double residual = g(x) - z;
        if (std::fabs(residual) <= tol) return x;
        if (residual > 0.0) hi = x;
        else lo = x;
        double next = x - residual / g_prime(x);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x) return x;
        x = next;
    }
    throw InternalError("inversion of g did not converge for z = " + std::to_string(z));
}

double Transform::h_prime(double z) const { return 1.0 / g_prime(h(z)); }

std::vector<double> Transform::knots() const {
    std::vector<double> out;
    out.reserve(2 * pieces_.size());
    for (const Piece& p : pieces_) {
        out.push_back(p.start);
        out.push_back(p.end);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Transform build_transform(const PiecewiseFn& drift,
                          const PiecewiseFn& diffusion,
                          double kappa,
                          double ellipticity_floor) {
    check_kappa(kappa);
    const auto xis = drift.breakpoints();
    std::vector<BumpSpec> bumps;
    bumps.reserve(xis.size());
    for (std::size_t k = 0; k < xis.size(); ++k) {
        const double xi = xis[k];
        const double prev = k == 0 ? xi - 1.0 : xis[k - 1];
        const double next = k + 1 == xis.size() ? xi + 1.0 : xis[k + 1];
        const JumpCoefficients jc = compute_jump_coefficients(drift, diffusion, xi, ellipticity_floor);
        const BumpWidths w = choose_bump_width(prev, xi, next, jc.alpha, jc.beta, kappa);
        bumps.push_back({xi, jc.alpha, jc.beta, w.left, w.right, jc.mean_drift});
    }
    return Transform(kappa, std::move(bumps));
}

}  // namespace dsde
