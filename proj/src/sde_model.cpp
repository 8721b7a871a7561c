#include "dsde/sde_model.hpp"

#include "dsde/error.hpp"

#include <algorithm>
#include <cmath>

namespace dsde {

namespace {

constexpr double kSampleReach = 10.0;
constexpr int kQuotientSamples = 1001;
constexpr double kContinuityTolerance = 1e-9;

void scan_branches(const PiecewiseFn& f, const char* name, double cap, AssumptionReport& report) {
    const auto bps = f.breakpoints();
    const std::size_t m = bps.size();
    for (std::size_t i = 0; i <= m; ++i) {
        double lo = 0.0;
        double hi = 0.0;
        if (m == 0) {
            lo = -kSampleReach;
            hi = kSampleReach;
        } else {
            lo = i == 0 ? bps.front() - kSampleReach : bps[i - 1];
            hi = i == m ? bps.back() + kSampleReach : bps[i];
        }
        BranchQuotient q{name, i, 0.0, lo};
        const double step = (hi - lo) / (kQuotientSamples - 1);
        double prev = f.eval_branch(i, lo);
        for (int j = 1; j < kQuotientSamples; ++j) {
            const double x = j + 1 == kQuotientSamples ? hi : lo + step * j;
            const double v = f.eval_branch(i, x);
            const double quotient = std::fabs(v - prev) / step;
            if (quotient > q.max_quotient) {
                q.max_quotient = quotient;
                q.at = x - step;
            }
            prev = v;
        }
        if (q.max_quotient > cap) {
            throw ValidationError(std::string(name) + " branch " + std::to_string(i) + " (" +
                                  f.branches()[i].to_string() +
                                  ") looks non-Lipschitz: sampled difference quotient " +
                                  std::to_string(q.max_quotient) + " near x = " + std::to_string(q.at) +
                                  " exceeds cap " + std::to_string(cap) + " (heuristic check)");
        }
        report.quotients.push_back(q);
    }
}

Transform make_transform(const SdeProblem& problem, double kappa) {
    validate_assumptions(problem);
    return build_transform(problem.drift, problem.diffusion, kappa, problem.ellipticity_floor);
}

}  // namespace

AssumptionReport validate_assumptions(const SdeProblem& problem, double lipschitz_cap) {
    if (!(problem.horizon > 0.0) || !std::isfinite(problem.horizon)) {
        throw ValidationError("horizon T must be positive and finite");
    }
    if (!std::isfinite(problem.x0)) throw ValidationError("x0 must be finite");
    if (!(problem.ellipticity_floor > 0.0)) throw ValidationError("cbar must be positive");

    AssumptionReport report;
    report.lipschitz_cap = lipschitz_cap;
    for (double xi : problem.drift.breakpoints()) {
        const double sigma = problem.diffusion.eval(xi);
        const double variance = sigma * sigma;
        if (!(variance >= problem.ellipticity_floor)) {
            throw ValidationError("ellipticity violated at drift breakpoint " + std::to_string(xi) +
                                  ": sigma^2 = " + std::to_string(variance) + " < cbar = " +
                                  std::to_string(problem.ellipticity_floor));
        }
        report.breakpoint_variances.push_back(variance);
    }
    for (double xi : problem.diffusion.breakpoints()) {
        const double left = problem.diffusion.one_sided_limit(xi, Side::Left);
        const double right = problem.diffusion.one_sided_limit(xi, Side::Right);
        if (std::fabs(left - right) > kContinuityTolerance * std::max(1.0, std::fabs(right))) {
            throw ValidationError("diffusion is discontinuous at " + std::to_string(xi) + " (left " +
                                  std::to_string(left) + ", right " + std::to_string(right) +
                                  "); it must be globally Lipschitz");
        }
    }
    scan_branches(problem.drift, "drift", lipschitz_cap, report);
    scan_branches(problem.diffusion, "diffusion", lipschitz_cap, report);
    return report;
}

TransformedSde::TransformedSde(SdeProblem problem, double kappa)
    : problem_(std::move(problem))
    , transform_(make_transform(problem_, kappa))
    , z0_(transform_.g(problem_.x0))
{}

double TransformedSde::drift(double z) const {
    const double x = transform_.h(z);
    if (transform_.is_identity_at(x)) return problem_.drift.eval(x);
    const double sigma = problem_.diffusion.eval(x);
    return problem_.drift.eval(x) * transform_.g_prime(x) +
           0.5 * sigma * sigma * transform_.g_second(x, Side::Right);
}

double TransformedSde::diffusion(double z) const {
    const double x = transform_.h(z);
    if (transform_.is_identity_at(x)) return problem_.diffusion.eval(x);
    return problem_.diffusion.eval(x) * transform_.g_prime(x);
}

std::vector<TransformSample> sample_transform(const TransformedSde& model,
                                              double lo, double hi, std::size_t count) {
    std::vector<TransformSample> rows;
    rows.reserve(count);
    const Transform& t = model.transform();
    const SdeProblem& p = model.base();
    for (std::size_t i = 0; i < count; ++i) {
        const double x = count == 1 ? lo
                       : i + 1 == count ? hi
                       : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
        rows.push_back({x, t.g(x), t.g_prime(x), t.g_second(x, Side::Left), t.g_second(x, Side::Right),
                        p.drift.eval(x), p.diffusion.eval(x), model.drift(x), model.diffusion(x)});
    }
    return rows;
}

std::pair<double, double> default_window(const SdeProblem& problem) {
    const auto bps = problem.drift.breakpoints();
    if (bps.empty()) return {-2.0, 2.0};
    return {bps.front() - 2.0, bps.back() + 2.0};
}

}  // namespace dsde
