#pragma once

#include "dsde/integrator.hpp"
#include "dsde/sde_model.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dsde {

/// Standard normal quantile by inverse CDF of a uniform in (0,1).
double normal_quantile(double u);

/// Normal(0,1) draw number `step` of path `path` under `seed`.
double standard_normal(std::uint64_t seed, std::uint64_t path, std::uint64_t step);

/// Brownian increments of one path on every dyadic level 0..max_level of
/// [0, horizon]. Level k has 2^k increments of variance horizon·2^-k; each
/// is the exact sum of its two children on level k+1.
class BrownianLattice {
public:
    BrownianLattice(std::uint64_t seed, std::uint64_t path, int max_level, double horizon);

    std::span<const double> increments(int level) const;
    double step_size(int level) const;
    int max_level() const { return max_level_; }
    double horizon() const { return horizon_; }

private:
    int max_level_;
    double horizon_;
    std::vector<std::vector<double>> levels_;
};

inline BrownianLattice generate_lattice(std::uint64_t seed, std::uint64_t path, int max_level, double horizon) {
    return BrownianLattice(seed, path, max_level, horizon);
}

/// Deterministic pairwise summation; the result does not depend on how the
/// values were produced, only on their order.
double pairwise_sum(std::span<const double> values);

struct OrderFit {
    double order = 0.0;      ///< slope of log(error) against log(delta)
    double intercept = 0.0;
    std::size_t points_used = 0;
    std::vector<std::string> warnings;
};

/// Least-squares slope of log(error) over log(delta). Zero errors are
/// skipped with a warning; fewer than two usable points throws ValidationError.
OrderFit fit_order(std::span<const std::pair<double, double>> points);

struct LevelError {
    int level = 0;
    double delta = 0.0;
    double l2_error = 0.0;        ///< sqrt(mean((X^(k) − X^(k−1))²))
    double mean_sq_diff = 0.0;
    double sq_diff_stderr = 0.0;  ///< standard error of mean_sq_diff
    bool high_variance = false;   ///< set on the finest pair
};

struct HarnessConfig {
    Method method = Method::Emt;
    double kappa = 1.0 / 16.0;
    std::uint64_t seed = 42;
    std::size_t paths = 1024;
    int min_level = 4;
    int max_level = 10;
    unsigned threads = 0;  ///< 0 = hardware concurrency
};

struct ConvergenceReport {
    Method method = Method::Emt;
    double kappa = 0.0;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    int min_level = 0;
    int max_level = 0;
    std::vector<LevelError> levels;
    double fitted_order = 0.0;
    std::vector<std::string> warnings;
};

/// Simulates every path on levels min_level..max_level of one shared lattice
/// and reports consecutive L² differences for k = min_level+1..max_level.
/// The result is a pure function of (problem, config minus threads).
ConvergenceReport consecutive_l2_errors(const SdeProblem& problem, const HarnessConfig& config);

/// Terminal values of `paths` paths at dyadic `level` (one entry per path).
std::vector<double> simulate_terminals(const SdeProblem& problem, Method method, double kappa,
                                       std::uint64_t seed, std::size_t paths, int level,
                                       unsigned threads = 0);

}  // namespace dsde
