#include "dsde/mc_harness.hpp"

#include "dsde/error.hpp"
#include "dsde/philox.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

namespace dsde {

namespace {

unsigned resolve_threads(unsigned requested, std::size_t work) {
    unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(work, 1)));
}

// Runs body(i) for i in [0, n) on `threads` workers. If any call throws, the
// exception of the smallest failing index is rethrown; every index below it
// has completed by then, so which error surfaces does not depend on timing.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body body) {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex mutex;
    std::size_t failed_index = std::numeric_limits<std::size_t>::max();
    std::exception_ptr failure;

    auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(mutex);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
                failed.store(true);
            }
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

double terminal_at(const SdeProblem& problem, const TransformedSde* model, Method method,
                   const BrownianLattice& lattice, int level, std::size_t path) {
    try {
        const auto dw = lattice.increments(level);
        const double dt = lattice.step_size(level);
        return method == Method::Emt ? scheme_phi(*model, dw, dt).terminal
                                     : crude_em_path(problem, dw, dt).terminal;
    } catch (const PathError& e) {
        throw PathError(path, level, e.step(),
                        "path " + std::to_string(path) + ", level " + std::to_string(level) + ": " + e.what());
    } catch (const Error& e) {
        throw PathError(path, level, 0,
                        "path " + std::to_string(path) + ", level " + std::to_string(level) + ": " + e.what());
    }
}

}  // namespace

double normal_quantile(double u) {
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

double standard_normal(std::uint64_t seed, std::uint64_t path, std::uint64_t step) {
    const std::uint64_t block = step >> 1;
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                                  static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    const auto words = Philox4x32::generate(ctr, key);
    const double u = (step & 1) == 0 ? to_open_unit(words[0], words[1]) : to_open_unit(words[2], words[3]);
    return normal_quantile(u);
}

BrownianLattice::BrownianLattice(std::uint64_t seed, std::uint64_t path, int max_level, double horizon)
    : max_level_(max_level)
    , horizon_(horizon)
{
    if (max_level < 0 || max_level > 40) throw ValidationError("lattice level must be in [0, 40]");
    if (!(horizon > 0.0)) throw ValidationError("lattice horizon must be positive");
    levels_.resize(static_cast<std::size_t>(max_level) + 1);

    auto& finest = levels_.back();
    const std::size_t n = std::size_t{1} << max_level;
    const double scale = std::sqrt(step_size(max_level));
    finest.resize(n);
    for (std::size_t j = 0; j < n; ++j) finest[j] = scale * standard_normal(seed, path, j);

    for (int k = max_level - 1; k >= 0; --k) {
        const auto& fine = levels_[static_cast<std::size_t>(k) + 1];
        auto& coarse = levels_[static_cast<std::size_t>(k)];
        coarse.resize(fine.size() / 2);
        for (std::size_t j = 0; j < coarse.size(); ++j) coarse[j] = fine[2 * j] + fine[2 * j + 1];
    }
}

std::span<const double> BrownianLattice::increments(int level) const {
    if (level < 0 || level > max_level_) throw ValidationError("lattice level out of range");
    return levels_[static_cast<std::size_t>(level)];
}

double BrownianLattice::step_size(int level) const {
    return std::ldexp(horizon_, -level);
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

OrderFit fit_order(std::span<const std::pair<double, double>> points) {
    OrderFit fit;
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& [delta, error] : points) {
        if (!(delta > 0.0) || !std::isfinite(delta)) throw ValidationError("fit_order: step sizes must be positive");
        if (!(error >= 0.0) || !std::isfinite(error)) throw ValidationError("fit_order: errors must be finite and nonnegative");
        if (error == 0.0) {
            fit.warnings.push_back("fit_order: excluded zero error at delta = " + std::to_string(delta));
            continue;
        }
        xs.push_back(std::log(delta));
        ys.push_back(std::log(error));
    }
    if (xs.size() < 2) throw ValidationError("fit_order: fewer than two usable points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (!(sxx > 0.0)) throw ValidationError("fit_order: step sizes must not all coincide");
    fit.order = sxy / sxx;
    fit.intercept = my - fit.order * mx;
    fit.points_used = xs.size();
    return fit;
}

ConvergenceReport consecutive_l2_errors(const SdeProblem& problem, const HarnessConfig& config) {
    if (config.paths < 2) throw ValidationError("paths must be at least 2");
    if (config.min_level < 1) throw ValidationError("min level must be at least 1");
    if (config.max_level <= config.min_level) throw ValidationError("max level must exceed min level");

    std::optional<TransformedSde> model;
    if (config.method == Method::Emt) {
        model.emplace(problem, config.kappa);
    } else {
        validate_assumptions(problem);
    }

    const auto pairs = static_cast<std::size_t>(config.max_level - config.min_level);
    // sq[level_pair * paths + path]
    std::vector<double> sq(pairs * config.paths);

    parallel_for(config.paths, resolve_threads(config.threads, config.paths), [&](std::size_t path) {
        const BrownianLattice lattice(config.seed, path, config.max_level, problem.horizon);
        double coarse = terminal_at(problem, model ? &*model : nullptr, config.method, lattice, config.min_level, path);
        for (int k = config.min_level + 1; k <= config.max_level; ++k) {
            const double fine = terminal_at(problem, model ? &*model : nullptr, config.method, lattice, k, path);
            const double diff = fine - coarse;
            sq[static_cast<std::size_t>(k - config.min_level - 1) * config.paths + path] = diff * diff;
            coarse = fine;
        }
    });

    ConvergenceReport report;
    report.method = config.method;
    report.kappa = config.kappa;
    report.seed = config.seed;
    report.paths = config.paths;
    report.min_level = config.min_level;
    report.max_level = config.max_level;

    const double n = static_cast<double>(config.paths);
    std::vector<double> centered(config.paths);
    std::vector<std::pair<double, double>> points;
    for (std::size_t j = 0; j < pairs; ++j) {
        const std::span<const double> column(sq.data() + j * config.paths, config.paths);
        const double mean = pairwise_sum(column) / n;
        for (std::size_t i = 0; i < config.paths; ++i) {
            const double c = column[i] - mean;
            centered[i] = c * c;
        }
        const double variance = pairwise_sum(centered) / (n - 1.0);
        LevelError le;
        le.level = config.min_level + 1 + static_cast<int>(j);
        le.delta = std::ldexp(problem.horizon, -le.level);
        le.mean_sq_diff = mean;
        le.l2_error = std::sqrt(mean);
        le.sq_diff_stderr = std::sqrt(variance / n);
        le.high_variance = j + 1 == pairs;
        report.levels.push_back(le);
        points.emplace_back(le.delta, le.l2_error);
    }

    const OrderFit fit = fit_order(points);
    report.fitted_order = fit.order;
    report.warnings = fit.warnings;
    return report;
}

std::vector<double> simulate_terminals(const SdeProblem& problem, Method method, double kappa,
                                       std::uint64_t seed, std::size_t paths, int level,
                                       unsigned threads) {
    if (level < 0) throw ValidationError("level must be nonnegative");
    std::optional<TransformedSde> model;
    if (method == Method::Emt) {
        model.emplace(problem, kappa);
    } else {
        validate_assumptions(problem);
    }
    std::vector<double> out(paths);
    parallel_for(paths, resolve_threads(threads, paths), [&](std::size_t path) {
        const BrownianLattice lattice(seed, path, level, problem.horizon);
        out[path] = terminal_at(problem, model ? &*model : nullptr, method, lattice, level, path);
    });
    return out;
}

}  // namespace dsde
