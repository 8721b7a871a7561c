#pragma once

#include "dsde/error.hpp"
#include "dsde/sde_model.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace dsde {

enum class Method { Em, Emt };

std::string_view method_name(Method m);

struct PathResult {
    double terminal = 0.0;
    std::size_t steps = 0;
    double step_size = 0.0;
    Method method = Method::Em;
};

/// One Euler–Maruyama step z + a(z)·δ + b(z)·ΔW.
template <class Drift, class Diffusion>
double em_step(const Drift& drift, const Diffusion& diffusion, double z, double dt, double dw) {
    return z + drift(z) * dt + diffusion(z) * dw;
}

/// Folds em_step over `increments` starting from z0. A non-finite state
/// throws PathError carrying the 1-based step index (path and level are
/// filled in by the caller).
template <class Drift, class Diffusion>
PathResult em_path(const Drift& drift, const Diffusion& diffusion, double z0,
                   std::span<const double> increments, double dt, Method tag = Method::Em) {
    double z = z0;
    for (std::size_t i = 0; i < increments.size(); ++i) {
        try {
            z = em_step(drift, diffusion, z, dt, increments[i]);
        } catch (const EvaluationError& e) {
            throw PathError(0, -1, i + 1, "step " + std::to_string(i + 1) + ": " + e.what());
        }
        if (!std::isfinite(z)) {
            throw PathError(0, -1, i + 1, "non-finite state at step " + std::to_string(i + 1));
        }
    }
    return {z, increments.size(), dt, tag};
}

/// Transformed scheme: h(φⁿ(g(x0))) with φ the Euler map of (μ̃, σ̃).
PathResult scheme_phi(const TransformedSde& model, std::span<const double> increments, double dt);

/// Euler–Maruyama applied to (μ, σ) directly.
PathResult crude_em_path(const SdeProblem& problem, std::span<const double> increments, double dt);

}  // namespace dsde
