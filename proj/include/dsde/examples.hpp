#pragma once

#include "dsde/sde_model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace dsde {

/// Built-in problems with discontinuous drift.
///
///   ex1  μ(x) = −sign(x), σ ≡ 1
///   ex2  five-branch drift with jumps at −1, −0.5, 0, 1; σ(x) = ½(1 + 1/(x²+1))
///   ex3  threshold dividend strategy μ(x) = θ − K·1{x ≥ b}, θ = 1, K = 1.8,
///        b = 0.895635, σ ≡ 1
///
/// x0 = 0.5 and T = 1 are project defaults, not part of the models' definitions.
struct NamedExample {
    std::string id;
    std::string description;
    SdeProblem problem;
};

inline constexpr double kExampleX0 = 0.5;
inline constexpr double kExampleHorizon = 1.0;
inline constexpr double kExampleEllipticityFloor = 0.25;
inline constexpr double kDividendThreshold = 0.895635;

/// Throws ValidationError for an unknown id.
NamedExample load_example(std::string_view id);

std::vector<std::string> example_ids();

}  // namespace dsde
