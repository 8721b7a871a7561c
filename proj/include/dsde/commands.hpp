#pragma once

#include "dsde/mc_harness.hpp"
#include "dsde/run_config.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dsde {

/// Inputs of one CLI command: the merged config plus the file-defined
/// problem, if any.
struct CommandInput {
    RunConfig config;
    std::optional<SdeProblem> file_problem;
};

/// Writes <out>/transform_dump.csv: 2001 samples over [ξ₁−2, ξ_m+2] with
/// columns x,g,g_prime,g_second_left,g_second_right,mu,sigma,mu_tilde,sigma_tilde.
std::filesystem::path cmd_transform(const CommandInput& input);

/// Writes <out>/errors.csv (method,kappa,level,delta,l2_error,paths,seed) and
/// <out>/summary.json. Returns the reports in output order.
std::vector<ConvergenceReport> cmd_convergence(const CommandInput& input);

/// Writes <out>/terminals.csv with one `path,terminal` row per path.
std::filesystem::path cmd_simulate(const CommandInput& input);

/// Key/value echo of every setting that determines the results.
std::vector<std::pair<std::string, std::string>> describe_run(const EffectiveConfig& e, const SdeProblem& p);

}  // namespace dsde
