#pragma once

#include "dsde/error.hpp"
#include "dsde/sde_model.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dsde {

enum class MethodSelection { Em, Emt, Both };

std::optional<MethodSelection> parse_method(std::string_view text);
std::string_view method_selection_name(MethodSelection m);

/// Error in a config file, with 1-based line and column (column 0 = whole line).
class ConfigError : public ValidationError {
public:
    ConfigError(std::size_t line, std::size_t column, const std::string& message)
        : ValidationError("line " + std::to_string(line) +
                          (column > 0 ? ", column " + std::to_string(column) : std::string()) + ": " + message)
        , line_(line)
        , column_(column)
    {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Everything that determines a run. Unset optionals fall back to defaults
/// when resolved; `threads` affects speed only, never results.
struct RunConfig {
    std::string example;  ///< ex1 | ex2 | ex3, empty when the problem comes from a file
    std::filesystem::path config_path;
    std::optional<MethodSelection> method;
    std::vector<double> kappas;
    std::optional<std::size_t> paths;
    std::optional<std::pair<int, int>> levels;
    std::optional<std::uint64_t> seed;
    std::optional<double> x0;
    std::optional<double> horizon;
    std::optional<double> ellipticity_floor;
    std::optional<int> level;  ///< simulate only
    std::filesystem::path out = ".";
    unsigned threads = 0;
};

inline constexpr double kDefaultKappa = 1.0 / 16.0;
inline constexpr std::size_t kDefaultPaths = 1024;
inline constexpr int kDefaultMinLevel = 4;
inline constexpr int kDefaultMaxLevel = 10;
inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr double kDefaultX0 = 0.5;
inline constexpr double kDefaultHorizon = 1.0;
inline constexpr double kDefaultEllipticityFloor = 1e-6;

/// Config and problem read from a key = value file.
struct LoadedConfig {
    RunConfig config;
    std::optional<SdeProblem> problem;  ///< set when the file defines drift/diffusion
};

/// Parses config text. Recognized keys: example, method, kappa (comma list),
/// paths, levels (K_min:K_max), seed, x0, T, cbar, level,
/// drift.breakpoints, drift.branches, diffusion.breakpoints, diffusion.branches.
/// Breakpoints are comma separated, branches are separated by ';'.
/// Unknown keys, duplicates and malformed values throw ConfigError.
LoadedConfig parse_config(std::string_view text);
LoadedConfig load_config(const std::filesystem::path& path);

/// Overlays every field set in `overrides` onto `base`.
RunConfig merge(RunConfig base, const RunConfig& overrides);

/// Parses "K_min:K_max".
std::pair<int, int> parse_levels(std::string_view text);

/// Fully defaulted view of a RunConfig.
struct EffectiveConfig {
    std::string problem_source;
    MethodSelection method = MethodSelection::Both;
    std::vector<double> kappas;
    std::size_t paths = kDefaultPaths;
    int min_level = kDefaultMinLevel;
    int max_level = kDefaultMaxLevel;
    std::uint64_t seed = kDefaultSeed;
    int level = kDefaultMaxLevel;
    std::vector<std::string> defaulted;  ///< names of fields that took non-paper defaults
};

/// Applies defaults and checks κ ∈ (0,1), paths ≥ 2, 1 ≤ K_min < K_max.
EffectiveConfig resolve(const RunConfig& config, MethodSelection default_method);

/// Builds the problem: a built-in example or the file-defined one, with the
/// x0 / T / cbar overrides applied. `defaulted` collects defaulted fields.
SdeProblem resolve_problem(const RunConfig& config, const std::optional<SdeProblem>& from_file,
                           std::vector<std::string>& defaulted);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace dsde
