// Command-line driver: transform dumps, convergence studies and terminal samples
// for one-dimensional SDEs with discontinuous drift.

#include "dsde/commands.hpp"
#include "dsde/examples.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Flags {
    std::string example;
    std::string config;
    std::string method;
    std::vector<double> kappas;
    std::optional<std::size_t> paths;
    std::string levels;
    std::optional<std::uint64_t> seed;
    std::optional<double> x0;
    std::optional<double> horizon;
    std::optional<double> cbar;
    std::optional<int> level;
    std::string out = ".";
    unsigned threads = 0;
};

void add_flags(CLI::App& cmd, Flags& f, bool with_level) {
    cmd.add_option("--example", f.example, "Built-in problem")->check(CLI::IsMember(dsde::example_ids()));
    cmd.add_option("--config", f.config, "Key = value config file")->check(CLI::ExistingFile);
    cmd.add_option("--method", f.method, "em, emt or both")->check(CLI::IsMember({"em", "emt", "both"}));
    cmd.add_option("--kappa", f.kappas, "Transform parameter in (0,1); repeatable")->take_all();
    cmd.add_option("--paths", f.paths, "Monte Carlo paths");
    cmd.add_option("--levels", f.levels, "Dyadic level range K_min:K_max");
    cmd.add_option("--seed", f.seed, "Master seed");
    cmd.add_option("--x0", f.x0, "Initial value");
    cmd.add_option("--T", f.horizon, "Horizon");
    cmd.add_option("--cbar", f.cbar, "Ellipticity floor for sigma^2 at drift breakpoints");
    cmd.add_option("--out", f.out, "Output directory");
    cmd.add_option("--threads", f.threads, "Worker threads (0 = all cores); never changes results");
    if (with_level) cmd.add_option("--level", f.level, "Dyadic level of the simulated paths (default K_max)");
    cmd.add_flag_callback("--list-examples", [] {
        for (const auto& id : dsde::example_ids()) std::cout << id << '\n';
        std::exit(0);
    }, "Print built-in example ids");
}

dsde::CommandInput build_input(const Flags& f) {
    dsde::RunConfig cli;
    cli.example = f.example;
    if (!f.method.empty()) cli.method = dsde::parse_method(f.method);
    cli.kappas = f.kappas;
    cli.paths = f.paths;
    if (!f.levels.empty()) cli.levels = dsde::parse_levels(f.levels);
    cli.seed = f.seed;
    cli.x0 = f.x0;
    cli.horizon = f.horizon;
    cli.ellipticity_floor = f.cbar;
    cli.level = f.level;
    cli.out = f.out;
    cli.threads = f.threads;

    dsde::CommandInput input;
    if (!f.config.empty()) {
        dsde::LoadedConfig loaded = dsde::load_config(f.config);
        input.file_problem = std::move(loaded.problem);
        if (!cli.example.empty() && input.file_problem) {
            throw dsde::ValidationError("--example conflicts with the problem defined in " + f.config);
        }
        if (!cli.example.empty()) loaded.config.example.clear();
        input.config = dsde::merge(std::move(loaded.config), cli);
    } else {
        input.config = cli;
    }
    return input;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Euler-Maruyama with a drift-discontinuity-removing transform"};
    app.require_subcommand(1);

    Flags transform_flags;
    Flags convergence_flags;
    Flags simulate_flags;
    auto* transform = app.add_subcommand("transform", "Dump g, g', g'', mu, sigma and the transformed coefficients");
    auto* convergence = app.add_subcommand("convergence", "Consecutive-level L2 errors and fitted strong order");
    auto* simulate = app.add_subcommand("simulate", "Terminal values of independent paths");
    add_flags(*transform, transform_flags, false);
    add_flags(*convergence, convergence_flags, false);
    add_flags(*simulate, simulate_flags, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (transform->parsed()) {
            std::cout << dsde::cmd_transform(build_input(transform_flags)).string() << '\n';
        } else if (convergence->parsed()) {
            for (const auto& r : dsde::cmd_convergence(build_input(convergence_flags))) {
                std::cout << dsde::method_name(r.method);
                if (r.method == dsde::Method::Emt) std::cout << " kappa=" << dsde::format_double(r.kappa);
                std::cout << " fitted_order=" << r.fitted_order << '\n';
            }
        } else if (simulate->parsed()) {
            std::cout << dsde::cmd_simulate(build_input(simulate_flags)).string() << '\n';
        }
    } catch (const dsde::ConfigError& e) {
        std::cerr << "error: config: " << e.what() << '\n';
        return 3;
    } catch (const dsde::PathError& e) {
        std::cerr << "error: path " << e.path() << ", level " << e.level() << ", step " << e.step() << ": "
                  << e.what() << '\n';
        return 4;
    } catch (const dsde::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
