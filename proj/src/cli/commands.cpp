#include "dsde/commands.hpp"

#include "dsde/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace dsde {

namespace {

constexpr std::size_t kDumpSamples = 2001;

std::string join_breakpoints(std::span<const double> bps) {
    std::string out;
    for (std::size_t i = 0; i < bps.size(); ++i) {
        if (i > 0) out += ',';
        out += format_double(bps[i]);
    }
    return out;
}

std::string join_branches(const PiecewiseFn& f) {
    std::string out;
    for (std::size_t i = 0; i < f.branches().size(); ++i) {
        if (i > 0) out += " ; ";
        out += f.branches()[i].to_string();
    }
    return out;
}

std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += ',';
        out += items[i];
    }
    return out;
}

struct Prepared {
    EffectiveConfig effective;
    SdeProblem problem;
};

Prepared prepare(const CommandInput& input, MethodSelection default_method) {
    EffectiveConfig e = resolve(input.config, default_method);
    SdeProblem p = resolve_problem(input.config, input.file_problem, e.defaulted);
    return {std::move(e), std::move(p)};
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name, std::filesystem::path& path) {
    std::filesystem::create_directories(dir);
    path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    return out;
}

void write_header(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& echo) {
    for (const auto& [k, v] : echo) out << "# " << k << ": " << v << '\n';
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> describe_run(const EffectiveConfig& e, const SdeProblem& p) {
    std::string kappas;
    for (std::size_t i = 0; i < e.kappas.size(); ++i) {
        if (i > 0) kappas += ',';
        kappas += format_double(e.kappas[i]);
    }
    return {
        {"problem", e.problem_source},
        {"drift.breakpoints", join_breakpoints(p.drift.breakpoints())},
        {"drift.branches", join_branches(p.drift)},
        {"diffusion.breakpoints", join_breakpoints(p.diffusion.breakpoints())},
        {"diffusion.branches", join_branches(p.diffusion)},
        {"x0", format_double(p.x0)},
        {"T", format_double(p.horizon)},
        {"cbar", format_double(p.ellipticity_floor)},
        {"method", std::string(method_selection_name(e.method))},
        {"kappa", kappas},
        {"paths", std::to_string(e.paths)},
        {"levels", std::to_string(e.min_level) + ":" + std::to_string(e.max_level)},
        {"level", std::to_string(e.level)},
        {"seed", std::to_string(e.seed)},
        {"non_paper_defaults", join_list(e.defaulted)},
    };
}

std::filesystem::path cmd_transform(const CommandInput& input) {
    const Prepared prep = prepare(input, MethodSelection::Emt);
    if (prep.effective.kappas.size() != 1) throw ValidationError("transform takes exactly one kappa");
    const TransformedSde model(prep.problem, prep.effective.kappas.front());
    const auto [lo, hi] = default_window(prep.problem);
    const auto rows = sample_transform(model, lo, hi, kDumpSamples);

    std::filesystem::path path;
    std::ofstream out = open_output(input.config.out, "transform_dump.csv", path);
    write_header(out, describe_run(prep.effective, prep.problem));
    out << "x,g,g_prime,g_second_left,g_second_right,mu,sigma,mu_tilde,sigma_tilde\n";
    for (const TransformSample& r : rows) {
        out << format_double(r.x) << ',' << format_double(r.g) << ',' << format_double(r.g_prime) << ','
            << format_double(r.g_second_left) << ',' << format_double(r.g_second_right) << ','
            << format_double(r.mu) << ',' << format_double(r.sigma) << ',' << format_double(r.mu_tilde) << ','
            << format_double(r.sigma_tilde) << '\n';
    }
    finish(out, path);
    return path;
}

std::vector<ConvergenceReport> cmd_convergence(const CommandInput& input) {
    const Prepared prep = prepare(input, MethodSelection::Both);
    const EffectiveConfig& e = prep.effective;

    std::vector<ConvergenceReport> reports;
    auto run = [&](Method m, double kappa) {
        HarnessConfig hc;
        hc.method = m;
        hc.kappa = kappa;
        hc.seed = e.seed;
        hc.paths = e.paths;
        hc.min_level = e.min_level;
        hc.max_level = e.max_level;
        hc.threads = input.config.threads;
        reports.push_back(consecutive_l2_errors(prep.problem, hc));
    };
    if (e.method != MethodSelection::Emt) run(Method::Em, 0.0);
    if (e.method != MethodSelection::Em) {
        for (double k : e.kappas) run(Method::Emt, k);
    }

    const auto echo = describe_run(e, prep.problem);
    std::filesystem::path csv_path;
    std::ofstream csv = open_output(input.config.out, "errors.csv", csv_path);
    write_header(csv, echo);
    csv << "method,kappa,level,delta,l2_error,paths,seed\n";
    for (const ConvergenceReport& r : reports) {
        const std::string kappa = r.method == Method::Emt ? format_double(r.kappa) : std::string();
        for (const LevelError& le : r.levels) {
            csv << method_name(r.method) << ',' << kappa << ',' << le.level << ',' << format_double(le.delta) << ','
                << format_double(le.l2_error) << ',' << r.paths << ',' << r.seed << '\n';
        }
    }
    finish(csv, csv_path);

    nlohmann::ordered_json summary;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (const auto& [k, v] : echo) config[k] = v;
    summary["config"] = config;
    summary["non_paper_defaults"] = e.defaulted;
    nlohmann::ordered_json results = nlohmann::ordered_json::array();
    for (const ConvergenceReport& r : reports) {
        nlohmann::ordered_json item;
        item["method"] = method_name(r.method);
        item["kappa"] = r.method == Method::Emt ? nlohmann::ordered_json(r.kappa) : nlohmann::ordered_json(nullptr);
        item["fitted_order"] = r.fitted_order;
        item["paths"] = r.paths;
        item["seed"] = r.seed;
        nlohmann::ordered_json levels = nlohmann::ordered_json::array();
        for (const LevelError& le : r.levels) {
            levels.push_back({{"level", le.level},
                              {"delta", le.delta},
                              {"l2_error", le.l2_error},
                              {"sq_diff_stderr", le.sq_diff_stderr},
                              {"high_variance", le.high_variance}});
        }
        item["levels"] = levels;
        item["warnings"] = r.warnings;
        results.push_back(item);
    }
    summary["results"] = results;

    std::filesystem::path json_path;
    std::ofstream json = open_output(input.config.out, "summary.json", json_path);
    json << summary.dump(2) << '\n';
    finish(json, json_path);
    return reports;
}

std::filesystem::path cmd_simulate(const CommandInput& input) {
    const Prepared prep = prepare(input, MethodSelection::Emt);
    const EffectiveConfig& e = prep.effective;
    if (e.method == MethodSelection::Both) throw ValidationError("simulate needs --method em or emt");
    if (e.method == MethodSelection::Emt && e.kappas.size() != 1) throw ValidationError("simulate takes exactly one kappa");
    const Method m = e.method == MethodSelection::Em ? Method::Em : Method::Emt;
    const auto terminals = simulate_terminals(prep.problem, m, e.kappas.front(), e.seed, e.paths, e.level,
                                              input.config.threads);

    std::filesystem::path path;
    std::ofstream out = open_output(input.config.out, "terminals.csv", path);
    write_header(out, describe_run(e, prep.problem));
    out << "path,terminal\n";
    for (std::size_t i = 0; i < terminals.size(); ++i) out << i << ',' << format_double(terminals[i]) << '\n';
    finish(out, path);
    return path;
}

}  // namespace dsde
