#include "dsde/run_config.hpp"

#include "dsde/examples.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dsde {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
    s = trim(s);
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) return std::nullopt;
    }
    return value;
}

// A value with its 1-based column in the source line.
struct Field {
    std::string_view text;
    std::size_t column;
};

std::vector<Field> split(Field f, char sep) {
    std::vector<Field> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = f.text.find(sep, start);
        const auto piece = f.text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        const auto lead = piece.find_first_not_of(" \t\r");
        out.push_back({trim(piece), f.column + start + (lead == std::string_view::npos ? 0 : lead)});
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<double> parse_breakpoints(Field f, std::size_t line) {
    std::vector<double> out;
    if (f.text.empty()) return out;
    for (const Field& item : split(f, ',')) {
        auto v = parse_number<double>(item.text);
        if (!v) throw ConfigError(line, item.column, "malformed breakpoint '" + std::string(item.text) + "'");
        out.push_back(*v);
    }
    return out;
}

std::vector<Expression> parse_branches(Field f, std::size_t line) {
    std::vector<Expression> out;
    for (const Field& item : split(f, ';')) {
        try {
            out.push_back(parse_expression(item.text));
        } catch (const ParseError& e) {
            throw ConfigError(line, item.column + e.offset(), e.detail());
        }
    }
    return out;
}

}  // namespace

std::optional<MethodSelection> parse_method(std::string_view text) {
    if (text == "em") return MethodSelection::Em;
    if (text == "emt") return MethodSelection::Emt;
    if (text == "both") return MethodSelection::Both;
    return std::nullopt;
}

std::string_view method_selection_name(MethodSelection m) {
    switch (m) {
    case MethodSelection::Em: return "em";
    case MethodSelection::Emt: return "emt";
    case MethodSelection::Both: return "both";
    }
    return "both";
}

std::pair<int, int> parse_levels(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw ValidationError("levels must look like K_min:K_max");
    auto lo = parse_number<int>(text.substr(0, colon));
    auto hi = parse_number<int>(text.substr(colon + 1));
    if (!lo || !hi) throw ValidationError("levels must look like K_min:K_max");
    return {*lo, *hi};
}

LoadedConfig parse_config(std::string_view text) {
    LoadedConfig loaded;
    RunConfig& c = loaded.config;
    std::set<std::string, std::less<>> seen;
    std::map<std::string, std::pair<Field, std::size_t>, std::less<>> problem_keys;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = raw.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, 0, "expected 'key = value'");
        const std::string key(trim(raw.substr(0, eq)));
        const std::string_view rest = raw.substr(eq + 1);
        const auto lead = rest.find_first_not_of(" \t\r");
        const Field value{trim(rest), eq + 2 + (lead == std::string_view::npos ? 0 : lead)};

        if (!seen.insert(key).second) throw ConfigError(line_no, 0, "duplicate key '" + key + "'");
        auto bad = [&](const std::string& what) { return ConfigError(line_no, value.column, what); };

        if (key == "example") {
            c.example = std::string(value.text);
        } else if (key == "method") {
            c.method = parse_method(value.text);
            if (!c.method) throw bad("method must be em, emt or both");
        } else if (key == "kappa") {
            for (const Field& item : split(value, ',')) {
                auto v = parse_number<double>(item.text);
                if (!v) throw ConfigError(line_no, item.column, "malformed kappa '" + std::string(item.text) + "'");
                if (!(*v > 0.0 && *v < 1.0)) throw ConfigError(line_no, item.column, "kappa must be in (0,1)");
                c.kappas.push_back(*v);
            }
        } else if (key == "paths") {
            auto v = parse_number<std::size_t>(value.text);
            if (!v) throw bad("paths must be a positive integer");
            c.paths = *v;
        } else if (key == "levels") {
            try {
                c.levels = parse_levels(value.text);
            } catch (const ValidationError& e) {
                throw bad(e.what());
            }
        } else if (key == "seed") {
            auto v = parse_number<std::uint64_t>(value.text);
            if (!v) throw bad("seed must be an unsigned 64-bit integer");
            c.seed = *v;
        } else if (key == "level") {
            auto v = parse_number<int>(value.text);
            if (!v) throw bad("level must be an integer");
            c.level = *v;
        } else if (key == "x0" || key == "T" || key == "cbar") {
            auto v = parse_number<double>(value.text);
            if (!v) throw bad(key + " must be a finite number");
            (key == "x0" ? c.x0 : key == "T" ? c.horizon : c.ellipticity_floor) = *v;
        } else if (key == "drift.breakpoints" || key == "drift.branches" || key == "diffusion.breakpoints" ||
                   key == "diffusion.branches") {
            problem_keys.emplace(key, std::make_pair(value, line_no));
        } else {
            throw ConfigError(line_no, 0, "unknown key '" + key + "'");
        }
    }

    if (!problem_keys.empty()) {
        if (!c.example.empty()) throw ConfigError(1, 0, "a config may set 'example' or define drift/diffusion, not both");
        for (const char* required : {"drift.branches", "diffusion.branches"}) {
            if (!problem_keys.contains(required)) {
                throw ConfigError(line_no, 0, std::string("missing key '") + required + "'");
            }
        }
        auto build = [&](const std::string& prefix) {
            const auto& [branches_field, branches_line] = problem_keys.at(prefix + ".branches");
            std::vector<double> bps;
            std::size_t bps_line = branches_line;
            if (auto it = problem_keys.find(prefix + ".breakpoints"); it != problem_keys.end()) {
                bps_line = it->second.second;
                bps = parse_breakpoints(it->second.first, bps_line);
            }
            auto branches = parse_branches(branches_field, branches_line);
            try {
                return PiecewiseFn(std::move(bps), std::move(branches));
            } catch (const ValidationError& e) {
                throw ConfigError(branches_line, 0, prefix + ": " + e.what());
            }
        };
        SdeProblem p{build("drift"), build("diffusion")};
        loaded.problem = std::move(p);
    }
    return loaded;
}

LoadedConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    LoadedConfig loaded = parse_config(buf.str());
    loaded.config.config_path = path;
    return loaded;
}

RunConfig merge(RunConfig base, const RunConfig& o) {
    if (!o.example.empty()) base.example = o.example;
    if (!o.config_path.empty()) base.config_path = o.config_path;
    if (o.method) base.method = o.method;
    if (!o.kappas.empty()) base.kappas = o.kappas;
    if (o.paths) base.paths = o.paths;
    if (o.levels) base.levels = o.levels;
    if (o.seed) base.seed = o.seed;
    if (o.x0) base.x0 = o.x0;
    if (o.horizon) base.horizon = o.horizon;
    if (o.ellipticity_floor) base.ellipticity_floor = o.ellipticity_floor;
    if (o.level) base.level = o.level;
    if (o.out != ".") base.out = o.out;
    if (o.threads != 0) base.threads = o.threads;
    return base;
}

EffectiveConfig resolve(const RunConfig& c, MethodSelection default_method) {
    EffectiveConfig e;
    e.problem_source = !c.example.empty() ? c.example : c.config_path.string();
    e.method = c.method.value_or(default_method);
    e.kappas = c.kappas.empty() ? std::vector<double>{kDefaultKappa} : c.kappas;
    e.paths = c.paths.value_or(kDefaultPaths);
    e.min_level = c.levels ? c.levels->first : kDefaultMinLevel;
    e.max_level = c.levels ? c.levels->second : kDefaultMaxLevel;
    e.seed = c.seed.value_or(kDefaultSeed);
    e.level = c.level.value_or(e.max_level);
    if (c.kappas.empty()) e.defaulted.push_back("kappa");
    if (!c.paths) e.defaulted.push_back("paths");
    if (!c.levels) e.defaulted.push_back("levels");
    if (!c.seed) e.defaulted.push_back("seed");

    for (double k : e.kappas) {
        if (!(k > 0.0 && k < 1.0)) throw ValidationError("kappa must be in (0,1)");
    }
    if (e.paths < 2) throw ValidationError("paths must be at least 2");
    if (e.min_level < 1) throw ValidationError("K_min must be at least 1");
    if (e.min_level >= e.max_level) throw ValidationError("K_min must be less than K_max");
    if (e.max_level > 30) throw ValidationError("K_max must not exceed 30");
    if (e.level < 0 || e.level > 30) throw ValidationError("level must be in [0, 30]");
    return e;
}

SdeProblem resolve_problem(const RunConfig& c, const std::optional<SdeProblem>& from_file,
                           std::vector<std::string>& defaulted) {
    SdeProblem p = [&] {
        if (!c.example.empty()) {
            if (from_file) throw ValidationError("choose either an example or a config-defined problem");
            return load_example(c.example).problem;
        }
        if (!from_file) throw ValidationError("no problem given: use --example or a config file defining drift/diffusion");
        SdeProblem q = *from_file;
        q.x0 = kDefaultX0;
        q.horizon = kDefaultHorizon;
        q.ellipticity_floor = kDefaultEllipticityFloor;
        return q;
    }();
    if (c.x0) p.x0 = *c.x0; else defaulted.push_back("x0");
    if (c.horizon) p.horizon = *c.horizon; else defaulted.push_back("T");
    if (c.ellipticity_floor) p.ellipticity_floor = *c.ellipticity_floor; else defaulted.push_back("cbar");
    return p;
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

}  // namespace dsde
