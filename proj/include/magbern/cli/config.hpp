#pragma once

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "magbern/core/errors.hpp"

namespace magbern::cli {

enum class Kind { integer, real, energy, real_list, text, path, boolean };

struct ParamSpec {
    std::string name;
    Kind kind = Kind::real;
    std::string fallback;  // resolved value when neither file nor flag sets it
    std::string help;
};

struct CommandSpec {
    std::string name;
    std::string help;
    std::vector<ParamSpec> params;
};

/// Parameters every command takes.
inline std::vector<ParamSpec> common_params() {
    return {
        {"out", Kind::path, ".", "output directory for CSV, plot data and the manifest"},
        {"seed", Kind::integer, "1", "master seed"},
        {"threads", Kind::integer, "1", "worker threads (0: all cores)"},
    };
}

inline const std::vector<CommandSpec>& command_specs() {
    static const std::vector<CommandSpec> specs = [] {
        std::vector<CommandSpec> s{
            {"fm", "print the polynomial F_m", {{"m", Kind::integer, "2", "order"}}},
            {"weyl-verify",
             "exact recursion check and the 3-D reduction test",
             {{"m_max", Kind::integer, "6", "check R^m(Id) = F_m(H) for m = 1..m_max"},
              {"b", Kind::real_list, "1,1,1", "field (B1,B2,B3), integers or decimals"},
              {"power", Kind::integer, "2", "power of R_3 to reduce"}}},
            {"bernstein",
             "continuum Bernstein sums against their constants",
             {{"B", Kind::real, "1", "field strength"},
              {"E", Kind::energy, "5B", "energy cutoff (a number or a multiple like 3B)"},
              {"samples", Kind::integer, "10", "random functions"},
              {"m_max", Kind::integer, "3", "largest derivative order"},
              {"terms", Kind::integer, "3", "level terms per function"},
              {"center_radius", Kind::real, "2", "radius of the disk holding the centers"}}},
            {"thickness",
             "certified thickness of a PBM mask",
             {{"mask", Kind::path, "", "PBM (P1) mask"},
              {"h", Kind::real_list, "1,1", "cell size (h1,h2)"},
              {"l", Kind::real_list, "8,8", "window (l1,l2)"},
              {"periodic", Kind::boolean, "false", "wrap windows around the mask"}}},
            {"specineq",
             "empirical spectral-inequality constant against the traced bound",
             {{"mask", Kind::path, "", "PBM (P1) mask; its grid becomes the torus grid"},
              {"B", Kind::real, "1", "field strength"},
              {"nphi", Kind::integer, "2", "flux quanta through the torus"},
              {"E", Kind::energy, "3B", "energy cutoff"},
              {"l", Kind::real_list, "", "window (l1,l2); empty: a quarter of the box"},
              {"rho", Kind::real, "", "density used in the bound; empty: certified value"},
              {"tol", Kind::real, "1e-9", "eigensolver residual tolerance"}}},
            {"remez",
             "randomized Remez and analytic-function checks in one dimension",
             {{"trials", Kind::integer, "200", "instances of each kind"},
              {"degree_max", Kind::integer, "8", "largest polynomial degree"}}},
            {"control",
             "HUM controls and cost bounds on a torus",
             {{"mask", Kind::path, "", "PBM (P1) mask; empty: periodic strips"},
              {"strip", Kind::real_list, "4,8", "strip width and period in cells when no mask is given"},
              {"B", Kind::real, "1", "field strength"},
              {"nphi", Kind::integer, "2", "flux quanta"},
              {"per_length", Kind::real, "6", "grid points per magnetic length"},
              {"E_max", Kind::energy, "3B", "spectral cutoff"},
              {"T", Kind::real_list, "0.25,0.5,1,2,4", "horizons"},
              {"nodes", Kind::integer, "64", "time quadrature nodes"},
              {"l", Kind::real_list, "", "window (l1,l2); empty: a quarter of the box"},
              {"rho", Kind::real, "", "density used in the bound; empty: certified value"},
              {"tol", Kind::real, "1e-9", "eigensolver residual tolerance"},
              {"hum_eps", Kind::real, "1e-8", "terminal residual target"}}},
            {"wegner",
             "Monte Carlo window counts for the random Landau Hamiltonian",
             {{"B", Kind::real, "0.7853981633974483", "field strength"},
              {"L", Kind::real_list, "4,8", "box sides (integers, B L^2 / 2π integral)"},
              {"h", Kind::real, "0.25", "grid spacing"},
              {"m0", Kind::real, "0", "lower end of the coupling law"},
              {"M0", Kind::real, "4", "upper end of the coupling law"},
              {"radius", Kind::real, "0.5", "single-site disk radius"},
              {"cantor_depth", Kind::integer, "3", "fat Cantor removal steps"},
              {"E", Kind::energy, "1.24", "window center"},
              {"eps", Kind::real_list, "0.005,0.01,0.015,0.02,0.025,0.03", "window half-widths"},
              {"trials", Kind::integer, "200", "samples per box"},
              {"bootstrap", Kind::integer, "1000", "bootstrap resamples"}}},
        };
        for (auto& c : s)
            for (auto& p : common_params()) c.params.push_back(p);
        return s;
    }();
    return specs;
}

inline const CommandSpec& command_spec(const std::string& name) {
    for (const auto& c : command_specs())
        if (c.name == name) return c;
    throw ValidationError("unknown command '" + name + "'");
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Strict whole-token number parse.
inline double parse_real(const std::string& key, const std::string& v) {
    double x = 0.0;
    const auto t = trim(v);
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (t.empty() || ec != std::errc() || p != t.data() + t.size() || !std::isfinite(x))
        throw ValidationError("unparsable value for '" + key + "': '" + v + "'");
    return x;
}

inline long long parse_integer(const std::string& key, const std::string& v) {
    long long x = 0;
    const auto t = trim(v);
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (t.empty() || ec != std::errc() || p != t.data() + t.size())
        throw ValidationError("unparsable value for '" + key + "': '" + v + "'");
    return x;
}

/// "2.5", "3B" (three times the field) or "B".
inline double parse_energy(const std::string& key, const std::string& v, double B) {
    const auto t = trim(v);
    if (!t.empty() && t.back() == 'B') {
        const auto head = t.substr(0, t.size() - 1);
        return (head.empty() ? 1.0 : parse_real(key, head)) * B;
    }
    return parse_real(key, t);
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, item));
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    const auto t = trim(v);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ValidationError("unparsable value for '" + key + "': '" + v + "'");
}

/// Resolved configuration of one run.
struct RunConfig {
    std::string command;
    std::map<std::string, std::string> params;

    [[nodiscard]] const std::string& raw(const std::string& key) const {
        const auto it = params.find(key);
        if (it == params.end()) throw ValidationError("unknown key '" + key + "' for command " + command);
        return it->second;
    }
    [[nodiscard]] bool is_set(const std::string& key) const { return !trim(raw(key)).empty(); }
    [[nodiscard]] double real(const std::string& key) const { return parse_real(key, raw(key)); }
    [[nodiscard]] long long integer(const std::string& key) const { return parse_integer(key, raw(key)); }
    [[nodiscard]] bool boolean(const std::string& key) const { return parse_bool(key, raw(key)); }
    [[nodiscard]] std::vector<double> list(const std::string& key) const { return parse_list(key, raw(key)); }
    [[nodiscard]] double energy(const std::string& key, double B) const { return parse_energy(key, raw(key), B); }
    [[nodiscard]] std::filesystem::path out_dir() const { return raw("out"); }
    [[nodiscard]] std::uint64_t seed() const { return static_cast<std::uint64_t>(integer("seed")); }
    [[nodiscard]] unsigned threads() const { return static_cast<unsigned>(integer("threads")); }
};

/// key = value lines with # comments.
inline std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path.string() + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected key = value, got '" +
                                  line + "'");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

/// Kind and range checks; every value is parsed once so misspelled or
/// malformed input fails before any work starts.
inline void validate(const RunConfig& c) {
    const CommandSpec& spec = command_spec(c.command);
    for (const auto& p : spec.params) {
        const std::string& v = c.raw(p.name);
        // An empty built-in default marks an optional parameter.
        if (trim(v).empty()) {
            if (!p.fallback.empty()) throw ValidationError("'" + p.name + "' needs a value");
            continue;
        }
        switch (p.kind) {
            case Kind::integer: (void)parse_integer(p.name, v); break;
            case Kind::real: (void)parse_real(p.name, v); break;
            case Kind::energy: (void)parse_energy(p.name, v, 1.0); break;
            case Kind::real_list: (void)parse_list(p.name, v); break;
            case Kind::boolean: (void)parse_bool(p.name, v); break;
            case Kind::text:
            case Kind::path: break;
        }
        static const std::set<std::string> positive{"B", "h", "tol", "hum_eps", "per_length", "center_radius",
                                                    "radius"};
        if (p.kind == Kind::real && positive.contains(p.name) && !(parse_real(p.name, v) > 0.0))
            throw ValidationError("'" + p.name + "' must be positive, got " + v);
        if (p.kind == Kind::integer && parse_integer(p.name, v) < 0)
            throw ValidationError("'" + p.name + "' must be non-negative, got " + v);
    }
    if (c.params.contains("rho") && c.is_set("rho")) {
        const double rho = c.real("rho");
        if (!(rho > 0.0 && rho <= 1.0)) throw ValidationError("'rho' must lie in (0, 1], got " + c.raw("rho"));
    }
    if (c.params.contains("l") && c.is_set("l")) {
        const auto l = c.list("l");
        if (l.size() != 2 || !(l[0] > 0.0 && l[1] > 0.0))
            throw ValidationError("'l' must be two positive numbers, got " + c.raw("l"));
    }
    if (c.command == "thickness" && !c.is_set("mask")) throw ValidationError("thickness needs --mask");
    if (c.command == "specineq" && !c.is_set("mask")) throw ValidationError("specineq needs --mask");
}

/// Echo of the resolved configuration in the config-file format; feeding
/// it back through --config reproduces the run.
inline void write_manifest(const RunConfig& c, std::ostream& os) {
    os << "command = " << c.command << '\n';
    for (const auto& [k, v] : c.params) os << k << " = " << v << '\n';
}

/// CLI grammar: magbern <command> [--key value]... [--config file].
/// Flags override the file, the file overrides built-in defaults.
class CommandLine {
public:
    CommandLine() : app_("magbern: magnetic Bernstein and spectral inequality toolkit", "magbern") {
        // Plain --help: "h" is a parameter name (grid spacing).
        app_.set_help_flag("--help", "print help and exit");
        app_.require_subcommand(0, 1);
        app_.add_option("--config", config_, "key = value file (may carry 'command = ...')");
        for (const auto& spec : command_specs()) {
            CLI::App* sub = app_.add_subcommand(spec.name, spec.help);
            sub->add_option("--config", config_, "key = value file");
            auto& store = flags_[spec.name];
            for (const auto& p : spec.params) sub->add_option("--" + p.name, store[p.name], p.help);
            subs_.push_back(sub);
        }
    }

    CLI::App& app() { return app_; }

    /// Throws CLI::ParseError for grammar errors (including --help) and
    /// ValidationError for semantic ones.
    RunConfig parse(int argc, const char* const* argv) {
        app_.parse(argc, argv);
        RunConfig rc;
        CLI::App* chosen = nullptr;
        for (auto* s : subs_)
            if (s->parsed()) chosen = s;
        std::map<std::string, std::string> file;
        if (!config_.empty()) {
            file = read_config_file(config_);
            if (const auto it = file.find("command"); it != file.end()) {
                rc.command = it->second;
                file.erase(it);
            }
        }
        if (chosen) {
            if (!rc.command.empty() && rc.command != chosen->get_name())
                throw ValidationError("config file is for command '" + rc.command + "', not '" + chosen->get_name() +
                                      "'");
            rc.command = chosen->get_name();
        }
        if (rc.command.empty()) throw ValidationError("no command given (try --help)");
        const CommandSpec& spec = command_spec(rc.command);
        for (const auto& p : spec.params) rc.params[p.name] = p.fallback;
        for (const auto& [k, v] : file) {
            if (!rc.params.contains(k))
                throw ValidationError("unknown key '" + k + "' in " + config_ + " for command " + rc.command);
            rc.params[k] = v;
        }
        if (chosen) {
            auto& store = flags_[rc.command];
            for (const auto& p : spec.params)
                if (chosen->count("--" + p.name) > 0) rc.params[p.name] = store[p.name];
        }
        for (const auto& p : spec.params)
            if (p.kind == Kind::path && !trim(rc.params[p.name]).empty())
                rc.params[p.name] = std::filesystem::absolute(rc.params[p.name]).lexically_normal().string();
        validate(rc);
        return rc;
    }

private:
    CLI::App app_;
    std::string config_;
    std::map<std::string, std::map<std::string, std::string>> flags_;
    std::vector<CLI::App*> subs_;
};

}  // namespace magbern::cli
