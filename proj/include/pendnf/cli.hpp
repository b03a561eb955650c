// Command-line front end: `pend-nf <verify|coeffs|trajectory|map> [flags]`.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or configuration
// error.

#ifndef PENDNF_CLI_HPP
#define PENDNF_CLI_HPP

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dynamics.hpp"
#include "normal_form.hpp"
#include "rational_series.hpp"
#include "verify.hpp"

namespace pendnf::cli
{

inline constexpr int exit_ok = 0;
inline constexpr int exit_failed = 1;
inline constexpr int exit_usage = 2;

enum class Command { verify, coeffs, trajectory, map };
enum class Format { json, csv, text };

struct RunConfig {
    Command command = Command::verify;
    std::size_t order = 0; // 0: per-suite / per-series default
    std::optional<double> tol;
    std::string suite = "all";
    std::string series;
    std::string method = "closed";
    std::string I = "1/32";
    std::string g = "1";
    bool physical = false;
    std::optional<double> h;
    std::optional<double> energy;
    double t0 = 0;
    double t1 = 10;
    double dt = 0.01;
    bool wrapped = false;
    std::optional<double> p, q, B, beta;
    Format format = Format::text;
    std::string output;
};

class usage_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Exact rational from "a/b" or a decimal literal such as "-1.25e-3".
inline mpq_class parse_rational(const std::string &text)
{
    mpq_class r;
    if (text.find('/') != std::string::npos) {
        if (r.set_str(text, 10) != 0 || r.get_den() == 0) {
            throw usage_error("not a rational number: '" + text + "'");
        }
        r.canonicalize();
        return r;
    }
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
        negative = text[i++] == '-';
    }
    std::string digits;
    long exponent = 0;
    bool seen_digit = false, seen_point = false;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits += c;
            seen_digit = true;
            exponent -= seen_point;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        try {
            std::size_t used = 0;
            exponent += std::stol(text.substr(i + 1), &used);
            i += 1 + used;
        } catch (const std::exception &) {
            throw usage_error("not a number: '" + text + "'");
        }
    }
    if (!seen_digit || i != text.size()) {
        throw usage_error("not a number: '" + text + "'");
    }
    mpz_class num(digits, 10), ten = 10, scale;
    mpz_pow_ui(scale.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(std::abs(exponent)));
    r = exponent >= 0 ? mpq_class(num * scale) : mpq_class(num, scale);
    r.canonicalize();
    return negative ? mpq_class(-r) : r;
}

inline std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail
{

inline PendulumParams params_of(const RunConfig &cfg)
{
    const PendulumParams par{parse_rational(cfg.I).get_d(), parse_rational(cfg.g).get_d()};
    if (!(par.I > 0 && par.g > 0)) {
        throw usage_error("--I and --g must be positive");
    }
    return par;
}

inline std::size_t effective_order(std::size_t requested, std::size_t fallback,
                                   const std::optional<std::size_t> &cap)
{
    const std::size_t n = requested == 0 ? fallback : requested;
    return cap ? std::min(n, *cap) : n;
}

inline int run_verify(const RunConfig &cfg, const std::optional<std::size_t> &cap, std::ostream &out)
{
    VerifyOptions opt;
    if (cfg.order != 0 || cap) {
        opt.order = effective_order(cfg.order, 200, cap);
    }
    opt.tol = cfg.tol;
    const auto checks = verify::run(cfg.suite, opt);
    bool all = true;
    if (cfg.format == Format::json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto &c : checks) {
            arr.push_back({{"name", c.name},
                           {"pass", c.pass},
                           {"measured", c.measured},
                           {"tolerance", c.tolerance},
                           {"detail", c.detail}});
            all = all && c.pass;
        }
        out << nlohmann::json{{"suite", cfg.suite}, {"pass", all}, {"checks", arr}}.dump(2) << '\n';
    } else {
        for (const auto &c : checks) {
            out << (c.pass ? "PASS " : "FAIL ") << c.name << "  measured=" << fmt17(c.measured)
                << "  tol=" << fmt17(c.tolerance);
            if (!c.detail.empty()) {
                out << "  (" << c.detail << ')';
            }
            out << '\n';
            all = all && c.pass;
        }
        out << (all ? "all checks passed" : "some checks FAILED") << " (" << checks.size()
            << " checks)\n";
    }
    return all ? exit_ok : exit_failed;
}

inline int run_coeffs(const RunConfig &cfg, const std::optional<std::size_t> &cap, std::ostream &out)
{
    const auto kind = parse_series_kind(cfg.series);
    if (!kind) {
        throw usage_error("unknown series '" + cfg.series + "' (g0, U, D, a2, x, calU, W, Us, g0s, a2s)");
    }
    const auto n = effective_order(cfg.order, 10, cap);
    const std::size_t min_order = (*kind == SeriesKind::calU || *kind == SeriesKind::W ||
                                   *kind == SeriesKind::Us || *kind == SeriesKind::g0s ||
                                   *kind == SeriesKind::a2s)
                                      ? 2
                                      : 1;
    if (n < min_order) {
        throw usage_error("--order must be >= " + std::to_string(min_order) + " for " + cfg.series);
    }
    auto s = build_series(*kind, n);
    std::string convention = "normalized g=1 32Ig=1";
    if (cfg.physical) {
        s = to_physical(s, *kind, parse_rational(cfg.I), parse_rational(cfg.g));
        convention = "physical I=" + cfg.I + " g=" + cfg.g;
    }
    switch (cfg.format) {
    case Format::json: {
        auto j = to_json(s);
        j["series"] = cfg.series;
        j["normalization"] = convention;
        out << j.dump(2) << '\n';
        break;
    }
    case Format::csv:
        out << "# series=" << cfg.series << " var=" << s.var() << " order=" << s.order() << ' '
            << convention << '\n';
        out << "power,num,den\n";
        for (std::size_t i = 0; i <= s.order(); ++i) {
            out << i << ',' << s[i].get_num().get_str() << ',' << s[i].get_den().get_str() << '\n';
        }
        break;
    case Format::text:
        out << cfg.series << " (" << convention << "):\n" << s << '\n';
        break;
    }
    return exit_ok;
}

inline int run_trajectory(const RunConfig &cfg, std::ostream &out)
{
    if (cfg.format == Format::text) {
        throw usage_error("trajectory supports --format csv or json");
    }
    const auto par = params_of(cfg);
    if (cfg.h.has_value() == cfg.energy.has_value()) {
        throw usage_error("trajectory needs exactly one of --h or --energy");
    }
    const Modulus mod = cfg.h ? Modulus::from_h(*cfg.h) : modulus_from_energy(*cfg.energy, par);
    TrajectorySpec spec;
    if (cfg.method == "closed") {
        spec.method = Method::closed;
    } else if (cfg.method == "series") {
        spec.method = Method::series;
    } else if (cfg.method == "normal") {
        spec.method = Method::normal;
    } else if (cfg.method == "rk") {
        spec.method = Method::rk;
    } else {
        throw usage_error("unknown method '" + cfg.method + "' (closed, series, normal, rk)");
    }
    spec.t0 = cfg.t0;
    spec.t1 = cfg.t1;
    spec.dt = cfg.dt;
    spec.tol = cfg.tol.value_or(1e-12);
    if (!(spec.dt > 0) || !(spec.t1 >= spec.t0)) {
        throw usage_error("need --dt > 0 and --t1 >= --t0");
    }
    const auto rows = trajectory(spec, mod, par);
    const auto wrap = [](double b) { return std::remainder(b, 2 * std::numbers::pi); };
    if (cfg.format == Format::csv) {
        out << "t,B,beta,energy,method" << (cfg.wrapped ? ",beta_wrapped" : "") << '\n';
        for (const auto &r : rows) {
            out << fmt17(r.t) << ',' << fmt17(r.B) << ',' << fmt17(r.beta) << ',' << fmt17(r.energy)
                << ',' << to_string(r.method);
            if (cfg.wrapped) {
                out << ',' << fmt17(wrap(r.beta));
            }
            out << '\n';
        }
    } else {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto &r : rows) {
            nlohmann::json row{{"t", r.t}, {"B", r.B}, {"beta", r.beta}, {"energy", r.energy},
                               {"method", std::string(to_string(r.method))}};
            if (cfg.wrapped) {
                row["beta_wrapped"] = wrap(r.beta);
            }
            arr.push_back(std::move(row));
        }
        out << arr.dump(2) << '\n';
    }
    return exit_ok;
}

inline int run_map(const RunConfig &cfg, std::ostream &out)
{
    if (cfg.format == Format::csv) {
        throw usage_error("map supports --format text or json");
    }
    const auto par = params_of(cfg);
    const bool forward = cfg.p && cfg.q;
    const bool inverse = cfg.B && cfg.beta;
    if (forward == inverse || (forward && (cfg.B || cfg.beta)) || (inverse && (cfg.p || cfg.q))) {
        throw usage_error("map needs either --p and --q, or --B and --beta");
    }
    NormalCoords n{};
    PhaseState s{};
    if (forward) {
        n = {*cfg.p, *cfg.q};
        s = canonical_from_normal(n, par);
    } else {
        s = {*cfg.B, *cfg.beta};
        n = normal_from_canonical(s, par);
    }
    const double xp = nome_from_action(n.x(), par);
    const double a = rescaling_factor(xp, par);
    const nlohmann::ordered_json j{
        {"p", n.p},
        {"q", n.q},
        {"x", n.x()},
        {"x_prime", xp},
        {"a", a},
        {"p_prime", n.p / a},
        {"q_prime", n.q / a},
        {"B", s.B},
        {"beta", s.beta},
        {"energy", hamiltonian(s, par)},
        {"normal_form_energy", 32 * par.I * par.g * par.g * nome_functions::energy_ratio(xp)},
        {"g0", par.g * nome_functions::g0_ratio(xp)},
    };
    if (cfg.format == Format::json) {
        out << j.dump(2) << '\n';
    } else {
        for (const auto &[k, v] : j.items()) {
            out << k << " = " << fmt17(v.get<double>()) << '\n';
        }
    }
    return exit_ok;
}

inline std::optional<std::size_t> order_cap(const char *env)
{
    if (env == nullptr || *env == '\0') {
        return std::nullopt;
    }
    char *end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) {
        throw usage_error("PEND_NF_MAX_ORDER must be a positive integer");
    }
    return static_cast<std::size_t>(v);
}

} // namespace detail

/// Parses argv and runs the command; output goes to `out` unless --output
/// names a file. `max_order_env` is the value of PEND_NF_MAX_ORDER.
inline int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err,
               const char *max_order_env)
{
    CLI::App app{"Normal-form construction and checks for the pendulum near its equilibria",
                 "pend-nf"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);
    RunConfig cfg;
    std::string format;
    const std::map<std::string, Format> formats{
        {"json", Format::json}, {"csv", Format::csv}, {"text", Format::text}};

    const auto add_params = [&cfg](CLI::App *sub) {
        sub->add_option("--I", cfg.I, "inertia moment (decimal or a/b)");
        sub->add_option("--g", cfg.g, "rate g, 1/time (decimal or a/b)");
    };

    auto *verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--suite", cfg.suite, "elliptic|legendre|identity51|theta|factorization|jacobian|dynamics|stable|all");
    verify->add_option("--order", cfg.order, "series order for exact suites");
    verify->add_option("--tol", cfg.tol, "tolerance for the elliptic and legendre suites");
    verify->add_option("--format", format, "text|json");

    auto *coeffs = app.add_subcommand("coeffs", "emit exact series coefficients");
    coeffs->add_option("--series", cfg.series, "g0|U|D|a2|x|calU|W|Us|g0s|a2s")->required();
    coeffs->add_option("--order", cfg.order, "truncation order");
    coeffs->add_option("--format", format, "json|csv|text");
    coeffs->add_option("--output", cfg.output, "output file");
    coeffs->add_flag("--physical", cfg.physical, "reinstate I and g");
    add_params(coeffs);

    auto *traj = app.add_subcommand("trajectory", "sample a libration");
    traj->add_option("--method", cfg.method, "closed|series|normal|rk");
    auto *hopt = traj->add_option("--h", cfg.h, "modulus h in (0, 1)");
    auto *eopt = traj->add_option("--energy", cfg.energy, "energy U > 0");
    hopt->excludes(eopt);
    traj->add_option("--t0", cfg.t0, "start time");
    traj->add_option("--t1", cfg.t1, "end time");
    traj->add_option("--dt", cfg.dt, "time step");
    traj->add_option("--tol", cfg.tol, "rk tolerance");
    traj->add_flag("--wrapped", cfg.wrapped, "add beta reduced to (-pi, pi]");
    traj->add_option("--format", format, "csv|json");
    traj->add_option("--output", cfg.output, "output file");
    add_params(traj);

    auto *map = app.add_subcommand("map", "evaluate the canonical map (p,q) <-> (B,beta)");
    map->add_option("--p", cfg.p, "normal coordinate p");
    map->add_option("--q", cfg.q, "normal coordinate q");
    map->add_option("--B", cfg.B, "momentum B (inverse map)");
    map->add_option("--beta", cfg.beta, "angle beta (inverse map)");
    map->add_option("--format", format, "text|json");
    map->add_option("--output", cfg.output, "output file");
    add_params(map);

    try {
        std::vector<std::string> args;
        for (int i = argc - 1; i > 0; --i) {
            args.emplace_back(argv[i]);
        }
        app.parse(args);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError &e) {
        err << "pend-nf: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        if (verify->parsed()) {
            cfg.command = Command::verify;
        } else if (coeffs->parsed()) {
            cfg.command = Command::coeffs;
        } else if (traj->parsed()) {
            cfg.command = Command::trajectory;
        } else {
            cfg.command = Command::map;
        }
        if (!format.empty()) {
            const auto it = formats.find(format);
            if (it == formats.end()) {
                throw usage_error("unknown format '" + format + "'");
            }
            cfg.format = it->second;
        } else {
            cfg.format = cfg.command == Command::coeffs       ? Format::json
                         : cfg.command == Command::trajectory ? Format::csv
                                                              : Format::text;
        }
        if (cfg.command == Command::verify && cfg.format == Format::csv) {
            throw usage_error("verify supports --format text or json");
        }
        if (verify->count("--order") && cfg.order < 1) {
            throw usage_error("--order must be >= 1");
        }
        if (coeffs->count("--order") && cfg.order < 1) {
            throw usage_error("--order must be >= 1");
        }
        if (cfg.tol && !(*cfg.tol > 0)) {
            throw usage_error("--tol must be positive");
        }
        const auto cap = detail::order_cap(max_order_env);

        std::ofstream file;
        std::ostream *sink = &out;
        if (!cfg.output.empty()) {
            file.open(cfg.output, std::ios::binary);
            if (!file) {
                throw usage_error("cannot write '" + cfg.output + "'");
            }
            sink = &file;
        }
        int code = exit_ok;
        switch (cfg.command) {
        case Command::verify:
            code = detail::run_verify(cfg, cap, *sink);
            break;
        case Command::coeffs:
            code = detail::run_coeffs(cfg, cap, *sink);
            break;
        case Command::trajectory:
            code = detail::run_trajectory(cfg, *sink);
            break;
        case Command::map:
            code = detail::run_map(cfg, *sink);
            break;
        }
        if (file.is_open()) {
            file.close();
            if (!file) {
                throw usage_error("failed writing '" + cfg.output + "'");
            }
        }
        return code;
    } catch (const usage_error &e) {
        err << "pend-nf: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::invalid_argument &e) {
        err << "pend-nf: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::domain_error &e) {
        err << "pend-nf: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception &e) {
        err << "pend-nf: " << e.what() << '\n';
        return exit_failed;
    }
}

} // namespace pendnf::cli

#endif
