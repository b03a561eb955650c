// Verification suites run by `pend-nf verify`. Each check reports the
// measured defect against its tolerance; exact checks use defect 0 / 1.

#ifndef PENDNF_VERIFY_HPP
#define PENDNF_VERIFY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "elliptic.hpp"
#include "normal_form.hpp"

namespace pendnf
{

struct CheckResult {
    std::string name;
    double measured;
    double tolerance;
    bool pass;
    std::string detail;
};

struct VerifyOptions {
    std::optional<std::size_t> order;
    std::optional<double> tol;
};

namespace verify
{

inline CheckResult within(std::string name, double measured, double tol, std::string detail = {})
{
    const bool ok = std::isfinite(measured) && measured <= tol;
    return {std::move(name), measured, tol, ok, std::move(detail)};
}

inline CheckResult exact(std::string name, bool ok, std::string detail = {})
{
    return {std::move(name), ok ? 0.0 : 1.0, 0.0, ok, std::move(detail)};
}

inline std::string mismatch_detail(const SeriesCheck &c)
{
    return c.first_mismatch ? "first mismatch at power " + std::to_string(*c.first_mismatch)
                            : std::string("all coefficients agree");
}

inline std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
        v[i] = a + (b - a) * i / (n - 1);
    }
    return v;
}

inline std::vector<CheckResult> elliptic_suite(const VerifyOptions &opt)
{
    const double tol = opt.tol.value_or(1e-12);
    std::vector<CheckResult> out;
    out.push_back(within("elliptic.K_at_0", std::abs(complete_K(0) - std::numbers::pi / 2), tol));
    out.push_back(within("elliptic.E_at_1", std::abs(complete_E(1) - 1), tol));

    double ident = 0, period = 0;
    for (double m : {0.0, 0.1, 0.5, 0.7, 0.9, 0.99, 0.999999}) {
        const double K = complete_K(m);
        for (double u : linspace(-2 * K, 2 * K, 41)) {
            const auto j = jacobi_trio(u, m);
            ident = std::max({ident, std::abs(j.sn * j.sn + j.cn * j.cn - 1),
                              std::abs(j.dn * j.dn + m * m * j.sn * j.sn - 1)});
            period = std::max(period, std::abs(jacobi_trio(u + 4 * K, m).sn - j.sn));
        }
    }
    out.push_back(within("elliptic.jacobi_identities", ident, tol));
    out.push_back(within("elliptic.jacobi_period", period, 1e-10));

    double series = 0, product = 0;
    int non_monotone = 0;
    double prev = -1;
    for (double h : linspace(0.001, 0.999, 100)) {
        const auto mod = Modulus::from_h(h);
        const double q = nome_from_h(mod);
        non_monotone += q <= prev;
        prev = q;
        const double lam = lambda_from_h(mod);
        if (lam <= 0.05) {
            series = std::max(series, std::abs(q - (lam + 2 * std::pow(lam, 5) + 15 * std::pow(lam, 9))));
        }
        if (q < 0.5) {
            product = std::max(product, std::abs(g0_eval(mod, 1) / nome_functions::g0_ratio(q) - 1));
        }
    }
    out.push_back(within("elliptic.nome_lambda_series", series, tol));
    out.push_back(exact("elliptic.nome_monotone", non_monotone == 0));
    out.push_back(within("elliptic.g0_product", product, tol));
    return out;
}

inline std::vector<CheckResult> legendre_suite(const VerifyOptions &opt)
{
    double worst = 0;
    for (double h : linspace(0.05, 0.95, 50)) {
        worst = std::max(worst, std::abs(legendre_defect(Modulus::from_h(h))));
    }
    return {within("legendre.grid50", worst, opt.tol.value_or(1e-12))};
}

inline std::vector<CheckResult> identity51_suite(const VerifyOptions &opt)
{
    const auto n = opt.order.value_or(200);
    const auto D = build_D_series(n);
    const auto check = identity_51_check(D, build_a2_series(n));
    std::vector<CheckResult> out;
    out.push_back(exact("identity51.order_" + std::to_string(n), check.pass, mismatch_detail(check)));
    const auto positive_integers = [](const RationalSeries &s, std::size_t from) {
        for (std::size_t i = from; i <= s.order(); ++i) {
            if (s[i].get_den() != 1 || sgn(s[i]) <= 0) {
                return false;
            }
        }
        return true;
    };
    out.push_back(exact("identity51.g0_positive_integers", positive_integers(build_g0_series(n), 0)));
    out.push_back(exact("identity51.U_positive_integers", positive_integers(build_U_series(n), 1)));
    out.push_back(exact("identity51.D_positive_integers", positive_integers(D, 0)));
    return out;
}

inline std::vector<CheckResult> theta_suite(const VerifyOptions &opt)
{
    const auto n = opt.order.value_or(30);
    return {exact("theta.order_" + std::to_string(n), theta_logderiv_check(n).pass)};
}

inline std::vector<CheckResult> factorization_suite(const VerifyOptions &)
{
    const PendulumParams par;
    std::vector<CheckResult> out;
    double worst = 0, lo = INFINITY, hi = -INFINITY;
    for (double gamma : linspace(0.5, 2, 16)) {
        const auto r = factorization_check(0.1, gamma, par);
        worst = std::max(worst, r.rel_diff);
        lo = std::min(lo, r.U_factored);
        hi = std::max(hi, r.U_factored);
    }
    out.push_back(within("factorization.agreement", worst, 1e-8));
    out.push_back(within("factorization.gamma_independence", (hi - lo) / std::abs(hi), 1e-10));
    const double x = 1e-6;
    const auto small = factorization_check(x, 1, par);
    out.push_back(within("factorization.leading_term",
                         std::abs(small.U_factored / (32 * par.I * par.g * par.g * x * (1 + 8 * x)) - 1),
                         1e-9));
    return out;
}

/// d calU/dx from the exact series by central differences, against
/// g0(x'). The normalized series converges for |x| below about 1/12, which
/// bounds the sample nomes.
inline double calU_slope_defect(const PendulumParams &par, std::size_t order = 200)
{
    const auto calU = build_calU_series(order);
    const double s = 32 * par.I * par.g;
    double worst = 0;
    for (double xp : {-0.1, -0.05, -0.02, 0.02, 0.05}) {
        const double x = s * xp * nome_functions::a2_ratio(xp);
        const double e = 1e-5 * s;
        const auto energy = [&](double y) { return 32 * par.I * par.g * par.g * calU.evaluate(y / s); };
        const double slope = (energy(x + e) - energy(x - e)) / (2 * e);
        worst = std::max(worst, std::abs(slope - par.g * nome_functions::g0_ratio(xp)));
    }
    return worst;
}

inline std::vector<CheckResult> jacobian_suite(const VerifyOptions &)
{
    const PendulumParams par;
    double worst = 0;
    for (double xp : {-0.1, -0.05, 0.0, 0.05, 0.1}) {
        const double a = rescaling_factor(xp, par);
        const double r = std::sqrt(std::abs(xp));
        const double sign = xp < 0 ? -1 : 1;
        std::vector<NormalCoords> pts;
        if (xp == 0) {
            pts = {{0, 0}, {0, 0.3}, {0.3, 0}, {0, -0.2}, {-0.2, 0}};
        } else {
            pts = {{a * r, sign * a * r}, {a * r * 3, sign * a * r / 3}, {a * r / 2, sign * a * r * 2}};
        }
        for (const auto &n : pts) {
            worst = std::max(worst, std::abs(jacobian_det_check(n, par) - 1));
        }
    }
    return {within("jacobian.determinant", worst, 1e-6),
            within("jacobian.calU_slope", calU_slope_defect(par), 1e-6)};
}

inline std::vector<CheckResult> dynamics_suite(const VerifyOptions &)
{
    const PendulumParams par;
    std::vector<CheckResult> out;
    {
        const auto mod = Modulus::from_k(1);
        const auto s0 = closed_form_state(0, mod, par);
        double dbeta = 0, drift = 0;
        PhaseState s = s0;
        const double U = libration_energy(mod, par);
        for (int i = 1; i <= 100; ++i) {
            s = rk_oracle(s, par, 0.1 / par.g, 1e-12);
            const auto c = closed_form_state(i * 0.1 / par.g, mod, par);
            dbeta = std::max(dbeta, std::abs(s.beta - c.beta));
            drift = std::max(drift, std::abs(hamiltonian(s, par) - U) / U);
        }
        out.push_back(within("dynamics.closed_vs_rk", dbeta, 1e-8));
        out.push_back(within("dynamics.rk_energy_drift", drift, 100 * 1e-12));
    }
    double series = 0, energy = 0, normal = 0;
    for (double xp : {0.001, 0.01, 0.05, 0.1, 0.2}) {
        const auto mod = modulus_from_nome(xp);
        const double g0 = g0_eval(mod, par.g);
        const double U = libration_energy(mod, par);
        const double a = rescaling_factor(xp, par);
        const NormalCoords n0{a * std::sqrt(xp), a * std::sqrt(xp)};
        for (double t : linspace(0, 5 / par.g, 51)) {
            const auto c = closed_form_state(t, mod, par);
            const auto s = series_state(FlowFactors::at_time(g0, t), xp, par);
            series = std::max({series, std::abs(s.beta - c.beta), std::abs(s.B - c.B)});
            energy = std::max(energy, std::abs(hamiltonian(c, par) - U) / U);
            const auto nf = canonical_from_normal(normal_flow(n0, t, par), par);
            normal = std::max({normal, std::abs(nf.beta - c.beta), std::abs(nf.B - c.B)});
        }
    }
    out.push_back(within("dynamics.closed_vs_series", series, 1e-10));
    out.push_back(within("dynamics.closed_energy", energy, 1e-11));
    out.push_back(within("dynamics.closed_vs_normal_flow", normal, 1e-8));
    return out;
}

inline std::vector<CheckResult> stable_suite(const VerifyOptions &opt)
{
    const auto n = std::max<std::size_t>(opt.order.value_or(12), 6);
    const auto bundle = build_stable_series(n);
    std::vector<CheckResult> out;
    const long expected[] = {1, -2, -4, -20, -132, -1008};
    bool w_ok = true;
    for (std::size_t i = 0; i < 6; ++i) {
        w_ok = w_ok && bundle.W_series[i + 1] == expected[i] && bundle.W_series[0] == 0;
    }
    out.push_back(exact("stable.W_coefficients", w_ok));
    const auto rel = stable_relation_check(build_calU_series(n), bundle.W_series);
    out.push_back(exact("stable.calU_W_relation", rel.pass, mismatch_detail(rel)));

    const PendulumParams par;
    double worst = 0;
    for (double xs : {0.01, 0.05, 0.1, 0.2}) {
        for (double th : linspace(0, 2 * std::numbers::pi, 9)) {
            const double p = std::sqrt(xs) * std::cos(th), q = std::sqrt(xs) * std::sin(th);
            const double e = 1e-5;
            const auto S = [&](double pp, double qq) { return stable_state(ScaledCoords{pp, qq}, par).beta; };
            const double dS_dq = (S(p, q + e) - S(p, q - e)) / (2 * e);
            const double dS_dp = (S(p + e, q) - S(p - e, q)) / (2 * e);
            const double rhs = stable_frequency(xs, par) * par.I * (p * dS_dq - q * dS_dp);
            worst = std::max(worst, std::abs(stable_state(ScaledCoords{p, q}, par).B - rhs));
        }
    }
    out.push_back(within("stable.differential_relation", worst, 1e-8));

    double drift = 0;
    for (double xs : {0.001, 0.05, 0.2}) {
        const double U = stable_energy(xs, par);
        for (double t : linspace(0, 2 * std::numbers::pi / stable_frequency(xs, par), 13)) {
            const auto s = stable_state(xs, t, par);
            drift = std::max(drift, std::abs(stable_hamiltonian(s, par) / U - 1));
        }
    }
    out.push_back(within("stable.energy", drift, 1e-11));

    const double xs = 1e-8;
    out.push_back(within("stable.small_amplitude_frequency",
                         std::abs(stable_frequency(xs, par) / par.g - 1), 1e-6));

    double det = 0;
    for (double r : {0.05, 0.2, 0.35}) {
        for (double th : {0.0, 0.7, 2.0, 4.0}) {
            const NormalCoords nc{r * std::cos(th), r * std::sin(th)};
            const double e = 1e-6;
            const auto f = [&](double dp, double dq) {
                return stable_canonical_from_normal({nc.p + dp, nc.q + dq}, par);
            };
            const auto pp = f(e, 0), pm = f(-e, 0), qp = f(0, e), qm = f(0, -e);
            const double J = (pp.B - pm.B) * (qp.beta - qm.beta) / (4 * e * e) -
                             (qp.B - qm.B) * (pp.beta - pm.beta) / (4 * e * e);
            det = std::max(det, std::abs(J - 1));
        }
    }
    out.push_back(within("stable.jacobian_determinant", det, 1e-6));
    return out;
}

using Suite = std::function<std::vector<CheckResult>(const VerifyOptions &)>;

inline const std::map<std::string, Suite> &suites()
{
    static const std::map<std::string, Suite> table{
        {"dynamics", dynamics_suite},     {"elliptic", elliptic_suite},
        {"factorization", factorization_suite}, {"identity51", identity51_suite},
        {"jacobian", jacobian_suite},     {"legendre", legendre_suite},
        {"stable", stable_suite},         {"theta", theta_suite},
    };
    return table;
}

/// Runs one suite (or "all") and returns its checks sorted by name.
inline std::vector<CheckResult> run(const std::string &suite, const VerifyOptions &opt)
{
    std::vector<CheckResult> out;
    if (suite == "all") {
        for (const auto &[name, fn] : suites()) {
            auto r = fn(opt);
            out.insert(out.end(), r.begin(), r.end());
        }
    } else {
        const auto it = suites().find(suite);
        if (it == suites().end()) {
            throw std::invalid_argument("unknown suite '" + suite + "'");
        }
        out = it->second(opt);
    }
    std::sort(out.begin(), out.end(),
              [](const CheckResult &a, const CheckResult &b) { return a.name < b.name; });
    return out;
}

} // namespace verify

} // namespace pendnf

#endif
