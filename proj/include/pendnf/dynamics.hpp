// Pendulum trajectories in several equivalent representations and the
// canonical map between (B, beta) and the hyperbolic normal coordinates
// (p, q).
//
// H(B, beta) = B^2 / 2I - I g^2 (1 - cos beta), beta = 0 upright (unstable).
//
// Orientation: (p, q) has the orientation of (B, beta), so p plays the
// momentum role. Hamilton's equations for H = calU(pq) then give
//   p(t) = p e^{-g0 t},  q(t) = q e^{+g0 t},
// and a libration through beta = 0 at t = 0 has q' = gamma sqrt(x'),
// p' = delta sqrt(x') with gamma = e^{g0 t}, delta = e^{-g0 t}.

#ifndef PENDNF_DYNAMICS_HPP
#define PENDNF_DYNAMICS_HPP

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "elliptic.hpp"
#include "normal_form.hpp"

namespace pendnf
{

class convergence_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct PendulumParams {
    double I = 1.0 / 32;
    double g = 1;

    void validate() const
    {
        if (!(I > 0) || !(g > 0) || !std::isfinite(I) || !std::isfinite(g)) {
            throw std::invalid_argument("PendulumParams: I and g must be positive and finite");
        }
    }
};

struct PhaseState {
    double B;
    double beta;
};

struct ScaledCoords {
    double p_prime;
    double q_prime;

    double x_prime() const { return p_prime * q_prime; }
};

struct NormalCoords {
    double p;
    double q;

    double x() const { return p * q; }
};

struct FlowFactors {
    double gamma;
    double delta;

    static FlowFactors at_time(double g0, double t) { return {std::exp(g0 * t), std::exp(-g0 * t)}; }
};

enum class Method { closed, series, normal, rk };

inline std::string_view to_string(Method m)
{
    switch (m) {
    case Method::closed:
        return "closed";
    case Method::series:
        return "series";
    case Method::normal:
        return "normal";
    case Method::rk:
        return "rk";
    }
    return "?";
}

struct TrajectoryRecord {
    double t;
    double B;
    double beta;
    double energy;
    Method method;
};

inline double hamiltonian(const PhaseState &s, const PendulumParams &par)
{
    // 1 - cos b = 2 sin^2(b/2) keeps small angles accurate.
    const double sh = std::sin(s.beta / 2);
    return s.B * s.B / (2 * par.I) - 2 * par.I * par.g * par.g * sh * sh;
}

/// Energy 2 I g^2 / k^2 of the libration with modulus h.
inline double libration_energy(const Modulus &mod, const PendulumParams &par)
{
    const double r = mod.h() / mod.h_prime();
    return 2 * par.I * par.g * par.g * r * r;
}

/// Modulus of the libration with energy U > 0.
inline Modulus modulus_from_energy(double U, const PendulumParams &par)
{
    if (!(U > 0)) {
        throw std::domain_error("modulus_from_energy: energy must be positive");
    }
    return Modulus::from_k(std::sqrt(2 * par.I * par.g * par.g / U));
}

/// Closed form through beta(0) = 0, B(0) = 2Ig/k > 0:
///   beta = 2 am(u, ik),  B = 2Ig / (k dn(u/h, h')),  u = g t / k,
/// with am(u, ik) obtained from the real modulus h' (imaginary-modulus
/// transformation). beta is unwrapped.
inline PhaseState closed_form_state(double t, const Modulus &mod, const PendulumParams &par)
{
    par.validate();
    if (!(mod.h() > 0 && mod.h() < 1)) {
        throw std::domain_error("closed_form_state: need 0 < h < 1 (energy above the separatrix)");
    }
    const double h = mod.h(), hp = mod.h_prime();
    const double v = t * par.g / hp; // u / h
    const auto trio = jacobi_trio(v, hp, h);
    // sin am(u,ik) = h sn/dn, cos am(u,ik) = cn/dn; both amplitudes pass
    // through multiples of pi together.
    const double n = std::round(trio.am / std::numbers::pi);
    const double r = trio.am - n * std::numbers::pi;
    const double am_ik = n * std::numbers::pi + std::atan2(h * std::sin(r), std::cos(r));
    return {2 * par.I * par.g * h / (hp * trio.dn), 2 * am_ik};
}

namespace detail
{
inline constexpr int max_series_terms = 10000;
inline constexpr double series_rel_cutoff = 1e-16;
} // namespace detail

/// Resummed series for a libration through beta = 0 at t = 0:
///   beta = 4 sum_m [atan(x'^m gamma sqrt x') - atan(x'^m delta sqrt x')]
///   B    = 4 I g0 sum_m [w/(1+w^2)]_{w = x'^m gamma sqrt x'} + [same, delta]
inline PhaseState series_state(const FlowFactors &f, double x_prime, const PendulumParams &par)
{
    par.validate();
    if (!(x_prime >= 0 && x_prime < 1)) {
        throw convergence_error("series_state: need 0 <= x' < 1");
    }
    if (x_prime == 0) {
        return {0, 0};
    }
    const double g0 = g0_eval(modulus_from_nome(x_prime), par.g);
    const double root = std::sqrt(x_prime);
    double S = 0, R = 0, xm = 1;
    for (int m = 0; m < detail::max_series_terms; ++m) {
        const double wg = xm * f.gamma * root, wd = xm * f.delta * root;
        S += std::atan(wg) - std::atan(wd);
        R += wg / (1 + wg * wg) + wd / (1 + wd * wd);
        if (std::max(std::abs(wg), std::abs(wd)) < detail::series_rel_cutoff * (std::abs(S) + R)) {
            break;
        }
        xm *= x_prime;
    }
    return {4 * par.I * g0 * R, 4 * S};
}

/// Unresummed sums over odd harmonics, valid while gamma^2 x' < 1 and
/// delta^2 x' < 1:
///   B    = 4 I g0 sum_n (-1)^{n-1} x'^{n-1/2} (gamma^{2n-1} + delta^{2n-1}) / (1 - x'^{2n-1})
///   beta = 4 sum_n (-1)^{n-1} x'^{n-1/2} (gamma^{2n-1} - delta^{2n-1}) / ((2n-1)(1 - x'^{2n-1}))
inline PhaseState series_state_harmonic(const FlowFactors &f, double x_prime,
                                        const PendulumParams &par)
{
    par.validate();
    const double rg = f.gamma * f.gamma * x_prime, rd = f.delta * f.delta * x_prime;
    if (!(x_prime >= 0 && rg < 1 && rd < 1)) {
        throw convergence_error("series_state_harmonic: need gamma^2 x' < 1 and delta^2 x' < 1");
    }
    if (x_prime == 0) {
        return {0, 0};
    }
    const double g0 = g0_eval(modulus_from_nome(x_prime), par.g);
    const double root = std::sqrt(x_prime);
    double S = 0, R = 0;
    double pg = f.gamma * root, pd = f.delta * root; // (gamma sqrt x')^{2n-1}
    double odd = x_prime;                            // x'^{2n-1}
    for (int n = 1; n < detail::max_series_terms; ++n) {
        const double sign = (n % 2) ? 1.0 : -1.0;
        const double den = 1 - odd;
        const double tR = sign * (pg + pd) / den;
        const double tS = sign * (pg - pd) / ((2 * n - 1) * den);
        R += tR;
        S += tS;
        if (std::abs(pg) + std::abs(pd) < detail::series_rel_cutoff * (std::abs(R) + std::abs(S))) {
            break;
        }
        pg *= rg;
        pd *= rd;
        odd *= x_prime * x_prime;
    }
    return {4 * par.I * g0 * R, 4 * S};
}

/// (B, beta) = (R', S') at scaled coordinates with |p' q'| < 1:
///   S' = 4 sum_m [atan(x^m q') - atan(x^m p')]
///   R' = 4 I g0(x) sum_m [x^m p' / (1 + (x^m p')^2) + (same, q')],  x = p'q'.
inline PhaseState hyperbolic_state(const ScaledCoords &c, const PendulumParams &par)
{
    par.validate();
    const double x = c.x_prime();
    if (!(std::abs(x) < 1)) {
        throw convergence_error("hyperbolic_state: need |p'q'| < 1");
    }
    const double g0 = par.g * nome_functions::g0_ratio(x);
    const double scale = std::max(std::abs(c.p_prime), std::abs(c.q_prime));
    double S = 0, R = 0, xm = 1;
    for (int m = 0;; ++m) {
        if (m == detail::max_series_terms) {
            throw convergence_error("hyperbolic_state: series did not converge");
        }
        const double wp = xm * c.p_prime, wq = xm * c.q_prime;
        S += std::atan(wq) - std::atan(wp);
        R += wp / (1 + wp * wp) + wq / (1 + wq * wq);
        if (std::abs(xm) * scale <= detail::series_rel_cutoff * (std::abs(S) + std::abs(R))) {
            break;
        }
        xm *= x;
    }
    return {4 * par.I * g0 * R, 4 * S};
}

struct MapOptions {
    // Largest |x'| accepted when inverting x = x' a^2(x').
    double max_abs_nome = 0.5;
};

namespace detail
{

// Where D(x') = d/dx' (x' a^2) first vanishes on the negative axis; past it
// x' -> x is no longer invertible.
inline double jacobian_zero_negative()
{
    static const double root = [] {
        double lo = -0.99, hi = 0;
        if (nome_functions::jacobian_ratio(lo) > 0) {
            return lo;
        }
        for (int i = 0; i < 200; ++i) {
            const double mid = (lo + hi) / 2;
            (nome_functions::jacobian_ratio(mid) > 0 ? hi : lo) = mid;
        }
        return hi;
    }();
    return root;
}

// Safeguarded Newton for a strictly increasing f on [lo, hi].
template <typename F, typename DF>
double solve_increasing(F f, DF df, double target, double lo, double hi, double guess)
{
    double flo = f(lo) - target, fhi = f(hi) - target;
    if (flo > 0 || fhi < 0) {
        throw std::domain_error("outside the invertible range of the chart");
    }
    double x = std::clamp(guess, lo, hi);
    for (int it = 0; it < 200; ++it) {
        const double fx = f(x) - target;
        if (fx == 0) {
            return x;
        }
        (fx < 0 ? lo : hi) = x;
        const double d = df(x);
        double next = x - fx / d;
        if (!(d > 0) || !(next > lo && next < hi)) {
            next = (lo + hi) / 2;
        }
        if (std::abs(next - x) <= 1e-16 * std::abs(x) || hi - lo <= 1e-16 * std::abs(x)) {
            return next;
        }
        x = next;
    }
    return x;
}

} // namespace detail

/// Solve x = x' a^2(x') (physical units) for the nome x'.
inline double nome_from_action(double x, const PendulumParams &par, const MapOptions &opt = {})
{
    par.validate();
    if (x == 0) {
        return 0;
    }
    const double target = x / (32 * par.I * par.g);
    const double hi = opt.max_abs_nome;
    const double lo = std::max(-opt.max_abs_nome, detail::jacobian_zero_negative() * (1 - 1e-9));
    return detail::solve_increasing([](double y) { return y * nome_functions::a2_ratio(y); },
                                    nome_functions::jacobian_ratio, target, lo, hi, target);
}

/// a(x') with a^2 = 8 I dg0/dx' (physical units).
inline double rescaling_factor(double x_prime, const PendulumParams &par)
{
    const double a2 = 32 * par.I * par.g * nome_functions::a2_ratio(x_prime);
    if (!(a2 > 0)) {
        throw std::domain_error("rescaling_factor: a^2 <= 0");
    }
    return std::sqrt(a2);
}

inline ScaledCoords scaled_from_normal(const NormalCoords &n, const PendulumParams &par,
                                       const MapOptions &opt = {})
{
    const double xp = nome_from_action(n.x(), par, opt);
    const double a = rescaling_factor(xp, par);
    return {n.p / a, n.q / a};
}

/// (p, q) -> (B, beta).
inline PhaseState canonical_from_normal(const NormalCoords &n, const PendulumParams &par,
                                        const MapOptions &opt = {})
{
    return hyperbolic_state(scaled_from_normal(n, par, opt), par);
}

/// g0 = d calU / dx at the action x = pq.
inline double normal_frequency(const NormalCoords &n, const PendulumParams &par,
                               const MapOptions &opt = {})
{
    return par.g * nome_functions::g0_ratio(nome_from_action(n.x(), par, opt));
}

/// Time-t flow of the normal form: p e^{-g0 t}, q e^{+g0 t}. pq is invariant.
inline NormalCoords normal_flow(const NormalCoords &n, double t, const PendulumParams &par,
                                const MapOptions &opt = {})
{
    const double g0 = normal_frequency(n, par, opt);
    return {n.p * std::exp(-g0 * t), n.q * std::exp(g0 * t)};
}

/// (B, beta) -> (p, q) for librations (H > 0) inside the chart.
inline NormalCoords normal_from_canonical(const PhaseState &s, const PendulumParams &par,
                                          const MapOptions &opt = {})
{
    par.validate();
    const double U = hamiltonian(s, par);
    if (!(U > 0)) {
        throw std::domain_error("normal_from_canonical: only librations (H > 0) are supported");
    }
    if (s.B < 0) {
        const auto n = normal_from_canonical({-s.B, -s.beta}, par, opt);
        return {-n.p, -n.q};
    }
    const double target = U / (32 * par.I * par.g * par.g);
    const double xp = detail::solve_increasing(
        nome_functions::energy_ratio,
        [](double y) {
            const double e = 1e-7 * std::max(y, 1e-8);
            return (nome_functions::energy_ratio(y + e) - nome_functions::energy_ratio(y - e)) / (2 * e);
        },
        target, 0.0, opt.max_abs_nome, target);
    const double root = std::sqrt(xp);
    const auto beta_at = [&](double s_log) {
        return hyperbolic_state({root * std::exp(-s_log), root * std::exp(s_log)}, par).beta;
    };
    // beta is increasing in log(q'/p') along the libration.
    double lo = -1, hi = 1;
    while (beta_at(lo) > s.beta) {
        lo *= 2;
    }
    while (beta_at(hi) < s.beta) {
        hi *= 2;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++i) {
        const double mid = (lo + hi) / 2;
        (beta_at(mid) < s.beta ? lo : hi) = mid;
    }
    const double s_log = (lo + hi) / 2;
    const double a = rescaling_factor(xp, par);
    return {a * root * std::exp(-s_log), a * root * std::exp(s_log)};
}

/// det d(B, beta)/d(p, q) by central differences of canonical_from_normal.
inline double jacobian_det_check(const NormalCoords &n, const PendulumParams &par, double step = 0,
                                 const MapOptions &opt = {})
{
    if (step <= 0) {
        step = 1e-5 * std::sqrt(32 * par.I * par.g);
    }
    const auto at = [&](double dp, double dq) {
        return canonical_from_normal({n.p + dp, n.q + dq}, par, opt);
    };
    const auto pp = at(step, 0), pm = at(-step, 0), qp = at(0, step), qm = at(0, -step);
    const double B_p = (pp.B - pm.B) / (2 * step), beta_p = (pp.beta - pm.beta) / (2 * step);
    const double B_q = (qp.B - qm.B) / (2 * step), beta_q = (qp.beta - qm.beta) / (2 * step);
    return B_p * beta_q - B_q * beta_p;
}

struct FactorizationReport {
    double U_factored;
    double U_direct;
    double rel_diff;
};

/// 32 I g0^2 [p' U(p') + q' V(q')] [p' V(p') + q' U(q')] with
///   U(z) = sum_l x'^{2l} / (1 + (x'^{2l} z)^2),
///   V(z) = sum_l x'^{2l+1} / (1 + (x'^{2l+1} z)^2),
/// p' = sqrt(x')/gamma, q' = gamma sqrt(x'), against the energy 2 I g^2/k^2.
inline FactorizationReport factorization_check(double x_prime, double gamma,
                                               const PendulumParams &par)
{
    par.validate();
    if (!(x_prime > 0 && x_prime < 1) || !(gamma > 0)) {
        throw std::domain_error("factorization_check: need 0 < x' < 1 and gamma > 0");
    }
    const auto sums = [x_prime](double z) {
        double u = 0, v = 0, e = 1; // e = x'^{2l}
        for (int l = 0;; ++l) {
            if (l == detail::max_series_terms) {
                throw convergence_error("factorization_check: series did not converge");
            }
            const double o = e * x_prime;
            const double tu = e / (1 + (e * z) * (e * z));
            const double tv = o / (1 + (o * z) * (o * z));
            u += tu;
            v += tv;
            if (tu < 1e-17 * u && tv < 1e-17 * v) {
                break;
            }
            e = o * x_prime;
        }
        return std::pair{u, v};
    };
    const double root = std::sqrt(x_prime);
    const double p = root / gamma, q = root * gamma;
    const auto [Up, Vp] = sums(p);
    const auto [Uq, Vq] = sums(q);
    const double g0 = par.g * nome_functions::g0_ratio(x_prime);
    const double factored = 32 * par.I * g0 * g0 * (p * Up + q * Vq) * (p * Vp + q * Uq);
    const double direct = libration_energy(modulus_from_nome(x_prime), par);
    return {factored, direct, std::abs(factored - direct) / std::abs(direct)};
}

// Stable chart. Here par.g is g_s and the returned state is measured from
// the stable equilibrium: beta_s = beta - pi, with
//   H_s(B, beta_s) = B^2 / 2I + I g_s^2 (1 - cos beta_s) = H + 2 I g_s^2.

inline double stable_hamiltonian(const PhaseState &s, const PendulumParams &par)
{
    const double sh = std::sin(s.beta / 2);
    return s.B * s.B / (2 * par.I) + 2 * par.I * par.g * par.g * sh * sh;
}

/// g0^{(s)} = g_s g0_ratio(-x_s')
inline double stable_frequency(double xs, const PendulumParams &par)
{
    return par.g * nome_functions::g0_ratio(-xs);
}

/// U_s(x_s') = 32 I g_s^2 x_s' prod ((1 + x_s'^{2n}) / (1 + x_s'^{2n-1}))^8
inline double stable_energy(double xs, const PendulumParams &par)
{
    return -32 * par.I * par.g * par.g * nome_functions::energy_ratio(-xs);
}

///   S_s' =  4i  sum_m (-1)^m [atanh(r^m w) - atanh(r^m conj w)]
///   R_s' = -4 I g0s sum_m (-1)^m [r^m w / (1 - (r^m w)^2) + (same, conj w)]
/// with w = p' + i q', r = p'^2 + q'^2 = x_s'.
inline PhaseState stable_state(const ScaledCoords &c, const PendulumParams &par)
{
    par.validate();
    using cd = std::complex<double>;
    const double r = c.p_prime * c.p_prime + c.q_prime * c.q_prime;
    if (!(r < 1)) {
        throw convergence_error("stable_state: need p'^2 + q'^2 < 1");
    }
    const double g0s = stable_frequency(r, par);
    const cd w(c.p_prime, c.q_prime), wbar(c.p_prime, -c.q_prime);
    const double scale = std::abs(w);
    cd S = 0, R = 0;
    double rm = 1;
    for (int m = 0;; ++m) {
        if (m == detail::max_series_terms) {
            throw convergence_error("stable_state: series did not converge");
        }
        const double sign = (m % 2) ? -1.0 : 1.0;
        const cd a = rm * w, b = rm * wbar;
        const cd da = 1.0 - a * a, db = 1.0 - b * b;
        if (std::abs(da) < 1e-8 || std::abs(db) < 1e-8) {
            throw std::domain_error("stable_state: too close to a pole of the series");
        }
        S += sign * (std::atanh(a) - std::atanh(b));
        R += sign * (a / da + b / db);
        if (rm * scale <= detail::series_rel_cutoff * (std::abs(S) + std::abs(R))) {
            break;
        }
        rm *= r;
    }
    S *= cd(0, 4);
    R *= -4 * par.I * g0s;
    const double mag = std::abs(S.real()) + std::abs(R.real()) / (par.I * g0s);
    if (std::abs(S.imag()) + std::abs(R.imag()) / (par.I * g0s) > 1e-12 * std::max(mag, 1e-300) &&
        mag > 0) {
        throw convergence_error("stable_state: imaginary parts do not cancel");
    }
    return {R.real(), S.real()};
}

/// Point on the stable orbit x_s' at time t:
/// p' = sqrt(x_s') cos(g0s t), q' = sqrt(x_s') sin(g0s t).
inline PhaseState stable_state(double xs, double t, const PendulumParams &par)
{
    if (!(xs >= 0 && xs < 1)) {
        throw convergence_error("stable_state: need 0 <= x_s' < 1");
    }
    const double th = stable_frequency(xs, par) * t;
    const double root = std::sqrt(xs);
    return stable_state(ScaledCoords{root * std::cos(th), root * std::sin(th)}, par);
}

/// a_s(x_s') with a_s^2 = -16 I dg0s/dx_s' = 64 I g_s a2_ratio(-x_s').
inline double stable_rescaling_factor(double xs, const PendulumParams &par)
{
    const double a2 = 64 * par.I * par.g * nome_functions::a2_ratio(-xs);
    if (!(a2 > 0)) {
        throw std::domain_error("stable_rescaling_factor: a_s^2 <= 0");
    }
    return std::sqrt(a2);
}

/// (p, q) -> (B, beta_s) in the stable chart, p = a_s p', q = a_s q',
/// x = p^2 + q^2 = x_s' a_s^2(x_s').
inline PhaseState stable_canonical_from_normal(const NormalCoords &n, const PendulumParams &par,
                                               const MapOptions &opt = {})
{
    par.validate();
    const double target = (n.p * n.p + n.q * n.q) / (64 * par.I * par.g);
    // x_s a_s^2 / (64 I g_s) = -x' a2_ratio(x') at x' = -x_s.
    const double xs = detail::solve_increasing(
        [](double y) { return y * nome_functions::a2_ratio(-y); },
        [](double y) { return nome_functions::jacobian_ratio(-y); }, target, 0.0, opt.max_abs_nome,
        target);
    const double a = stable_rescaling_factor(xs, par);
    return stable_state(ScaledCoords{n.p / a, n.q / a}, par);
}

/// Adaptive Runge-Kutta-Fehlberg 7(8) reference integration of
///   dbeta/dt = B / I,  dB/dt = I g^2 sin(beta).
inline PhaseState rk_oracle(const PhaseState &s0, const PendulumParams &par, double t,
                            double tol = 1e-12)
{
    par.validate();
    if (!(tol >= 1e-13 && tol <= 1e-6)) {
        throw std::invalid_argument("rk_oracle: tol must lie in [1e-13, 1e-6]");
    }
    namespace ode = boost::numeric::odeint;
    using state = std::array<double, 2>;
    state y{s0.B, s0.beta};
    if (t == 0) {
        return s0;
    }
    const double Ig2 = par.I * par.g * par.g;
    const auto rhs = [&](const state &x, state &dx, double) {
        dx[0] = Ig2 * std::sin(x[1]);
        dx[1] = x[0] / par.I;
    };
    auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_fehlberg78<state>());
    try {
        ode::integrate_adaptive(stepper, rhs, y, 0.0, t, t / 1000);
    } catch (const ode::step_adjustment_error &e) {
        throw convergence_error(std::string("rk_oracle: step-size underflow: ") + e.what());
    }
    return {y[0], y[1]};
}

struct TrajectorySpec {
    Method method = Method::closed;
    double t0 = 0;
    double t1 = 10;
    double dt = 0.01;
    double tol = 1e-12;
};

/// Samples of the libration with modulus h passing beta = 0 at t = 0.
inline std::vector<TrajectoryRecord> trajectory(const TrajectorySpec &spec, const Modulus &mod,
                                                const PendulumParams &par)
{
    par.validate();
    if (!(spec.dt > 0) || !(spec.t1 >= spec.t0)) {
        throw std::invalid_argument("trajectory: need dt > 0 and t1 >= t0");
    }
    if (!(mod.h() > 0 && mod.h() < 1)) {
        throw std::domain_error("trajectory: need 0 < h < 1");
    }
    const auto steps = static_cast<long>(std::floor((spec.t1 - spec.t0) / spec.dt + 1e-9));
    const double xp = nome_from_h(mod);
    const double g0 = g0_eval(mod, par.g);
    std::vector<TrajectoryRecord> out;
    out.reserve(steps + 1);

    NormalCoords n0{};
    if (spec.method == Method::normal) {
        const double a = rescaling_factor(xp, par);
        n0 = {a * std::sqrt(xp), a * std::sqrt(xp)};
    }
    PhaseState rk_state = closed_form_state(0, mod, par);
    double rk_time = 0;

    for (long i = 0; i <= steps; ++i) {
        const double t = spec.t0 + static_cast<double>(i) * spec.dt;
        PhaseState s{};
        switch (spec.method) {
        case Method::closed:
            s = closed_form_state(t, mod, par);
            break;
        case Method::series:
            s = series_state(FlowFactors::at_time(g0, t), xp, par);
            break;
        case Method::normal:
            s = canonical_from_normal(normal_flow(n0, t, par), par);
            break;
        case Method::rk:
            if (t != rk_time) {
                rk_state = rk_oracle(rk_state, par, t - rk_time, spec.tol);
                rk_time = t;
            }
            s = rk_state;
            break;
        }
        out.push_back({t, s.B, s.beta, hamiltonian(s, par), spec.method});
    }
    return out;
}

} // namespace pendnf

#endif
