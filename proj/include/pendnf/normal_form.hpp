// Normal-form series of the pendulum near its equilibria, as exact power
// series in the nome x' (and in the action x = pq).
//
// Internal normalization: g = 1 and 32 I g = 1. Under it
//   g0(x')/g         = prod ((1 + x'^n) / (1 - x'^n))^2
//   U(x')/(32 I g^2) = x' prod ((1 + x'^{2n}) / (1 - x'^{2n-1}))^8
//   D(x')/(32 I g)   = (dU/dx') / g0
//   a^2(x')/(32 I g) = (1/4) dg0/dx'
// and every series below is one of these or a composition of them.
// to_physical() reinstates the dimensional factors.

#ifndef PENDNF_NORMAL_FORM_HPP
#define PENDNF_NORMAL_FORM_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rational_series.hpp"

namespace pendnf
{

inline const std::string nome_var = "x'";
inline const std::string stable_nome_var = "xs'";

struct NormalFormBundle {
    RationalSeries g0_series;
    RationalSeries U_series;
    RationalSeries D_series;
    RationalSeries a2_series;
    RationalSeries x_of_xprime;
    RationalSeries calU_series;
};

struct StableFormBundle {
    RationalSeries g0s_series;
    RationalSeries Us_series;
    RationalSeries a2s_series;
    RationalSeries W_series;
};

struct SeriesCheck {
    bool pass;
    std::optional<std::size_t> first_mismatch;
};

namespace detail
{

inline void require_order(std::size_t order, std::size_t min, const char *who)
{
    if (order < min) {
        throw std::invalid_argument(std::string(who) + ": order must be >= " + std::to_string(min));
    }
}

inline SeriesCheck compare(const RationalSeries &a, const RationalSeries &b)
{
    const auto m = first_mismatch(a, b);
    return {!m.has_value(), m};
}

} // namespace detail

/// g0(x')/g = prod ((1 + x'^n)/(1 - x'^n))^2 = 1 + 4x' + 12x'^2 + ...
inline RationalSeries build_g0_series(std::size_t order)
{
    const std::array terms{ProductTerm{+1, -1, {1, 0}}};
    return ps_from_product(terms, 2, order, nome_var);
}

/// U(x')/(32 I g^2) = x' prod ((1 + x'^{2n})/(1 - x'^{2n-1}))^8
inline RationalSeries build_U_series(std::size_t order)
{
    detail::require_order(order, 1, "build_U_series");
    const std::array terms{ProductTerm{+1, 0, {2, 0}}, ProductTerm{0, -1, {2, -1}}};
    return ps_from_product(terms, 8, order - 1, nome_var).shifted(1);
}

/// D(x')/(32 I g) = g0^{-1} dU/dx'
inline RationalSeries build_D_series(std::size_t order)
{
    detail::require_order(order, 1, "build_D_series");
    return ps_derive(build_U_series(order + 1)) / build_g0_series(order);
}

/// a^2(x')/(32 I g) = 8 I g0'(x') / (32 I g) = g0'(x')/(4 g)
inline RationalSeries build_a2_series(std::size_t order)
{
    detail::require_order(order, 1, "build_a2_series");
    return mpq_class(1, 4) * ps_derive(build_g0_series(order + 1));
}

/// x/(32 I g) = x' a^2(x')/(32 I g)
inline RationalSeries build_x_of_xprime(std::size_t order)
{
    detail::require_order(order, 1, "build_x_of_xprime");
    return build_a2_series(order - 1).shifted(1);
}

/// D(x') against d/dx' (x' a^2(x')), coefficient by coefficient.
inline SeriesCheck identity_51_check(const RationalSeries &D, const RationalSeries &a2)
{
    return detail::compare(D, ps_derive(a2.shifted(1)));
}

inline SeriesCheck identity_51_check(std::size_t order)
{
    detail::require_order(order, 1, "identity_51_check");
    return identity_51_check(build_D_series(order), build_a2_series(order));
}

/// Normal-form energy in the action x, normalized:
///   calU(x)/(32 I g^2) as a series in x/(32 I g), i.e. x + 2x^2 - 4x^3 + ...
inline RationalSeries build_calU_series(std::size_t order)
{
    detail::require_order(order, 2, "build_calU_series");
    const auto xprime_of_x = ps_revert(build_x_of_xprime(order)).with_var("x");
    return ps_compose(build_U_series(order), xprime_of_x);
}

inline NormalFormBundle build_normal_form(std::size_t order)
{
    detail::require_order(order, 2, "build_normal_form");
    return {build_g0_series(order),     build_U_series(order),    build_D_series(order),
            build_a2_series(order),     build_x_of_xprime(order), build_calU_series(order)};
}

/// Stable-equilibrium counterparts, in the stable nome x_s' = -x'.
///   g0s/g_s         = prod over n even ((1+z^n)/(1-z^n))^2, n odd ((1-z^n)/(1+z^n))^2
///   Us/(32 I g_s^2) = z prod ((1 + z^{2n}) / (1 + z^{2n-1}))^8
///   a_s^2/(64 I g_s) = -(1/4) d(g0s/g_s)/dz
///   W(zeta) = Us o (inverse of zeta = z a_s^2(z)/(64 I g_s))
inline StableFormBundle build_stable_series(std::size_t order)
{
    detail::require_order(order, 2, "build_stable_series");
    const std::array g0_terms{ProductTerm{+1, -1, {2, 0}}, ProductTerm{-1, +1, {2, -1}}};
    auto g0s = ps_from_product(g0_terms, 2, order + 1, stable_nome_var);
    const std::array u_terms{ProductTerm{+1, 0, {2, 0}}, ProductTerm{0, +1, {2, -1}}};
    auto us = ps_from_product(u_terms, 8, order - 1, stable_nome_var).shifted(1);
    auto a2s = mpq_class(-1, 4) * ps_derive(g0s);
    const auto zeta_of_z = a2s.truncated(order - 1).shifted(1);
    auto w = ps_compose(us, ps_revert(zeta_of_z).with_var("z"));
    return {g0s.truncated(order), std::move(us), std::move(a2s), std::move(w)};
}

/// calU(x) = -32 I g^2 W(-x / (32 I g)); with the normalization this reads
/// calU(x) = -W(-x).
inline SeriesCheck stable_relation_check(const RationalSeries &calU, const RationalSeries &W)
{
    return detail::compare(calU, -W.rescaled_argument(-1).with_var(calU.var()));
}

struct ThetaCheck {
    bool pass;
    RationalSeries from_g0;
    RationalSeries from_lambert;
    RationalSeries from_theta4;
};

/// Three expansions of x' d/dx' log g0(x'):
///   (i)   from the g0 product series,
///   (ii)  4 sum_n n x'^n / (1 - x'^{2n}),
///   (iii) (1/2) d^2/dz^2 log theta_4(z, x') at z = 0, with
///         theta_4(z, q) = 1 + 2 sum (-1)^n q^{n^2} cos 2nz.
inline ThetaCheck theta_logderiv_check(std::size_t order)
{
    const auto n = order;
    auto g0 = build_g0_series(n + 1);
    auto first = ((ps_derive(g0) / g0.truncated(n)).shifted(1)).truncated(n);

    std::vector<mpq_class> lambert(n + 1);
    for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t e = k; e <= n; e += 2 * k) {
            lambert[e] += 4 * static_cast<long>(k);
        }
    }
    RationalSeries second(std::move(lambert), nome_var);

    // theta_4(0) and theta_4''(0)/2
    std::vector<mpq_class> th(n + 1), th2(n + 1);
    th[0] = 1;
    for (long k = 1; static_cast<std::size_t>(k * k) <= n; ++k) {
        const long sign = (k % 2) ? -1 : 1;
        th[k * k] += 2 * sign;
        th2[k * k] += -4 * sign * k * k;
    }
    auto third = RationalSeries(std::move(th2), nome_var) / RationalSeries(std::move(th), nome_var);

    const bool pass = first == second && second == third;
    return {pass, std::move(first), std::move(second), std::move(third)};
}

enum class SeriesKind { g0, U, D, a2, x_of_xprime, calU, W, Us, g0s, a2s };

inline std::optional<SeriesKind> parse_series_kind(std::string_view name)
{
    constexpr std::array<std::pair<std::string_view, SeriesKind>, 10> table{{
        {"g0", SeriesKind::g0},
        {"U", SeriesKind::U},
        {"D", SeriesKind::D},
        {"a2", SeriesKind::a2},
        {"x", SeriesKind::x_of_xprime},
        {"calU", SeriesKind::calU},
        {"W", SeriesKind::W},
        {"Us", SeriesKind::Us},
        {"g0s", SeriesKind::g0s},
        {"a2s", SeriesKind::a2s},
    }};
    for (const auto &[key, kind] : table) {
        if (key == name) {
            return kind;
        }
    }
    return std::nullopt;
}

inline RationalSeries build_series(SeriesKind kind, std::size_t order)
{
    switch (kind) {
    case SeriesKind::g0:
        return build_g0_series(order);
    case SeriesKind::U:
        return build_U_series(order);
    case SeriesKind::D:
        return build_D_series(order);
    case SeriesKind::a2:
        return build_a2_series(order);
    case SeriesKind::x_of_xprime:
        return build_x_of_xprime(order);
    case SeriesKind::calU:
        return build_calU_series(order);
    case SeriesKind::W:
        return build_stable_series(order).W_series;
    case SeriesKind::Us:
        return build_stable_series(order).Us_series;
    case SeriesKind::g0s:
        return build_stable_series(order).g0s_series;
    case SeriesKind::a2s:
        return build_stable_series(order).a2s_series.truncated(order);
    }
    throw std::invalid_argument("build_series: unknown kind");
}

/// Coefficient n of the physical series is c_n * scale * arg^n:
///   g0: g            U, Us: 32 I g^2       D, a2, x: 32 I g
///   g0s: g_s         a2s: 64 I g_s
///   calU: 32 I g^2 and argument 1/(32 I g)    (series in the action x)
///   W:    32 I g_s^2 and argument 1/(64 I g_s) (gives the stable calU_s(x))
inline RationalSeries to_physical(const RationalSeries &s, SeriesKind kind, const mpq_class &I,
                                  const mpq_class &g)
{
    if (sgn(I) <= 0 || sgn(g) <= 0) {
        throw std::invalid_argument("to_physical: I and g must be positive");
    }
    mpq_class scale = 1, arg = 1;
    switch (kind) {
    case SeriesKind::g0:
    case SeriesKind::g0s:
        scale = g;
        break;
    case SeriesKind::U:
    case SeriesKind::Us:
        scale = 32 * I * g * g;
        break;
    case SeriesKind::D:
    case SeriesKind::a2:
    case SeriesKind::x_of_xprime:
        scale = 32 * I * g;
        break;
    case SeriesKind::a2s:
        scale = 64 * I * g;
        break;
    case SeriesKind::calU:
        scale = 32 * I * g * g;
        arg = 1 / (32 * I * g);
        break;
    case SeriesKind::W:
        scale = 32 * I * g * g;
        arg = 1 / (64 * I * g);
        break;
    }
    auto r = scale * s.rescaled_argument(arg);
    return kind == SeriesKind::W ? r.with_var("x") : r;
}

// Floating-point evaluation of the same products, for |x'| < 1. These are
// what the dynamics module uses; the exact series above are their Taylor
// expansions.
namespace nome_functions
{

namespace detail
{
inline constexpr int max_terms = 100000;
inline constexpr double cutoff = 1e-18;
} // namespace detail

inline void require_nome(double x)
{
    if (!(std::abs(x) < 1)) {
        throw std::domain_error("nome functions require |x'| < 1");
    }
}

/// prod ((1 + x^n)/(1 - x^n))^2
inline double g0_ratio(double x)
{
    require_nome(x);
    double r = 1, xn = x;
    for (int n = 1; n < detail::max_terms && std::abs(xn) > detail::cutoff; ++n) {
        const double f = (1 + xn) / (1 - xn);
        r *= f * f;
        xn *= x;
    }
    return r;
}

/// (log g0)' = 4 sum n x^{n-1} / (1 - x^{2n}) and its derivative.
inline std::pair<double, double> g0_log_derivatives(double x)
{
    require_nome(x);
    if (x == 0) {
        return {4, 8};
    }
    double l1 = 0, l2 = 0;
    double xnm1 = 1; // x^{n-1}
    for (int n = 1; n < detail::max_terms; ++n) {
        const double x2n = xnm1 * xnm1 * x * x;
        const double den = 1 - x2n;
        l1 += n * xnm1 / den;
        // d/dx [n x^{n-1} / (1 - x^{2n})], with x^{n-2} written as x^{n-1}/x
        l2 += n * xnm1 * ((n - 1) * den + 2.0 * n * x2n) / (x * den * den);
        if (n > 2 && double(n) * n * std::abs(xnm1) < detail::cutoff * std::abs(x)) {
            break;
        }
        xnm1 *= x;
    }
    return {4 * l1, 4 * l2};
}

/// x prod ((1 + x^{2n}) / (1 - x^{2n-1}))^8
inline double energy_ratio(double x)
{
    require_nome(x);
    double r = 1, odd = x; // x^{2n-1}
    for (int n = 1; n < detail::max_terms && std::abs(odd) > detail::cutoff; ++n) {
        const double even = odd * x;
        const double f = (1 + even) / (1 - odd);
        const double f2 = f * f, f4 = f2 * f2;
        r *= f4 * f4;
        odd = even * x;
    }
    return x * r;
}

/// a^2/(32 I g) = g0'/4
inline double a2_ratio(double x)
{
    if (x == 0) {
        return 1;
    }
    return g0_ratio(x) * g0_log_derivatives(x).first / 4;
}

/// D/(32 I g) = d/dx (x a^2) = (g0' + x g0'') / 4
inline double jacobian_ratio(double x)
{
    if (x == 0) {
        return 1;
    }
    const double g = g0_ratio(x);
    const auto [l1, l2] = g0_log_derivatives(x);
    return g * (l1 + x * (l2 + l1 * l1)) / 4;
}

} // namespace nome_functions

} // namespace pendnf

#endif
