// Complete elliptic integrals, Jacobi elliptic functions and the nome
// quantities used by the pendulum normal form.
//
// Every entry point that sits near the separatrix takes the modulus pair
// (h, h') rather than a single modulus: h -> 0 there while h' -> 1, and
// recomputing h' = sqrt(1 - h^2) (or the reverse) would lose all the
// digits that matter.

#ifndef PENDNF_ELLIPTIC_HPP
#define PENDNF_ELLIPTIC_HPP

#include <array>
#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pendnf
{

namespace detail
{

// Arithmetic-geometric mean. Converges quadratically; five or six rounds
// reach machine precision for arguments in [0, 1].
template <std::floating_point Real>
Real agm(Real a, Real b)
{
    using std::sqrt;
    if (a < b) {
        std::swap(a, b);
    }
    if (b <= 0) {
        return b < 0 ? std::numeric_limits<Real>::quiet_NaN() : Real(0);
    }
    const Real eps = std::numeric_limits<Real>::epsilon();
    for (int i = 0; i < 64 && a - b > eps * b; ++i) {
        const Real an = (a + b) / 2;
        b = sqrt(a * b);
        a = an;
    }
    return (a + b) / 2;
}

// K from the complementary modulus: K(k) = pi / (2 M(1, k')).
template <std::floating_point Real>
Real complete_k_from_complement(Real kp)
{
    return std::numbers::pi_v<Real> / (2 * agm(Real(1), kp));
}

// E from (k, k') by the AGM with the Gauss sum
//   E = K (1 - sum_{n>=0} 2^{n-1} c_n^2),  c_0 = k.
template <std::floating_point Real>
Real complete_e_from_pair(Real k, Real kp)
{
    using std::sqrt;
    if (kp == 0) {
        return Real(1);
    }
    Real a = 1, b = kp;
    Real sum = k * k / 2;
    Real pow2 = Real(0.5);
    const Real eps = std::numeric_limits<Real>::epsilon();
    for (int i = 0; i < 64; ++i) {
        const Real c = (a - b) / 2;
        pow2 *= 2;
        sum += pow2 * c * c;
        const Real an = (a + b) / 2;
        b = sqrt(a * b);
        a = an;
        if (std::abs(c) <= eps * a) {
            break;
        }
    }
    return std::numbers::pi_v<Real> / (2 * a) * (1 - sum);
}

// Amplitude am(u | k) by descending Landen (Gauss) transformations,
// A&S 16.4. The result is continuous in u, so it doubles as the unwrapped
// angle.
template <std::floating_point Real>
Real amplitude(Real u, Real k, Real kp)
{
    using std::asin;
    using std::sin;
    using std::sqrt;
    constexpr int max_depth = 16;
    std::array<Real, max_depth + 1> a{}, c{};
    a[0] = 1;
    c[0] = k;
    Real b = kp;
    const Real eps = std::numeric_limits<Real>::epsilon();
    int n = 0;
    while (std::abs(c[n]) > eps * a[n] && n < max_depth) {
        a[n + 1] = (a[n] + b) / 2;
        c[n + 1] = (a[n] - b) / 2;
        b = sqrt(a[n] * b);
        ++n;
    }
    Real phi = std::ldexp(a[n] * u, n);
    for (int i = n; i > 0; --i) {
        phi = (phi + asin(c[i] / a[i] * sin(phi))) / 2;
    }
    return phi;
}

inline void require(bool ok, const char *what)
{
    if (!ok) {
        throw std::domain_error(what);
    }
}

} // namespace detail

/// Modulus triple (k, h, h') with k = h'/h and h^2 + h'^2 = 1.
///
/// The separatrix is h = 0 (k infinite); h -> 1 is the high-energy end.
class Modulus
{
public:
    static Modulus from_h(double h)
    {
        detail::require(h >= 0 && h <= 1, "Modulus: h must lie in [0, 1]");
        return Modulus(h, std::sqrt((1 - h) * (1 + h)));
    }

    static Modulus from_k(double k)
    {
        detail::require(k > 0, "Modulus: k must be positive");
        if (std::isinf(k)) {
            return Modulus(0, 1);
        }
        // Scale by the larger of (1, k) to avoid overflow in 1 + k^2.
        if (k > 1) {
            const double r = 1 / k;
            const double s = std::sqrt(1 + r * r);
            return Modulus(r / s, 1 / s);
        }
        const double s = std::sqrt(1 + k * k);
        return Modulus(1 / s, k / s);
    }

    // Trusted pair, used where (h, h') is produced by a stable formula.
    static Modulus from_pair(double h, double h_prime)
    {
        detail::require(h >= 0 && h <= 1 && h_prime >= 0 && h_prime <= 1,
                        "Modulus: pair outside [0, 1]");
        detail::require(std::abs(h * h + h_prime * h_prime - 1) <= 1e-14,
                        "Modulus: h^2 + h'^2 != 1");
        return Modulus(h, h_prime);
    }

    double h() const { return h_; }
    double h_prime() const { return h_prime_; }
    double k() const
    {
        return h_ == 0 ? std::numeric_limits<double>::infinity() : h_prime_ / h_;
    }

private:
    Modulus(double h, double hp) : h_(h), h_prime_(hp) {}

    double h_;
    double h_prime_;
};

struct EllipticEval {
    double K_h;
    double K_hprime;
    double E_h;
    double nome;
    double lambda;
};

/// K(m) = int_0^{pi/2} (1 - m^2 sin^2 a)^{-1/2} da for 0 <= m < 1.
inline double complete_K(double m)
{
    detail::require(m >= 0 && m < 1, "complete_K: modulus must lie in [0, 1)");
    return detail::complete_k_from_complement(std::sqrt((1 - m) * (1 + m)));
}

/// E(m) = int_0^{pi/2} (1 - m^2 sin^2 a)^{1/2} da for 0 <= m <= 1.
inline double complete_E(double m)
{
    detail::require(m >= 0 && m <= 1, "complete_E: modulus must lie in [0, 1]");
    return detail::complete_e_from_pair(m, std::sqrt((1 - m) * (1 + m)));
}

struct JacobiTrio {
    double am;
    double sn;
    double cn;
    double dn;
};

/// am, sn, cn, dn at (u, m), with the complementary modulus supplied.
inline JacobiTrio jacobi_trio(double u, double m, double m_prime)
{
    detail::require(m >= 0 && m < 1 && m_prime > 0 && m_prime <= 1,
                    "jacobi_trio: modulus must lie in [0, 1)");
    detail::require(std::isfinite(u), "jacobi_trio: argument must be finite");
    const double am = detail::amplitude(u, m, m_prime);
    const double sn = std::sin(am);
    const double cn = std::cos(am);
    return {am, sn, cn, std::sqrt(m_prime * m_prime + m * m * cn * cn)};
}

inline JacobiTrio jacobi_trio(double u, double m)
{
    detail::require(m >= 0 && m < 1, "jacobi_trio: modulus must lie in [0, 1)");
    return jacobi_trio(u, m, std::sqrt((1 - m) * (1 + m)));
}

/// Nome x' = exp(-pi K(h') / K(h)); 0 at the separatrix.
inline double nome_from_h(const Modulus &mod)
{
    detail::require(mod.h() < 1, "nome_from_h: h must be < 1");
    if (mod.h() == 0) {
        return 0;
    }
    // K(h')/K(h) = M(1, h') / M(1, h)
    const double ratio = detail::agm(1.0, mod.h_prime()) / detail::agm(1.0, mod.h());
    return std::exp(-std::numbers::pi * ratio);
}

/// lambda = (1/2)(1 - sqrt h')/(1 + sqrt h'), written without the
/// cancellation at small h.
inline double lambda_from_h(const Modulus &mod)
{
    detail::require(mod.h() < 1, "lambda_from_h: h must be < 1");
    const double s = std::sqrt(mod.h_prime());
    const double h2 = mod.h() * mod.h();
    return h2 / (2 * (1 + mod.h_prime()) * (1 + s) * (1 + s));
}

/// g0 = (pi/2) g / (h' K(h)); equals g at the separatrix.
inline double g0_eval(const Modulus &mod, double g)
{
    detail::require(mod.h() < 1, "g0_eval: h must be < 1");
    detail::require(g > 0, "g0_eval: g must be positive");
    // pi / (2 K(h)) = M(1, h')
    return g * detail::agm(1.0, mod.h_prime()) / mod.h_prime();
}

/// E(h)K(h') + E(h')K(h) - K(h)K(h') - pi/2.
inline double legendre_defect(const Modulus &mod)
{
    detail::require(mod.h() > 0 && mod.h() < 1, "legendre_defect: h must lie in (0, 1)");
    const double h = mod.h(), hp = mod.h_prime();
    const double Kh = detail::complete_k_from_complement(hp);
    const double Khp = detail::complete_k_from_complement(h);
    const double Eh = detail::complete_e_from_pair(h, hp);
    const double Ehp = detail::complete_e_from_pair(hp, h);
    return Eh * Khp + Ehp * Kh - Kh * Khp - std::numbers::pi / 2;
}

inline EllipticEval evaluate(const Modulus &mod)
{
    detail::require(mod.h() < 1, "evaluate: h must be < 1");
    const double Kh = detail::complete_k_from_complement(mod.h_prime());
    const double Khp = mod.h() == 0 ? std::numeric_limits<double>::infinity()
                                     : detail::complete_k_from_complement(mod.h());
    return {Kh, Khp, detail::complete_e_from_pair(mod.h(), mod.h_prime()), nome_from_h(mod),
            lambda_from_h(mod)};
}

/// Inverse of nome_from_h through the theta quotients
///   h = theta_2^2 / theta_3^2,  h' = theta_4^2 / theta_3^2.
inline Modulus modulus_from_nome(double nome)
{
    detail::require(nome >= 0 && nome < 1, "modulus_from_nome: nome must lie in [0, 1)");
    if (nome == 0) {
        return Modulus::from_h(0);
    }
    // theta_2 = 2 q^{1/4} sum q^{n(n+1)}, theta_3/4 = 1 + 2 sum (+-1)^n q^{n^2}
    double t2 = 0, t3 = 1, t4 = 1;
    for (int n = 0; n < 10000; ++n) {
        const double e2 = std::pow(nome, double(n) * (n + 1));
        t2 += e2;
        if (n > 0) {
            const double e = std::pow(nome, double(n) * n);
            t3 += 2 * e;
            t4 += (n % 2 ? -2 : 2) * e;
        }
        if (e2 < 1e-18 * t2) {
            break;
        }
    }
    t2 *= 2 * std::pow(nome, 0.25);
    const double h = t2 * t2 / (t3 * t3);
    const double hp = t4 * t4 / (t3 * t3);
    // Jacobi's identity theta_3^4 = theta_2^4 + theta_4^4 makes this a
    // consistent pair up to rounding; renormalize the larger component.
    if (h < hp) {
        return Modulus::from_h(h);
    }
    return Modulus::from_pair(std::sqrt((1 - hp) * (1 + hp)), hp);
}

} // namespace pendnf

#endif
