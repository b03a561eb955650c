#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>
#include <gtest/gtest.h>

#include <pendnf/elliptic.hpp>

using namespace pendnf;
using std::numbers::pi;

namespace
{

double quad(auto f)
{
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, pi / 2, 15, 1e-15);
}

double K_oracle(double m)
{
    return quad([m](double a) { return 1 / std::sqrt(1 - m * m * std::sin(a) * std::sin(a)); });
}

double E_oracle(double m)
{
    return quad([m](double a) { return std::sqrt(1 - m * m * std::sin(a) * std::sin(a)); });
}

// am(u, m) from d(phi)/du = sqrt(1 - m^2 sin^2 phi).
double am_oracle(double u, double m)
{
    namespace ode = boost::numeric::odeint;
    std::array<double, 1> phi{0};
    auto stepper = ode::make_controlled(1e-15, 1e-15, ode::runge_kutta_fehlberg78<std::array<double, 1>>());
    ode::integrate_adaptive(
        stepper,
        [m](const std::array<double, 1> &y, std::array<double, 1> &dy, double) {
            dy[0] = std::sqrt(1 - m * m * std::sin(y[0]) * std::sin(y[0]));
        },
        phi, 0.0, u, u / 100);
    return phi[0];
}

// lambda as the theta quotient sum xi^{(2n+1)^2} / (1 + 2 sum xi^{4n^2}).
double lambda_theta(double xi)
{
    double num = 0, den = 1;
    for (int n = 0; n < 50; ++n) {
        num += std::pow(xi, (2 * n + 1) * (2 * n + 1));
        if (n > 0) {
            den += 2 * std::pow(xi, 4 * n * n);
        }
    }
    return num / den;
}

double g0_product(double x, double g)
{
    double p = 1;
    for (int n = 1; n < 2000; ++n) {
        const double xn = std::pow(x, n);
        if (xn < 1e-18) {
            break;
        }
        p *= (1 + xn) / (1 - xn);
    }
    return g * p * p;
}

} // namespace

TEST(Modulus, PairIsNormalized)
{
    for (double h = 0.0; h <= 1.0; h += 0.01) {
        const auto m = Modulus::from_h(h);
        EXPECT_NEAR(m.h() * m.h() + m.h_prime() * m.h_prime(), 1.0, 1e-14);
    }
}

TEST(Modulus, FromKRoundTrip)
{
    for (double k : {1e-6, 0.01, 0.3, 1.0, 2.5, 40.0, 1e8}) {
        const auto m = Modulus::from_k(k);
        EXPECT_NEAR(m.k() / k, 1.0, 1e-13);
        EXPECT_NEAR(m.h(), 1 / std::sqrt(1 + k * k), 1e-13);
        EXPECT_NEAR(m.h_prime(), k / std::sqrt(1 + k * k), 1e-13);
    }
}

TEST(Modulus, SeparatrixLimit)
{
    const auto m = Modulus::from_k(INFINITY);
    EXPECT_EQ(m.h(), 0.0);
    EXPECT_EQ(m.h_prime(), 1.0);
    EXPECT_TRUE(std::isinf(Modulus::from_h(0).k()));
}

TEST(Modulus, RejectsOutOfRange)
{
    EXPECT_THROW(Modulus::from_h(-0.1), std::domain_error);
    EXPECT_THROW(Modulus::from_h(1.1), std::domain_error);
    EXPECT_THROW(Modulus::from_k(0), std::domain_error);
    EXPECT_THROW(Modulus::from_pair(0.6, 0.6), std::domain_error);
}

TEST(CompleteK, AtZero) { EXPECT_DOUBLE_EQ(complete_K(0), pi / 2); }

TEST(CompleteK, MatchesQuadrature)
{
    for (double m : {0.1, 0.5, 0.9, 0.99}) {
        EXPECT_NEAR(complete_K(m) / K_oracle(m), 1.0, 1e-12) << "m=" << m;
    }
}

TEST(CompleteK, StrictlyIncreasing)
{
    double prev = complete_K(0);
    for (int i = 1; i < 200; ++i) {
        const double cur = complete_K(i / 200.0);
        EXPECT_GT(cur, prev);
        prev = cur;
    }
}

TEST(CompleteK, RejectsOutOfRange)
{
    EXPECT_THROW(complete_K(1.0), std::domain_error);
    EXPECT_THROW(complete_K(-0.1), std::domain_error);
}

TEST(CompleteE, Endpoints)
{
    EXPECT_DOUBLE_EQ(complete_E(0), pi / 2);
    EXPECT_DOUBLE_EQ(complete_E(1), 1.0);
    EXPECT_THROW(complete_E(1.01), std::domain_error);
}

TEST(CompleteE, MatchesQuadrature)
{
    for (double m : {0.1, 0.5, 0.9, 0.999}) {
        EXPECT_NEAR(complete_E(m) / E_oracle(m), 1.0, 1e-12) << "m=" << m;
    }
}

TEST(Jacobi, AtOrigin)
{
    for (double m : {0.0, 0.3, 0.9, 0.9999}) {
        const auto j = jacobi_trio(0, m);
        EXPECT_EQ(j.am, 0);
        EXPECT_EQ(j.sn, 0);
        EXPECT_EQ(j.cn, 1);
        EXPECT_EQ(j.dn, 1);
    }
}

TEST(Jacobi, DegenerateModulus)
{
    for (double u : {-3.0, 0.4, 2.0, 17.0}) {
        const auto j = jacobi_trio(u, 0);
        EXPECT_NEAR(j.am, u, 1e-15);
        EXPECT_NEAR(j.sn, std::sin(u), 1e-15);
        EXPECT_NEAR(j.cn, std::cos(u), 1e-15);
        EXPECT_EQ(j.dn, 1);
    }
}

TEST(Jacobi, AmplitudeMatchesOde)
{
    EXPECT_NEAR(jacobi_trio(1.0, 0.7).am, am_oracle(1.0, 0.7), 1e-10);
    for (double m : {0.2, 0.95, 0.999}) {
        for (double u : {0.3, 1.7, 4.0}) {
            EXPECT_NEAR(jacobi_trio(u, m).am, am_oracle(u, m), 1e-10) << "u=" << u << " m=" << m;
        }
    }
}

TEST(Jacobi, PythagoreanIdentities)
{
    for (double m : {0.0, 0.1, 0.5, 0.9, 0.999999}) {
        const double K = complete_K(m);
        for (int i = -40; i <= 40; ++i) {
            const double u = i * K / 10;
            const auto j = jacobi_trio(u, m);
            EXPECT_NEAR(j.sn * j.sn + j.cn * j.cn, 1.0, 1e-12);
            EXPECT_NEAR(j.dn * j.dn + m * m * j.sn * j.sn, 1.0, 1e-12);
        }
    }
}

TEST(Jacobi, Period4K)
{
    for (double m : {0.3, 0.8, 0.99}) {
        const double K = complete_K(m);
        for (int i = -10; i <= 10; ++i) {
            const double u = i * K / 5;
            EXPECT_NEAR(jacobi_trio(u + 4 * K, m).sn, jacobi_trio(u, m).sn, 1e-10);
        }
    }
}

TEST(Jacobi, QuarterPeriodValues)
{
    const double m = 0.6, K = complete_K(m);
    const auto j = jacobi_trio(K, m);
    EXPECT_NEAR(j.sn, 1, 1e-14);
    EXPECT_NEAR(j.cn, 0, 1e-14);
    EXPECT_NEAR(j.dn, std::sqrt(1 - m * m), 1e-14);
}

TEST(Jacobi, RejectsBadArguments)
{
    EXPECT_THROW(jacobi_trio(1, 1.0), std::domain_error);
    EXPECT_THROW(jacobi_trio(NAN, 0.5), std::domain_error);
}

TEST(Nome, SeparatrixIsZero)
{
    EXPECT_EQ(nome_from_h(Modulus::from_h(0)), 0.0);
    EXPECT_LT(nome_from_h(Modulus::from_h(1e-8)), 1e-16);
}

TEST(Nome, LambdaSeries)
{
    for (double h = 0.01; h < 1; h += 0.01) {
        const auto mod = Modulus::from_h(h);
        const double l = lambda_from_h(mod);
        if (l > 0.05) {
            break;
        }
        const double series = l + 2 * std::pow(l, 5) + 15 * std::pow(l, 9);
        EXPECT_NEAR(nome_from_h(mod), series, 1e-12) << "h=" << h;
    }
}

TEST(Nome, ThetaQuotientInversion)
{
    const auto mod = Modulus::from_h(0.5);
    const double target = lambda_from_h(mod);
    double lo = 0, hi = 0.9;
    for (int i = 0; i < 200; ++i) {
        const double mid = (lo + hi) / 2;
        (lambda_theta(mid) < target ? lo : hi) = mid;
    }
    EXPECT_NEAR(nome_from_h(mod), (lo + hi) / 2, 1e-12);
}

TEST(Nome, StrictlyIncreasing)
{
    double prev = -1;
    for (int i = 1; i <= 100; ++i) {
        const double cur = nome_from_h(Modulus::from_h(i / 101.0));
        EXPECT_GT(cur, prev);
        EXPECT_LT(cur, 1);
        prev = cur;
    }
}

TEST(Nome, ModulusFromNomeRoundTrip)
{
    for (double h : {0.05, 0.3, 0.7, 0.95}) {
        const auto back = modulus_from_nome(nome_from_h(Modulus::from_h(h)));
        EXPECT_NEAR(back.h(), h, 1e-13);
    }
}

TEST(Lambda, Limits)
{
    EXPECT_EQ(lambda_from_h(Modulus::from_h(0)), 0.0);
    // 1/2 - lambda ~ sqrt(h') as h -> 1
    for (double h : {1 - 1e-6, 1 - 1e-10, 1 - 1e-15}) {
        const auto mod = Modulus::from_h(h);
        const double gap = 0.5 - lambda_from_h(mod);
        EXPECT_GT(gap, 0);
        EXPECT_LE(gap, std::sqrt(mod.h_prime()));
    }
    EXPECT_THROW(lambda_from_h(Modulus::from_h(1)), std::domain_error);
}

TEST(Lambda, MatchesThetaQuotient)
{
    for (double h : {0.2, 0.6, 0.9}) {
        const auto mod = Modulus::from_h(h);
        EXPECT_NEAR(lambda_from_h(mod), lambda_theta(nome_from_h(mod)), 1e-12) << "h=" << h;
    }
}

TEST(G0, SeparatrixValue)
{
    EXPECT_DOUBLE_EQ(g0_eval(Modulus::from_h(0), 1.7), 1.7);
}

TEST(G0, LinearInG)
{
    const auto mod = Modulus::from_h(0.55);
    EXPECT_NEAR(g0_eval(mod, 2 * 0.8), 2 * g0_eval(mod, 0.8), 1e-15);
}

TEST(G0, MatchesProduct)
{
    for (double h : {0.1, 0.4, 0.8}) {
        const auto mod = Modulus::from_h(h);
        EXPECT_NEAR(g0_eval(mod, 1) / g0_product(nome_from_h(mod), 1), 1.0, 1e-12) << "h=" << h;
    }
}

TEST(G0, AtLeastG)
{
    for (int i = 1; i < 100; ++i) {
        EXPECT_GT(g0_eval(Modulus::from_h(i / 100.0), 1), 1.0);
    }
}

TEST(Legendre, MidpointAndSymmetry)
{
    EXPECT_LE(std::abs(legendre_defect(Modulus::from_h(0.5))), 1e-12);
    for (double h : {0.1, 0.35, 0.8}) {
        const auto m = Modulus::from_h(h);
        const auto swapped = Modulus::from_pair(m.h_prime(), m.h());
        EXPECT_NEAR(legendre_defect(m), legendre_defect(swapped), 1e-14);
    }
}

TEST(Legendre, GridWithQuadratureOracle)
{
    double worst_kernel = 0, worst_oracle = 0;
    for (int i = 0; i < 50; ++i) {
        const double h = 0.05 + 0.9 * i / 49;
        const auto m = Modulus::from_h(h);
        worst_kernel = std::max(worst_kernel, std::abs(legendre_defect(m)));
        const double hp = m.h_prime();
        const double oracle =
            E_oracle(h) * K_oracle(hp) + E_oracle(hp) * K_oracle(h) - K_oracle(h) * K_oracle(hp) - pi / 2;
        worst_oracle = std::max(worst_oracle, std::abs(oracle));
        const auto ev = evaluate(m);
        EXPECT_NEAR(ev.K_h / K_oracle(h), 1, 1e-12);
        EXPECT_NEAR(ev.K_hprime / K_oracle(hp), 1, 1e-12);
        EXPECT_NEAR(ev.E_h / E_oracle(h), 1, 1e-12);
    }
    EXPECT_LE(worst_kernel, 1e-12);
    EXPECT_LE(worst_oracle, 1e-12);
}

TEST(Legendre, RejectsEndpoints)
{
    EXPECT_THROW(legendre_defect(Modulus::from_h(0)), std::domain_error);
    EXPECT_THROW(legendre_defect(Modulus::from_h(1)), std::domain_error);
}
