// Truncated formal power series with exact rational coefficients.
//
// A series of order N carries coefficients 0..N; everything above N is
// unknown, never implicitly zero. Binary operations therefore return the
// smaller of the operand orders.

#ifndef PENDNF_RATIONAL_SERIES_HPP
#define PENDNF_RATIONAL_SERIES_HPP

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace pendnf
{

class RationalSeries
{
public:
    using coeff_type = mpq_class;

    RationalSeries(std::vector<mpq_class> coeffs, std::string var = "x")
        : coeffs_(std::move(coeffs)), var_(std::move(var))
    {
        if (coeffs_.empty()) {
            throw std::invalid_argument("RationalSeries: needs at least the constant term");
        }
        for (auto &c : coeffs_) {
            c.canonicalize();
        }
    }

    static RationalSeries zero(std::size_t order, std::string var = "x")
    {
        return RationalSeries(std::vector<mpq_class>(order + 1), std::move(var));
    }

    static RationalSeries constant(const mpq_class &c, std::size_t order, std::string var = "x")
    {
        auto s = zero(order, std::move(var));
        s.coeffs_[0] = c;
        return s;
    }

    static RationalSeries monomial(std::size_t power, std::size_t order, std::string var = "x",
                                   const mpq_class &c = 1)
    {
        auto s = zero(order, std::move(var));
        if (power <= order) {
            s.coeffs_[power] = c;
        }
        return s;
    }

    // The identity series x, truncated at the given order (>= 1).
    static RationalSeries variable(std::size_t order, std::string var = "x")
    {
        if (order < 1) {
            throw std::invalid_argument("RationalSeries::variable: order must be >= 1");
        }
        return monomial(1, order, std::move(var));
    }

    std::size_t order() const { return coeffs_.size() - 1; }
    const std::string &var() const { return var_; }
    std::span<const mpq_class> coeffs() const { return coeffs_; }
    const mpq_class &operator[](std::size_t i) const { return coeffs_.at(i); }

    RationalSeries truncated(std::size_t order) const
    {
        if (order > this->order()) {
            throw std::invalid_argument("RationalSeries::truncated: cannot raise the order");
        }
        return RationalSeries(std::vector<mpq_class>(coeffs_.begin(), coeffs_.begin() + order + 1),
                              var_);
    }

    RationalSeries with_var(std::string var) const
    {
        auto s = *this;
        s.var_ = std::move(var);
        return s;
    }

    RationalSeries with_coeff(std::size_t i, const mpq_class &c) const
    {
        auto s = *this;
        s.coeffs_.at(i) = c;
        return s;
    }

    bool operator==(const RationalSeries &) const = default;

    friend RationalSeries operator-(const RationalSeries &a)
    {
        auto r = a;
        for (auto &c : r.coeffs_) {
            c = -c;
        }
        return r;
    }

    friend RationalSeries operator+(const RationalSeries &a, const RationalSeries &b)
    {
        const auto n = check_pair(a, b);
        auto r = zero(n, a.var_);
        for (std::size_t i = 0; i <= n; ++i) {
            r.coeffs_[i] = a.coeffs_[i] + b.coeffs_[i];
        }
        return r;
    }

    friend RationalSeries operator-(const RationalSeries &a, const RationalSeries &b)
    {
        const auto n = check_pair(a, b);
        auto r = zero(n, a.var_);
        for (std::size_t i = 0; i <= n; ++i) {
            r.coeffs_[i] = a.coeffs_[i] - b.coeffs_[i];
        }
        return r;
    }

    friend RationalSeries operator*(const RationalSeries &a, const RationalSeries &b)
    {
        const auto n = check_pair(a, b);
        auto r = zero(n, a.var_);
        mpq_class t;
        for (std::size_t i = 0; i <= n; ++i) {
            if (sgn(a.coeffs_[i]) == 0) {
                continue;
            }
            for (std::size_t j = 0; i + j <= n; ++j) {
                if (sgn(b.coeffs_[j]) == 0) {
                    continue;
                }
                mpq_mul(t.get_mpq_t(), a.coeffs_[i].get_mpq_t(), b.coeffs_[j].get_mpq_t());
                r.coeffs_[i + j] += t;
            }
        }
        return r;
    }

    friend RationalSeries operator/(const RationalSeries &a, const RationalSeries &b)
    {
        const auto n = check_pair(a, b);
        if (sgn(b.coeffs_[0]) == 0) {
            throw std::domain_error("RationalSeries: division by a series with zero constant term");
        }
        auto r = zero(n, a.var_);
        const mpq_class inv0 = 1 / b.coeffs_[0];
        mpq_class acc, t;
        for (std::size_t i = 0; i <= n; ++i) {
            acc = a.coeffs_[i];
            for (std::size_t j = 1; j <= i; ++j) {
                if (sgn(b.coeffs_[j]) == 0) {
                    continue;
                }
                mpq_mul(t.get_mpq_t(), b.coeffs_[j].get_mpq_t(), r.coeffs_[i - j].get_mpq_t());
                acc -= t;
            }
            r.coeffs_[i] = acc * inv0;
        }
        return r;
    }

    friend RationalSeries operator*(const mpq_class &c, const RationalSeries &a)
    {
        auto r = a;
        for (auto &x : r.coeffs_) {
            x *= c;
        }
        return r;
    }

    // x^k * f; the order grows by k since the shifted coefficients are known.
    RationalSeries shifted(std::size_t k) const
    {
        std::vector<mpq_class> c(k);
        c.insert(c.end(), coeffs_.begin(), coeffs_.end());
        return RationalSeries(std::move(c), var_);
    }

    // f / x for f(0) = 0; the order drops by one.
    RationalSeries divided_by_x() const
    {
        if (sgn(coeffs_[0]) != 0 || order() < 1) {
            throw std::domain_error("RationalSeries::divided_by_x: nonzero constant term");
        }
        return RationalSeries(std::vector<mpq_class>(coeffs_.begin() + 1, coeffs_.end()), var_);
    }

    // f(c x)
    RationalSeries rescaled_argument(const mpq_class &c) const
    {
        auto r = *this;
        mpq_class p = 1;
        for (auto &x : r.coeffs_) {
            x *= p;
            p *= c;
        }
        return r;
    }

    double evaluate(double x) const
    {
        double acc = 0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            acc = acc * x + it->get_d();
        }
        return acc;
    }

    double evaluate_derivative(double x) const
    {
        double acc = 0;
        for (std::size_t i = coeffs_.size() - 1; i >= 1; --i) {
            acc = acc * x + double(i) * coeffs_[i].get_d();
        }
        return acc;
    }

    mpq_class evaluate(const mpq_class &x) const
    {
        mpq_class acc = 0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            acc = acc * x + *it;
        }
        return acc;
    }

    bool all_integer() const
    {
        return std::all_of(coeffs_.begin(), coeffs_.end(),
                           [](const mpq_class &c) { return c.get_den() == 1; });
    }

private:
    static std::size_t check_pair(const RationalSeries &a, const RationalSeries &b)
    {
        if (a.var_ != b.var_) {
            throw std::invalid_argument("RationalSeries: variable mismatch ('" + a.var_ + "' vs '" +
                                        b.var_ + "')");
        }
        return std::min(a.order(), b.order());
    }

    std::vector<mpq_class> coeffs_;
    std::string var_;
};

enum class SeriesOp { add, sub, mul, div };

inline RationalSeries ps_arith(const RationalSeries &a, const RationalSeries &b, SeriesOp op)
{
    switch (op) {
    case SeriesOp::add:
        return a + b;
    case SeriesOp::sub:
        return a - b;
    case SeriesOp::mul:
        return a * b;
    case SeriesOp::div:
        return a / b;
    }
    throw std::invalid_argument("ps_arith: unknown operation");
}

inline RationalSeries ps_derive(const RationalSeries &f)
{
    if (f.order() < 1) {
        throw std::invalid_argument("ps_derive: order-0 series has no known derivative");
    }
    std::vector<mpq_class> c(f.order());
    for (std::size_t i = 1; i <= f.order(); ++i) {
        c[i - 1] = f[i] * static_cast<unsigned long>(i);
    }
    return RationalSeries(std::move(c), f.var());
}

/// f(g(x)) by Horner's scheme. g must have zero constant term. The result
/// carries g's variable and order min(order f, order g).
inline RationalSeries ps_compose(const RationalSeries &f, const RationalSeries &g)
{
    if (sgn(g[0]) != 0) {
        throw std::domain_error("ps_compose: inner series must have zero constant term");
    }
    const auto n = std::min(f.order(), g.order());
    const auto inner = g.truncated(n);
    auto acc = RationalSeries::constant(f[n], n, g.var());
    for (std::size_t i = n; i-- > 0;) {
        acc = acc * inner;
        acc = acc + RationalSeries::constant(f[i], n, g.var());
    }
    return acc;
}

/// Compositional inverse: g with f(g(x)) = x, by Newton iteration
///   g <- g - (f(g) - x) / f'(g),
/// which doubles the number of correct coefficients per step.
inline RationalSeries ps_revert(const RationalSeries &f)
{
    if (f.order() < 1 || sgn(f[0]) != 0 || sgn(f[1]) == 0) {
        throw std::domain_error("ps_revert: need f(0) = 0 and f'(0) != 0");
    }
    const auto n = f.order();
    const auto df = ps_derive(f);
    auto g = RationalSeries::monomial(1, 1, f.var(), 1 / f[1]);
    for (std::size_t known = 1; known < n;) {
        const auto next = std::min<std::size_t>(2 * known, n);
        std::vector<mpq_class> c(g.coeffs().begin(), g.coeffs().end());
        c.resize(next + 1);
        const RationalSeries grown(std::move(c), f.var());
        // The residual vanishes through x^known, so one power of x can be
        // divided out before the quotient; f'(g) is then needed only to
        // order next - 1.
        const auto residual =
            ps_compose(f.truncated(next), grown) - RationalSeries::variable(next, f.var());
        const auto slope = ps_compose(df.truncated(next - 1), grown.truncated(next - 1));
        const auto step = (residual.divided_by_x() / slope).shifted(1);
        g = grown - step;
        known = next;
    }
    return g;
}

/// Exponent pattern stride * n + offset for n = 1, 2, ...
struct Stride {
    int stride = 1;
    int offset = 0;

    long exponent(long n) const { return stride * n + offset; }
};

/// One product factor (1 + num_sign x^e) / (1 + den_sign x^e) with e taken
/// from the stride; a zero sign drops that side.
struct ProductTerm {
    int num_sign = 0;
    int den_sign = 0;
    Stride stride;
};

/// Series of [prod_{n>=1} prod_terms factor]^power truncated at order.
/// Factors with exponent above the order cannot contribute and are skipped.
inline RationalSeries ps_from_product(std::span<const ProductTerm> terms, int power,
                                      std::size_t order, std::string var = "x")
{
    if (power < 0) {
        throw std::invalid_argument("ps_from_product: power must be non-negative");
    }
    for (const auto &t : terms) {
        const bool signs_ok = std::abs(t.num_sign) <= 1 && std::abs(t.den_sign) <= 1;
        if (!signs_ok || t.stride.stride < 1 || t.stride.exponent(1) < 1) {
            throw std::invalid_argument("ps_from_product: invalid factor descriptor");
        }
    }
    // Integer arithmetic suffices: every factor has unit constant term.
    std::vector<mpz_class> c(order + 1);
    c[0] = 1;
    const auto n_max = static_cast<long>(order);
    for (const auto &t : terms) {
        for (long n = 1; t.stride.exponent(n) <= n_max; ++n) {
            const auto e = static_cast<std::size_t>(t.stride.exponent(n));
            for (int rep = 0; rep < power; ++rep) {
                if (t.num_sign != 0) {
                    for (std::size_t i = order; i >= e; --i) {
                        if (t.num_sign > 0) {
                            c[i] += c[i - e];
                        } else {
                            c[i] -= c[i - e];
                        }
                    }
                }
                if (t.den_sign != 0) {
                    // c <- c / (1 + s x^e): c[i] -= s * c[i - e], ascending.
                    for (std::size_t i = e; i <= order; ++i) {
                        if (t.den_sign > 0) {
                            c[i] -= c[i - e];
                        } else {
                            c[i] += c[i - e];
                        }
                    }
                }
            }
        }
    }
    std::vector<mpq_class> q(c.begin(), c.end());
    return RationalSeries(std::move(q), std::move(var));
}

/// First index where the two series differ, over their common order.
inline std::optional<std::size_t> first_mismatch(const RationalSeries &a, const RationalSeries &b)
{
    const auto n = std::min(a.order(), b.order());
    for (std::size_t i = 0; i <= n; ++i) {
        if (a[i] != b[i]) {
            return i;
        }
    }
    return std::nullopt;
}

// JSON: {"var": ..., "order": N, "coeffs": [["num", "den"], ...]} with
// decimal-string integers.
inline nlohmann::json to_json(const RationalSeries &s)
{
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto &c : s.coeffs()) {
        coeffs.push_back({c.get_num().get_str(), c.get_den().get_str()});
    }
    return {{"var", s.var()}, {"order", s.order()}, {"coeffs", std::move(coeffs)}};
}

inline RationalSeries series_from_json(const nlohmann::json &j)
{
    const auto order = j.at("order").get<std::size_t>();
    const auto &arr = j.at("coeffs");
    if (!arr.is_array() || arr.size() != order + 1) {
        throw std::invalid_argument("series_from_json: coeffs length must be order + 1");
    }
    std::vector<mpq_class> c;
    c.reserve(arr.size());
    for (const auto &pair : arr) {
        if (!pair.is_array() || pair.size() != 2) {
            throw std::invalid_argument("series_from_json: coefficient must be [num, den]");
        }
        mpz_class num, den;
        if (num.set_str(pair[0].get<std::string>(), 10) != 0 ||
            den.set_str(pair[1].get<std::string>(), 10) != 0 || den == 0) {
            throw std::invalid_argument("series_from_json: malformed integer");
        }
        c.emplace_back(num, den);
    }
    return RationalSeries(std::move(c), j.at("var").get<std::string>());
}

inline std::ostream &operator<<(std::ostream &os, const RationalSeries &s)
{
    bool first = true;
    for (std::size_t i = 0; i <= s.order(); ++i) {
        if (sgn(s[i]) == 0) {
            continue;
        }
        os << (first ? "" : " + ") << s[i];
        if (i > 0) {
            os << '*' << s.var();
            if (i > 1) {
                os << '^' << i;
            }
        }
        first = false;
    }
    if (first) {
        os << '0';
    }
    return os << " + O(" << s.var() << '^' << s.order() + 1 << ')';
}

} // namespace pendnf

#endif
