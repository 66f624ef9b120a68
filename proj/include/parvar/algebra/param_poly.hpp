#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace parvar {

using Rational = mpq_class;
using Integer = mpz_class;

/// Upper bound on the number of parameter symbols in one model.
inline constexpr std::size_t kMaxParams = 16;

/// Exponent vector over the parameter symbols; index 0 is the highest-ranked
/// parameter (declaration order in the model file).
using ParamExponents = std::array<std::uint16_t, kMaxParams>;

/// Sparse polynomial in the parameter symbols with exact rational coefficients.
///
/// Terms are stored in descending lexicographic order of their exponent
/// vectors, so the first term is the leading term. No stored coefficient is
/// zero.
class ParamPoly {
public:
    using TermMap = std::map<ParamExponents, Rational, std::greater<>>;

    ParamPoly() = default;
    ParamPoly(const Rational& c); // NOLINT(google-explicit-constructor)
    ParamPoly(long c) : ParamPoly(Rational(c)) {} // NOLINT(google-explicit-constructor)

    static ParamPoly variable(std::size_t index);
    static ParamPoly monomial(const ParamExponents& exps, const Rational& coeff);

    const TermMap& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }

    bool is_zero() const noexcept { return terms_.empty(); }
    bool is_constant() const noexcept;
    bool is_monomial() const noexcept { return terms_.size() == 1; }
    /// Constant term (coefficient of the empty monomial).
    Rational constant_term() const;

    const ParamExponents& leading_exponents() const;
    const Rational& leading_coefficient() const;

    int degree_in(std::size_t var) const noexcept;
    int total_degree() const noexcept;
    /// Bit i is set iff parameter i occurs with positive exponent.
    std::uint32_t variable_mask() const noexcept;

    ParamPoly operator-() const;
    ParamPoly& operator+=(const ParamPoly& rhs);
    ParamPoly& operator-=(const ParamPoly& rhs);
    ParamPoly& operator*=(const ParamPoly& rhs);
    ParamPoly& operator*=(const Rational& c);

    friend ParamPoly operator+(ParamPoly a, const ParamPoly& b) { return a += b; }
    friend ParamPoly operator-(ParamPoly a, const ParamPoly& b) { return a -= b; }
    friend ParamPoly operator*(const ParamPoly& a, const ParamPoly& b);
    friend ParamPoly operator*(ParamPoly a, const Rational& c) { return a *= c; }

    ParamPoly pow(unsigned e) const;
    ParamPoly partial(std::size_t var) const;

    double evaluate(std::span<const double> values) const;
    Rational evaluate(std::span<const Rational> values) const;

    bool operator==(const ParamPoly& other) const { return terms_ == other.terms_; }

    /// Expanded human-readable form, e.g. "a4*a5*a7 - 2*a6^2 + 3/4".
    std::string to_string(std::span<const std::string> names) const;

private:
    void add_term(const ParamExponents& e, const Rational& c);

    TermMap terms_;
};

/// Exact quotient num/den if den divides num in Q[a], otherwise nullopt.
std::optional<ParamPoly> divide_exact(const ParamPoly& num, const ParamPoly& den);

/// Greatest common divisor in Q[a], normalized to integer coefficients with
/// unit content and positive leading coefficient. gcd(0, 0) = 0.
ParamPoly gcd(const ParamPoly& a, const ParamPoly& b);

/// Rational c such that p / c has coprime integer coefficients and a positive
/// leading coefficient. Zero for the zero polynomial.
Rational content(const ParamPoly& p);

/// p / content(p).
ParamPoly primitive_part(const ParamPoly& p);

/// Splits p as a polynomial in parameter `var`: degree -> coefficient.
std::map<int, ParamPoly> coefficients_in(const ParamPoly& p, std::size_t var);

std::string format_rational(const Rational& q);

/// Exact value of a decimal literal such as "0.8512", "-3", "1e6" or "2.5E-3".
/// Throws SyntaxError on anything else.
Rational parse_decimal(std::string_view text);

/// Nearest double to q (mpq get_d truncates).
double to_double(const Rational& q);

/// Exact rational equal to the shortest decimal that round-trips `x`, or to
/// `x` rounded to `decimals` places after the point when decimals > 0.
Rational rationalize(double x, int decimals = 0);

} // namespace parvar
