#pragma once

#include <span>
#include <string>

#include "parvar/algebra/param_poly.hpp"

namespace parvar {

/// Element of the coefficient field Q(a): a ratio of parameter polynomials.
///
/// Always held in canonical form: numerator and denominator are coprime in
/// Q[a], both have integer coefficients whose joint content is 1, and the
/// denominator's leading coefficient is positive. Equality of canonical
/// forms is therefore equality of rational functions.
class ParamRat {
public:
    ParamRat() : den_(Rational(1)) {}
    ParamRat(const Rational& c); // NOLINT(google-explicit-constructor)
    ParamRat(long c) : ParamRat(Rational(c)) {} // NOLINT(google-explicit-constructor)
    ParamRat(ParamPoly num); // NOLINT(google-explicit-constructor)
    ParamRat(ParamPoly num, ParamPoly den);

    static ParamRat parameter(std::size_t index) { return ParamRat(ParamPoly::variable(index)); }

    const ParamPoly& num() const noexcept { return num_; }
    const ParamPoly& den() const noexcept { return den_; }

    bool is_zero() const noexcept { return num_.is_zero(); }
    bool is_one() const;
    /// True if the value does not depend on any parameter.
    bool is_constant() const noexcept { return num_.is_constant() && den_.is_constant(); }
    Rational constant_value() const;

    ParamRat operator-() const;
    ParamRat inv() const;

    friend ParamRat operator+(const ParamRat& a, const ParamRat& b);
    friend ParamRat operator-(const ParamRat& a, const ParamRat& b);
    friend ParamRat operator*(const ParamRat& a, const ParamRat& b);
    friend ParamRat operator/(const ParamRat& a, const ParamRat& b);
    ParamRat& operator+=(const ParamRat& b) { return *this = *this + b; }
    ParamRat& operator-=(const ParamRat& b) { return *this = *this - b; }
    ParamRat& operator*=(const ParamRat& b) { return *this = *this * b; }

    bool operator==(const ParamRat& other) const { return num_ == other.num_ && den_ == other.den_; }

    double evaluate(std::span<const double> params) const;
    Rational evaluate(std::span<const Rational> params) const;

    /// "num" when the denominator is 1, otherwise "(num)/(den)".
    std::string to_string(std::span<const std::string> names) const;

private:
    struct Canonical {};
    ParamRat(ParamPoly num, ParamPoly den, Canonical) : num_(std::move(num)), den_(std::move(den)) {}
    void canonicalize();

    ParamPoly num_;
    ParamPoly den_;
};

} // namespace parvar
