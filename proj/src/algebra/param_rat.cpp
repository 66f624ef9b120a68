#include "parvar/algebra/param_rat.hpp"

#include "parvar/error.hpp"

namespace parvar {

namespace {

Integer integer_gcd_of(const ParamPoly& p, Integer g)
{
    for (const auto& [e, c] : p.terms()) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
    }
    return g;
}

Integer denominator_lcm(const ParamPoly& p)
{
    Integer l = 1;
    for (const auto& [e, c] : p.terms()) {
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    }
    return l;
}

} // namespace

ParamRat::ParamRat(const Rational& c) : num_(c), den_(Rational(1))
{
    canonicalize();
}

ParamRat::ParamRat(ParamPoly num) : num_(std::move(num)), den_(Rational(1))
{
    canonicalize();
}

ParamRat::ParamRat(ParamPoly num, ParamPoly den) : num_(std::move(num)), den_(std::move(den))
{
    if (den_.is_zero()) {
        throw Error(ErrorCode::DivisionByZero, "rational function with zero denominator");
    }
    if (!den_.is_constant() && !num_.is_zero()) {
        ParamPoly g = gcd(num_, den_);
        if (!g.is_constant()) {
            num_ = *divide_exact(num_, g);
            den_ = *divide_exact(den_, g);
        }
    }
    canonicalize();
}

// Scales numerator and denominator by a common rational so that both have
// integer coefficients with joint content 1 and the denominator has a
// positive leading coefficient. Assumes num and den already coprime.
void ParamRat::canonicalize()
{
    if (num_.is_zero()) {
        den_ = ParamPoly(Rational(1));
        return;
    }
    Rational dc = content(den_);
    den_ *= Rational(1 / dc);
    num_ *= Rational(1 / dc);
    Integer l = denominator_lcm(num_);
    if (l != 1) {
        num_ *= Rational(l);
        den_ *= Rational(l);
    }
    Integer g = integer_gcd_of(den_, integer_gcd_of(num_, 0));
    if (g != 1) {
        num_ *= Rational(1, g);
        den_ *= Rational(1, g);
    }
}

bool ParamRat::is_one() const
{
    return num_.is_constant() && den_.is_constant() && num_.constant_term() == den_.constant_term();
}

Rational ParamRat::constant_value() const
{
    if (!is_constant()) {
        throw Error(ErrorCode::InternalError, "constant_value of a parameter-dependent coefficient");
    }
    Rational q = num_.constant_term() / den_.constant_term();
    return q;
}

ParamRat ParamRat::operator-() const
{
    return ParamRat(-num_, den_, Canonical{});
}

ParamRat ParamRat::inv() const
{
    if (num_.is_zero()) {
        throw Error(ErrorCode::DivisionByZero, "inverse of zero");
    }
    ParamRat r(den_, num_, Canonical{});
    r.canonicalize();
    return r;
}

ParamRat operator+(const ParamRat& a, const ParamRat& b)
{
    if (a.is_zero()) {
        return b;
    }
    if (b.is_zero()) {
        return a;
    }
    if (a.den_ == b.den_) {
        return ParamRat(a.num_ + b.num_, a.den_);
    }
    if (a.den_.is_constant() && b.den_.is_constant()) {
        ParamRat r(a.num_ * Rational(1 / a.den_.constant_term()) + b.num_ * Rational(1 / b.den_.constant_term()));
        return r;
    }
    ParamPoly g = gcd(a.den_, b.den_);
    ParamPoly bd = *divide_exact(b.den_, g);
    ParamPoly ad = *divide_exact(a.den_, g);
    return ParamRat(a.num_ * bd + b.num_ * ad, a.den_ * bd);
}

ParamRat operator-(const ParamRat& a, const ParamRat& b)
{
    return a + (-b);
}

ParamRat operator*(const ParamRat& a, const ParamRat& b)
{
    if (a.is_zero() || b.is_zero()) {
        return ParamRat();
    }
    if (a.den_.is_constant() && b.den_.is_constant()) {
        return ParamRat(a.num_ * b.num_ * Rational(1 / (a.den_.constant_term() * b.den_.constant_term())));
    }
    // cross-cancel before multiplying: gcd(a.num, b.den) and gcd(b.num, a.den)
    ParamPoly g1 = gcd(a.num_, b.den_);
    ParamPoly g2 = gcd(b.num_, a.den_);
    ParamPoly n1 = g1.is_constant() ? a.num_ : *divide_exact(a.num_, g1);
    ParamPoly d2 = g1.is_constant() ? b.den_ : *divide_exact(b.den_, g1);
    ParamPoly n2 = g2.is_constant() ? b.num_ : *divide_exact(b.num_, g2);
    ParamPoly d1 = g2.is_constant() ? a.den_ : *divide_exact(a.den_, g2);
    ParamRat r(n1 * n2, d1 * d2, ParamRat::Canonical{});
    r.canonicalize();
    return r;
}

ParamRat operator/(const ParamRat& a, const ParamRat& b)
{
    return a * b.inv();
}

double ParamRat::evaluate(std::span<const double> params) const
{
    return num_.evaluate(params) / den_.evaluate(params);
}

Rational ParamRat::evaluate(std::span<const Rational> params) const
{
    Rational d = den_.evaluate(params);
    if (d == 0) {
        throw Error(ErrorCode::DivisionByZero, "denominator vanishes at the given parameters");
    }
    Rational r = num_.evaluate(params) / d;
    return r;
}

std::string ParamRat::to_string(std::span<const std::string> names) const
{
    if (den_.is_constant() && den_.constant_term() == 1) {
        return num_.to_string(names);
    }
    if (den_.is_constant()) {
        ParamPoly n = num_ * Rational(1 / den_.constant_term());
        return n.to_string(names);
    }
    return "(" + num_.to_string(names) + ")/(" + den_.to_string(names) + ")";
}

} // namespace parvar
