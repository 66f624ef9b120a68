#include "parvar/algebra/param_poly.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "parvar/error.hpp"

namespace parvar {

namespace {

constexpr ParamExponents kZeroExps{};

bool divides(const ParamExponents& d, const ParamExponents& m)
{
    for (std::size_t i = 0; i < kMaxParams; ++i) {
        if (d[i] > m[i]) {
            return false;
        }
    }
    return true;
}

ParamExponents exps_sub(const ParamExponents& a, const ParamExponents& b)
{
    ParamExponents r{};
    for (std::size_t i = 0; i < kMaxParams; ++i) {
        r[i] = static_cast<std::uint16_t>(a[i] - b[i]);
    }
    return r;
}

ParamExponents exps_add(const ParamExponents& a, const ParamExponents& b)
{
    ParamExponents r{};
    for (std::size_t i = 0; i < kMaxParams; ++i) {
        r[i] = static_cast<std::uint16_t>(a[i] + b[i]);
    }
    return r;
}

} // namespace

ParamPoly::ParamPoly(const Rational& c)
{
    if (c != 0) {
        terms_.emplace(kZeroExps, c);
    }
}

ParamPoly ParamPoly::variable(std::size_t index)
{
    if (index >= kMaxParams) {
        throw Error(ErrorCode::UnknownVariable, "parameter index out of range");
    }
    ParamExponents e{};
    e[index] = 1;
    return monomial(e, Rational(1));
}

ParamPoly ParamPoly::monomial(const ParamExponents& exps, const Rational& coeff)
{
    ParamPoly p;
    if (coeff != 0) {
        p.terms_.emplace(exps, coeff);
    }
    return p;
}

bool ParamPoly::is_constant() const noexcept
{
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == kZeroExps);
}

Rational ParamPoly::constant_term() const
{
    auto it = terms_.find(kZeroExps);
    return it == terms_.end() ? Rational(0) : it->second;
}

const ParamExponents& ParamPoly::leading_exponents() const
{
    if (terms_.empty()) {
        throw Error(ErrorCode::ZeroPolynomial, "leading term of zero parameter polynomial");
    }
    return terms_.begin()->first;
}

const Rational& ParamPoly::leading_coefficient() const
{
    if (terms_.empty()) {
        throw Error(ErrorCode::ZeroPolynomial, "leading coefficient of zero parameter polynomial");
    }
    return terms_.begin()->second;
}

int ParamPoly::degree_in(std::size_t var) const noexcept
{
    int d = 0;
    for (const auto& [e, c] : terms_) {
        d = std::max<int>(d, e[var]);
    }
    return d;
}

int ParamPoly::total_degree() const noexcept
{
    int d = 0;
    for (const auto& [e, c] : terms_) {
        int s = 0;
        for (auto x : e) {
            s += x;
        }
        d = std::max(d, s);
    }
    return d;
}

std::uint32_t ParamPoly::variable_mask() const noexcept
{
    std::uint32_t mask = 0;
    for (const auto& [e, c] : terms_) {
        for (std::size_t i = 0; i < kMaxParams; ++i) {
            if (e[i] != 0) {
                mask |= (1u << i);
            }
        }
    }
    return mask;
}

void ParamPoly::add_term(const ParamExponents& e, const Rational& c)
{
    if (c == 0) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) {
            terms_.erase(it);
        }
    }
}

ParamPoly ParamPoly::operator-() const
{
    ParamPoly r = *this;
    for (auto& [e, c] : r.terms_) {
        c = -c;
    }
    return r;
}

ParamPoly& ParamPoly::operator+=(const ParamPoly& rhs)
{
    for (const auto& [e, c] : rhs.terms_) {
        add_term(e, c);
    }
    return *this;
}

ParamPoly& ParamPoly::operator-=(const ParamPoly& rhs)
{
    for (const auto& [e, c] : rhs.terms_) {
        add_term(e, -c);
    }
    return *this;
}

ParamPoly operator*(const ParamPoly& a, const ParamPoly& b)
{
    ParamPoly r;
    if (a.is_zero() || b.is_zero()) {
        return r;
    }
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            r.add_term(exps_add(ea, eb), ca * cb);
        }
    }
    return r;
}

ParamPoly& ParamPoly::operator*=(const ParamPoly& rhs)
{
    *this = *this * rhs;
    return *this;
}

ParamPoly& ParamPoly::operator*=(const Rational& c)
{
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, v] : terms_) {
        v *= c;
    }
    return *this;
}

ParamPoly ParamPoly::pow(unsigned e) const
{
    ParamPoly result(Rational(1));
    ParamPoly base = *this;
    while (e != 0) {
        if (e & 1u) {
            result *= base;
        }
        e >>= 1u;
        if (e != 0) {
            base *= base;
        }
    }
    return result;
}

ParamPoly ParamPoly::partial(std::size_t var) const
{
    ParamPoly r;
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) {
            continue;
        }
        ParamExponents d = e;
        d[var] -= 1;
        r.add_term(d, c * e[var]);
    }
    return r;
}

double ParamPoly::evaluate(std::span<const double> values) const
{
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
        double term = to_double(c);
        for (std::size_t i = 0; i < kMaxParams; ++i) {
            if (e[i] != 0) {
                term *= std::pow(i < values.size() ? values[i] : 0.0, e[i]);
            }
        }
        sum += term;
    }
    return sum;
}

Rational ParamPoly::evaluate(std::span<const Rational> values) const
{
    Rational sum = 0;
    for (const auto& [e, c] : terms_) {
        Rational term = c;
        for (std::size_t i = 0; i < kMaxParams; ++i) {
            for (unsigned k = 0; k < e[i]; ++k) {
                term *= (i < values.size() ? values[i] : Rational(0));
            }
        }
        sum += term;
    }
    return sum;
}

std::string format_rational(const Rational& q)
{
    return q.get_str();
}

Rational parse_decimal(std::string_view text)
{
    std::string s(text);
    auto bad = [&] { return Error(ErrorCode::SyntaxError, "not a decimal number: '" + s + "'"); };
    std::string mant = s;
    long exp10 = 0;
    if (auto e = mant.find_first_of("eE"); e != std::string::npos) {
        std::string ex = mant.substr(e + 1);
        std::size_t used = 0;
        try {
            exp10 = std::stol(ex, &used);
        } catch (const std::exception&) {
            throw bad();
        }
        if (used != ex.size()) {
            throw bad();
        }
        mant = mant.substr(0, e);
    }
    bool negative = false;
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
        negative = mant[0] == '-';
        mant.erase(0, 1);
    }
    if (auto dot = mant.find('.'); dot != std::string::npos) {
        exp10 -= static_cast<long>(mant.size() - dot - 1);
        mant.erase(dot, 1);
    }
    if (mant.empty() || mant.find_first_not_of("0123456789") != std::string::npos) {
        throw bad();
    }
    Integer n(mant, 10);
    Integer p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    Rational q = exp10 < 0 ? Rational(n, p) : Rational(n * p);
    q.canonicalize();
    return negative ? Rational(-q) : q;
}

Rational rationalize(double x, int decimals)
{
    if (!std::isfinite(x)) {
        throw Error(ErrorCode::IllConditioned, "cannot rationalize a non-finite value");
    }
    if (decimals > 0) {
        std::vector<char> big(static_cast<std::size_t>(decimals) + 400);
        std::snprintf(big.data(), big.size(), "%.*f", decimals, x);
        return parse_decimal(big.data());
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return parse_decimal(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
}

std::string ParamPoly::to_string(std::span<const std::string> names) const
{
    if (terms_.empty()) {
        return "0";
    }
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        Rational mag = abs(c);
        bool negative = c < 0;
        if (first) {
            if (negative) {
                os << '-';
            }
        } else {
            os << (negative ? " - " : " + ");
        }
        first = false;
        bool is_const = (e == kZeroExps);
        bool wrote = false;
        if (is_const || mag != 1) {
            os << format_rational(mag);
            wrote = true;
        }
        for (std::size_t i = 0; i < kMaxParams; ++i) {
            if (e[i] == 0) {
                continue;
            }
            if (wrote) {
                os << '*';
            }
            os << (i < names.size() ? names[i] : "p" + std::to_string(i + 1));
            if (e[i] > 1) {
                os << '^' << e[i];
            }
            wrote = true;
        }
    }
    return os.str();
}

std::optional<ParamPoly> divide_exact(const ParamPoly& num, const ParamPoly& den)
{
    if (den.is_zero()) {
        throw Error(ErrorCode::DivisionByZero, "division by the zero parameter polynomial");
    }
    if (num.is_zero()) {
        return ParamPoly{};
    }
    if (den.is_constant()) {
        return num * Rational(1 / den.constant_term());
    }
    const auto& lead_e = den.leading_exponents();
    const auto& lead_c = den.leading_coefficient();
    ParamPoly rem = num;
    ParamPoly quot;
    while (!rem.is_zero()) {
        const auto& re = rem.leading_exponents();
        if (!divides(lead_e, re)) {
            return std::nullopt;
        }
        ParamPoly t = ParamPoly::monomial(exps_sub(re, lead_e), rem.leading_coefficient() / lead_c);
        rem -= t * den;
        quot += t;
    }
    return quot;
}

Rational content(const ParamPoly& p)
{
    if (p.is_zero()) {
        return Rational(0);
    }
    Integer g = 0;
    Integer l = 1;
    for (const auto& [e, c] : p.terms()) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    }
    Rational r(g, l);
    r.canonicalize();
    if (p.leading_coefficient() < 0) {
        r = -r;
    }
    return r;
}

ParamPoly primitive_part(const ParamPoly& p)
{
    if (p.is_zero()) {
        return p;
    }
    return p * Rational(1 / content(p));
}

std::map<int, ParamPoly> coefficients_in(const ParamPoly& p, std::size_t var)
{
    std::map<int, ParamPoly> out;
    for (const auto& [e, c] : p.terms()) {
        ParamExponents rest = e;
        int d = rest[var];
        rest[var] = 0;
        out[d] += ParamPoly::monomial(rest, c);
    }
    return out;
}

namespace {

ParamPoly monomial_gcd(const ParamPoly& mono, const ParamPoly& p)
{
    ParamExponents g = mono.leading_exponents();
    for (const auto& [e, c] : p.terms()) {
        for (std::size_t i = 0; i < kMaxParams; ++i) {
            g[i] = std::min(g[i], e[i]);
        }
    }
    return ParamPoly::monomial(g, Rational(1));
}

ParamPoly content_in(const ParamPoly& p, std::size_t var);

ParamPoly gcd_impl(ParamPoly a, ParamPoly b);

ParamPoly content_in(const ParamPoly& p, std::size_t var)
{
    ParamPoly g;
    for (auto& [d, c] : coefficients_in(p, var)) {
        g = gcd_impl(g, c);
        if (g.is_constant()) {
            return ParamPoly(Rational(1));
        }
    }
    return g;
}

ParamPoly leading_coeff_in(const ParamPoly& p, std::size_t var, int& degree)
{
    auto coeffs = coefficients_in(p, var);
    degree = coeffs.rbegin()->first;
    return coeffs.rbegin()->second;
}

ParamPoly var_power(std::size_t var, int e)
{
    ParamExponents ex{};
    ex[var] = static_cast<std::uint16_t>(e);
    return ParamPoly::monomial(ex, Rational(1));
}

// Pseudo-remainder of a by b viewed as polynomials in `var`, up to a nonzero
// factor in the remaining variables.
ParamPoly pseudo_remainder(const ParamPoly& a, const ParamPoly& b, std::size_t var)
{
    int db = 0;
    ParamPoly lb = leading_coeff_in(b, var, db);
    ParamPoly r = a;
    while (!r.is_zero()) {
        int dr = 0;
        ParamPoly lr = leading_coeff_in(r, var, dr);
        if (dr < db) {
            break;
        }
        r = lb * r - lr * var_power(var, dr - db) * b;
        r = primitive_part(r);
    }
    return r;
}

ParamPoly pp_in(const ParamPoly& p, std::size_t var)
{
    ParamPoly c = content_in(p, var);
    if (c.is_constant()) {
        return primitive_part(p);
    }
    auto q = divide_exact(p, c);
    if (!q) {
        throw Error(ErrorCode::InternalError, "content does not divide polynomial");
    }
    return primitive_part(*q);
}

ParamPoly gcd_impl(ParamPoly a, ParamPoly b)
{
    if (a.is_zero()) {
        return primitive_part(b);
    }
    if (b.is_zero()) {
        return primitive_part(a);
    }
    if (a.is_constant() || b.is_constant()) {
        return ParamPoly(Rational(1));
    }
    if (a.is_monomial()) {
        return monomial_gcd(a, b);
    }
    if (b.is_monomial()) {
        return monomial_gcd(b, a);
    }
    if (a.size() < b.size() || (a.size() == b.size() && a.total_degree() < b.total_degree())) {
        std::swap(a, b);
    }
    if (divide_exact(a, b)) {
        return primitive_part(b);
    }

    // Strip variables that occur in only one argument: gcd(a, b) = gcd(cont_v(a), b).
    for (;;) {
        std::uint32_t ma = a.variable_mask();
        std::uint32_t mb = b.variable_mask();
        if (ma == mb) {
            break;
        }
        std::uint32_t only_a = ma & ~mb;
        std::uint32_t only_b = mb & ~ma;
        if (only_a != 0) {
            a = content_in(a, static_cast<std::size_t>(__builtin_ctz(only_a)));
        } else if (only_b != 0) {
            b = content_in(b, static_cast<std::size_t>(__builtin_ctz(only_b)));
        }
        if (a.is_constant() || b.is_constant()) {
            return ParamPoly(Rational(1));
        }
    }

    std::uint32_t common = a.variable_mask();
    std::size_t var = 0;
    int best = -1;
    for (std::size_t i = 0; i < kMaxParams; ++i) {
        if ((common >> i) & 1u) {
            int d = std::max(a.degree_in(i), b.degree_in(i));
            if (best < 0 || d < best) {
                best = d;
                var = i;
            }
        }
    }

    ParamPoly ca = content_in(a, var);
    ParamPoly cb = content_in(b, var);
    ParamPoly c = gcd_impl(ca, cb);
    ParamPoly pa = pp_in(a, var);
    ParamPoly pb = pp_in(b, var);

    ParamPoly g;
    for (;;) {
        if (pa.degree_in(var) < pb.degree_in(var)) {
            std::swap(pa, pb);
        }
        ParamPoly r = pseudo_remainder(pa, pb, var);
        if (r.is_zero()) {
            g = pb;
            break;
        }
        if (r.degree_in(var) == 0) {
            g = ParamPoly(Rational(1));
            break;
        }
        pa = std::move(pb);
        pb = pp_in(r, var);
    }
    if (!g.is_constant()) {
        g = pp_in(g, var);
    }
    return primitive_part(c * g);
}

} // namespace

ParamPoly gcd(const ParamPoly& a, const ParamPoly& b)
{
    return gcd_impl(a, b);
}

double to_double(const Rational& q)
{
    double d = q.get_d();
    double best = d;
    Rational best_err = abs(Rational(d) - q);
    for (double cand : {std::nextafter(d, -HUGE_VAL), std::nextafter(d, HUGE_VAL)}) {
        Rational err = abs(Rational(cand) - q);
        if (err < best_err) {
            best = cand;
            best_err = err;
        }
    }
    return best;
}

} // namespace parvar
