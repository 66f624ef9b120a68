#include "parvar/algebra/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "parvar/error.hpp"

namespace parvar {

std::string SymbolTable::base_name(const DiffVar& v) const
{
    switch (v.kind) {
    case VarKind::State: return states.at(v.index);
    case VarKind::Input: return inputs.at(v.index);
    case VarKind::Output: return output;
    }
    return "?";
}

std::string SymbolTable::name(const DiffVar& v) const
{
    return base_name(v) + std::string(v.order, '\'');
}

Ring::Ring(std::vector<DiffVar> vars, std::shared_ptr<const SymbolTable> symbols)
    : vars_(std::move(vars)), symbols_(std::move(symbols))
{
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (!index_.emplace(vars_[i], i).second) {
            throw Error(ErrorCode::InternalError, "duplicate ring variable");
        }
    }
}

std::size_t Ring::index_of(const DiffVar& v) const
{
    auto it = index_.find(v);
    if (it == index_.end()) {
        throw Error(ErrorCode::UnknownVariable, "variable " + symbols_->name(v) + " is not in the ring");
    }
    return it->second;
}

Ordering lex_compare(const Monomial& a, const Monomial& b)
{
    auto c = a <=> b;
    if (c < 0) {
        return Ordering::Less;
    }
    if (c > 0) {
        return Ordering::Greater;
    }
    return Ordering::Equal;
}

Ordering lex_compare(const VarPowers& a, const VarPowers& b, const MonomialOrder& ord)
{
    Monomial da(ord.size(), 0);
    Monomial db(ord.size(), 0);
    for (const auto& [v, e] : a) {
        if (e != 0) {
            da[ord.index_of(v)] = static_cast<std::uint16_t>(e);
        }
    }
    for (const auto& [v, e] : b) {
        if (e != 0) {
            db[ord.index_of(v)] = static_cast<std::uint16_t>(e);
        }
    }
    return lex_compare(da, db);
}

bool monomial_divides(const Monomial& d, const Monomial& m)
{
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] > m[i]) {
            return false;
        }
    }
    return true;
}

Monomial monomial_lcm(const Monomial& a, const Monomial& b)
{
    Monomial r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        r[i] = std::max(a[i], b[i]);
    }
    return r;
}

Monomial monomial_mul(const Monomial& a, const Monomial& b)
{
    Monomial r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        r[i] = static_cast<std::uint16_t>(a[i] + b[i]);
    }
    return r;
}

Monomial monomial_div(const Monomial& m, const Monomial& d)
{
    Monomial r(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        r[i] = static_cast<std::uint16_t>(m[i] - d[i]);
    }
    return r;
}

bool monomial_coprime(const Monomial& a, const Monomial& b)
{
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != 0 && b[i] != 0) {
            return false;
        }
    }
    return true;
}

Poly Poly::constant(RingPtr ring, const ParamRat& c)
{
    Poly p(std::move(ring));
    p.add_term(Monomial(p.ring_->size(), 0), c);
    return p;
}

Poly Poly::variable(RingPtr ring, const DiffVar& v)
{
    Poly p(std::move(ring));
    Monomial m(p.ring_->size(), 0);
    m[p.ring_->index_of(v)] = 1;
    p.add_term(m, ParamRat(1));
    return p;
}

Poly Poly::term(RingPtr ring, Monomial m, const ParamRat& c)
{
    Poly p(std::move(ring));
    p.add_term(m, c);
    return p;
}

bool Poly::is_constant() const noexcept
{
    if (terms_.empty()) {
        return true;
    }
    if (terms_.size() != 1) {
        return false;
    }
    const auto& m = terms_.begin()->first;
    return std::all_of(m.begin(), m.end(), [](auto e) { return e == 0; });
}

const Monomial& Poly::leading_monomial() const
{
    if (terms_.empty()) {
        throw Error(ErrorCode::ZeroPolynomial, "leading term of the zero polynomial");
    }
    return terms_.begin()->first;
}

const ParamRat& Poly::leading_coefficient() const
{
    if (terms_.empty()) {
        throw Error(ErrorCode::ZeroPolynomial, "leading coefficient of the zero polynomial");
    }
    return terms_.begin()->second;
}

ParamRat Poly::coefficient(const Monomial& m) const
{
    auto it = terms_.find(m);
    return it == terms_.end() ? ParamRat() : it->second;
}

int Poly::degree_in(std::size_t var) const noexcept
{
    int d = 0;
    for (const auto& [m, c] : terms_) {
        d = std::max<int>(d, m[var]);
    }
    return d;
}

bool Poly::uses_variable(std::size_t var) const noexcept
{
    return degree_in(var) > 0;
}

bool Poly::only_uses_from(std::size_t first) const noexcept
{
    for (const auto& [m, c] : terms_) {
        for (std::size_t i = 0; i < first && i < m.size(); ++i) {
            if (m[i] != 0) {
                return false;
            }
        }
    }
    return true;
}

void Poly::check_same_ring(const Poly& other) const
{
    if (ring_ == other.ring_) {
        return;
    }
    if (!ring_ || !other.ring_ || !(*ring_ == *other.ring_)) {
        throw Error(ErrorCode::RingMismatch, "polynomials live in different rings");
    }
}

void Poly::add_term(const Monomial& m, const ParamRat& c)
{
    if (c.is_zero()) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) {
            terms_.erase(it);
        }
    }
}

Poly Poly::operator-() const
{
    Poly r(ring_);
    for (const auto& [m, c] : terms_) {
        r.terms_.emplace_hint(r.terms_.end(), m, -c);
    }
    return r;
}

Poly& Poly::operator+=(const Poly& rhs)
{
    if (rhs.is_zero()) {
        return *this;
    }
    if (!ring_) {
        ring_ = rhs.ring_;
    }
    check_same_ring(rhs);
    for (const auto& [m, c] : rhs.terms_) {
        add_term(m, c);
    }
    return *this;
}

Poly& Poly::operator-=(const Poly& rhs)
{
    if (rhs.is_zero()) {
        return *this;
    }
    if (!ring_) {
        ring_ = rhs.ring_;
    }
    check_same_ring(rhs);
    for (const auto& [m, c] : rhs.terms_) {
        add_term(m, -c);
    }
    return *this;
}

Poly operator*(const Poly& a, const Poly& b)
{
    if (a.is_zero() || b.is_zero()) {
        return Poly(a.ring_ ? a.ring_ : b.ring_);
    }
    a.check_same_ring(b);
    Poly r(a.ring_);
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) {
            r.add_term(monomial_mul(ma, mb), ca * cb);
        }
    }
    return r;
}

Poly Poly::scaled(const ParamRat& c) const
{
    Poly r(ring_);
    if (c.is_zero()) {
        return r;
    }
    for (const auto& [m, v] : terms_) {
        r.terms_.emplace_hint(r.terms_.end(), m, v * c);
    }
    return r;
}

Poly Poly::mul_term(const Monomial& m, const ParamRat& c) const
{
    Poly r(ring_);
    if (c.is_zero()) {
        return r;
    }
    for (const auto& [mm, v] : terms_) {
        r.terms_.emplace_hint(r.terms_.end(), monomial_mul(mm, m), v * c);
    }
    return r;
}

void Poly::sub_mul_term(const Monomial& m, const ParamRat& c, const Poly& g)
{
    check_same_ring(g);
    for (const auto& [mg, vg] : g.terms_) {
        add_term(monomial_mul(mg, m), -(vg * c));
    }
}

Poly Poly::pow(unsigned e) const
{
    Poly result = constant(ring_, ParamRat(1));
    Poly base = *this;
    while (e != 0) {
        if (e & 1u) {
            result = result * base;
        }
        e >>= 1u;
        if (e != 0) {
            base = base * base;
        }
    }
    return result;
}

Poly Poly::monic() const
{
    ParamRat inv = leading_coefficient().inv();
    return scaled(inv);
}

Poly Poly::partial(std::size_t var) const
{
    Poly r(ring_);
    for (const auto& [m, c] : terms_) {
        if (m[var] == 0) {
            continue;
        }
        Monomial d = m;
        d[var] -= 1;
        r.add_term(d, c * ParamRat(static_cast<long>(m[var])));
    }
    return r;
}

Poly Poly::embed(const RingPtr& target) const
{
    if (ring_ == target) {
        return *this;
    }
    Poly r(target);
    for (const auto& [m, c] : terms_) {
        Monomial out(target->size(), 0);
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] != 0) {
                out[target->index_of(ring_->var(i))] = m[i];
            }
        }
        r.add_term(out, c);
    }
    return r;
}

bool Poly::operator==(const Poly& other) const
{
    if (is_zero() && other.is_zero()) {
        return true;
    }
    if (ring_ != other.ring_ && (!ring_ || !other.ring_ || !(*ring_ == *other.ring_))) {
        return false;
    }
    return terms_ == other.terms_;
}

double Poly::evaluate(std::span<const double> var_values, std::span<const double> params) const
{
    double sum = 0.0;
    for (const auto& [m, c] : terms_) {
        double t = c.evaluate(params);
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] != 0) {
                t *= std::pow(var_values[i], m[i]);
            }
        }
        sum += t;
    }
    return sum;
}

std::string monomial_to_string(const Monomial& m, const Ring& ring)
{
    std::string out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0) {
            continue;
        }
        if (!out.empty()) {
            out += '*';
        }
        out += ring.symbols().name(ring.var(i));
        if (m[i] > 1) {
            out += '^' + std::to_string(m[i]);
        }
    }
    return out.empty() ? "1" : out;
}

namespace {

bool needs_parens(const ParamRat& c)
{
    return c.num().size() > 1 || !c.den().is_constant();
}

} // namespace

std::string Poly::to_string() const
{
    if (terms_.empty()) {
        return "0";
    }
    const auto& names = ring_->symbols().params;
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        bool unit_monomial = std::all_of(m.begin(), m.end(), [](auto e) { return e == 0; });
        std::string mono = unit_monomial ? std::string() : monomial_to_string(m, *ring_);
        ParamRat coeff = c;
        bool negative = false;
        if (!needs_parens(c) && c.num().leading_coefficient() < 0) {
            negative = true;
            coeff = -c;
        }
        if (first) {
            os << (negative ? "-" : "");
        } else {
            os << (negative ? " - " : " + ");
        }
        first = false;
        std::string cs = coeff.to_string(names);
        if (coeff.den().is_constant() && needs_parens(coeff)) {
            cs = "(" + cs + ")";
        }
        if (unit_monomial) {
            os << cs;
        } else if (coeff.is_one()) {
            os << mono;
        } else {
            os << cs << '*' << mono;
        }
    }
    return os.str();
}

std::pair<Monomial, ParamRat> leading_term(const Poly& p)
{
    return {p.leading_monomial(), p.leading_coefficient()};
}

DivisionResult poly_divide(const Poly& f, std::span<const Poly> divisors)
{
    for (const auto& g : divisors) {
        if (g.is_zero()) {
            throw Error(ErrorCode::DivisionByZero, "division by the zero polynomial");
        }
        if (!f.is_zero() && f.ring() != g.ring() && !(*f.ring() == *g.ring())) {
            throw Error(ErrorCode::RingMismatch, "divisor lives in a different ring");
        }
    }
    DivisionResult out;
    for (const auto& g : divisors) {
        out.quotients.emplace_back(g.ring());
    }
    out.remainder = Poly(f.ring());
    Poly p = f;
    while (!p.is_zero()) {
        auto lm = p.leading_monomial();
        ParamRat lc = p.leading_coefficient();
        bool divided = false;
        for (std::size_t i = 0; i < divisors.size(); ++i) {
            const auto& g = divisors[i];
            if (monomial_divides(g.leading_monomial(), lm)) {
                Monomial q = monomial_div(lm, g.leading_monomial());
                ParamRat c = lc / g.leading_coefficient();
                out.quotients[i].add_term(q, c);
                p.sub_mul_term(q, c, g);
                divided = true;
                break;
            }
        }
        if (!divided) {
            out.remainder.add_term(lm, lc);
            p.add_term(lm, -lc);
        }
    }
    return out;
}

Poly normal_form(const Poly& f, std::span<const Poly> divisors)
{
    for (const auto& g : divisors) {
        if (!f.is_zero() && f.ring() != g.ring() && !(*f.ring() == *g.ring())) {
            throw Error(ErrorCode::RingMismatch, "divisor lives in a different ring");
        }
    }
    Poly rem(f.ring());
    Poly p = f;
    while (!p.is_zero()) {
        auto lm = p.leading_monomial();
        ParamRat lc = p.leading_coefficient();
        const Poly* hit = nullptr;
        for (const auto& g : divisors) {
            if (!g.is_zero() && monomial_divides(g.leading_monomial(), lm)) {
                hit = &g;
                break;
            }
        }
        if (hit != nullptr) {
            Monomial q = monomial_div(lm, hit->leading_monomial());
            ParamRat c = lc / hit->leading_coefficient();
            p.sub_mul_term(q, c, *hit);
        } else {
            rem.add_term(lm, lc);
            p.add_term(lm, -lc);
        }
    }
    return rem;
}

} // namespace parvar
