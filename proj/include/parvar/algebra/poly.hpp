#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "parvar/algebra/param_rat.hpp"

namespace parvar {

enum class VarKind : std::uint8_t { State, Output, Input };

/// A base variable (state x_k, input u_m, or the output y) together with a
/// derivative order. These are the indeterminates of the truncated ring.
struct DiffVar {
    VarKind kind = VarKind::State;
    std::uint16_t index = 0;
    std::uint16_t order = 0;

    auto operator<=>(const DiffVar&) const = default;

    DiffVar differentiated() const { return DiffVar{kind, index, static_cast<std::uint16_t>(order + 1)}; }
};

/// Names of the base symbols of one model.
struct SymbolTable {
    std::vector<std::string> states;
    std::vector<std::string> inputs;
    std::string output = "y";
    std::vector<std::string> params;

    std::string base_name(const DiffVar& v) const;
    /// "y", "y'", "y''", ...
    std::string name(const DiffVar& v) const;
};

/// Ordered list of ring variables, highest first. This doubles as the
/// lexicographic monomial order on the ring.
class Ring {
public:
    Ring(std::vector<DiffVar> vars, std::shared_ptr<const SymbolTable> symbols);

    std::size_t size() const noexcept { return vars_.size(); }
    const std::vector<DiffVar>& vars() const noexcept { return vars_; }
    const DiffVar& var(std::size_t i) const { return vars_.at(i); }
    const SymbolTable& symbols() const noexcept { return *symbols_; }
    const std::shared_ptr<const SymbolTable>& symbols_ptr() const noexcept { return symbols_; }

    bool contains(const DiffVar& v) const { return index_.count(v) != 0; }
    /// Position of v in the order; throws UnknownVariable if absent.
    std::size_t index_of(const DiffVar& v) const;

    bool operator==(const Ring& other) const { return vars_ == other.vars_ && symbols_ == other.symbols_; }

private:
    std::vector<DiffVar> vars_;
    std::map<DiffVar, std::size_t> index_;
    std::shared_ptr<const SymbolTable> symbols_;
};

using RingPtr = std::shared_ptr<const Ring>;
using MonomialOrder = Ring;

/// Dense exponent vector indexed by ring position. The zero vector is the
/// monomial 1.
using Monomial = std::vector<std::uint16_t>;

/// Sparse monomial keyed by variable, for callers that do not hold a ring.
using VarPowers = std::map<DiffVar, int>;

enum class Ordering { Less, Equal, Greater };

/// Pure lexicographic comparison of dense monomials of the same ring.
Ordering lex_compare(const Monomial& a, const Monomial& b);
/// Same, for sparse monomials; throws UnknownVariable for variables outside `ord`.
Ordering lex_compare(const VarPowers& a, const VarPowers& b, const MonomialOrder& ord);

bool monomial_divides(const Monomial& d, const Monomial& m);
Monomial monomial_lcm(const Monomial& a, const Monomial& b);
Monomial monomial_mul(const Monomial& a, const Monomial& b);
Monomial monomial_div(const Monomial& m, const Monomial& d);
bool monomial_coprime(const Monomial& a, const Monomial& b);

/// Sparse multivariate polynomial over Q(a) in the variables of a Ring.
class Poly {
public:
    using TermMap = std::map<Monomial, ParamRat, std::greater<>>;

    Poly() = default;
    explicit Poly(RingPtr ring) : ring_(std::move(ring)) {}

    static Poly constant(RingPtr ring, const ParamRat& c);
    static Poly variable(RingPtr ring, const DiffVar& v);
    static Poly term(RingPtr ring, Monomial m, const ParamRat& c);

    const RingPtr& ring() const noexcept { return ring_; }
    const TermMap& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }
    /// True if the only monomial is 1.
    bool is_constant() const noexcept;

    const Monomial& leading_monomial() const;
    const ParamRat& leading_coefficient() const;
    ParamRat coefficient(const Monomial& m) const;

    int degree_in(std::size_t var) const noexcept;
    bool uses_variable(std::size_t var) const noexcept;
    /// True if every occurring variable has ring index >= first.
    bool only_uses_from(std::size_t first) const noexcept;

    Poly operator-() const;
    Poly& operator+=(const Poly& rhs);
    Poly& operator-=(const Poly& rhs);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly scaled(const ParamRat& c) const;
    /// this * c * m
    Poly mul_term(const Monomial& m, const ParamRat& c) const;
    /// this -= c * m * g, the reduction step used by division.
    void sub_mul_term(const Monomial& m, const ParamRat& c, const Poly& g);
    Poly pow(unsigned e) const;

    /// Divides by the leading coefficient. Throws ZeroPolynomial on zero.
    Poly monic() const;
    Poly partial(std::size_t var) const;

    /// Re-expresses the polynomial in another ring containing its variables.
    Poly embed(const RingPtr& target) const;

    bool operator==(const Poly& other) const;

    /// Evaluates with one value per ring variable and numeric parameters.
    double evaluate(std::span<const double> var_values, std::span<const double> params) const;

    std::string to_string() const;

    void add_term(const Monomial& m, const ParamRat& c);

private:
    void check_same_ring(const Poly& other) const;

    RingPtr ring_;
    TermMap terms_;
};

/// Leading monomial and coefficient; throws ZeroPolynomial.
std::pair<Monomial, ParamRat> leading_term(const Poly& p);

std::string monomial_to_string(const Monomial& m, const Ring& ring);

struct DivisionResult {
    std::vector<Poly> quotients;
    Poly remainder;
};

/// Multivariate division: f = sum q_i g_i + r with no term of r divisible by
/// any leading monomial of the divisors.
DivisionResult poly_divide(const Poly& f, std::span<const Poly> divisors);

/// Remainder of poly_divide without tracking quotients.
Poly normal_form(const Poly& f, std::span<const Poly> divisors);

} // namespace parvar
