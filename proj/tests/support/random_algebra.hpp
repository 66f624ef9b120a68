#pragma once

#include <memory>
#include <random>

#include "parvar/algebra/poly.hpp"

namespace parvar::testing {

inline ParamPoly random_param_poly(std::mt19937_64& rng, std::size_t nparams, int max_terms, int max_deg)
{
    std::uniform_int_distribution<int> nterms(1, max_terms);
    std::uniform_int_distribution<int> deg(0, max_deg);
    std::uniform_int_distribution<int> coef(-6, 6);
    std::uniform_int_distribution<int> dist_den(1, 4);
    ParamPoly p;
    int n = nterms(rng);
    for (int t = 0; t < n; ++t) {
        ParamExponents e{};
        for (std::size_t i = 0; i < nparams; ++i) {
            e[i] = static_cast<std::uint16_t>(deg(rng));
        }
        Rational c(coef(rng), dist_den(rng));
        c.canonicalize();
        p += ParamPoly::monomial(e, c);
    }
    return p;
}

inline ParamRat random_param_rat(std::mt19937_64& rng, std::size_t nparams)
{
    ParamPoly den;
    while (den.is_zero()) {
        den = random_param_poly(rng, nparams, 2, 1);
    }
    return ParamRat(random_param_poly(rng, nparams, 3, 2), den);
}

inline Poly random_poly(std::mt19937_64& rng, const RingPtr& ring, int max_terms, int max_deg, bool param_coeffs)
{
    std::uniform_int_distribution<int> nterms(1, max_terms);
    std::uniform_int_distribution<int> deg(0, max_deg);
    std::uniform_int_distribution<int> coef(-5, 5);
    Poly p(ring);
    int n = nterms(rng);
    for (int t = 0; t < n; ++t) {
        Monomial m(ring->size());
        for (auto& e : m) {
            e = static_cast<std::uint16_t>(deg(rng));
        }
        ParamRat c = param_coeffs ? ParamRat(random_param_poly(rng, 2, 2, 1)) : ParamRat(coef(rng));
        p.add_term(m, c);
    }
    return p;
}

/// Ring of n state variables x1..xn ordered x_n > ... > x_1 plus nothing else.
inline RingPtr small_ring(std::size_t n, std::vector<std::string> params = {"a1", "a2"})
{
    auto symbols = std::make_shared<SymbolTable>();
    std::vector<DiffVar> vars;
    for (std::size_t i = 0; i < n; ++i) {
        symbols->states.push_back("x" + std::to_string(i + 1));
    }
    for (std::size_t i = n; i-- > 0;) {
        vars.push_back(DiffVar{VarKind::State, static_cast<std::uint16_t>(i), 0});
    }
    symbols->params = std::move(params);
    return std::make_shared<Ring>(std::move(vars), std::move(symbols));
}

} // namespace parvar::testing
