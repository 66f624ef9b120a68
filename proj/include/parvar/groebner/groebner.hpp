#pragma once

#include <cstddef>
#include <vector>

#include "parvar/algebra/poly.hpp"

namespace parvar {

struct IdealGens {
    std::vector<Poly> gens;
    RingPtr ring;
};

struct GbOptions {
    std::size_t max_pairs = 500000;
    std::size_t max_basis = 5000;
    /// Largest polynomial (term count) allowed during reduction.
    std::size_t max_terms = 200000;
    /// Coprime and chain criteria. Off only for cross-checking.
    bool use_criteria = true;
};

struct GbStats {
    std::size_t pairs_reduced = 0;
    std::size_t pairs_skipped = 0;
    std::size_t zero_reductions = 0;
};

struct ReducedGB {
    std::vector<Poly> basis;
    RingPtr ring;
};

/// lcm/lt(f) * f - lcm/lt(g) * g with monic leading terms.
Poly s_polynomial(const Poly& f, const Poly& g);

/// A Groebner basis of the ideal (not reduced). Elements are monic.
/// Throws ResourceExhausted when a cap in `opts` is hit.
std::vector<Poly> buchberger(const IdealGens& ideal, const GbOptions& opts = {}, GbStats* stats = nullptr);

/// Turns a Groebner basis into the reduced one, sorted by leading monomial
/// from highest to lowest.
ReducedGB reduce_basis(const std::vector<Poly>& gb, const RingPtr& ring);

ReducedGB reduced_groebner_basis(const IdealGens& ideal, const GbOptions& opts = {});

/// Elements whose variables all lie in `keep`, which must be a suffix of the
/// ring order. Throws InvalidBlock otherwise.
std::vector<Poly> elimination_subset(const ReducedGB& gb, const std::vector<DiffVar>& keep);

/// True if every S-polynomial of the set reduces to zero.
bool is_groebner_basis(const std::vector<Poly>& g);

} // namespace parvar
