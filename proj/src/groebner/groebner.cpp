#include "parvar/groebner/groebner.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "parvar/error.hpp"

namespace parvar {

namespace {

struct Pair {
    std::size_t i;
    std::size_t j;
    Monomial lcm;
};

std::size_t key(std::size_t i, std::size_t j)
{
    return i < j ? (j << 32) | i : (i << 32) | j;
}

[[noreturn]] void exhausted(const std::string& what, std::size_t done, std::size_t basis, std::size_t pending)
{
    std::ostringstream os;
    os << what << " (pairs reduced " << done << ", basis size " << basis << ", pairs pending " << pending << ")";
    throw Error(ErrorCode::ResourceExhausted, os.str());
}

// Full reduction against g, with a cap on intermediate size.
Poly reduce_full(Poly p, const std::vector<Poly>& g, std::size_t max_terms, std::size_t done, std::size_t pending)
{
    Poly rem(p.ring());
    while (!p.is_zero()) {
        const Monomial& lm = p.leading_monomial();
        const Poly* hit = nullptr;
        for (const auto& h : g) {
            if (monomial_divides(h.leading_monomial(), lm)) {
                hit = &h;
                break;
            }
        }
        if (hit != nullptr) {
            Monomial q = monomial_div(lm, hit->leading_monomial());
            ParamRat c = p.leading_coefficient() / hit->leading_coefficient();
            p.sub_mul_term(q, c, *hit);
            if (p.size() + rem.size() > max_terms) {
                exhausted("term cap exceeded during reduction", done, g.size(), pending);
            }
        } else {
            Monomial m = lm;
            ParamRat c = p.leading_coefficient();
            rem.add_term(m, c);
            p.add_term(m, -c);
        }
    }
    return rem;
}

} // namespace

Poly s_polynomial(const Poly& f, const Poly& g)
{
    const Monomial& lf = f.leading_monomial();
    const Monomial& lg = g.leading_monomial();
    Monomial l = monomial_lcm(lf, lg);
    Poly a = f.mul_term(monomial_div(l, lf), f.leading_coefficient().inv());
    Poly b = g.mul_term(monomial_div(l, lg), g.leading_coefficient().inv());
    return a - b;
}

std::vector<Poly> buchberger(const IdealGens& ideal, const GbOptions& opts, GbStats* stats)
{
    GbStats local;
    GbStats& st = stats != nullptr ? *stats : local;
    std::vector<Poly> g;
    std::vector<Pair> pairs;
    std::set<std::size_t> pending;

    auto add = [&](const Poly& p) {
        std::size_t n = g.size();
        g.push_back(p.monic());
        if (g.size() > opts.max_basis) {
            exhausted("basis size cap exceeded", st.pairs_reduced, g.size(), pairs.size());
        }
        for (std::size_t i = 0; i < n; ++i) {
            pairs.push_back({i, n, monomial_lcm(g[i].leading_monomial(), g[n].leading_monomial())});
            pending.insert(key(i, n));
        }
    };

    for (const auto& p : ideal.gens) {
        if (p.is_zero()) {
            continue;
        }
        Poly r = reduce_full(p, g, opts.max_terms, 0, pairs.size());
        if (!r.is_zero()) {
            add(r);
        }
    }

    while (!pairs.empty()) {
        auto best = std::min_element(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
            if (a.lcm != b.lcm) {
                return a.lcm < b.lcm;
            }
            return std::tie(a.j, a.i) < std::tie(b.j, b.i);
        });
        Pair pr = *best;
        *best = pairs.back();
        pairs.pop_back();
        pending.erase(key(pr.i, pr.j));

        if (opts.use_criteria) {
            const Poly& f = g[pr.i];
            const Poly& h = g[pr.j];
            if (monomial_coprime(f.leading_monomial(), h.leading_monomial())) {
                ++st.pairs_skipped;
                continue;
            }
            bool chain = false;
            for (std::size_t k = 0; k < g.size() && !chain; ++k) {
                if (k == pr.i || k == pr.j) {
                    continue;
                }
                if (monomial_divides(g[k].leading_monomial(), pr.lcm) && !pending.contains(key(pr.i, k))
                    && !pending.contains(key(pr.j, k))) {
                    chain = true;
                }
            }
            if (chain) {
                ++st.pairs_skipped;
                continue;
            }
        }

        if (++st.pairs_reduced > opts.max_pairs) {
            exhausted("S-pair cap exceeded", st.pairs_reduced - 1, g.size(), pairs.size());
        }
        Poly r = reduce_full(s_polynomial(g[pr.i], g[pr.j]), g, opts.max_terms, st.pairs_reduced, pairs.size());
        if (r.is_zero()) {
            ++st.zero_reductions;
            continue;
        }
        add(r);
    }
    return g;
}

ReducedGB reduce_basis(const std::vector<Poly>& gb, const RingPtr& ring)
{
    std::vector<Poly> g;
    for (const auto& p : gb) {
        if (!p.is_zero()) {
            g.push_back(p.monic());
        }
    }
    std::sort(g.begin(), g.end(), [](const Poly& a, const Poly& b) {
        return a.leading_monomial() < b.leading_monomial();
    });
    std::vector<Poly> minimal;
    for (const auto& p : g) {
        bool redundant = std::any_of(minimal.begin(), minimal.end(), [&](const Poly& q) {
            return monomial_divides(q.leading_monomial(), p.leading_monomial());
        });
        if (!redundant) {
            minimal.push_back(p);
        }
    }
    ReducedGB out;
    out.ring = ring;
    for (std::size_t i = 0; i < minimal.size(); ++i) {
        std::vector<Poly> others;
        for (std::size_t j = 0; j < minimal.size(); ++j) {
            if (j != i) {
                others.push_back(minimal[j]);
            }
        }
        const Poly& p = minimal[i];
        Poly lead = Poly::term(p.ring(), p.leading_monomial(), ParamRat(1));
        Poly tail = p - lead;
        out.basis.push_back(lead + normal_form(tail, others));
    }
    std::sort(out.basis.begin(), out.basis.end(), [](const Poly& a, const Poly& b) {
        return a.leading_monomial() > b.leading_monomial();
    });
    return out;
}

ReducedGB reduced_groebner_basis(const IdealGens& ideal, const GbOptions& opts)
{
    return reduce_basis(buchberger(ideal, opts), ideal.ring);
}

std::vector<Poly> elimination_subset(const ReducedGB& gb, const std::vector<DiffVar>& keep)
{
    const Ring& ring = *gb.ring;
    std::set<std::size_t> idx;
    for (const auto& v : keep) {
        if (!ring.contains(v)) {
            throw Error(ErrorCode::InvalidBlock, "variable " + ring.symbols().name(v) + " is not in the ring");
        }
        idx.insert(ring.index_of(v));
    }
    std::size_t first = ring.size() - idx.size();
    if (!idx.empty() && *idx.begin() != first) {
        throw Error(ErrorCode::InvalidBlock, "kept variables are not the lowest block of the order");
    }
    std::vector<Poly> out;
    for (const auto& p : gb.basis) {
        if (p.only_uses_from(first)) {
            out.push_back(p);
        }
    }
    return out;
}

bool is_groebner_basis(const std::vector<Poly>& g)
{
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = i + 1; j < g.size(); ++j) {
            if (!normal_form(s_polynomial(g[i], g[j]), g).is_zero()) {
                return false;
            }
        }
    }
    return true;
}

} // namespace parvar
