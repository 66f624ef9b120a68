#include "parvar/extension/extension.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "parvar/error.hpp"

namespace parvar {

Poly clear_denominators(const Poly& p)
{
    if (p.is_zero()) {
        return p;
    }
    ParamPoly l(1);
    for (const auto& [m, c] : p.terms()) {
        ParamPoly g = gcd(l, c.den());
        l = l * *divide_exact(c.den(), g);
    }
    Poly q = p.scaled(ParamRat(l));
    ParamPoly content_poly;
    for (const auto& [m, c] : q.terms()) {
        content_poly = content_poly.is_zero() ? c.num() : gcd(content_poly, c.num());
    }
    q = q.scaled(ParamRat(ParamPoly(1), content_poly));
    // remaining denominators are constants; make the coefficients coprime integers
    Integer num_gcd = 0;
    Integer den_lcm = 1;
    for (const auto& [m, c] : q.terms()) {
        Rational d = c.den().constant_term();
        for (const auto& [e, r] : c.num().terms()) {
            Rational v = r / d;
            mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), v.get_num_mpz_t());
            mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), v.get_den_mpz_t());
        }
    }
    Rational k(den_lcm, num_gcd);
    k.canonicalize();
    if (q.leading_coefficient().num().leading_coefficient() < 0) {
        k = -k;
    }
    return q.scaled(ParamRat(k));
}

std::vector<ExtensionSet> extension_sets(const ModelSpec& /*model*/, const ReducedGB& gb)
{
    const Ring& ring = *gb.ring;
    std::vector<ExtensionSet> out;
    for (std::size_t idx = 0; idx < ring.size() && ring.var(idx).kind == VarKind::State; ++idx) {
        ExtensionSet set;
        set.j = idx + 1;
        set.z = ring.var(idx);
        for (const auto& g : gb.basis) {
            if (!g.only_uses_from(idx) || !g.uses_variable(idx)) {
                continue;
            }
            Poly c = clear_denominators(g);
            int top = c.degree_in(idx);
            Poly lead(gb.ring);
            for (const auto& [m, coef] : c.terms()) {
                if (m[idx] == top) {
                    Monomial r = m;
                    r[idx] = 0;
                    lead.add_term(r, coef);
                }
            }
            if (std::find(set.leading.begin(), set.leading.end(), lead) == set.leading.end()) {
                set.leading.push_back(lead);
            }
        }
        if (set.leading.empty()) {
            throw Error(ErrorCode::MissingLeading,
                        "no basis element solves for " + ring.symbols().name(set.z) + " (z" + std::to_string(set.j) + ")");
        }
        out.push_back(std::move(set));
    }
    return out;
}

bool is_unit_under(const ParamPoly& p, std::span<const ParamPoly> assumptions)
{
    if (p.is_zero()) {
        return false;
    }
    ParamPoly r = p;
    bool progress = true;
    while (!r.is_constant() && progress) {
        progress = false;
        for (const auto& a : assumptions) {
            if (a.is_constant()) {
                continue;
            }
            if (auto q = divide_exact(r, a)) {
                r = *q;
                progress = true;
            }
        }
    }
    return r.is_constant();
}

ExtensionReport check_extension(const std::vector<ExtensionSet>& sets, std::span<const ParamPoly> assumptions)
{
    ExtensionReport rep;
    rep.certified = true;
    for (const auto& s : sets) {
        ExtensionRecord rec{s, Verdict::Undetermined};
        for (const auto& p : s.leading) {
            if (!p.is_constant()) {
                continue;
            }
            const ParamRat& c = p.leading_coefficient();
            if (c.is_constant()) {
                rec.verdict = Verdict::EmptyByConstant;
                break;
            }
            if (c.den().is_constant() && is_unit_under(c.num(), assumptions)) {
                rec.verdict = Verdict::EmptyByAssumption;
            }
        }
        if (rec.verdict == Verdict::Undetermined) {
            rep.certified = false;
        }
        rep.records.push_back(std::move(rec));
    }
    return rep;
}

std::string verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::EmptyByConstant: return "EmptyByConstant";
    case Verdict::EmptyByAssumption: return "EmptyByAssumption";
    case Verdict::Undetermined: return "Undetermined";
    }
    return "?";
}

std::string render_report(const ExtensionReport& report)
{
    std::ostringstream os;
    os << "j\tz_j\tP_j\tverdict\n";
    for (auto it = report.records.rbegin(); it != report.records.rend(); ++it) {
        const auto& s = it->set;
        const Ring& ring = *s.leading.front().ring();
        os << s.j << '\t' << ring.symbols().name(s.z) << "\t{";
        for (std::size_t i = 0; i < s.leading.size(); ++i) {
            const Poly& p = s.leading[i];
            os << (i ? ", " : "")
               << (p.is_constant() ? p.leading_coefficient().to_string(ring.symbols().params) : p.to_string());
        }
        os << "}\t" << verdict_name(it->verdict) << '\n';
    }
    os << "overall: " << (report.certified ? "Certified" : "Inconclusive") << '\n';
    return os.str();
}

std::vector<double> reconstruct_jet(const ReducedGB& gb, std::span<const double> params, std::span<const double> y_jet,
                                    std::span<const std::vector<double>> u_jets)
{
    const Ring& ring = *gb.ring;
    std::vector<double> vals(ring.size(), 0.0);
    std::size_t nstate = 0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const DiffVar& v = ring.var(i);
        if (v.kind == VarKind::State) {
            nstate = i + 1;
        } else if (v.kind == VarKind::Output) {
            if (v.order >= y_jet.size()) {
                throw Error(ErrorCode::JetOrderMismatch, "output jet too short for reconstruction");
            }
            vals[i] = y_jet[v.order];
        } else {
            if (v.index >= u_jets.size() || v.order >= u_jets[v.index].size()) {
                throw Error(ErrorCode::JetOrderMismatch, "input jet too short for reconstruction");
            }
            vals[i] = u_jets[v.index][v.order];
        }
    }
    for (std::size_t idx = nstate; idx-- > 0;) {
        const Poly* best = nullptr;
        for (const auto& g : gb.basis) {
            if (g.only_uses_from(idx) && g.degree_in(idx) == 1) {
                best = &g;
                break;
            }
        }
        if (best == nullptr) {
            throw Error(ErrorCode::MissingLeading,
                        "no element linear in " + ring.symbols().name(ring.var(idx)) + " to reconstruct it");
        }
        // g = a * z + b with a, b free of z
        Poly a(best->ring());
        Poly b(best->ring());
        for (const auto& [m, c] : best->terms()) {
            if (m[idx] == 1) {
                Monomial r = m;
                r[idx] = 0;
                a.add_term(r, c);
            } else {
                b.add_term(m, c);
            }
        }
        double av = a.evaluate(vals, params);
        double bv = b.evaluate(vals, params);
        if (!std::isfinite(av) || !std::isfinite(bv) || av == 0.0) {
            throw Error(ErrorCode::IllConditioned,
                        "leading coefficient of " + ring.symbols().name(ring.var(idx)) + " vanishes at these parameters");
        }
        vals[idx] = -bv / av;
    }
    return vals;
}

} // namespace parvar
