#include "parvar/ioeq/io_equation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "parvar/error.hpp"

namespace parvar {

IODerivation derive_io_basis(const ModelSpec& model, const GbOptions& opts)
{
    const int n = static_cast<int>(model.num_states());
    for (int i = 1; i <= n; ++i) {
        ProlongedSystem sys = prolong(model, i);
        ReducedGB gb = reduced_groebner_basis({sys.gens, sys.ring}, opts);
        std::vector<DiffVar> keep;
        for (const auto& v : sys.ring->vars()) {
            if (v.kind != VarKind::State) {
                keep.push_back(v);
            }
        }
        std::vector<Poly> s = elimination_subset(gb, keep);
        if (s.empty()) {
            continue;
        }
        if (s.size() > 1) {
            std::ostringstream os;
            os << s.size() << " state-free elements at order " << i << ":";
            for (const auto& p : s) {
                os << "\n  " << p.to_string();
            }
            throw Error(ErrorCode::MultipleIOEquations, os.str());
        }
        bool has_output = false;
        for (std::size_t k = 0; k < sys.ring->size(); ++k) {
            if (sys.ring->var(k).kind == VarKind::Output && s[0].uses_variable(k)) {
                has_output = true;
            }
        }
        if (!has_output) {
            throw Error(ErrorCode::InputOnlyRelation,
                        "the model constrains its inputs: " + s[0].to_string() + " = 0");
        }
        IODerivation out{normalize_io(s[0], i), std::move(sys), std::move(gb)};
        return out;
    }
    throw Error(ErrorCode::InternalError, "no state-free element up to order " + std::to_string(n));
}

IOEquationBasis normalize_io(const Poly& p, int order)
{
    if (p.is_zero()) {
        throw Error(ErrorCode::ZeroPolynomial, "input-output polynomial is zero");
    }
    IOEquationBasis b;
    b.order = order;
    b.ring = p.ring();
    b.full = p.monic();
    b.rhs = Poly(b.ring);
    // TermMap is descending; walk it backwards for lex ascending monomials.
    for (auto it = b.full.terms().rbegin(); it != b.full.terms().rend(); ++it) {
        if (it->second.is_constant()) {
            b.rhs.add_term(it->first, -it->second);
        } else {
            b.monos.push_back(it->first);
            b.coeffs.push_back(it->second);
        }
    }
    if (b.monos.empty()) {
        throw Error(ErrorCode::NoParameterDependence,
                    "no coefficient of " + b.full.to_string() + " depends on the parameters");
    }
    return b;
}

double monomial_value(const Monomial& m, const Ring& ring, std::span<const double> y_jet,
                      std::span<const std::vector<double>> u_jets)
{
    double v = 1.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0) {
            continue;
        }
        const DiffVar& d = ring.var(i);
        double x = 0.0;
        if (d.kind == VarKind::Output) {
            if (d.order >= y_jet.size()) {
                throw Error(ErrorCode::JetOrderMismatch, "output jet is shorter than order " + std::to_string(d.order));
            }
            x = y_jet[d.order];
        } else if (d.kind == VarKind::Input) {
            if (d.index >= u_jets.size() || d.order >= u_jets[d.index].size()) {
                throw Error(ErrorCode::JetOrderMismatch,
                            "input jet of " + ring.symbols().inputs.at(d.index) + " is shorter than order " + std::to_string(d.order));
            }
            x = u_jets[d.index][d.order];
        } else {
            throw Error(ErrorCode::InternalError, "state variable in an input-output monomial");
        }
        v *= std::pow(x, m[i]);
    }
    return v;
}

namespace {

int max_order(const IOEquationBasis& b, VarKind kind)
{
    int best = -1;
    for (std::size_t i = 0; i < b.ring->size(); ++i) {
        const DiffVar& d = b.ring->var(i);
        if (d.kind == kind && b.full.uses_variable(i)) {
            best = std::max<int>(best, d.order);
        }
    }
    return best;
}

} // namespace

int output_jet_order(const IOEquationBasis& b)
{
    return max_order(b, VarKind::Output);
}

int input_jet_order(const IOEquationBasis& b)
{
    return max_order(b, VarKind::Input);
}

std::string to_canonical_text(const IOEquationBasis& b)
{
    const auto& names = b.ring->symbols().params;
    std::ostringstream os;
    os << "order: " << b.order << "\n";
    os << "equation: " << b.full.to_string() << " = 0\n";
    os << "terms:\n";
    for (std::size_t l = 0; l < b.monos.size(); ++l) {
        os << "  c" << (l + 1) << ": " << monomial_to_string(b.monos[l], *b.ring) << " | " << b.coeffs[l].to_string(names)
           << "\n";
    }
    os << "rhs: " << b.rhs.to_string() << "\n";
    return os.str();
}

} // namespace parvar
