#pragma once

#include <span>
#include <string>
#include <vector>

#include "parvar/groebner/groebner.hpp"
#include "parvar/model/model.hpp"

namespace parvar {

/// sum_l c_l(a) f_l = rhs, where the c_l depend on the parameters and rhs has
/// parameter-free coefficients.
struct IOEquationBasis {
    /// Differentiation order needed to reach the equation.
    int order = 0;
    RingPtr ring;
    /// Parameter-dependent monomials, lex ascending.
    std::vector<Monomial> monos;
    std::vector<ParamRat> coeffs;
    Poly rhs;
    /// Monic state-free polynomial: sum c_l f_l - rhs.
    Poly full;

    std::size_t size() const { return monos.size(); }
};

struct IODerivation {
    IOEquationBasis basis;
    ProlongedSystem system;
    ReducedGB gb;
};

/// Raises the prolongation order until the reduced basis contains a
/// state-free element.
IODerivation derive_io_basis(const ModelSpec& model, const GbOptions& opts = {});

/// Scales a state-free polynomial to be monic and splits it into
/// parameter-dependent terms and the parameter-free right-hand side.
IOEquationBasis normalize_io(const Poly& p, int order);

/// Value of a monomial of the IO ring given y^(0..) and per-input jets.
double monomial_value(const Monomial& m, const Ring& ring, std::span<const double> y_jet,
                      std::span<const std::vector<double>> u_jets);

/// Highest derivative of the output / of any input appearing in the equation.
int output_jet_order(const IOEquationBasis& b);
int input_jet_order(const IOEquationBasis& b);

/// Stable text form used by the CLI and golden tests.
std::string to_canonical_text(const IOEquationBasis& b);

} // namespace parvar
