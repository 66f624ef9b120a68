#pragma once

#include <span>
#include <string>
#include <vector>

#include "parvar/model/model.hpp"

namespace parvar {

/// A Poly with its parameters fixed to numbers, for fast repeated evaluation.
class NumericPoly {
public:
    NumericPoly() = default;
    NumericPoly(const Poly& p, std::span<const double> params);

    double operator()(std::span<const double> vars) const;

private:
    struct Term {
        double coeff;
        std::vector<std::pair<std::size_t, unsigned>> powers;
    };
    std::vector<Term> terms_;
};

/// Inputs given as polynomials in t: coeffs[m][k] multiplies t^k.
struct InputSignal {
    std::vector<std::vector<double>> coeffs;

    bool empty() const { return coeffs.empty(); }
    /// jets[m][k] = d^k u_m / dt^k at t for k = 0..order.
    std::vector<std::vector<double>> jets(double t, int order) const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::vector<double> outputs;
    std::vector<double> params;
    std::vector<double> x0;
    /// RK4 substeps per unit time actually used and whether step halving met
    /// its tolerance.
    double steps_per_unit = 0.0;
    bool converged = false;
};

/// Classical RK4 from grid.front() with x(grid.front()) = x0, refining the
/// step until halving it changes the outputs by less than 1e-8 relative
/// (at most three halvings). Throws BlowUp on non-finite values.
Trajectory integrate_model(const ModelSpec& model, std::span<const double> params, std::span<const double> x0,
                           std::span<const double> grid, const InputSignal& inputs = {});

/// RK4 with a fixed number of substeps per unit time and no refinement.
Trajectory integrate_fixed_step(const ModelSpec& model, std::span<const double> params, std::span<const double> x0,
                                std::span<const double> grid, double steps_per_unit, const InputSignal& inputs = {});

struct JetSample {
    double t = 0.0;
    std::vector<double> y;
    std::vector<std::vector<double>> u;
    std::string source;
};

/// Symbolic Lie derivatives of the output and the states along the model,
/// built once and evaluated numerically.
class JetMap {
public:
    JetMap(const ModelSpec& model, int order);

    int order() const { return order_; }
    /// Highest input derivative needed for the output jet (-1 if none).
    int input_order_needed() const { return input_needed_; }

    std::vector<double> output_jet(std::span<const double> params, std::span<const double> state,
                                   std::span<const std::vector<double>> u_jets) const;
    /// states_jet[j][k] = x_j^(k).
    std::vector<std::vector<double>> state_jets(std::span<const double> params, std::span<const double> state,
                                                std::span<const std::vector<double>> u_jets) const;

    const std::vector<Poly>& output_polys() const { return y_; }

private:
    std::vector<double> pack(std::span<const double> state, std::span<const std::vector<double>> u_jets) const;

    int order_;
    int input_needed_ = -1;
    RingPtr ring_;
    std::size_t n_states_;
    std::size_t n_inputs_;
    std::vector<Poly> y_;
    std::vector<std::vector<Poly>> x_;
};

/// Jet of y at state `state` using JetMap; u_jets must reach the order the
/// output jet needs (JetOrderMismatch otherwise).
JetSample jet_at(const ModelSpec& model, std::span<const double> params, std::span<const double> state,
                 std::span<const std::vector<double>> u_jets, double t, int order);

/// Closed-form viral load x3(t) and its first `order` derivatives, with
/// x2(T0) = (a7/a6) x3(T0). Throws DegenerateEigenvalues unless the
/// discriminant is positive.
std::vector<double> exact_viral_solution(double a4, double a5, double a7, double t0, double x3_t0, double t,
                                         int order = 2);

struct FiniteDifferenceJets {
    /// jets[i][k] = k-th derivative estimate at sample i.
    std::vector<std::vector<double>> jets;
    /// True where a one-sided stencil was used.
    std::vector<bool> one_sided;
};

/// Second-order finite differences on a uniform grid: central stencils in the
/// interior, one-sided near the ends.
FiniteDifferenceJets central_difference(std::span<const double> times, std::span<const double> values, int order);

} // namespace parvar
