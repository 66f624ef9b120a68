#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "parvar/ioeq/io_equation.hpp"

namespace parvar {

/// Output (and input) jets sampled at a set of time points.
struct DataSet {
    std::vector<double> times;
    /// y_jet[i][k] = y^(k)(t_i)
    std::vector<std::vector<double>> y_jet;
    /// u_jet[i][m][k] = u_m^(k)(t_i)
    std::vector<std::vector<std::vector<double>>> u_jet;
    std::vector<std::string> source;
    std::string units = "days";

    std::size_t size() const { return times.size(); }
};

/// CSV with '#'-prefixed metadata lines (including "# units: <unit>"),
/// header "t,y,y1,...,yL,<u>_0,...,source".
DataSet read_dataset_csv(const std::filesystem::path& path, const SymbolTable& symbols);
DataSet parse_dataset_csv(std::istream& in, const SymbolTable& symbols);
void write_dataset_csv(std::ostream& out, const DataSet& data, const SymbolTable& symbols,
                       const std::vector<std::string>& metadata = {});

struct LinearSystem {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd rhs;
};

/// Rows are time points, columns the IO monomials.
LinearSystem build_linear_system(const IOEquationBasis& basis, const DataSet& data);

struct CoefficientSolve {
    Eigen::VectorXd v;
    double residual = 0.0;
    double cond = 0.0;
};

/// Condition number of the column-equilibrated matrix (2-norm).
double condition_estimate(const Eigen::MatrixXd& m);

/// Square systems by LU, overdetermined ones by least squares. Throws
/// InsufficientData if there are fewer rows than columns and IllConditioned
/// if the condition estimate exceeds `cond_limit`.
CoefficientSolve solve_coefficients(const LinearSystem& sys, double cond_limit = 1e8);

struct VarietyConstraints {
    std::vector<std::string> param_names;
    std::vector<ParamRat> coeffs;
    std::vector<std::string> monomials;
    std::vector<double> v;
    std::vector<Rational> v_exact;
    double residual = 0.0;
    double cond = 0.0;
    /// num_l(a) - v_l den_l(a) = 0
    std::vector<ParamPoly> equations;
    std::vector<ParamPoly> assumptions;
};

/// c_l(a) = v_l cleared of denominators. v is rationalized from the shortest
/// round-trip decimal, or rounded to `decimals` places.
VarietyConstraints variety_constraints(const IOEquationBasis& basis, const std::vector<double>& v, int decimals = 0,
                                       const std::vector<ParamPoly>& assumptions = {});

std::string render_constraints(const VarietyConstraints& c);
std::string constraints_json(const VarietyConstraints& c, const std::vector<std::string>& metadata = {});

/// Number of independent constraints: numeric rank of their Jacobian at a
/// random point of the positive orthant.
std::size_t independent_constraints(const VarietyConstraints& c, std::uint64_t seed = 1);

/// Parameters to grid so that the rest are locally determined: removes
/// parameters in order while the Jacobian keeps its rank.
std::vector<std::size_t> suggest_free_params(const VarietyConstraints& c, std::uint64_t seed = 1);

/// Indices of parameters that occur in no constraint.
std::vector<std::size_t> unconstrained_params(const VarietyConstraints& c);

struct ParamRange {
    std::size_t param = 0;
    double lo = 0.0;
    double hi = 1.0;
};

struct SampleOptions {
    /// Gridded parameters.
    std::vector<ParamRange> free;
    /// Bounds (and starting midpoints) of the solved parameters; parameters
    /// missing here default to (0, 1e3) with start 1.
    std::vector<ParamRange> bounds;
    /// Target number of points.
    std::size_t count = 100;
    double tol = 1e-12;
    int max_iter = 200;
};

struct SampleResult {
    std::vector<std::vector<double>> points;
    std::size_t not_converged = 0;
    std::size_t out_of_range = 0;
    std::size_t assumption_violations = 0;
};

/// Grids the free parameters and solves the constraints for the rest by
/// damped Gauss-Newton.
SampleResult sample_variety(const VarietyConstraints& c, const SampleOptions& opts);

/// Parameters satisfy every equation to a relative tolerance.
double constraint_residual(const VarietyConstraints& c, std::span<const double> params);

/// Draws `count` sorted uniform times in [t0, t1], redrawing (up to
/// `attempts` times) while the linear system is ill-conditioned. `make_data`
/// turns times into jets.
struct TimeSelection {
    DataSet data;
    CoefficientSolve solve;
    int attempts = 0;
};
TimeSelection select_time_points(const IOEquationBasis& basis, const std::function<DataSet(const std::vector<double>&)>& make_data,
                                 double t0, double t1, std::size_t count, std::mt19937_64& rng,
                                 double cond_limit = 1e8, int attempts = 10);

/// Uniform double in [0, 1) with identical output on every platform.
double uniform01(std::mt19937_64& rng);

} // namespace parvar
