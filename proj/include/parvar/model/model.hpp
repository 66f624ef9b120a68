#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parvar/algebra/poly.hpp"

namespace parvar {

struct Horizon {
    double t0 = 0.0;
    double t1 = 1.0;
};

/// Polynomial state-space model dx/dt = f(x, u; a), y = g(x, u; a).
struct ModelSpec {
    std::shared_ptr<const SymbolTable> symbols;
    /// Order-0 states (x_N > ... > x_1), then y, then inputs.
    RingPtr base_ring;
    std::vector<Poly> f;
    Poly g;
    std::optional<Horizon> horizon;
    std::vector<ParamPoly> assumptions;

    std::size_t num_states() const { return symbols->states.size(); }
    std::size_t num_inputs() const { return symbols->inputs.size(); }
    std::size_t num_params() const { return symbols->params.size(); }
    const std::vector<std::string>& param_names() const { return symbols->params; }
    bool output_uses_inputs() const;
};

ModelSpec parse_model(std::string_view text);
ModelSpec load_model(const std::filesystem::path& path);

/// Parses a parameter-only expression ("a5 - 1", "2*a6") against a symbol table.
ParamRat parse_param_expression(std::string_view text, const SymbolTable& symbols);

/// Ring with states up to `state_order`, output up to `output_order` and
/// inputs up to `input_order` (negative for none), ordered
/// x^(s) > ... > x > y^(o) > ... > y > u^(r) > ... > u.
/// Within a block the higher index ranks first.
RingPtr make_jet_ring(const std::shared_ptr<const SymbolTable>& symbols, int state_order, int output_order,
                      int input_order);

/// Formal total time derivative. Every v^(k) becomes v^(k+1); the result
/// lives in `target`, which must contain the differentiated variables.
Poly total_derivative(const Poly& p, const RingPtr& target);

struct ProlongedSystem {
    int order = 0;
    RingPtr ring;
    /// x^(k) - d^(k-1) f for k = 1..i (state-major), then y^(k) - d^k g for k = 0..i.
    std::vector<Poly> gens;
};

/// Generators of the truncated prolongation ideal of order i >= 1.
ProlongedSystem prolong(const ModelSpec& model, int order);

} // namespace parvar
