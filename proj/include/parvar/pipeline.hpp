#pragma once

#include <span>
#include <string>
#include <vector>

#include "parvar/data/data_lab.hpp"
#include "parvar/extension/extension.hpp"
#include "parvar/variety/variety.hpp"

namespace parvar {

enum class JetMethod { Symbolic, Exact, FiniteDifference };

JetMethod parse_jet_method(const std::string& name);

struct GenerationSpec {
    std::vector<double> params;
    std::vector<double> x0;
    double t0 = 0.0;
    InputSignal inputs;
    JetMethod method = JetMethod::Symbolic;
};

/// Pseudo-data: output jets up to `order` (inputs up to `order` too) at the
/// requested times, from a trajectory started at spec.t0.
DataSet generate_pseudo_data(const ModelSpec& model, const GenerationSpec& spec, const std::vector<double>& times,
                             int order);

/// Initial state at t0 consistent with the data jet there, solved from the
/// triangular basis for the given parameters.
std::vector<double> matched_initial_state(const IODerivation& io, std::span<const double> params,
                                          std::span<const double> y_jet, std::span<const std::vector<double>> u_jets);

/// Remarks on components of the variety, e.g. parameters left free when a
/// monomial coefficient is forced to zero.
std::vector<std::string> structural_notes(const VarietyConstraints& c);

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

inline constexpr const char* kToolVersion = "parvar 0.1.0";

} // namespace parvar
