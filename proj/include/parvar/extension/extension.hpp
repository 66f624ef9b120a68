#pragma once

#include <span>
#include <string>
#include <vector>

#include "parvar/groebner/groebner.hpp"
#include "parvar/model/model.hpp"

namespace parvar {

/// Leading coefficients of the basis elements that solve for z_j.
struct ExtensionSet {
    /// 1-based; z_j is ring variable j - 1 (highest state derivative first).
    std::size_t j = 0;
    DiffVar z;
    /// Each entry is a polynomial in the variables below z_j with
    /// polynomial parameter coefficients.
    std::vector<Poly> leading;
};

enum class Verdict { EmptyByConstant, EmptyByAssumption, Undetermined };

struct ExtensionRecord {
    ExtensionSet set;
    Verdict verdict = Verdict::Undetermined;
};

struct ExtensionReport {
    std::vector<ExtensionRecord> records;
    bool certified = false;
};

/// Clears denominators of the coefficients and divides by their parameter
/// content so the leading coefficient has positive leading term.
Poly clear_denominators(const Poly& p);

/// P_j for every state jet variable of the ring. Throws MissingLeading if
/// some z_j is not solved for by any element.
std::vector<ExtensionSet> extension_sets(const ModelSpec& model, const ReducedGB& gb);

/// True if p is a nonzero constant times a product of the assumptions.
bool is_unit_under(const ParamPoly& p, std::span<const ParamPoly> assumptions);

ExtensionReport check_extension(const std::vector<ExtensionSet>& sets, std::span<const ParamPoly> assumptions);

std::string verdict_name(Verdict v);
std::string render_report(const ExtensionReport& report);

/// Solves the triangular basis for the state jet given output/input jets and
/// numeric parameters. Returns one value per ring variable (all ring
/// variables, in ring order). Throws IllConditioned when a leading
/// coefficient vanishes and MissingLeading when no element is linear in the
/// variable being solved for.
std::vector<double> reconstruct_jet(const ReducedGB& gb, std::span<const double> params, std::span<const double> y_jet,
                                    std::span<const std::vector<double>> u_jets);

} // namespace parvar
