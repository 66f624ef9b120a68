#include "parvar/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "parvar/error.hpp"

namespace parvar {

JetMethod parse_jet_method(const std::string& name)
{
    if (name == "jet") {
        return JetMethod::Symbolic;
    }
    if (name == "exact") {
        return JetMethod::Exact;
    }
    if (name == "fd") {
        return JetMethod::FiniteDifference;
    }
    throw Error(ErrorCode::Usage, "unknown jet method '" + name + "' (jet, exact, fd)");
}

namespace {

std::size_t param_index(const ModelSpec& model, const std::string& name)
{
    const auto& p = model.param_names();
    auto it = std::find(p.begin(), p.end(), name);
    if (it == p.end()) {
        throw Error(ErrorCode::Usage, "the exact solution needs parameter " + name);
    }
    return static_cast<std::size_t>(it - p.begin());
}

DataSet exact_data(const ModelSpec& model, const GenerationSpec& spec, const std::vector<double>& times, int order)
{
    if (model.num_states() != 2 || model.num_inputs() != 0) {
        throw Error(ErrorCode::Usage, "the exact solution covers the two-state viral model only");
    }
    double a4 = spec.params[param_index(model, "a4")];
    double a5 = spec.params[param_index(model, "a5")];
    double a7 = spec.params[param_index(model, "a7")];
    // the observed state is the one g picks out
    std::size_t observed = 0;
    for (std::size_t j = 0; j < 2; ++j) {
        if (model.g == Poly::variable(model.base_ring, {VarKind::State, static_cast<std::uint16_t>(j), 0})) {
            observed = j + 1;
        }
    }
    if (observed == 0) {
        throw Error(ErrorCode::Usage, "the exact solution needs y equal to a state");
    }
    DataSet d;
    for (double t : times) {
        d.times.push_back(t);
        d.y_jet.push_back(exact_viral_solution(a4, a5, a7, spec.t0, spec.x0[observed - 1], t, order));
        d.u_jet.emplace_back();
        d.source.emplace_back("exact_solution");
    }
    return d;
}

} // namespace

DataSet generate_pseudo_data(const ModelSpec& model, const GenerationSpec& spec, const std::vector<double>& times,
                             int order)
{
    if (spec.params.size() != model.num_params()) {
        throw Error(ErrorCode::Usage, "expected " + std::to_string(model.num_params()) + " parameter values");
    }
    if (spec.x0.size() != model.num_states()) {
        throw Error(ErrorCode::Usage, "expected " + std::to_string(model.num_states()) + " initial values");
    }
    if (spec.inputs.coeffs.size() != model.num_inputs()) {
        throw Error(ErrorCode::Usage, "expected a signal for each of the " + std::to_string(model.num_inputs()) + " inputs");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < spec.t0 || (i > 0 && !(times[i] > times[i - 1]))) {
            throw Error(ErrorCode::Usage, "time points must increase and start no earlier than t0");
        }
    }
    if (spec.method == JetMethod::Exact) {
        return exact_data(model, spec, times, order);
    }
    DataSet d;
    if (spec.method == JetMethod::Symbolic) {
        std::vector<double> grid{spec.t0};
        for (double t : times) {
            if (t > grid.back()) {
                grid.push_back(t);
            }
        }
        Trajectory tr = integrate_model(model, spec.params, spec.x0, grid, spec.inputs);
        JetMap map(model, order);
        for (double t : times) {
            auto it = std::lower_bound(tr.times.begin(), tr.times.end(), t);
            auto idx = static_cast<std::size_t>(it - tr.times.begin());
            auto u = spec.inputs.jets(t, order);
            d.times.push_back(t);
            d.y_jet.push_back(map.output_jet(spec.params, tr.states[idx], u));
            d.u_jet.push_back(std::move(u));
            d.source.emplace_back("symbolic_pushforward");
        }
        return d;
    }
    // finite differences on a fine uniform grid; times snap to grid nodes
    double t_end = times.empty() ? spec.t0 : times.back();
    const std::size_t nodes = 20001;
    double h = (t_end - spec.t0) / static_cast<double>(nodes - 1);
    if (!(h > 0)) {
        throw Error(ErrorCode::InsufficientData, "finite differences need a time span");
    }
    std::vector<double> grid(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        grid[i] = spec.t0 + h * static_cast<double>(i);
    }
    Trajectory tr = integrate_model(model, spec.params, spec.x0, grid, spec.inputs);
    FiniteDifferenceJets fd = central_difference(grid, tr.outputs, order);
    for (double t : times) {
        auto idx = static_cast<std::size_t>(std::llround((t - spec.t0) / h));
        idx = std::min(idx, nodes - 1);
        d.times.push_back(grid[idx]);
        d.y_jet.push_back(fd.jets[idx]);
        d.u_jet.push_back(spec.inputs.jets(grid[idx], order));
        d.source.emplace_back(fd.one_sided[idx] ? "finite_difference_one_sided" : "finite_difference");
    }
    return d;
}

std::vector<double> matched_initial_state(const IODerivation& io, std::span<const double> params,
                                          std::span<const double> y_jet, std::span<const std::vector<double>> u_jets)
{
    std::vector<double> vals = reconstruct_jet(io.gb, params, y_jet, u_jets);
    const Ring& ring = *io.gb.ring;
    std::vector<double> x(ring.symbols().states.size(), 0.0);
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const DiffVar& v = ring.var(i);
        if (v.kind == VarKind::State && v.order == 0) {
            x[v.index] = vals[i];
        }
    }
    return x;
}

namespace {

ParamPoly set_zero(const ParamPoly& p, std::size_t var)
{
    ParamPoly out;
    for (const auto& [e, c] : p.terms()) {
        if (e[var] == 0) {
            out += ParamPoly::monomial(e, c);
        }
    }
    return out;
}

} // namespace

std::vector<std::string> structural_notes(const VarietyConstraints& c)
{
    std::vector<std::string> notes;
    std::set<std::size_t> tried;
    for (std::size_t l = 0; l < c.equations.size(); ++l) {
        const ParamPoly& e = c.equations[l];
        if (c.v_exact[l] != 0 || !e.is_monomial()) {
            continue;
        }
        const auto& exps = e.leading_exponents();
        for (std::size_t p = 0; p < c.param_names.size(); ++p) {
            if (exps[p] == 0 || !tried.insert(p).second) {
                continue;
            }
            std::uint32_t before = 0;
            std::uint32_t after = 0;
            for (const auto& q : c.equations) {
                before |= q.variable_mask();
                after |= set_zero(q, p).variable_mask();
            }
            std::vector<std::string> freed;
            for (std::size_t r = 0; r < c.param_names.size(); ++r) {
                if (r != p && (before & (1u << r)) && !(after & (1u << r))) {
                    freed.push_back(c.param_names[r]);
                }
            }
            if (!freed.empty()) {
                std::string s = "on the component " + c.param_names[p] + " = 0, ";
                for (std::size_t k = 0; k < freed.size(); ++k) {
                    s += (k ? ", " : "") + freed[k];
                }
                s += freed.size() == 1 ? " is not constrained" : " are not constrained";
                notes.push_back(s);
            }
        }
    }
    return notes;
}

std::string fnv1a_hex(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace parvar
