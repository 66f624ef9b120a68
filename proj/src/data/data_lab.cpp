#include "parvar/data/data_lab.hpp"

#include <algorithm>
#include <cmath>

#include "parvar/error.hpp"

namespace parvar {

NumericPoly::NumericPoly(const Poly& p, std::span<const double> params)
{
    for (const auto& [m, c] : p.terms()) {
        Term t{c.evaluate(params), {}};
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] != 0) {
                t.powers.emplace_back(i, m[i]);
            }
        }
        terms_.push_back(std::move(t));
    }
}

double NumericPoly::operator()(std::span<const double> vars) const
{
    double sum = 0.0;
    for (const auto& t : terms_) {
        double v = t.coeff;
        for (const auto& [i, e] : t.powers) {
            double x = vars[i];
            for (unsigned k = 0; k < e; ++k) {
                v *= x;
            }
        }
        sum += v;
    }
    return sum;
}

std::vector<std::vector<double>> InputSignal::jets(double t, int order) const
{
    std::vector<std::vector<double>> out;
    for (const auto& c : coeffs) {
        std::vector<double> jet(static_cast<std::size_t>(std::max(order, 0) + 1), 0.0);
        for (int k = 0; k <= order; ++k) {
            // d^k/dt^k sum c_p t^p = sum_{p>=k} c_p p!/(p-k)! t^(p-k)
            double s = 0.0;
            for (std::size_t p = static_cast<std::size_t>(k); p < c.size(); ++p) {
                double fall = 1.0;
                for (int q = 0; q < k; ++q) {
                    fall *= static_cast<double>(p - static_cast<std::size_t>(q));
                }
                s += c[p] * fall * std::pow(t, static_cast<double>(p - static_cast<std::size_t>(k)));
            }
            jet[static_cast<std::size_t>(k)] = s;
        }
        out.push_back(std::move(jet));
    }
    return out;
}

namespace {

struct CompiledModel {
    std::vector<NumericPoly> f;
    NumericPoly g;
    std::vector<std::size_t> state_pos;
    std::vector<std::size_t> input_pos;
    std::size_t nvars;
};

CompiledModel compile(const ModelSpec& model, std::span<const double> params)
{
    CompiledModel c;
    const Ring& ring = *model.base_ring;
    c.nvars = ring.size();
    for (const auto& p : model.f) {
        c.f.emplace_back(p, params);
    }
    c.g = NumericPoly(model.g, params);
    for (std::size_t j = 0; j < model.num_states(); ++j) {
        c.state_pos.push_back(ring.index_of({VarKind::State, static_cast<std::uint16_t>(j), 0}));
    }
    for (std::size_t m = 0; m < model.num_inputs(); ++m) {
        c.input_pos.push_back(ring.index_of({VarKind::Input, static_cast<std::uint16_t>(m), 0}));
    }
    return c;
}

struct Rk4 {
    const CompiledModel& cm;
    const InputSignal& inputs;
    std::vector<double> vars;

    void load(double t, std::span<const double> x)
    {
        for (std::size_t j = 0; j < x.size(); ++j) {
            vars[cm.state_pos[j]] = x[j];
        }
        if (!cm.input_pos.empty()) {
            auto u = inputs.jets(t, 0);
            for (std::size_t m = 0; m < cm.input_pos.size(); ++m) {
                vars[cm.input_pos[m]] = m < u.size() ? u[m][0] : 0.0;
            }
        }
    }

    void rhs(double t, std::span<const double> x, std::vector<double>& out)
    {
        load(t, x);
        for (std::size_t j = 0; j < cm.f.size(); ++j) {
            out[j] = cm.f[j](vars);
        }
    }

    double output(double t, std::span<const double> x)
    {
        load(t, x);
        return cm.g(vars);
    }

    void step(double t, double h, std::vector<double>& x)
    {
        std::size_t n = x.size();
        std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
        rhs(t, x, k1);
        for (std::size_t j = 0; j < n; ++j) {
            tmp[j] = x[j] + 0.5 * h * k1[j];
        }
        rhs(t + 0.5 * h, tmp, k2);
        for (std::size_t j = 0; j < n; ++j) {
            tmp[j] = x[j] + 0.5 * h * k2[j];
        }
        rhs(t + 0.5 * h, tmp, k3);
        for (std::size_t j = 0; j < n; ++j) {
            tmp[j] = x[j] + h * k3[j];
        }
        rhs(t + h, tmp, k4);
        for (std::size_t j = 0; j < n; ++j) {
            x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
};

Trajectory run_rk4(const CompiledModel& cm, const InputSignal& inputs, std::span<const double> x0,
                   std::span<const double> grid, double steps_per_unit)
{
    Rk4 rk{cm, inputs, std::vector<double>(cm.nvars, 0.0)};
    Trajectory tr;
    std::vector<double> x(x0.begin(), x0.end());
    tr.times.assign(grid.begin(), grid.end());
    tr.states.push_back(x);
    tr.outputs.push_back(rk.output(grid[0], x));
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double span = grid[i] - grid[i - 1];
        auto n = static_cast<long>(std::ceil(span * steps_per_unit - 1e-9));
        n = std::max<long>(n, 1);
        double h = span / static_cast<double>(n);
        for (long s = 0; s < n; ++s) {
            double t = grid[i - 1] + static_cast<double>(s) * h;
            rk.step(t, h, x);
            for (double v : x) {
                if (!std::isfinite(v)) {
                    throw Error(ErrorCode::BlowUp, "state became non-finite near t = " + std::to_string(t + h));
                }
            }
        }
        tr.states.push_back(x);
        tr.outputs.push_back(rk.output(grid[i], x));
    }
    tr.steps_per_unit = steps_per_unit;
    return tr;
}

void check_grid(const ModelSpec& model, std::span<const double> x0, std::span<const double> grid)
{
    if (x0.size() != model.num_states()) {
        throw Error(ErrorCode::Usage, "initial state has " + std::to_string(x0.size()) + " entries, model has "
                                          + std::to_string(model.num_states()) + " states");
    }
    if (grid.empty()) {
        throw Error(ErrorCode::Usage, "empty time grid");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw Error(ErrorCode::Usage, "time grid must be strictly increasing");
        }
    }
}

} // namespace

Trajectory integrate_fixed_step(const ModelSpec& model, std::span<const double> params, std::span<const double> x0,
                                std::span<const double> grid, double steps_per_unit, const InputSignal& inputs)
{
    check_grid(model, x0, grid);
    Trajectory tr = run_rk4(compile(model, params), inputs, x0, grid, steps_per_unit);
    tr.params.assign(params.begin(), params.end());
    tr.x0.assign(x0.begin(), x0.end());
    return tr;
}

Trajectory integrate_model(const ModelSpec& model, std::span<const double> params, std::span<const double> x0,
                           std::span<const double> grid, const InputSignal& inputs)
{
    check_grid(model, x0, grid);
    CompiledModel cm = compile(model, params);
    double span = grid.back() - grid.front();
    double spu = span > 0 ? 1000.0 / span : 1.0;
    Trajectory coarse = run_rk4(cm, inputs, x0, grid, spu);
    Trajectory fine = coarse;
    for (int halving = 0; halving < 3; ++halving) {
        spu *= 2.0;
        fine = run_rk4(cm, inputs, x0, grid, spu);
        double scale = 0.0;
        double diff = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            scale = std::max(scale, std::abs(fine.outputs[i]));
            diff = std::max(diff, std::abs(fine.outputs[i] - coarse.outputs[i]));
        }
        if (diff <= 1e-8 * std::max(scale, 1e-300)) {
            fine.converged = true;
            break;
        }
        coarse = fine;
    }
    fine.params.assign(params.begin(), params.end());
    fine.x0.assign(x0.begin(), x0.end());
    return fine;
}

JetMap::JetMap(const ModelSpec& model, int order)
    : order_(order), n_states_(model.num_states()), n_inputs_(model.num_inputs())
{
    ring_ = make_jet_ring(model.symbols, 0, 0, n_inputs_ != 0 ? order + 1 : -1);
    std::vector<Poly> f;
    for (const auto& p : model.f) {
        f.push_back(p.embed(ring_));
    }
    auto lie = [&](const Poly& p) {
        Poly out(ring_);
        for (std::size_t j = 0; j < n_states_; ++j) {
            std::size_t idx = ring_->index_of({VarKind::State, static_cast<std::uint16_t>(j), 0});
            if (p.uses_variable(idx)) {
                out += p.partial(idx) * f[j];
            }
        }
        for (std::size_t i = 0; i < ring_->size(); ++i) {
            const DiffVar& v = ring_->var(i);
            if (v.kind == VarKind::Input && p.uses_variable(i)) {
                out += p.partial(i) * Poly::variable(ring_, v.differentiated());
            }
        }
        return out;
    };
    y_.push_back(model.g.embed(ring_));
    for (int k = 1; k <= order; ++k) {
        y_.push_back(lie(y_.back()));
    }
    x_.resize(n_states_);
    for (std::size_t j = 0; j < n_states_; ++j) {
        x_[j].push_back(Poly::variable(ring_, {VarKind::State, static_cast<std::uint16_t>(j), 0}));
        for (int k = 1; k <= order; ++k) {
            x_[j].push_back(lie(x_[j].back()));
        }
    }
    for (const auto& p : y_) {
        for (std::size_t i = 0; i < ring_->size(); ++i) {
            if (ring_->var(i).kind == VarKind::Input && p.uses_variable(i)) {
                input_needed_ = std::max<int>(input_needed_, ring_->var(i).order);
            }
        }
    }
}

std::vector<double> JetMap::pack(std::span<const double> state, std::span<const std::vector<double>> u_jets) const
{
    std::vector<double> vals(ring_->size(), 0.0);
    for (std::size_t i = 0; i < ring_->size(); ++i) {
        const DiffVar& v = ring_->var(i);
        if (v.kind == VarKind::State) {
            vals[i] = state[v.index];
        } else if (v.kind == VarKind::Input) {
            if (v.index < u_jets.size() && v.order < u_jets[v.index].size()) {
                vals[i] = u_jets[v.index][v.order];
            } else if (static_cast<int>(v.order) <= input_needed_) {
                throw Error(ErrorCode::JetOrderMismatch, "input jet must reach order " + std::to_string(input_needed_));
            }
        }
    }
    return vals;
}

std::vector<double> JetMap::output_jet(std::span<const double> params, std::span<const double> state,
                                       std::span<const std::vector<double>> u_jets) const
{
    std::vector<double> vals = pack(state, u_jets);
    std::vector<double> out;
    for (const auto& p : y_) {
        out.push_back(p.evaluate(vals, params));
    }
    return out;
}

std::vector<std::vector<double>> JetMap::state_jets(std::span<const double> params, std::span<const double> state,
                                                    std::span<const std::vector<double>> u_jets) const
{
    std::vector<double> vals = pack(state, u_jets);
    std::vector<std::vector<double>> out;
    for (const auto& row : x_) {
        std::vector<double> jet;
        for (const auto& p : row) {
            jet.push_back(p.evaluate(vals, params));
        }
        out.push_back(std::move(jet));
    }
    return out;
}

JetSample jet_at(const ModelSpec& model, std::span<const double> params, std::span<const double> state,
                 std::span<const std::vector<double>> u_jets, double t, int order)
{
    JetMap map(model, order);
    JetSample s;
    s.t = t;
    s.y = map.output_jet(params, state, u_jets);
    s.u.assign(u_jets.begin(), u_jets.end());
    s.source = "symbolic_pushforward";
    return s;
}

std::vector<double> exact_viral_solution(double a4, double a5, double a7, double t0, double x3_t0, double t, int order)
{
    double disc = 2.0 * a4 * a7 + a4 * a4 + a7 * a7 - 4.0 * a4 * a5 * a7;
    if (!(disc > 0.0)) {
        throw Error(ErrorCode::DegenerateEigenvalues, "discriminant " + std::to_string(disc) + " is not positive");
    }
    double r = std::sqrt(disc);
    double l1 = -(a4 + a7) / 2.0 - r / 2.0;
    double l2 = -(a4 + a7) / 2.0 + r / 2.0;
    double b = (a4 + a7 - 2.0 * a5 * a7 + r) / (2.0 * r);
    double tau = t - t0;
    double e1 = std::exp(l1 * tau);
    double e2 = std::exp(l2 * tau);
    std::vector<double> jet;
    double p1 = 1.0;
    double p2 = 1.0;
    for (int k = 0; k <= order; ++k) {
        jet.push_back(x3_t0 * ((1.0 - b) * p1 * e1 + b * p2 * e2));
        p1 *= l1;
        p2 *= l2;
    }
    return jet;
}

namespace {

// Fornberg's algorithm: weights c[k][j] of node j for the k-th derivative at z.
std::vector<std::vector<double>> fornberg(double z, const std::vector<double>& x, int m)
{
    std::size_t n = x.size();
    std::vector<std::vector<double>> c(static_cast<std::size_t>(m) + 1, std::vector<double>(n, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - z;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        int mn = std::min<int>(static_cast<int>(i), m);
        double c2 = 1.0;
        double c5 = c4;
        c4 = x[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

} // namespace

FiniteDifferenceJets central_difference(std::span<const double> times, std::span<const double> values, int order)
{
    const std::size_t n = times.size();
    if (values.size() != n) {
        throw Error(ErrorCode::Usage, "times and values differ in length");
    }
    if (order < 0) {
        throw Error(ErrorCode::Usage, "negative derivative order");
    }
    const std::size_t one_sided_width = static_cast<std::size_t>(order) + 2;
    if (n < std::max<std::size_t>(one_sided_width, 3)) {
        throw Error(ErrorCode::InsufficientData, "need at least " + std::to_string(std::max<std::size_t>(one_sided_width, 3))
                                                     + " samples for derivatives up to order " + std::to_string(order));
    }
    double h = (times[n - 1] - times[0]) / static_cast<double>(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(times[i] - times[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h))) {
            throw Error(ErrorCode::Usage, "finite differences need a uniform grid");
        }
    }
    FiniteDifferenceJets out;
    out.jets.assign(n, std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0));
    out.one_sided.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        out.jets[i][0] = values[i];
        for (int k = 1; k <= order; ++k) {
            std::size_t width = static_cast<std::size_t>(2 * ((k + 1) / 2) + 1);
            std::size_t half = width / 2;
            std::size_t lo;
            std::size_t w;
            if (i >= half && i + half < n) {
                lo = i - half;
                w = width;
            } else {
                w = static_cast<std::size_t>(k) + 2;
                lo = i < half ? 0 : n - w;
                out.one_sided[i] = true;
            }
            std::vector<double> nodes(w);
            for (std::size_t q = 0; q < w; ++q) {
                nodes[q] = times[lo + q];
            }
            auto c = fornberg(times[i], nodes, k);
            double s = 0.0;
            for (std::size_t q = 0; q < w; ++q) {
                s += c[static_cast<std::size_t>(k)][q] * values[lo + q];
            }
            out.jets[i][static_cast<std::size_t>(k)] = s;
        }
    }
    return out;
}

} // namespace parvar
