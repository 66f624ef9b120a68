#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "parvar/error.hpp"
#include "parvar/pipeline.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using namespace parvar;

namespace {

struct Options {
    std::string model;
    std::string data;
    std::string out;
    std::string constraints;
    std::uint64_t seed = 1;
    std::string times;
    std::size_t count = 0;
    std::string params;
    std::string x0;
    std::string t0;
    std::string method = "jet";
    std::vector<std::string> inputs;
    std::vector<std::string> assume;
    std::vector<std::string> free;
    std::vector<std::string> bounds;
    std::string axes;
    std::size_t samples = 0;
    int digits = 0;
    double cond_limit = 1e8;
    double tol = 1e-12;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim(std::string s)
{
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) {
            out.push_back(cur);
        }
    }
    return out;
}

std::pair<std::string, std::string> split_assignment(const std::string& item)
{
    auto eq = item.find('=');
    if (eq == std::string::npos) {
        throw Error(ErrorCode::Usage, "expected name=value, got '" + item + "'");
    }
    return {trim(item.substr(0, eq)), trim(item.substr(eq + 1))};
}

double to_double(const std::string& s)
{
    return parvar::to_double(parse_decimal(s));
}

std::size_t index_in(const std::vector<std::string>& names, const std::string& name, const char* what)
{
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw Error(ErrorCode::Usage, std::string("unknown ") + what + " '" + name + "'");
    }
    return static_cast<std::size_t>(it - names.begin());
}

GbOptions gb_options()
{
    GbOptions o;
    auto env = [](const char* name, std::size_t& field) {
        if (const char* v = std::getenv(name)) {
            try {
                field = std::stoull(v);
            } catch (const std::exception&) {
                throw Error(ErrorCode::Usage, std::string(name) + " must be a positive integer");
            }
        }
    };
    env("PARVAR_MAX_PAIRS", o.max_pairs);
    env("PARVAR_MAX_BASIS", o.max_basis);
    env("PARVAR_MAX_TERMS", o.max_terms);
    return o;
}

std::vector<double> parse_params(const ModelSpec& m, const std::string& text)
{
    const auto& names = m.param_names();
    std::vector<double> vals(names.size());
    std::vector<bool> seen(names.size(), false);
    for (const auto& item : split(text, ',')) {
        auto [name, value] = split_assignment(item);
        auto i = index_in(names, name, "parameter");
        vals[i] = to_double(value);
        seen[i] = true;
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!seen[i]) {
            throw Error(ErrorCode::Usage, "--params is missing " + names[i]);
        }
    }
    return vals;
}

// Initial states may be written in terms of the parameters and of states
// given earlier in the list, e.g. "x3=1e6,x2=a7/a6*x3".
std::vector<double> parse_x0(const ModelSpec& m, const std::string& text, const std::vector<double>& params)
{
    const auto& states = m.symbols->states;
    SymbolTable scope;
    scope.params = m.param_names();
    std::vector<double> scope_vals = params;
    std::vector<double> x(states.size());
    std::vector<bool> seen(states.size(), false);
    for (const auto& item : split(text, ',')) {
        auto [name, expr] = split_assignment(item);
        auto i = index_in(states, name, "state");
        ParamRat r = parse_param_expression(expr, scope);
        x[i] = r.evaluate(scope_vals);
        seen[i] = true;
        scope.params.push_back(name);
        scope_vals.push_back(x[i]);
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (!seen[i]) {
            throw Error(ErrorCode::Usage, "--x0 is missing " + states[i]);
        }
    }
    return x;
}

InputSignal parse_inputs(const ModelSpec& m, const std::vector<std::string>& items)
{
    InputSignal sig;
    sig.coeffs.resize(m.num_inputs());
    std::vector<bool> seen(m.num_inputs(), false);
    for (const auto& item : items) {
        auto [name, value] = split_assignment(item);
        auto i = index_in(m.symbols->inputs, name, "input");
        for (const auto& c : split(value, ':')) {
            sig.coeffs[i].push_back(to_double(c));
        }
        seen[i] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
            throw Error(ErrorCode::Usage, "--input is missing a signal for " + m.symbols->inputs[i]);
        }
    }
    return sig;
}

std::vector<ParamRange> parse_ranges(const ModelSpec& m, const std::vector<std::string>& items)
{
    std::vector<ParamRange> out;
    for (const auto& item : items) {
        auto [name, value] = split_assignment(item);
        auto parts = split(value, ':');
        if (parts.size() != 2) {
            throw Error(ErrorCode::Usage, "range for " + name + " must be lo:hi");
        }
        ParamRange r{index_in(m.param_names(), name, "parameter"), to_double(parts[0]), to_double(parts[1])};
        if (!(r.hi >= r.lo)) {
            throw Error(ErrorCode::Usage, "empty range for " + name);
        }
        out.push_back(r);
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_axes(const ModelSpec& m, const std::string& text)
{
    const auto& names = m.param_names();
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (!text.empty()) {
        for (const auto& pair : split(text, ',')) {
            auto parts = split(pair, ':');
            if (parts.size() != 2) {
                throw Error(ErrorCode::Usage, "axes are given as p:q pairs");
            }
            out.emplace_back(index_in(names, parts[0], "parameter"), index_in(names, parts[1], "parameter"));
        }
        return out;
    }
    auto has = [&](const char* n) { return std::find(names.begin(), names.end(), n) != names.end(); };
    if (has("a4") && has("a5") && has("a7")) {
        std::size_t a4 = index_in(names, "a4", "");
        std::size_t a5 = index_in(names, "a5", "");
        std::size_t a7 = index_in(names, "a7", "");
        return {{a4, a5}, {a4, a7}, {a7, a5}};
    }
    for (std::size_t i = 0; i + 1 < names.size() && out.size() < 3; ++i) {
        out.emplace_back(i, i + 1);
    }
    return out;
}

std::vector<ParamPoly> assumptions(const ModelSpec& m, const std::vector<std::string>& extra)
{
    std::vector<ParamPoly> out = m.assumptions;
    for (const auto& text : extra) {
        ParamRat r = parse_param_expression(text, *m.symbols);
        if (r.is_zero()) {
            throw Error(ErrorCode::Usage, "assumption '" + text + "' is identically zero");
        }
        out.push_back(r.num());
    }
    return out;
}

class Artifacts {
public:
    Artifacts(const Options& o, std::string command) : out_(o.out)
    {
        meta_.push_back("tool: " + std::string(kToolVersion));
        meta_.push_back("command: " + command);
        meta_.push_back("seed: " + std::to_string(o.seed));
        if (!o.model.empty()) {
            meta_.push_back("model: " + fs::path(o.model).filename().string() + " fnv1a64=" + fnv1a_hex(read_file(o.model)));
        }
        if (!o.data.empty()) {
            meta_.push_back("data: " + fs::path(o.data).filename().string() + " fnv1a64=" + fnv1a_hex(read_file(o.data)));
        }
        if (!o.constraints.empty()) {
            meta_.push_back("constraints: " + fs::path(o.constraints).filename().string()
                            + " fnv1a64=" + fnv1a_hex(read_file(o.constraints)));
        }
        if (!out_.empty()) {
            fs::create_directories(out_);
        }
    }

    const std::vector<std::string>& metadata() const { return meta_; }

    std::string header(const char* prefix) const
    {
        std::string s;
        for (const auto& m : meta_) {
            s += prefix + m + '\n';
        }
        return s;
    }

    // Writes into the output directory, or to stdout when none was given and
    // `to_stdout` is set.
    void write(const std::string& name, const std::string& content, bool to_stdout) const
    {
        if (out_.empty()) {
            if (to_stdout) {
                std::cout << content;
            }
            return;
        }
        std::ofstream f(fs::path(out_) / name, std::ios::binary);
        if (!f) {
            throw Error(ErrorCode::Io, "cannot write " + (fs::path(out_) / name).string());
        }
        f << content;
        std::cerr << "wrote " << (fs::path(out_) / name).string() << '\n';
    }

private:
    std::string out_;
    std::vector<std::string> meta_;
};

std::string dataset_csv(const DataSet& d, const ModelSpec& m, const Artifacts& art)
{
    std::ostringstream os;
    write_dataset_csv(os, d, *m.symbols, art.metadata());
    return os.str();
}

std::vector<double> parse_times(const std::string& text)
{
    std::vector<double> t;
    for (const auto& s : split(text, ',')) {
        t.push_back(to_double(s));
    }
    return t;
}

GenerationSpec generation_spec(const ModelSpec& m, const Options& o)
{
    if (o.params.empty() || o.x0.empty()) {
        throw Error(ErrorCode::Usage, "data generation needs --params and --x0 (or pass --data)");
    }
    GenerationSpec spec;
    spec.params = parse_params(m, o.params);
    spec.x0 = parse_x0(m, o.x0, spec.params);
    spec.inputs = parse_inputs(m, o.inputs);
    spec.method = parse_jet_method(o.method);
    if (!o.t0.empty()) {
        spec.t0 = to_double(o.t0);
    } else if (m.horizon) {
        spec.t0 = m.horizon->t0;
    }
    return spec;
}

Horizon sampling_window(const ModelSpec& m, const GenerationSpec& spec)
{
    if (!m.horizon) {
        throw Error(ErrorCode::Usage, "the model has no horizon; pass --times");
    }
    Horizon h{std::max(spec.t0, m.horizon->t0), m.horizon->t1};
    if (!(h.t1 > h.t0)) {
        throw Error(ErrorCode::Usage, "the sampling horizon has zero duration");
    }
    return h;
}

std::vector<double> draw_times(std::mt19937_64& rng, Horizon h, std::size_t count)
{
    std::vector<double> t(count);
    for (auto& v : t) {
        v = h.t0 + (h.t1 - h.t0) * uniform01(rng);
    }
    std::sort(t.begin(), t.end());
    return t;
}

std::string samples_csv(const SampleResult& r, const VarietyConstraints& c, const Artifacts& art)
{
    std::ostringstream os;
    os << art.header("# ");
    os << "# not_converged: " << r.not_converged << "\n# out_of_range: " << r.out_of_range
       << "\n# assumption_violations: " << r.assumption_violations << '\n';
    for (std::size_t i = 0; i < c.param_names.size(); ++i) {
        os << (i ? "," : "") << c.param_names[i];
    }
    os << '\n';
    char buf[40];
    for (const auto& p : r.points) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            auto res = std::to_chars(buf, buf + sizeof buf, p[i]);
            os << (i ? "," : "") << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
        }
        os << '\n';
    }
    return os.str();
}

void run_sampling(const ModelSpec& m, const VarietyConstraints& c, const Options& o, std::size_t count,
                  const Artifacts& art)
{
    SampleOptions so;
    so.free = parse_ranges(m, o.free);
    so.bounds = parse_ranges(m, o.bounds);
    so.count = count;
    so.tol = o.tol;
    if (so.free.empty()) {
        auto suggested = suggest_free_params(c, o.seed);
        if (!suggested.empty()) {
            std::cerr << "hint: the variety has dimension " << suggested.size() << "; grid";
            for (auto i : suggested) {
                std::cerr << ' ' << c.param_names[i];
            }
            std::cerr << " with --free\n";
        }
    }
    SampleResult r = sample_variety(c, so);
    art.write("samples.csv", samples_csv(r, c, art), true);
    std::cerr << r.points.size() << " variety points (" << r.not_converged << " not converged, " << r.out_of_range
              << " out of range, " << r.assumption_violations << " on excluded components)\n";
    for (auto [i, j] : parse_axes(m, o.axes)) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : r.points) {
            pts.emplace_back(p[i], p[j]);
        }
        const auto& names = c.param_names;
        art.write(names[i] + "_" + names[j] + ".svg", cli::scatter_svg(pts, names[i], names[j], art.metadata()), false);
    }
}

int cmd_ioeq(const Options& o)
{
    ModelSpec m = load_model(o.model);
    Artifacts art(o, "ioeq");
    IODerivation io = derive_io_basis(m, gb_options());
    art.write("ioeq.txt", art.header("# ") + to_canonical_text(io.basis), true);
    return 0;
}

int cmd_pseudo(const Options& o)
{
    ModelSpec m = load_model(o.model);
    Artifacts art(o, "pseudo");
    IODerivation io = derive_io_basis(m, gb_options());
    GenerationSpec spec = generation_spec(m, o);
    std::vector<double> times;
    if (!o.times.empty()) {
        times = parse_times(o.times);
    } else {
        std::mt19937_64 rng(o.seed);
        times = draw_times(rng, sampling_window(m, spec), o.count ? o.count : io.basis.size());
    }
    DataSet d = generate_pseudo_data(m, spec, times, io.basis.order);
    art.write("data.csv", dataset_csv(d, m, art), true);
    return 0;
}

int cmd_extend(const Options& o)
{
    ModelSpec m = load_model(o.model);
    Artifacts art(o, "extend");
    IODerivation io = derive_io_basis(m, gb_options());
    auto report = check_extension(extension_sets(m, io.gb), assumptions(m, o.assume));
    art.write("extension.txt", art.header("# ") + render_report(report), true);
    return 0;
}

int cmd_variety(const Options& o)
{
    ModelSpec m = load_model(o.model);
    Artifacts art(o, "variety");
    IODerivation io = derive_io_basis(m, gb_options());
    const auto& basis = io.basis;

    DataSet data;
    CoefficientSolve sol;
    try {
        if (!o.data.empty()) {
            data = read_dataset_csv(o.data, *m.symbols);
            sol = solve_coefficients(build_linear_system(basis, data), o.cond_limit);
        } else {
            GenerationSpec spec = generation_spec(m, o);
            auto make = [&](const std::vector<double>& t) { return generate_pseudo_data(m, spec, t, basis.order); };
            if (!o.times.empty()) {
                data = make(parse_times(o.times));
                sol = solve_coefficients(build_linear_system(basis, data), o.cond_limit);
            } else {
                Horizon h = sampling_window(m, spec);
                std::mt19937_64 rng(o.seed);
                auto sel = select_time_points(basis, make, h.t0, h.t1, o.count ? o.count : basis.size(), rng,
                                              o.cond_limit);
                data = std::move(sel.data);
                sol = sel.solve;
            }
            art.write("data.csv", dataset_csv(data, m, art), false);
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::IllConditioned) {
            throw Error(ErrorCode::IllConditioned,
                        std::string(e.what()).substr(std::string("IllConditioned: ").size())
                            + "; resample the time points (--times, or another --seed) or add points");
        }
        throw;
    }

    std::vector<double> v(sol.v.data(), sol.v.data() + sol.v.size());
    VarietyConstraints c = variety_constraints(basis, v, o.digits, assumptions(m, o.assume));
    c.residual = sol.residual;
    c.cond = sol.cond;

    std::ostringstream text;
    text << art.header("# ");
    text << "io equation: " << basis.full.to_string() << " = 0\n";
    text << "time points:";
    for (double t : data.times) {
        char buf[40];
        std::snprintf(buf, sizeof buf, " %.10g", t);
        text << buf;
    }
    text << '\n' << render_constraints(c);
    text << "independent constraints: " << independent_constraints(c, o.seed) << '\n';
    auto unconstrained = unconstrained_params(c);
    if (!unconstrained.empty()) {
        text << "not constrained:";
        for (auto i : unconstrained) {
            text << ' ' << c.param_names[i];
        }
        text << '\n';
    }
    for (const auto& note : structural_notes(c)) {
        text << "note: " << note << '\n';
    }
    auto report = check_extension(extension_sets(m, io.gb), c.assumptions);
    text << "extension check:\n" << render_report(report);

    art.write("constraints.txt", text.str(), true);
    art.write("constraints.json", constraints_json(c, art.metadata()), false);
    art.write("extension.txt", art.header("# ") + render_report(report), false);
    if (o.samples > 0) {
        run_sampling(m, c, o, o.samples, art);
    }
    return 0;
}

int cmd_sample(const Options& o)
{
    ModelSpec m = load_model(o.model);
    Artifacts art(o, "sample");
    IODerivation io = derive_io_basis(m, gb_options());
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(read_file(o.constraints));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SyntaxError, o.constraints + ": " + e.what());
    }
    if (j.value("params", std::vector<std::string>{}) != m.param_names()) {
        throw Error(ErrorCode::Usage, "constraints file was made for different parameters");
    }
    const auto& rows = j.at("constraints");
    if (rows.size() != io.basis.size()) {
        throw Error(ErrorCode::Usage, "constraints file does not match the model's io equation");
    }
    std::vector<double> v;
    for (const auto& row : rows) {
        v.push_back(row.at("value").get<double>());
    }
    VarietyConstraints c = variety_constraints(io.basis, v, 0, assumptions(m, o.assume));
    run_sampling(m, c, o, o.count ? o.count : 100, art);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Parameter varieties of ODE models from input-output equations"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);
    Options o;

    auto add_model = [&](CLI::App* sc) {
        sc->add_option("--model,-m", o.model, "model file")->required();
        sc->add_option("--out,-o", o.out, "output directory (stdout when omitted)");
        sc->add_option("--seed", o.seed, "random seed")->capture_default_str();
    };
    auto add_generation = [&](CLI::App* sc) {
        sc->add_option("--params", o.params, "parameter values, e.g. a4=0.16,a5=0.95");
        sc->add_option("--x0", o.x0, "initial state at t0; may use parameters and earlier states");
        sc->add_option("--t0", o.t0, "initial time (default: horizon start)");
        sc->add_option("--times", o.times, "comma-separated sample times");
        sc->add_option("--count", o.count, "number of random sample times (default: number of coefficients)");
        sc->add_option("--method", o.method, "jet, exact or fd")->capture_default_str();
        sc->add_option("--input", o.inputs, "input polynomial in t, e.g. u=1:0.5");
    };
    auto add_assume = [&](CLI::App* sc) {
        sc->add_option("--assume", o.assume, "extra nonzero assumption (repeatable)");
    };
    auto add_sampling = [&](CLI::App* sc) {
        sc->add_option("--free", o.free, "gridded parameter range, e.g. a4=0:5.76 (repeatable)");
        sc->add_option("--bound", o.bounds, "range of a solved parameter, e.g. a5=0:1 (repeatable)");
        sc->add_option("--axes", o.axes, "plot pairs, e.g. a4:a5,a4:a7");
        sc->add_option("--tol", o.tol, "Newton tolerance")->capture_default_str();
    };

    auto* ioeq = app.add_subcommand("ioeq", "derive the input-output equation");
    add_model(ioeq);

    auto* pseudo = app.add_subcommand("pseudo", "generate output jets from known parameters");
    add_model(pseudo);
    add_generation(pseudo);

    auto* variety = app.add_subcommand("variety", "estimate the parameter variety from data");
    add_model(variety);
    add_generation(variety);
    add_assume(variety);
    add_sampling(variety);
    variety->add_option("--data,-d", o.data, "dataset CSV (instead of generating)");
    variety->add_option("--digits", o.digits, "round coefficient values to this many decimals (0: exact)");
    variety->add_option("--cond-limit", o.cond_limit, "condition number limit")->capture_default_str();
    variety->add_option("--samples", o.samples, "number of variety points to sample (0: none)");

    auto* extend = app.add_subcommand("extend", "check that partial solutions extend");
    add_model(extend);
    add_assume(extend);

    auto* sample = app.add_subcommand("sample", "sample a variety from a constraints file");
    add_model(sample);
    add_assume(sample);
    add_sampling(sample);
    sample->add_option("--constraints,-c", o.constraints, "constraints.json from `variety`")->required();
    sample->add_option("--count", o.count, "target number of points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*ioeq) {
            return cmd_ioeq(o);
        }
        if (*pseudo) {
            return cmd_pseudo(o);
        }
        if (*variety) {
            return cmd_variety(o);
        }
        if (*extend) {
            return cmd_extend(o);
        }
        if (*sample) {
            return cmd_sample(o);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_status(e.code());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 5;
    }
    return 5;
}
