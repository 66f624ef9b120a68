#include "parvar/variety/variety.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "parvar/error.hpp"

namespace parvar {

namespace {

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        out.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

std::string format_double(double x)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, int line)
{
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw Error(ErrorCode::SyntaxError, "data line " + std::to_string(line) + ": '" + s + "' is not a number");
    }
    return v;
}

} // namespace

DataSet parse_dataset_csv(std::istream& in, const SymbolTable& symbols)
{
    DataSet d;
    std::string line;
    int number = 0;
    std::vector<std::string> header;
    // column -> (kind, input index, order)
    struct Col {
        int kind; // 0 t, 1 y, 2 u, 3 source, 4 ignored
        std::size_t input;
        std::size_t order;
    };
    std::vector<Col> cols;
    std::size_t y_order = 0;
    std::vector<std::size_t> u_order(symbols.inputs.size(), 0);
    std::vector<bool> u_seen(symbols.inputs.size(), false);
    bool have_y = false;
    while (std::getline(in, line)) {
        ++number;
        std::string t = trim(line);
        if (t.empty()) {
            continue;
        }
        if (t[0] == '#') {
            auto body = trim(t.substr(1));
            if (body.rfind("units:", 0) == 0) {
                d.units = trim(body.substr(6));
            }
            continue;
        }
        auto cells = split_csv(t);
        if (header.empty()) {
            header = cells;
            for (const auto& h : header) {
                if (h == "t") {
                    cols.push_back({0, 0, 0});
                } else if (h == "source") {
                    cols.push_back({3, 0, 0});
                } else if (h == symbols.output || (h.rfind(symbols.output, 0) == 0 && h.size() > symbols.output.size()
                                                   && std::all_of(h.begin() + static_cast<long>(symbols.output.size()), h.end(), ::isdigit))) {
                    std::size_t k = h == symbols.output ? 0 : std::stoul(h.substr(symbols.output.size()));
                    cols.push_back({1, 0, k});
                    y_order = std::max(y_order, k);
                    have_y = true;
                } else {
                    auto us = h.rfind('_');
                    bool matched = false;
                    if (us != std::string::npos) {
                        auto it = std::find(symbols.inputs.begin(), symbols.inputs.end(), h.substr(0, us));
                        std::string ord = h.substr(us + 1);
                        if (it != symbols.inputs.end() && !ord.empty() && std::all_of(ord.begin(), ord.end(), ::isdigit)) {
                            std::size_t m = static_cast<std::size_t>(it - symbols.inputs.begin());
                            cols.push_back({2, m, std::stoul(ord)});
                            u_order[m] = std::max<std::size_t>(u_order[m], std::stoul(ord));
                            u_seen[m] = true;
                            matched = true;
                        }
                    }
                    if (!matched) {
                        throw Error(ErrorCode::SyntaxError, "data line " + std::to_string(number) + ": unknown column '" + h + "'");
                    }
                }
            }
            if (std::none_of(cols.begin(), cols.end(), [](const Col& c) { return c.kind == 0; }) || !have_y) {
                throw Error(ErrorCode::SyntaxError, "data header needs a 't' column and output columns");
            }
            continue;
        }
        if (cells.size() != header.size()) {
            throw Error(ErrorCode::SyntaxError, "data line " + std::to_string(number) + ": expected "
                                                    + std::to_string(header.size()) + " fields");
        }
        std::vector<double> y(y_order + 1, std::nan(""));
        std::vector<std::vector<double>> u(symbols.inputs.size());
        for (std::size_t m = 0; m < u.size(); ++m) {
            u[m].assign(u_seen[m] ? u_order[m] + 1 : 0, std::nan(""));
        }
        std::string source = "measured";
        double tv = 0.0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const Col& c = cols[i];
            if (c.kind == 3) {
                source = cells[i];
            } else if (c.kind == 0) {
                tv = parse_double(cells[i], number);
            } else if (c.kind == 1) {
                y[c.order] = parse_double(cells[i], number);
            } else {
                u[c.input][c.order] = parse_double(cells[i], number);
            }
        }
        if (!d.times.empty() && !(tv > d.times.back())) {
            throw Error(ErrorCode::SyntaxError, "data line " + std::to_string(number) + ": times must be strictly increasing");
        }
        d.times.push_back(tv);
        d.y_jet.push_back(std::move(y));
        d.u_jet.push_back(std::move(u));
        d.source.push_back(source);
    }
    if (header.empty()) {
        throw Error(ErrorCode::SyntaxError, "data file has no header");
    }
    return d;
}

DataSet read_dataset_csv(const std::filesystem::path& path, const SymbolTable& symbols)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open data file " + path.string());
    }
    return parse_dataset_csv(in, symbols);
}

void write_dataset_csv(std::ostream& out, const DataSet& data, const SymbolTable& symbols,
                       const std::vector<std::string>& metadata)
{
    for (const auto& m : metadata) {
        out << "# " << m << '\n';
    }
    out << "# units: " << data.units << '\n';
    std::size_t y_len = data.y_jet.empty() ? 1 : data.y_jet.front().size();
    out << 't';
    for (std::size_t k = 0; k < y_len; ++k) {
        out << ',' << symbols.output;
        if (k > 0) {
            out << k;
        }
    }
    std::vector<std::size_t> u_len(symbols.inputs.size(), 0);
    if (!data.u_jet.empty()) {
        for (std::size_t m = 0; m < u_len.size() && m < data.u_jet.front().size(); ++m) {
            u_len[m] = data.u_jet.front()[m].size();
        }
    }
    for (std::size_t m = 0; m < u_len.size(); ++m) {
        for (std::size_t k = 0; k < u_len[m]; ++k) {
            out << ',' << symbols.inputs[m] << '_' << k;
        }
    }
    out << ",source\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        out << format_double(data.times[i]);
        for (double v : data.y_jet[i]) {
            out << ',' << format_double(v);
        }
        for (std::size_t m = 0; m < u_len.size(); ++m) {
            for (std::size_t k = 0; k < u_len[m]; ++k) {
                out << ',' << format_double(data.u_jet[i][m][k]);
            }
        }
        out << ',' << (i < data.source.size() ? data.source[i] : "measured") << '\n';
    }
}

LinearSystem build_linear_system(const IOEquationBasis& basis, const DataSet& data)
{
    const auto k = static_cast<Eigen::Index>(data.size());
    const auto l = static_cast<Eigen::Index>(basis.size());
    LinearSystem sys{Eigen::MatrixXd(k, l), Eigen::VectorXd(k)};
    int need_y = output_jet_order(basis);
    int need_u = input_jet_order(basis);
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto& y = data.y_jet[static_cast<std::size_t>(i)];
        static const std::vector<std::vector<double>> kNoInputs;
        const auto& u = data.u_jet.empty() ? kNoInputs : data.u_jet[static_cast<std::size_t>(i)];
        if (static_cast<int>(y.size()) <= need_y) {
            throw Error(ErrorCode::JetOrderMismatch, "data has output derivatives up to order " + std::to_string(y.size() - 1)
                                                         + ", the equation needs order " + std::to_string(need_y));
        }
        for (int k2 = 0; k2 <= need_y; ++k2) {
            if (!std::isfinite(y[static_cast<std::size_t>(k2)])) {
                throw Error(ErrorCode::JetOrderMismatch, "missing output derivative of order " + std::to_string(k2));
            }
        }
        if (need_u >= 0) {
            for (const auto& uj : u) {
                if (static_cast<int>(uj.size()) <= need_u) {
                    throw Error(ErrorCode::JetOrderMismatch, "input data must reach derivative order " + std::to_string(need_u));
                }
            }
        }
        for (Eigen::Index c = 0; c < l; ++c) {
            sys.matrix(i, c) = monomial_value(basis.monos[static_cast<std::size_t>(c)], *basis.ring, y, u);
        }
        double r = 0.0;
        for (const auto& [m, coeff] : basis.rhs.terms()) {
            r += to_double(coeff.constant_value()) * monomial_value(m, *basis.ring, y, u);
        }
        sys.rhs(i) = r;
    }
    return sys;
}

double condition_estimate(const Eigen::MatrixXd& m)
{
    Eigen::MatrixXd a = m;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        double n = a.col(c).norm();
        if (n > 0) {
            a.col(c) /= n;
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(s.size() - 1) == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return s(0) / s(s.size() - 1);
}

CoefficientSolve solve_coefficients(const LinearSystem& sys, double cond_limit)
{
    const auto rows = sys.matrix.rows();
    const auto cols = sys.matrix.cols();
    if (rows < cols) {
        throw Error(ErrorCode::InsufficientData, "data need at least " + std::to_string(cols) + " time points (have "
                                                      + std::to_string(rows) + ")");
    }
    CoefficientSolve out;
    out.cond = condition_estimate(sys.matrix);
    if (!(out.cond <= cond_limit)) {
        std::ostringstream os;
        os << "condition estimate " << out.cond << " exceeds " << cond_limit << "; resample the time points";
        throw Error(ErrorCode::IllConditioned, os.str());
    }
    if (rows == cols) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sys.matrix);
        out.v = lu.solve(sys.rhs);
    } else {
        out.v = sys.matrix.colPivHouseholderQr().solve(sys.rhs);
    }
    out.residual = (sys.matrix * out.v - sys.rhs).norm();
    return out;
}

VarietyConstraints variety_constraints(const IOEquationBasis& basis, const std::vector<double>& v, int decimals,
                                       const std::vector<ParamPoly>& assumptions)
{
    if (v.size() != basis.size()) {
        throw Error(ErrorCode::Usage, "expected " + std::to_string(basis.size()) + " coefficient values");
    }
    VarietyConstraints c;
    c.param_names = basis.ring->symbols().params;
    c.coeffs = basis.coeffs;
    c.v = v;
    c.assumptions = assumptions;
    for (std::size_t l = 0; l < v.size(); ++l) {
        c.monomials.push_back(monomial_to_string(basis.monos[l], *basis.ring));
        Rational q = rationalize(v[l], decimals);
        c.v[l] = to_double(q);
        c.v_exact.push_back(q);
        c.equations.push_back(basis.coeffs[l].num() - basis.coeffs[l].den() * q);
    }
    return c;
}

std::string render_constraints(const VarietyConstraints& c)
{
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t l = 0; l < c.coeffs.size(); ++l) {
        os << "c" << (l + 1) << " [" << c.monomials[l] << "]: " << c.coeffs[l].to_string(c.param_names) << " = "
           << format_double(c.v[l]) << '\n';
    }
    os << "equations:\n";
    for (const auto& e : c.equations) {
        os << "  " << e.to_string(c.param_names) << " = 0\n";
    }
    if (!c.assumptions.empty()) {
        os << "assuming nonzero:";
        for (const auto& a : c.assumptions) {
            os << ' ' << a.to_string(c.param_names) << ';';
        }
        os << '\n';
    }
    os << "residual: " << format_double(c.residual) << "\ncondition: " << format_double(c.cond) << '\n';
    return os.str();
}

std::string constraints_json(const VarietyConstraints& c, const std::vector<std::string>& metadata)
{
    nlohmann::ordered_json j;
    j["metadata"] = metadata;
    j["params"] = c.param_names;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t l = 0; l < c.coeffs.size(); ++l) {
        rows.push_back({{"monomial", c.monomials[l]},
                        {"coefficient", c.coeffs[l].to_string(c.param_names)},
                        {"value", c.v[l]},
                        {"value_exact", c.v_exact[l].get_str()},
                        {"equation", c.equations[l].to_string(c.param_names) + " = 0"}});
    }
    j["constraints"] = rows;
    std::vector<std::string> as;
    for (const auto& a : c.assumptions) {
        as.push_back(a.to_string(c.param_names));
    }
    j["assume_nonzero"] = as;
    j["residual"] = c.residual;
    j["condition"] = c.cond;
    return j.dump(2) + "\n";
}

double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace {

struct Residuals {
    const VarietyConstraints& c;

    // (c_l(a) - v_l) / max(1, |v_l|)
    Eigen::VectorXd value(std::span<const double> a) const
    {
        Eigen::VectorXd r(static_cast<Eigen::Index>(c.coeffs.size()));
        for (std::size_t l = 0; l < c.coeffs.size(); ++l) {
            r(static_cast<Eigen::Index>(l)) = (c.coeffs[l].evaluate(a) - c.v[l]) / std::max(1.0, std::abs(c.v[l]));
        }
        return r;
    }

    Eigen::MatrixXd jacobian(std::span<const double> a, const std::vector<std::size_t>& wrt) const
    {
        Eigen::MatrixXd j(static_cast<Eigen::Index>(c.coeffs.size()), static_cast<Eigen::Index>(wrt.size()));
        for (std::size_t l = 0; l < c.coeffs.size(); ++l) {
            const ParamPoly& n = c.coeffs[l].num();
            const ParamPoly& d = c.coeffs[l].den();
            double nv = n.evaluate(a);
            double dv = d.evaluate(a);
            double s = std::max(1.0, std::abs(c.v[l]));
            for (std::size_t q = 0; q < wrt.size(); ++q) {
                double dn = n.partial(wrt[q]).evaluate(a);
                double dd = d.partial(wrt[q]).evaluate(a);
                j(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(q)) = (dn * dv - nv * dd) / (dv * dv) / s;
            }
        }
        return j;
    }
};

} // namespace

double constraint_residual(const VarietyConstraints& c, std::span<const double> params)
{
    return Residuals{c}.value(params).lpNorm<Eigen::Infinity>();
}

namespace {

std::size_t numeric_rank(const Eigen::MatrixXd& j)
{
    if (j.size() == 0) {
        return 0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) {
        return 0;
    }
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > 1e-9 * s(0)) {
            ++rank;
        }
    }
    return rank;
}

std::vector<double> random_point(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<double> a(n);
    for (auto& x : a) {
        x = 0.5 + uniform01(rng);
    }
    return a;
}

} // namespace

std::size_t independent_constraints(const VarietyConstraints& c, std::uint64_t seed)
{
    std::vector<double> a = random_point(c.param_names.size(), seed);
    std::vector<std::size_t> all(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        all[i] = i;
    }
    return numeric_rank(Residuals{c}.jacobian(a, all));
}

std::vector<std::size_t> suggest_free_params(const VarietyConstraints& c, std::uint64_t seed)
{
    std::vector<double> a = random_point(c.param_names.size(), seed);
    std::vector<std::size_t> solved(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        solved[i] = i;
    }
    const std::size_t rank = numeric_rank(Residuals{c}.jacobian(a, solved));
    std::vector<std::size_t> free;
    for (std::size_t p = 0; p < a.size() && solved.size() > rank; ++p) {
        std::vector<std::size_t> trial;
        for (auto q : solved) {
            if (q != p) {
                trial.push_back(q);
            }
        }
        if (numeric_rank(Residuals{c}.jacobian(a, trial)) == rank) {
            solved = std::move(trial);
            free.push_back(p);
        }
    }
    return free;
}

std::vector<std::size_t> unconstrained_params(const VarietyConstraints& c)
{
    std::uint32_t used = 0;
    for (const auto& r : c.coeffs) {
        used |= r.num().variable_mask() | r.den().variable_mask();
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < c.param_names.size(); ++i) {
        if ((used & (1u << i)) == 0) {
            out.push_back(i);
        }
    }
    return out;
}

SampleResult sample_variety(const VarietyConstraints& c, const SampleOptions& opts)
{
    const std::size_t n = c.param_names.size();
    std::vector<ParamRange> bounds(n);
    std::vector<bool> is_free(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        bounds[i] = {i, 0.0, 1e3};
    }
    std::vector<double> start(n, 1.0);
    for (const auto& b : opts.bounds) {
        bounds.at(b.param) = b;
        start[b.param] = 0.5 * (b.lo + b.hi);
    }
    for (const auto& f : opts.free) {
        is_free.at(f.param) = true;
        bounds[f.param] = f;
    }
    std::vector<std::size_t> solved;
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_free[i]) {
            solved.push_back(i);
        }
    }
    const std::size_t k = opts.free.size();
    std::size_t per_axis = opts.count;
    if (k > 1) {
        per_axis = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(opts.count), 1.0 / static_cast<double>(k))));
    }
    std::size_t total = 1;
    for (std::size_t q = 0; q < k; ++q) {
        total *= per_axis;
    }
    Residuals res{c};
    SampleResult out;
    for (std::size_t g = 0; g < total && out.points.size() < opts.count; ++g) {
        std::vector<double> a = start;
        std::size_t idx = g;
        for (const auto& f : opts.free) {
            std::size_t step = idx % per_axis;
            idx /= per_axis;
            a[f.param] = f.lo + (static_cast<double>(step) + 0.5) * (f.hi - f.lo) / static_cast<double>(per_axis);
        }
        Eigen::VectorXd r = res.value(a);
        double rn = r.norm();
        bool converged = r.lpNorm<Eigen::Infinity>() <= opts.tol;
        for (int it = 0; it < opts.max_iter && !converged && std::isfinite(rn); ++it) {
            Eigen::MatrixXd j = res.jacobian(a, solved);
            Eigen::VectorXd step = j.completeOrthogonalDecomposition().solve(-r);
            double lambda = 1.0;
            bool improved = false;
            for (int h = 0; h < 40; ++h) {
                std::vector<double> trial = a;
                for (std::size_t q = 0; q < solved.size(); ++q) {
                    trial[solved[q]] += lambda * step(static_cast<Eigen::Index>(q));
                }
                Eigen::VectorXd rt = res.value(trial);
                if (std::isfinite(rt.norm()) && rt.norm() < rn) {
                    a = trial;
                    r = rt;
                    rn = rt.norm();
                    improved = true;
                    break;
                }
                lambda *= 0.5;
            }
            converged = r.lpNorm<Eigen::Infinity>() <= opts.tol;
            if (!improved) {
                converged = r.lpNorm<Eigen::Infinity>() <= 1e3 * opts.tol;
                break;
            }
        }
        if (!converged) {
            ++out.not_converged;
            continue;
        }
        bool inside = true;
        for (std::size_t i : solved) {
            if (a[i] < bounds[i].lo || a[i] > bounds[i].hi) {
                inside = false;
            }
        }
        if (!inside) {
            ++out.out_of_range;
            continue;
        }
        bool ok = true;
        for (const auto& as : c.assumptions) {
            double scale = 0.0;
            for (const auto& [e, coef] : as.terms()) {
                scale += std::abs(ParamPoly::monomial(e, coef).evaluate(std::span<const double>(a)));
            }
            if (std::abs(as.evaluate(std::span<const double>(a))) <= 1e-12 * scale) {
                ok = false;
            }
        }
        if (!ok) {
            ++out.assumption_violations;
            continue;
        }
        out.points.push_back(std::move(a));
    }
    return out;
}

TimeSelection select_time_points(const IOEquationBasis& basis, const std::function<DataSet(const std::vector<double>&)>& make_data,
                                 double t0, double t1, std::size_t count, std::mt19937_64& rng, double cond_limit, int attempts)
{
    for (int attempt = 1;; ++attempt) {
        std::vector<double> times(count);
        for (auto& t : times) {
            t = t0 + (t1 - t0) * uniform01(rng);
        }
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
        TimeSelection sel;
        sel.data = make_data(times);
        sel.attempts = attempt;
        try {
            sel.solve = solve_coefficients(build_linear_system(basis, sel.data), cond_limit);
            return sel;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::IllConditioned || attempt >= attempts) {
                throw;
            }
        }
    }
}

} // namespace parvar
