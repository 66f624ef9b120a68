#include "parvar/model/model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "parvar/error.hpp"

namespace parvar {

namespace {

[[noreturn]] void fail(ErrorCode code, int line, int col, const std::string& msg)
{
    throw Error(code, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
}

enum class Tok { Ident, Number, Op, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int col = 0;
};

std::vector<Token> lex(std::string_view s, int line, int col0)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        int col = col0 + static_cast<int>(i);
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) {
                ++j;
            }
            out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), col});
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
                ++j;
            }
            if (j < s.size() && s[j] == '.') {
                ++j;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
                    ++j;
                }
            }
            if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < s.size() && (s[k] == '+' || s[k] == '-')) {
                    ++k;
                }
                if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
                    while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
                        ++k;
                    }
                    j = k;
                }
            }
            out.push_back({Tok::Number, std::string(s.substr(i, j - i)), col});
            i = j;
        } else if (std::string_view("+-*/^()=,").find(c) != std::string_view::npos) {
            out.push_back({Tok::Op, std::string(1, c), col});
            ++i;
        } else {
            fail(ErrorCode::SyntaxError, line, col, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Tok::End, "", col0 + static_cast<int>(s.size())});
    return out;
}

class ExprParser {
public:
    ExprParser(std::vector<Token> toks, int line, const SymbolTable& sym, const RingPtr& ring)
        : toks_(std::move(toks)), line_(line), sym_(sym), ring_(ring)
    {
    }

    Poly parse_all()
    {
        if (peek().kind == Tok::End) {
            fail(ErrorCode::SyntaxError, line_, peek().col, "expected an expression");
        }
        Poly p = expr();
        if (peek().kind != Tok::End) {
            fail(ErrorCode::SyntaxError, line_, peek().col, "unexpected '" + peek().text + "'");
        }
        return p;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    bool is_op(char c) const { return peek().kind == Tok::Op && peek().text[0] == c; }
    const Token& next() { return toks_[pos_++]; }

    Poly expr()
    {
        Poly p = term();
        while (is_op('+') || is_op('-')) {
            bool plus = next().text[0] == '+';
            Poly q = term();
            p = plus ? p + q : p - q;
        }
        return p;
    }

    Poly term()
    {
        Poly p = unary();
        while (is_op('*') || is_op('/')) {
            const Token& op = next();
            int col = peek().col;
            Poly q = unary();
            if (op.text[0] == '*') {
                p = p * q;
            } else {
                p = p * reciprocal(q, col);
            }
        }
        return p;
    }

    Poly reciprocal(const Poly& q, int col)
    {
        if (q.is_zero()) {
            fail(ErrorCode::SyntaxError, line_, col, "division by zero");
        }
        if (!q.is_constant()) {
            fail(ErrorCode::NonPolynomialModel, line_, col, "division by an expression in state or input variables");
        }
        return Poly::constant(ring_, q.leading_coefficient().inv());
    }

    Poly unary()
    {
        if (is_op('-')) {
            next();
            return -unary();
        }
        if (is_op('+')) {
            next();
            return unary();
        }
        return power();
    }

    Poly power()
    {
        Poly base = primary();
        if (!is_op('^')) {
            return base;
        }
        next();
        bool negative = false;
        if (is_op('-')) {
            next();
            negative = true;
        }
        const Token& t = peek();
        if (t.kind != Tok::Number || t.text.find_first_not_of("0123456789") != std::string::npos) {
            fail(ErrorCode::SyntaxError, line_, t.col, "exponent must be an integer literal");
        }
        next();
        unsigned e = static_cast<unsigned>(std::stoul(t.text));
        Poly r = base.pow(e);
        return negative ? reciprocal(r, t.col) : r;
    }

    Poly primary()
    {
        const Token& t = peek();
        if (t.kind == Tok::Number) {
            next();
            return Poly::constant(ring_, ParamRat(parse_decimal(t.text)));
        }
        if (t.kind == Tok::Ident) {
            next();
            return symbol(t);
        }
        if (is_op('(')) {
            next();
            Poly p = expr();
            if (!is_op(')')) {
                fail(ErrorCode::SyntaxError, line_, peek().col, "expected ')'");
            }
            next();
            return p;
        }
        if (t.kind == Tok::End) {
            fail(ErrorCode::SyntaxError, line_, t.col, "unexpected end of expression");
        }
        fail(ErrorCode::SyntaxError, line_, t.col, "unexpected '" + t.text + "'");
    }

    Poly symbol(const Token& t)
    {
        const auto& params = sym_.params;
        if (auto it = std::find(params.begin(), params.end(), t.text); it != params.end()) {
            return Poly::constant(ring_, ParamRat::parameter(static_cast<std::size_t>(it - params.begin())));
        }
        auto find_var = [&](const std::vector<std::string>& names, VarKind kind) -> std::optional<DiffVar> {
            if (auto it = std::find(names.begin(), names.end(), t.text); it != names.end()) {
                return DiffVar{kind, static_cast<std::uint16_t>(it - names.begin()), 0};
            }
            return std::nullopt;
        };
        std::optional<DiffVar> v = find_var(sym_.states, VarKind::State);
        if (!v) {
            v = find_var(sym_.inputs, VarKind::Input);
        }
        if (!v && t.text == sym_.output) {
            fail(ErrorCode::SyntaxError, line_, t.col, "output " + t.text + " cannot appear on a right-hand side");
        }
        if (!v) {
            fail(ErrorCode::UndeclaredSymbol, line_, t.col, "undeclared symbol '" + t.text + "'");
        }
        if (!ring_->contains(*v)) {
            fail(ErrorCode::SyntaxError, line_, t.col, "variable '" + t.text + "' is not allowed here");
        }
        return Poly::variable(ring_, *v);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int line_;
    const SymbolTable& sym_;
    RingPtr ring_;
};

struct Line {
    int number;
    int col0; // column of the first character of `text`
    std::string text;
};

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

// Splits a comma-separated list, keeping column offsets.
std::vector<Line> split_list(const Line& l)
{
    std::vector<Line> out;
    std::size_t start = 0;
    const std::string& s = l.text;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == ',') {
            std::string_view item(s.data() + start, i - start);
            std::size_t lead = 0;
            while (lead < item.size() && std::isspace(static_cast<unsigned char>(item[lead]))) {
                ++lead;
            }
            std::string_view t = trim(item);
            if (t.empty()) {
                if (i != s.size() || !out.empty()) {
                    fail(ErrorCode::SyntaxError, l.number, l.col0 + static_cast<int>(i), "empty list item");
                }
            } else {
                out.push_back({l.number, l.col0 + static_cast<int>(start + lead), std::string(t)});
            }
            start = i + 1;
        }
    }
    return out;
}

bool is_identifier(std::string_view s)
{
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) {
        return false;
    }
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

const std::set<std::string> kSections{"states", "inputs", "output", "params", "assume_nonzero", "horizon"};

} // namespace

bool ModelSpec::output_uses_inputs() const
{
    for (std::size_t i = 0; i < base_ring->size(); ++i) {
        if (base_ring->var(i).kind == VarKind::Input && g.uses_variable(i)) {
            return true;
        }
    }
    return false;
}

ModelSpec parse_model(std::string_view text)
{
    std::map<std::string, Line> sections;
    std::vector<Line> equations;
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view raw = text.substr(pos, end - pos);
        ++number;
        pos = end + 1;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) {
            raw = raw.substr(0, hash);
        }
        if (!raw.empty() && raw.back() == '\r') {
            raw.remove_suffix(1);
        }
        if (trim(raw).empty()) {
            continue;
        }
        auto colon = raw.find(':');
        if (colon != std::string_view::npos) {
            std::string key(trim(raw.substr(0, colon)));
            if (!kSections.contains(key)) {
                fail(ErrorCode::SyntaxError, number, 1, "unknown section '" + key + "'");
            }
            if (sections.contains(key)) {
                fail(ErrorCode::SyntaxError, number, 1, "section '" + key + "' given twice");
            }
            sections[key] = Line{number, static_cast<int>(colon) + 2, std::string(raw.substr(colon + 1))};
        } else {
            equations.push_back(Line{number, 1, std::string(raw)});
        }
    }
    if (sections.empty() && equations.empty()) {
        fail(ErrorCode::SyntaxError, 1, 1, "empty model");
    }

    auto symbols = std::make_shared<SymbolTable>();
    std::set<std::string> declared;
    auto names_of = [&](const char* key, bool required) {
        std::vector<std::string> out;
        auto it = sections.find(key);
        if (it == sections.end()) {
            if (required) {
                fail(ErrorCode::SyntaxError, number, 1, std::string("missing section '") + key + ":'");
            }
            return out;
        }
        for (const auto& item : split_list(it->second)) {
            if (!is_identifier(item.text)) {
                fail(ErrorCode::SyntaxError, item.number, item.col0, "'" + item.text + "' is not a valid name");
            }
            if (item.text == "dt" || !declared.insert(item.text).second) {
                fail(ErrorCode::SyntaxError, item.number, item.col0, "symbol '" + item.text + "' declared twice");
            }
            out.push_back(item.text);
        }
        return out;
    };
    symbols->states = names_of("states", true);
    symbols->inputs = names_of("inputs", false);
    std::vector<std::string> outputs = names_of("output", true);
    if (outputs.size() != 1) {
        const Line& l = sections.at("output");
        fail(ErrorCode::SyntaxError, l.number, l.col0, "exactly one output is supported");
    }
    symbols->output = outputs[0];
    symbols->params = names_of("params", false);
    if (symbols->states.empty()) {
        const Line& l = sections.at("states");
        fail(ErrorCode::SyntaxError, l.number, l.col0, "at least one state is required");
    }
    if (symbols->params.size() > kMaxParams) {
        const Line& l = sections.at("params");
        fail(ErrorCode::SyntaxError, l.number, l.col0, "at most " + std::to_string(kMaxParams) + " parameters are supported");
    }

    ModelSpec model;
    model.symbols = symbols;
    model.base_ring = make_jet_ring(symbols, 0, 0, symbols->inputs.empty() ? -1 : 0);
    const std::size_t n = symbols->states.size();
    model.f.assign(n, Poly());
    std::vector<bool> seen(n, false);
    bool have_output = false;

    for (const auto& l : equations) {
        auto eq = l.text.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCode::SyntaxError, l.number, 1, "expected an equation or a section header");
        }
        auto lhs = lex(std::string_view(l.text).substr(0, eq), l.number, 1);
        auto rhs_toks = lex(std::string_view(l.text).substr(eq + 1), l.number, static_cast<int>(eq) + 2);
        ExprParser parser(std::move(rhs_toks), l.number, *symbols, model.base_ring);
        if (lhs.size() == 2 && lhs[0].kind == Tok::Ident && lhs[0].text == symbols->output) {
            if (have_output) {
                fail(ErrorCode::SyntaxError, l.number, lhs[0].col, "output equation given twice");
            }
            model.g = parser.parse_all();
            have_output = true;
            continue;
        }
        bool shape = lhs.size() == 4 && lhs[0].kind == Tok::Ident && lhs[0].text.size() > 1 && lhs[0].text[0] == 'd'
            && lhs[1].kind == Tok::Op && lhs[1].text == "/" && lhs[2].kind == Tok::Ident && lhs[2].text == "dt";
        if (!shape) {
            fail(ErrorCode::SyntaxError, l.number, lhs.front().col, "left-hand side must be d<state>/dt or the output");
        }
        std::string name = lhs[0].text.substr(1);
        auto it = std::find(symbols->states.begin(), symbols->states.end(), name);
        if (it == symbols->states.end()) {
            fail(ErrorCode::UndeclaredSymbol, l.number, lhs[0].col + 1, "'" + name + "' is not a declared state");
        }
        std::size_t k = static_cast<std::size_t>(it - symbols->states.begin());
        if (seen[k]) {
            fail(ErrorCode::SyntaxError, l.number, lhs[0].col, "equation for '" + name + "' given twice");
        }
        model.f[k] = parser.parse_all();
        if (model.f[k].is_zero()) {
            model.f[k] = Poly(model.base_ring);
        }
        seen[k] = true;
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (!seen[k]) {
            fail(ErrorCode::SyntaxError, number, 1, "missing equation for d" + symbols->states[k] + "/dt");
        }
    }
    if (!have_output) {
        fail(ErrorCode::SyntaxError, number, 1, "missing output equation '" + symbols->output + " = ...'");
    }
    if (model.g.is_zero()) {
        model.g = Poly(model.base_ring);
    }

    if (auto it = sections.find("assume_nonzero"); it != sections.end()) {
        auto param_ring = std::make_shared<Ring>(std::vector<DiffVar>{}, symbols);
        for (const auto& item : split_list(it->second)) {
            ExprParser p(lex(item.text, item.number, item.col0), item.number, *symbols, param_ring);
            Poly v = p.parse_all();
            if (v.is_zero()) {
                fail(ErrorCode::SyntaxError, item.number, item.col0, "assumption is identically zero");
            }
            ParamRat r = v.leading_coefficient();
            model.assumptions.push_back(primitive_part(r.num()));
        }
    }
    if (auto it = sections.find("horizon"); it != sections.end()) {
        auto items = split_list(it->second);
        if (items.size() != 2) {
            fail(ErrorCode::SyntaxError, it->second.number, it->second.col0, "horizon needs two values: t0, t1");
        }
        auto empty = std::make_shared<SymbolTable>();
        auto const_ring = std::make_shared<Ring>(std::vector<DiffVar>{}, empty);
        double vals[2];
        for (int i = 0; i < 2; ++i) {
            ExprParser p(lex(items[i].text, items[i].number, items[i].col0), items[i].number, *empty, const_ring);
            Poly v = p.parse_all();
            vals[i] = v.is_zero() ? 0.0 : to_double(v.leading_coefficient().constant_value());
        }
        if (!(vals[1] > vals[0])) {
            fail(ErrorCode::SyntaxError, items[1].number, items[1].col0, "horizon end must exceed its start");
        }
        model.horizon = Horizon{vals[0], vals[1]};
    }
    return model;
}

ModelSpec load_model(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open model file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_model(ss.str());
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + std::string(e.what()).substr(std::string(error_code_name(e.code())).size() + 2));
    }
}

ParamRat parse_param_expression(std::string_view text, const SymbolTable& symbols)
{
    auto shared = std::make_shared<SymbolTable>(symbols);
    auto ring = std::make_shared<Ring>(std::vector<DiffVar>{}, shared);
    ExprParser p(lex(text, 1, 1), 1, *shared, ring);
    Poly v = p.parse_all();
    return v.is_zero() ? ParamRat() : v.leading_coefficient();
}

RingPtr make_jet_ring(const std::shared_ptr<const SymbolTable>& symbols, int state_order, int output_order,
                      int input_order)
{
    std::vector<DiffVar> vars;
    auto block = [&](VarKind kind, std::size_t count, int top) {
        for (int k = top; k >= 0; --k) {
            for (std::size_t i = count; i-- > 0;) {
                vars.push_back({kind, static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(k)});
            }
        }
    };
    block(VarKind::State, symbols->states.size(), state_order);
    block(VarKind::Output, 1, output_order);
    block(VarKind::Input, symbols->inputs.size(), input_order);
    return std::make_shared<Ring>(std::move(vars), symbols);
}

Poly total_derivative(const Poly& p, const RingPtr& target)
{
    Poly src = p.embed(target);
    Poly out(target);
    for (const auto& [m, c] : src.terms()) {
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) {
                continue;
            }
            Monomial d = m;
            d[i] -= 1;
            d[target->index_of(target->var(i).differentiated())] += 1;
            out.add_term(d, c * ParamRat(static_cast<long>(m[i])));
        }
    }
    return out;
}

ProlongedSystem prolong(const ModelSpec& model, int order)
{
    if (order < 1) {
        throw Error(ErrorCode::InternalError, "prolongation order must be at least 1");
    }
    const std::size_t n = model.num_states();
    int input_order = -1;
    if (model.num_inputs() != 0) {
        input_order = model.output_uses_inputs() ? order : order - 1;
    }
    ProlongedSystem sys;
    sys.order = order;
    sys.ring = make_jet_ring(model.symbols, order, order, input_order);
    // Derivatives are formed in a wider scratch ring and embedded afterwards.
    RingPtr scratch = make_jet_ring(model.symbols, order + 1, order + 1, model.num_inputs() != 0 ? order + 1 : -1);

    for (std::size_t j = 0; j < n; ++j) {
        Poly rhs = model.f[j].embed(scratch);
        for (int k = 1; k <= order; ++k) {
            Poly lhs = Poly::variable(scratch, {VarKind::State, static_cast<std::uint16_t>(j), static_cast<std::uint16_t>(k)});
            sys.gens.push_back((lhs - rhs).embed(sys.ring));
            rhs = total_derivative(rhs, scratch);
        }
    }
    Poly rhs = model.g.embed(scratch);
    for (int k = 0; k <= order; ++k) {
        Poly lhs = Poly::variable(scratch, {VarKind::Output, 0, static_cast<std::uint16_t>(k)});
        sys.gens.push_back((lhs - rhs).embed(sys.ring));
        rhs = total_derivative(rhs, scratch);
    }
    return sys;
}

} // namespace parvar
