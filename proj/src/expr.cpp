#include "dvar/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace dvar {

const char* func_name(Func f) {
    switch (f) {
        case Func::Sin:  return "sin";
        case Func::Cos:  return "cos";
        case Func::Tan:  return "tan";
        case Func::Exp:  return "exp";
        case Func::Log:  return "log";
        case Func::Sqrt: return "sqrt";
        case Func::Tanh: return "tanh";
    }
    return "?";
}

namespace {

bool is_const(const NodePtr& n, double v) {
    return n->kind == Node::Kind::Constant && n->constant == v;
}

std::string format_double(double v) {
    std::array<char, 32> buf;
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

// Precedence levels, higher binds tighter: 0 expr, 1 term, 2 factor, 3 power, 4 atom.
int node_level(const Node& n) {
    switch (n.kind) {
        case Node::Kind::Add:
        case Node::Kind::Sub: return 0;
        case Node::Kind::Mul:
        case Node::Kind::Div: return 1;
        case Node::Kind::Negate: return 2;
        case Node::Kind::Pow: return 3;
        case Node::Kind::Constant: return n.constant < 0.0 ? 2 : 4;
        case Node::Kind::Variable:
        case Node::Kind::Call: return 4;
    }
    return 4;
}

void print_node(const Node& n, int min_level, std::string& out) {
    const bool parens = node_level(n) < min_level;
    if (parens) out += '(';
    switch (n.kind) {
        case Node::Kind::Constant:
            if (n.constant < 0.0) {
                out += '-';
                out += format_double(-n.constant);
            } else {
                out += format_double(n.constant);
            }
            break;
        case Node::Kind::Variable:
            out += n.name;
            break;
        case Node::Kind::Negate:
            out += '-';
            print_node(*n.a, 3, out);
            break;
        case Node::Kind::Add:
            print_node(*n.a, 0, out);
            out += " + ";
            print_node(*n.b, 1, out);
            break;
        case Node::Kind::Sub:
            print_node(*n.a, 0, out);
            out += " - ";
            print_node(*n.b, 1, out);
            break;
        case Node::Kind::Mul:
            print_node(*n.a, 1, out);
            out += "*";
            print_node(*n.b, 2, out);
            break;
        case Node::Kind::Div:
            print_node(*n.a, 1, out);
            out += "/";
            print_node(*n.b, 2, out);
            break;
        case Node::Kind::Pow:
            print_node(*n.a, 4, out);
            out += '^';
            out += std::to_string(n.exponent);
            break;
        case Node::Kind::Call:
            out += func_name(n.func);
            out += '(';
            print_node(*n.a, 0, out);
            out += ')';
            break;
    }
    if (parens) out += ')';
}

std::string print_node(const Node& n) {
    std::string out;
    print_node(n, 0, out);
    return out;
}

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    double number = 0.0;
    bool integer_literal = false; // digits only, usable as an exponent
    std::string text;
    std::size_t offset = 0;
    int index = 0; // 1-based
};

const char* tok_desc(Tok t) {
    switch (t) {
        case Tok::Number: return "number";
        case Tok::Ident:  return "identifier";
        case Tok::Plus:   return "'+'";
        case Tok::Minus:  return "'-'";
        case Tok::Star:   return "'*'";
        case Tok::Slash:  return "'/'";
        case Tok::Caret:  return "'^'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::End:    return "end of input";
    }
    return "?";
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    int index = 0;
    auto push = [&](Tok kind, std::size_t start, std::size_t len) -> Token& {
        out.push_back(Token{kind, 0.0, false, std::string(text.substr(start, len)), start, ++index});
        return out.back();
    };
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        switch (c) {
            case '+': push(Tok::Plus, i, 1); ++i; continue;
            case '-': push(Tok::Minus, i, 1); ++i; continue;
            case '*': push(Tok::Star, i, 1); ++i; continue;
            case '/': push(Tok::Slash, i, 1); ++i; continue;
            case '^': push(Tok::Caret, i, 1); ++i; continue;
            case '(': push(Tok::LParen, i, 1); ++i; continue;
            case ')': push(Tok::RParen, i, 1); ++i; continue;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const std::size_t start = i;
            bool digits = false, dot = false;
            while (i < text.size() &&
                   (std::isdigit(static_cast<unsigned char>(text[i])) || (!dot && text[i] == '.'))) {
                if (text[i] == '.') dot = true; else digits = true;
                ++i;
            }
            if (!digits)
                throw ParseError("syntax error at offset " + std::to_string(start) +
                                     ": '.' is not a number",
                                 index + 1, start);
            bool has_exp = false;
            if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
                if (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
                    has_exp = true;
                    i = j;
                    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
                }
            }
            Token& t = push(Tok::Number, start, i - start);
            t.number = std::strtod(t.text.c_str(), nullptr);
            t.integer_literal = !dot && !has_exp;
            continue;
        }
        if (std::islower(static_cast<unsigned char>(c))) {
            const std::size_t start = i;
            while (i < text.size() &&
                   (std::islower(static_cast<unsigned char>(text[i])) ||
                    std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '_'))
                ++i;
            push(Tok::Ident, start, i - start);
            continue;
        }
        throw ParseError("syntax error at offset " + std::to_string(i) + ": unexpected character '" +
                             std::string(1, c) + "'",
                         index + 1, i);
    }
    push(Tok::End, text.size(), 0);
    return out;
}

// ---------------------------------------------------------------------------
// Recursive-descent parser
// ---------------------------------------------------------------------------

class Parser {
public:
    Parser(std::vector<Token> tokens, const std::vector<std::string>& vocabulary)
        : toks_(std::move(tokens)), vocab_(vocabulary) {}

    NodePtr run() {
        NodePtr e = parse_expr();
        if (peek().kind != Tok::End) fail("expected '+', '-', '*', '/' or end of input");
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& advance() { return toks_[pos_++]; }
    bool accept(Tok k) {
        if (peek().kind == k) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& expected) const {
        const Token& t = peek();
        throw ParseError("syntax error at token " + std::to_string(t.index) + " (offset " +
                             std::to_string(t.offset) + "): unexpected " + tok_desc(t.kind) +
                             (t.text.empty() ? "" : " '" + t.text + "'") + "; " + expected,
                         t.index, t.offset);
    }

    NodePtr parse_expr() {
        NodePtr e = parse_term();
        while (true) {
            if (accept(Tok::Plus)) {
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Add;
                n->a = e;
                n->b = parse_term();
                e = n;
            } else if (accept(Tok::Minus)) {
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Sub;
                n->a = e;
                n->b = parse_term();
                e = n;
            } else {
                return e;
            }
        }
    }

    NodePtr parse_term() {
        NodePtr e = parse_factor();
        while (true) {
            if (accept(Tok::Star)) {
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Mul;
                n->a = e;
                n->b = parse_factor();
                e = n;
            } else if (accept(Tok::Slash)) {
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Div;
                n->a = e;
                n->b = parse_factor();
                e = n;
            } else {
                return e;
            }
        }
    }

    NodePtr parse_factor() {
        if (accept(Tok::Minus)) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Negate;
            n->a = parse_power();
            return n;
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (accept(Tok::Caret)) {
            const Token& t = peek();
            if (t.kind != Tok::Number || !t.integer_literal)
                fail("expected a constant integer exponent >= 0");
            advance();
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Pow;
            n->a = base;
            n->exponent = static_cast<int>(t.number);
            return n;
        }
        return base;
    }

    NodePtr parse_atom() {
        const Token& t = peek();
        if (t.kind == Tok::Number) {
            advance();
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Constant;
            n->constant = t.number;
            return n;
        }
        if (t.kind == Tok::Ident) {
            advance();
            if (accept(Tok::LParen)) {
                static const std::map<std::string, Func, std::less<>> funcs{
                    {"sin", Func::Sin},   {"cos", Func::Cos}, {"tan", Func::Tan},
                    {"exp", Func::Exp},   {"log", Func::Log}, {"sqrt", Func::Sqrt},
                    {"tanh", Func::Tanh}};
                auto it = funcs.find(t.text);
                if (it == funcs.end()) {
                    if (t.text == "abs")
                        throw ParseError("function 'abs' is not twice differentiable and is "
                                         "rejected here (token " + std::to_string(t.index) + ")",
                                         t.index, t.offset);
                    throw ParseError("unknown function '" + t.text + "' at token " +
                                         std::to_string(t.index),
                                     t.index, t.offset);
                }
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Call;
                n->func = it->second;
                n->a = parse_expr();
                if (!accept(Tok::RParen)) fail("expected ')'");
                return n;
            }
            auto slot = std::find(vocab_.begin(), vocab_.end(), t.text);
            if (slot == vocab_.end())
                throw ParseError("unknown variable '" + t.text + "' at token " +
                                     std::to_string(t.index) + " (allowed: " + joined_vocab() + ")",
                                 t.index, t.offset);
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Variable;
            n->slot = static_cast<int>(slot - vocab_.begin());
            n->name = t.text;
            return n;
        }
        if (accept(Tok::LParen)) {
            NodePtr e = parse_expr();
            if (!accept(Tok::RParen)) fail("expected ')'");
            return e;
        }
        fail("expected number, identifier, '(' or '-'");
    }

    std::string joined_vocab() const {
        std::string s;
        for (const auto& v : vocab_) {
            if (!s.empty()) s += ", ";
            s += v;
        }
        return s;
    }

    std::vector<Token> toks_;
    const std::vector<std::string>& vocab_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Generic evaluator
// ---------------------------------------------------------------------------

template <class S>
S eval_node(const Node& n, std::span<const S> env) {
    switch (n.kind) {
        case Node::Kind::Constant:
            return S(n.constant);
        case Node::Kind::Variable:
            return env[static_cast<std::size_t>(n.slot)];
        case Node::Kind::Negate:
            return -eval_node(*n.a, env);
        case Node::Kind::Add:
            return eval_node(*n.a, env) + eval_node(*n.b, env);
        case Node::Kind::Sub:
            return eval_node(*n.a, env) - eval_node(*n.b, env);
        case Node::Kind::Mul:
            return eval_node(*n.a, env) * eval_node(*n.b, env);
        case Node::Kind::Div: {
            S denom = eval_node(*n.b, env);
            if (scalar_value(denom) == 0.0)
                throw EvalError("division by zero in '" + print_node(n) + "'");
            return eval_node(*n.a, env) / denom;
        }
        case Node::Kind::Pow: {
            S base = eval_node(*n.a, env);
            S r(1.0);
            for (int i = 0; i < n.exponent; ++i) r = r * base;
            return r;
        }
        case Node::Kind::Call: {
            using std::sin; using std::cos; using std::tan;
            using std::exp; using std::log; using std::sqrt; using std::tanh;
            S u = eval_node(*n.a, env);
            const double uv = scalar_value(u);
            switch (n.func) {
                case Func::Sin:  return sin(u);
                case Func::Cos:  return cos(u);
                case Func::Tan:  return tan(u);
                case Func::Exp:  return exp(u);
                case Func::Tanh: return tanh(u);
                case Func::Log:
                    if (uv <= 0.0)
                        throw EvalError("log of non-positive value in '" + print_node(n) + "'");
                    return log(u);
                case Func::Sqrt:
                    if constexpr (std::is_same_v<S, double>) {
                        if (uv < 0.0)
                            throw EvalError("sqrt of negative value in '" + print_node(n) + "'");
                    } else {
                        // The derivative of sqrt blows up at zero.
                        if (uv <= 0.0)
                            throw EvalError("sqrt differentiated at a non-positive value in '" +
                                            print_node(n) + "'");
                    }
                    return sqrt(u);
            }
            break;
        }
    }
    throw EvalError("corrupt expression node");
}

bool nodes_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Node::Kind::Constant: return a.constant == b.constant;
        case Node::Kind::Variable: return a.slot == b.slot && a.name == b.name;
        case Node::Kind::Negate:   return nodes_equal(*a.a, *b.a);
        case Node::Kind::Pow:      return a.exponent == b.exponent && nodes_equal(*a.a, *b.a);
        case Node::Kind::Call:     return a.func == b.func && nodes_equal(*a.a, *b.a);
        default:                   return nodes_equal(*a.a, *b.a) && nodes_equal(*a.b, *b.b);
    }
}

bool node_references(const Node& n, int slot) {
    switch (n.kind) {
        case Node::Kind::Constant: return false;
        case Node::Kind::Variable: return n.slot == slot;
        case Node::Kind::Negate:
        case Node::Kind::Pow:
        case Node::Kind::Call: return node_references(*n.a, slot);
        default: return node_references(*n.a, slot) || node_references(*n.b, slot);
    }
}

NodePtr derivative_node(const NodePtr& n, int slot) {
    switch (n->kind) {
        case Node::Kind::Constant:
            return make_constant(0.0);
        case Node::Kind::Variable:
            return make_constant(n->slot == slot ? 1.0 : 0.0);
        case Node::Kind::Negate:
            return make_negate(derivative_node(n->a, slot));
        case Node::Kind::Add:
            return make_add(derivative_node(n->a, slot), derivative_node(n->b, slot));
        case Node::Kind::Sub:
            return make_sub(derivative_node(n->a, slot), derivative_node(n->b, slot));
        case Node::Kind::Mul:
            return make_add(make_mul(derivative_node(n->a, slot), n->b),
                            make_mul(n->a, derivative_node(n->b, slot)));
        case Node::Kind::Div:
            return make_div(make_sub(make_mul(derivative_node(n->a, slot), n->b),
                                     make_mul(n->a, derivative_node(n->b, slot))),
                            make_pow(n->b, 2));
        case Node::Kind::Pow:
            if (n->exponent == 0) return make_constant(0.0);
            return make_mul(make_mul(make_constant(n->exponent), make_pow(n->a, n->exponent - 1)),
                            derivative_node(n->a, slot));
        case Node::Kind::Call: {
            NodePtr du = derivative_node(n->a, slot);
            switch (n->func) {
                case Func::Sin:  return make_mul(make_call(Func::Cos, n->a), du);
                case Func::Cos:  return make_negate(make_mul(make_call(Func::Sin, n->a), du));
                case Func::Tan:  return make_div(du, make_pow(make_call(Func::Cos, n->a), 2));
                case Func::Exp:  return make_mul(make_call(Func::Exp, n->a), du);
                case Func::Log:  return make_div(du, n->a);
                case Func::Sqrt:
                    return make_div(du, make_mul(make_constant(2.0), make_call(Func::Sqrt, n->a)));
                case Func::Tanh:
                    return make_mul(make_sub(make_constant(1.0),
                                             make_pow(make_call(Func::Tanh, n->a), 2)),
                                    du);
            }
            break;
        }
    }
    throw Error("corrupt expression node in derivative");
}

NodePtr compose_node(const NodePtr& n, const std::vector<NodePtr>& replacement_by_slot) {
    switch (n->kind) {
        case Node::Kind::Constant:
            return n;
        case Node::Kind::Variable: {
            const auto& r = replacement_by_slot[static_cast<std::size_t>(n->slot)];
            if (!r) throw Error("compose: no replacement for variable '" + n->name + "'");
            return r;
        }
        case Node::Kind::Negate:
            return make_negate(compose_node(n->a, replacement_by_slot));
        case Node::Kind::Add:
            return make_add(compose_node(n->a, replacement_by_slot),
                            compose_node(n->b, replacement_by_slot));
        case Node::Kind::Sub:
            return make_sub(compose_node(n->a, replacement_by_slot),
                            compose_node(n->b, replacement_by_slot));
        case Node::Kind::Mul:
            return make_mul(compose_node(n->a, replacement_by_slot),
                            compose_node(n->b, replacement_by_slot));
        case Node::Kind::Div:
            return make_div(compose_node(n->a, replacement_by_slot),
                            compose_node(n->b, replacement_by_slot));
        case Node::Kind::Pow:
            return make_pow(compose_node(n->a, replacement_by_slot), n->exponent);
        case Node::Kind::Call:
            return make_call(n->func, compose_node(n->a, replacement_by_slot));
    }
    throw Error("corrupt expression node in compose");
}

} // namespace

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

NodePtr make_constant(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Constant;
    n->constant = v;
    return n;
}

NodePtr make_variable(int slot, std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Variable;
    n->slot = slot;
    n->name = std::move(name);
    return n;
}

NodePtr make_negate(NodePtr a) {
    if (a->kind == Node::Kind::Constant) return make_constant(-a->constant);
    if (a->kind == Node::Kind::Negate) return a->a;
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Negate;
    n->a = std::move(a);
    return n;
}

NodePtr make_add(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    if (a->kind == Node::Kind::Constant && b->kind == Node::Kind::Constant)
        return make_constant(a->constant + b->constant);
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Add;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_sub(NodePtr a, NodePtr b) {
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return make_negate(std::move(b));
    if (a->kind == Node::Kind::Constant && b->kind == Node::Kind::Constant)
        return make_constant(a->constant - b->constant);
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Sub;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_mul(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0) || is_const(b, 0.0)) return make_constant(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (a->kind == Node::Kind::Constant && b->kind == Node::Kind::Constant)
        return make_constant(a->constant * b->constant);
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Mul;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_div(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0) && !(b->kind == Node::Kind::Constant && b->constant == 0.0))
        return make_constant(0.0);
    if (is_const(b, 1.0)) return a;
    if (a->kind == Node::Kind::Constant && b->kind == Node::Kind::Constant &&
        b->constant != 0.0) {
        const double q = a->constant / b->constant;
        if (std::isfinite(q)) return make_constant(q);
    }
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Div;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_pow(NodePtr a, int exponent) {
    if (exponent < 0) throw Error("power exponent must be >= 0");
    if (exponent == 0) return make_constant(1.0);
    if (exponent == 1) return a;
    if (a->kind == Node::Kind::Constant) {
        double r = 1.0;
        for (int i = 0; i < exponent; ++i) r *= a->constant;
        return make_constant(r);
    }
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Pow;
    n->a = std::move(a);
    n->exponent = exponent;
    return n;
}

NodePtr make_call(Func f, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Call;
    n->func = f;
    n->a = std::move(a);
    return n;
}

// ---------------------------------------------------------------------------
// Expr
// ---------------------------------------------------------------------------

Expr::Expr(NodePtr root, std::vector<std::string> vocabulary)
    : root_(std::move(root)), vocab_(std::move(vocabulary)) {}

Expr Expr::parse(std::string_view text, std::vector<std::string> vocabulary) {
    Parser parser(tokenize(text), vocabulary);
    NodePtr root = parser.run();
    return Expr(std::move(root), std::move(vocabulary));
}

int Expr::slot_of(std::string_view name) const {
    auto it = std::find(vocab_.begin(), vocab_.end(), name);
    return it == vocab_.end() ? -1 : static_cast<int>(it - vocab_.begin());
}

std::string Expr::to_string() const {
    if (!root_) return "0";
    return print_node(*root_);
}

double Expr::eval(std::span<const double> env) const { return eval_node<double>(*root_, env); }
Dual Expr::eval(std::span<const Dual> env) const { return eval_node<Dual>(*root_, env); }
HyperDual Expr::eval(std::span<const HyperDual> env) const {
    return eval_node<HyperDual>(*root_, env);
}

std::vector<double> Expr::env_from(const std::map<std::string, double>& bindings) const {
    std::vector<double> env(vocab_.size(), 0.0);
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
        auto it = bindings.find(vocab_[i]);
        if (it == bindings.end())
            throw EvalError("missing binding for '" + vocab_[i] + "'");
        env[i] = it->second;
    }
    return env;
}

double Expr::eval(const std::map<std::string, double>& bindings) const {
    const std::vector<double> env = env_from(bindings);
    return eval(std::span<const double>(env));
}

std::pair<double, std::vector<double>> Expr::eval_grad(
    const std::map<std::string, double>& bindings, const std::vector<std::string>& wrt) const {
    const std::vector<double> env = env_from(bindings);
    const int k = static_cast<int>(wrt.size());
    if (k > kMaxSeeds) throw EvalError("too many seeded directions");
    std::vector<Dual> denv(vocab_.size());
    for (std::size_t i = 0; i < vocab_.size(); ++i) denv[i] = Dual(env[i]);
    for (int j = 0; j < k; ++j) {
        const int slot = slot_of(wrt[static_cast<std::size_t>(j)]);
        if (slot < 0)
            throw EvalError("gradient variable '" + wrt[static_cast<std::size_t>(j)] +
                            "' is not a free variable");
        denv[static_cast<std::size_t>(slot)] = Dual::seeded(env[static_cast<std::size_t>(slot)], k, j);
    }
    const Dual r = eval(std::span<const Dual>(denv));
    std::vector<double> grad(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) grad[static_cast<std::size_t>(j)] = r.partial(j);
    return {r.value(), std::move(grad)};
}

double Expr::eval_mixed2(const std::map<std::string, double>& bindings, std::string_view a,
                         std::string_view b) const {
    const std::vector<double> env = env_from(bindings);
    const int sa = slot_of(a), sb = slot_of(b);
    if (sa < 0) throw EvalError("mixed-partial variable '" + std::string(a) + "' is not free");
    if (sb < 0) throw EvalError("mixed-partial variable '" + std::string(b) + "' is not free");
    std::vector<HyperDual> henv(vocab_.size());
    for (std::size_t i = 0; i < vocab_.size(); ++i) henv[i] = HyperDual(env[i]);
    henv[static_cast<std::size_t>(sa)].d1 = 1.0;
    henv[static_cast<std::size_t>(sb)].d2 = 1.0;
    return eval(std::span<const HyperDual>(henv)).d12;
}

bool Expr::references(int slot) const { return root_ && node_references(*root_, slot); }

bool structurally_equal(const Expr& a, const Expr& b) {
    return a.free_vars() == b.free_vars() && nodes_equal(*a.root(), *b.root());
}

Expr differentiate(const Expr& e, std::string_view var) {
    const int slot = e.slot_of(var);
    if (slot < 0) throw Error("differentiate: '" + std::string(var) + "' is not a free variable");
    return Expr(derivative_node(e.root(), slot), e.free_vars());
}

Expr compose(const Expr& e, const std::map<std::string, Expr>& replacements,
             std::vector<std::string> new_vocabulary) {
    std::vector<NodePtr> by_slot(e.free_vars().size());
    for (const auto& [name, repl] : replacements) {
        const int slot = e.slot_of(name);
        if (slot < 0) throw Error("compose: '" + name + "' is not a free variable");
        if (repl.free_vars() != new_vocabulary)
            throw Error("compose: replacement for '" + name + "' uses a different vocabulary");
        by_slot[static_cast<std::size_t>(slot)] = repl.root();
    }
    return Expr(compose_node(e.root(), by_slot), std::move(new_vocabulary));
}

} // namespace dvar
