#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dvar/dual.hpp"

namespace dvar {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised on malformed expression text. Carries the 1-based index of the
/// offending token and its character offset in the input.
struct ParseError : Error {
    ParseError(const std::string& msg, int token_index_, std::size_t offset_)
        : Error(msg), token_index(token_index_), offset(offset_) {}
    int token_index = 0;
    std::size_t offset = 0;
};

/// Raised on evaluation failures: missing bindings and arithmetic domain
/// errors (log of a non-positive value, sqrt of a negative, division by
/// exact zero), reported with the offending subexpression.
struct EvalError : Error {
    using Error::Error;
};

/// Raised when a file cannot be opened or is malformed at the stream level.
struct IoError : Error {
    using Error::Error;
};

enum class Func { Sin, Cos, Tan, Exp, Log, Sqrt, Tanh };

const char* func_name(Func f);

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { Constant, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };

    Kind kind;
    double constant = 0.0;   // Constant
    int slot = -1;           // Variable: index into the vocabulary
    std::string name;        // Variable name, kept for printing/diagnostics
    int exponent = 0;        // Pow (constant integer >= 0)
    Func func = Func::Sin;   // Call
    NodePtr a, b;
};

// AST builders. These fold constants and drop neutral/absorbing elements so
// that derivative trees stay small; they are not a simplifier.
NodePtr make_constant(double v);
NodePtr make_variable(int slot, std::string name);
NodePtr make_negate(NodePtr a);
NodePtr make_add(NodePtr a, NodePtr b);
NodePtr make_sub(NodePtr a, NodePtr b);
NodePtr make_mul(NodePtr a, NodePtr b);
NodePtr make_div(NodePtr a, NodePtr b);
NodePtr make_pow(NodePtr a, int exponent);
NodePtr make_call(Func f, NodePtr a);

/// Immutable parsed expression over a fixed, ordered variable vocabulary.
/// All evaluation entry points are pure and safe to call concurrently.
class Expr {
public:
    Expr() = default;
    Expr(NodePtr root, std::vector<std::string> vocabulary);

    /// Grammar:
    ///   expr   := term (("+"|"-") term)*
    ///   term   := factor (("*"|"/") factor)*
    ///   factor := ("-")? power
    ///   power  := atom ("^" integer)?
    ///   atom   := number | ident | ident "(" expr ")" | "(" expr ")"
    /// Identifiers must appear in `vocabulary`; the function set is fixed to
    /// {sin, cos, tan, exp, log, sqrt, tanh}. `abs` is rejected explicitly
    /// (everything here must be twice differentiable). Exponents are
    /// constant integers >= 0.
    static Expr parse(std::string_view text, std::vector<std::string> vocabulary);

    const NodePtr& root() const { return root_; }
    const std::vector<std::string>& free_vars() const { return vocab_; }
    int slot_of(std::string_view name) const; // -1 when absent

    /// Precedence-aware printing; parse(to_string()) reproduces the tree
    /// for any parser-produced expression.
    std::string to_string() const;

    // Slot-indexed evaluation (env[i] binds free_vars()[i]).
    double eval(std::span<const double> env) const;
    Dual eval(std::span<const Dual> env) const;
    HyperDual eval(std::span<const HyperDual> env) const;

    // Name-keyed convenience entry points.
    double eval(const std::map<std::string, double>& bindings) const;

    /// Value and exact forward-mode partials with respect to `wrt`
    /// (one seeded direction per name).
    std::pair<double, std::vector<double>> eval_grad(
        const std::map<std::string, double>& bindings,
        const std::vector<std::string>& wrt) const;

    /// Mixed second partial d2 e / (da db) via hyper-dual arithmetic.
    double eval_mixed2(const std::map<std::string, double>& bindings,
                       std::string_view a, std::string_view b) const;

    /// True if the variable occupies slot `slot` anywhere in the tree.
    bool references(int slot) const;

private:
    std::vector<double> env_from(const std::map<std::string, double>& bindings) const;

    NodePtr root_;
    std::vector<std::string> vocab_;
};

bool structurally_equal(const Expr& a, const Expr& b);

/// Exact symbolic partial derivative with respect to one vocabulary entry.
/// The result shares the vocabulary of the input.
Expr differentiate(const Expr& e, std::string_view var);

/// Rebuilds `e` over `new_vocabulary`, replacing every variable by the
/// expression `replacements` maps it to (each replacement is over the new
/// vocabulary). Every free variable of `e` must be mapped.
Expr compose(const Expr& e,
             const std::map<std::string, Expr>& replacements,
             std::vector<std::string> new_vocabulary);

namespace vocab {
/// Variable vocabularies per role (mirrors the operator signatures).
inline const std::vector<std::string> fde{"x", "vm", "vp", "w", "t", "xi"};
inline const std::vector<std::string> continuous{"x", "v", "w", "t"};
inline const std::vector<std::string> lagrangian{"x", "v", "t", "xi"};
} // namespace vocab

} // namespace dvar
