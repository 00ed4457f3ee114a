#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dvar/fdeop.hpp"
#include "dvar/quadrature.hpp"
#include "dvar/sampling.hpp"

namespace dvar {

/// One half of a Lagrangian couple: a map (x, v, t, xi) -> R evaluable in
/// real, dual and hyper-dual arithmetic (the discrete Euler-Lagrange
/// residual needs first partials in x and v; the null decomposition needs a
/// mixed second partial through the evaluation).
class Lagrangian {
public:
    virtual ~Lagrangian() = default;
    virtual double eval(double x, double v, double t, double xi) const = 0;
    virtual Dual eval(const Dual& x, const Dual& v, const Dual& t, const Dual& xi) const = 0;
    virtual HyperDual eval(const HyperDual& x, const HyperDual& v, const HyperDual& t,
                           const HyperDual& xi) const = 0;
};

using LagrangianPtr = std::shared_ptr<const Lagrangian>;

LagrangianPtr lagrangian_from_expr(Expr body);
LagrangianPtr lagrangian_from_text(std::string_view text);
LagrangianPtr lagrangian_zero();
LagrangianPtr lagrangian_linear_combination(
    std::vector<std::pair<double, LagrangianPtr>> terms);

/// Reconstruction recipe for a synthesized couple (the quadrature couple is
/// rebuilt from the source operator, not tabulated).
struct SynthInfo {
    std::string op_text;
    std::string op_label;
    int quad_order;
    double anchor_y0;
    double anchor_z0;
};

struct LagrangianCouple {
    LagrangianPtr l_minus;
    LagrangianPtr l_plus;
    std::string provenance; // "expression" | "synthesized" | "combination"
    std::optional<Expr> l_minus_expr, l_plus_expr; // set when expression-backed
    std::optional<SynthInfo> synth;                // set when synthesized
};

LagrangianCouple couple_from_exprs(std::string_view l_minus_text, std::string_view l_plus_text);
LagrangianCouple couple_difference(const LagrangianCouple& a, const LagrangianCouple& b);

/// Discrete action: h * sum_{p=1..n} L-(Q_p, (delta_minus Q)_p, t_p, h)
///                 + h * sum_{p=0..n-1} L+(Q_p, (-delta_plus Q)_p, t_p, h).
double action(const LagrangianCouple& c, const GridFn& q);

/// Discrete Euler-Lagrange residual, indexed p = 1..n-1.
IndexedSeq el_residual(const LagrangianCouple& c, const GridFn& q);

/// Exact directional derivative of the action at q along a variation w with
/// w_0 = w_n = 0, computed by seeding every Q_p simultaneously along w.
/// Equals h * sum_p el_residual[p] * w_p.
double directional_derivative(const LagrangianCouple& c, const GridFn& q, const GridFn& w);

/// Constructive synthesis for a Helmholtz-satisfying operator: reduce
/// P to l(x,y,z,t,xi) = P(x,y,z,(z-y)/xi,t,xi), split it at the anchors
/// y0 = z0 = 0 into alpha(x,y) = l(x,y,z0) and
/// beta(x,z) = l(x,y0,z) - l(x,y0,z0), then
///   L-(x,v,t,xi) = x * int_0^1 alpha(s x, s v, t, xi) ds,
///   L+(x,v,t,xi) = x * int_0^1 beta(s x, s v, t, xi) ds,
/// with the integrals taken by Gauss-Legendre of the given order. If the
/// operator violates the Helmholtz condition the couple is still produced
/// but verify_synthesis will reject it.
LagrangianCouple synthesize(const SecondOrderOp& op, int quad_order);
LagrangianCouple synthesize(const SecondOrderOp& op, int quad_order, double anchor_y0,
                            double anchor_z0);

/// Samples grids and compares eval_fde against the couple's Euler-Lagrange
/// residual over the full interior range p = 1..n-1, boundary indices
/// included.
Report verify_synthesis(const SecondOrderOp& op, const LagrangianCouple& c,
                        const SamplingConfig& cfg);

/// Null when every sampled grid function annihilates the Euler-Lagrange
/// residual.
Report null_check(const LagrangianCouple& c, const SamplingConfig& cfg);

/// Telescoping certificate of a null couple:
///   L-(Q_p, ., t_p, h) + L+(Q_{p-1}, ., t_{p-1}, h)
///     = [f(Q_p, t_p, h) - f(Q_{p-1}, t_{p-1}, h)]/h + g(t_p, h).
struct NullDecomposition {
    std::function<double(double x, double t, double xi)> f;
    std::function<double(double t, double xi)> g;
    double separability_residual; // worst mixed partial of the two-point map
    double gamma_x_dependence;    // worst x-drift of the gamma probe
};

/// Builds the certificate from the two-point reduction
/// s(x, y, t, xi) = L-(x, (x-y)/xi, t, xi) + L+(y, (x-y)/xi, t-xi, xi):
/// checks separability of s, anchors A(x) = s(x,0) - s(0,0), B(y) = s(0,y),
/// verifies gamma(t, xi) = A(x,t,xi) + B(x,t+xi,xi) is x-independent, and
/// returns f = xi*A, g(t,xi) = gamma(t-xi,xi). Throws when the couple is not
/// null within tolerance.
NullDecomposition null_decompose(const LagrangianCouple& c);

Report verify_null_decomposition(const LagrangianCouple& c, const NullDecomposition& d,
                                 const SamplingConfig& cfg);

/// The couple's Euler-Lagrange map as a second-order operator (expression-
/// backed couples only), built by symbolic differentiation and argument
/// substitution:
///   dL-/dx(x,vm,t,xi) + dL+/dx(x,vp,t,xi)
///   + [dL-/dv(x,vm,t,xi) - dL-/dv(x+xi*vp, vp, t+xi, xi)]/xi
///   - [dL+/dv(x,vp,t,xi) - dL+/dv(x-xi*vm, vm, t-xi, xi)]/xi.
/// Evaluating it along a grid reproduces el_residual.
SecondOrderOp euler_lagrange_op(const LagrangianCouple& c);

} // namespace dvar
