#pragma once

#include <string>
#include <string_view>

#include "dvar/expr.hpp"
#include "dvar/grid.hpp"

namespace dvar {

/// Arguments of the second-order stencil at an interior index p:
/// value, backward/forward difference quotients, centered second difference,
/// time and step. Stencil-generated tuples satisfy w = (vp - vm)/xi.
struct StencilArgs {
    double x;
    double vm;
    double vp;
    double w;
    double t;
    double xi;
};

/// A second-order finite-difference operator: an expression body over
/// {x, vm, vp, w, t, xi}. The operator is the whole scheme; applying it
/// along a grid function evaluates the body on every interior stencil.
class SecondOrderOp {
public:
    SecondOrderOp(Expr body, std::string label);
    static SecondOrderOp parse(std::string_view text, std::string label = "");

    const Expr& body() const { return body_; }
    const std::string& label() const { return label_; }

private:
    Expr body_;
    std::string label_;
};

/// A continuous second-order operator body over {x, v, w, t}; input role
/// only (seed for direct discretization).
class ContinuousOp {
public:
    explicit ContinuousOp(Expr body);
    static ContinuousOp parse(std::string_view text);

    const Expr& body() const { return body_; }

private:
    Expr body_;
};

/// Stencil tuple at index p (1 <= p <= n-1).
StencilArgs stencil_args(const GridFn& q, int p);

/// First partials of the operator body with respect to (x, vm, vp, w) at one
/// stencil point, via a single 4-direction dual pass.
struct StencilPartials {
    double x;
    double vm;
    double vp;
    double w;
};
StencilPartials stencil_partials(const SecondOrderOp& op, const StencilArgs& args);

/// Evaluates the scheme along q: result[p] = body(stencil_args(q, p)) for
/// p = 1..n-1. Domain errors are reported with the offending index.
IndexedSeq eval_fde(const SecondOrderOp& op, const GridFn& q);

double eval_fde_at(const SecondOrderOp& op, const GridFn& q, int p);

/// Substitutes v -> (1-blend)*vm + blend*vp into a continuous operator body,
/// producing the blended scheme (blend 0 backward, 1/2 centered, 1 forward).
SecondOrderOp direct_discretize(const ContinuousOp& o, double blend);

/// Directional derivative of the scheme row p along dir:
/// dP/dx * W_p + dP/dvm * (delta_minus W)_p + dP/dvp * (-delta_plus W)_p
/// + dP/dw * (second_diff W)_p, partials at the stencil of q.
double frechet_row(const SecondOrderOp& op, const GridFn& q, int p, const GridFn& dir);

/// The closed-form adjoint row (2 <= p <= n-2): neighbor-shifted partials of
/// the body combined with the difference operators applied to z.
double adjoint_row_explicit(const SecondOrderOp& op, const GridFn& q, int p, const GridFn& z);

/// Transpose oracle for the adjoint: the scheme's Jacobian at q is
/// tridiagonal (three nonzeros per row from the stencil), and the adjoint
/// row p is the column-p action sum_r M[r][p] * Z_r. This is exactly what
/// the defining bilinear identity pins down for doubly-vanishing variations.
double adjoint_row_oracle(const SecondOrderOp& op, const GridFn& q, int p, const GridFn& z);

/// Row p of the scheme's Jacobian: d(row p)/dQ_{p-1}, /dQ_p, /dQ_{p+1}.
struct JacobianRow {
    double left;
    double center;
    double right;
};
JacobianRow jacobian_row(const SecondOrderOp& op, const GridFn& q, int p);

} // namespace dvar
