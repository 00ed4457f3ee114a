#pragma once

#include "dvar/fdeop.hpp"
#include "dvar/sampling.hpp"

namespace dvar {

/// Pointwise defect of the discrete Helmholtz condition along q, indexed
/// p = 2..n-1:
///   [dP/dw(star_p) - dP/dw(star_{p-1})]/h - dP/dvm(star_p) - dP/dvp(star_{p-1}).
/// Identically zero exactly when the scheme is a discrete Euler-Lagrange
/// equation.
IndexedSeq helmholtz_residual(const SecondOrderOp& op, const GridFn& q);

/// Samples random (partition, grid) pairs and classifies the worst residual
/// against the tolerance policy. Deterministic from cfg.seed.
Report check_helmholtz(const SecondOrderOp& op, const SamplingConfig& cfg);

/// Worst-case gap between frechet_row and adjoint_row_oracle at index p
/// over probe vectors of unit max-norm. The gap is linear in the probe with
/// coefficients given by the Jacobian core asymmetry, so this equals
/// |M[p][p-1] - M[p-1][p]| + |M[p][p+1] - M[p+1][p]| and is a pure function
/// of (q, p) — which makes report witnesses re-checkable.
double selfadjoint_defect(const SecondOrderOp& op, const GridFn& q, int p);

/// Same sampling as check_helmholtz, but scores each grid by the worst
/// selfadjoint_defect over p = 2..n-2; equivalent verdict to
/// check_helmholtz: self-adjointness of the linearization is the same condition.
Report check_selfadjoint(const SecondOrderOp& op, const SamplingConfig& cfg);

/// Mixed second partial of the reduced map
///   l(x, y, z, t, xi) = P(x, y, z, (z-y)/xi, t, xi)
/// with respect to (y, z), evaluated by hyper-dual arithmetic at the
/// constraint-manifold point (x, vm, vp, (vp-vm)/xi, t, xi). Vanishes for
/// every operator satisfying the Helmholtz condition; its vanishing is what
/// makes the velocity slots separable in the Lagrangian synthesis.
double separability_residual(const SecondOrderOp& op, const StencilArgs& args);

} // namespace dvar
