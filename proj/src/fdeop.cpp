#include "dvar/fdeop.hpp"

#include <array>
#include <cmath>

namespace dvar {

namespace {

void check_interior(const GridFn& q, int p, int lo, int hi) {
    if (p < lo || p > hi)
        throw Error("index p = " + std::to_string(p) + " outside valid range [" +
                    std::to_string(lo) + ", " + std::to_string(hi) + "] for n = " +
                    std::to_string(q.n()));
}

} // namespace

SecondOrderOp::SecondOrderOp(Expr body, std::string label)
    : body_(std::move(body)), label_(std::move(label)) {
    if (body_.free_vars() != vocab::fde)
        throw Error("second-order operator body must use the {x, vm, vp, w, t, xi} vocabulary");
}

SecondOrderOp SecondOrderOp::parse(std::string_view text, std::string label) {
    return SecondOrderOp(Expr::parse(text, vocab::fde), std::move(label));
}

ContinuousOp::ContinuousOp(Expr body) : body_(std::move(body)) {
    if (body_.free_vars() != vocab::continuous)
        throw Error("continuous operator body must use the {x, v, w, t} vocabulary");
}

ContinuousOp ContinuousOp::parse(std::string_view text) {
    return ContinuousOp(Expr::parse(text, vocab::continuous));
}

StencilArgs stencil_args(const GridFn& q, int p) {
    check_interior(q, p, 1, q.n() - 1);
    const double h = q.h();
    return StencilArgs{q[p],
                       (q[p] - q[p - 1]) / h,
                       (q[p + 1] - q[p]) / h,
                       (q[p + 1] - 2.0 * q[p] + q[p - 1]) / (h * h),
                       q.time(p),
                       h};
}

StencilPartials stencil_partials(const SecondOrderOp& op, const StencilArgs& a) {
    const std::array<Dual, 6> env{Dual::seeded(a.x, 4, 0), Dual::seeded(a.vm, 4, 1),
                                  Dual::seeded(a.vp, 4, 2), Dual::seeded(a.w, 4, 3),
                                  Dual(a.t), Dual(a.xi)};
    const Dual r = op.body().eval(std::span<const Dual>(env));
    return StencilPartials{r.partial(0), r.partial(1), r.partial(2), r.partial(3)};
}

double eval_fde_at(const SecondOrderOp& op, const GridFn& q, int p) {
    const StencilArgs a = stencil_args(q, p);
    const std::array<double, 6> env{a.x, a.vm, a.vp, a.w, a.t, a.xi};
    return op.body().eval(std::span<const double>(env));
}

IndexedSeq eval_fde(const SecondOrderOp& op, const GridFn& q) {
    const int n = q.n();
    std::vector<double> v(static_cast<std::size_t>(n - 1));
    for (int p = 1; p <= n - 1; ++p) {
        try {
            v[static_cast<std::size_t>(p - 1)] = eval_fde_at(op, q, p);
        } catch (const EvalError& e) {
            throw EvalError(std::string(e.what()) + " (at index p = " + std::to_string(p) + ")");
        }
    }
    return IndexedSeq(1, std::move(v));
}

SecondOrderOp direct_discretize(const ContinuousOp& o, double blend) {
    if (!(blend >= 0.0 && blend <= 1.0)) throw Error("blend must lie in [0, 1]");
    auto fde_var = [](const char* name) {
        Expr e = Expr::parse(name, vocab::fde);
        return e;
    };
    // v -> (1-blend)*vm + blend*vp; x, w, t pass through.
    const Expr vm = fde_var("vm");
    const Expr vp = fde_var("vp");
    const NodePtr blended = make_add(make_mul(make_constant(1.0 - blend), vm.root()),
                                     make_mul(make_constant(blend), vp.root()));
    std::map<std::string, Expr> repl{
        {"x", fde_var("x")},
        {"v", Expr(blended, vocab::fde)},
        {"w", fde_var("w")},
        {"t", fde_var("t")},
    };
    return SecondOrderOp(compose(o.body(), repl, vocab::fde), "");
}

double frechet_row(const SecondOrderOp& op, const GridFn& q, int p, const GridFn& dir) {
    check_interior(q, p, 1, q.n() - 1);
    if (!(dir.partition() == q.partition()))
        throw Error("direction must live on the same partition");
    const double h = q.h();
    const StencilPartials d = stencil_partials(op, stencil_args(q, p));
    const double wp = dir[p];
    const double dmw = (dir[p] - dir[p - 1]) / h;
    const double dpw = (dir[p + 1] - dir[p]) / h;
    const double ddw = (dir[p + 1] - 2.0 * dir[p] + dir[p - 1]) / (h * h);
    return d.x * wp + d.vm * dmw + d.vp * dpw + d.w * ddw;
}

double adjoint_row_explicit(const SecondOrderOp& op, const GridFn& q, int p, const GridFn& z) {
    check_interior(q, p, 2, q.n() - 2);
    if (!(z.partition() == q.partition()))
        throw Error("argument must live on the same partition");
    const double h = q.h();
    const StencilPartials dm = stencil_partials(op, stencil_args(q, p - 1));
    const StencilPartials d0 = stencil_partials(op, stencil_args(q, p));
    const StencilPartials dp = stencil_partials(op, stencil_args(q, p + 1));

    // Difference operators applied to the sequences of partials along the grid.
    const double fwd_vm = (dp.vm - d0.vm) / h;            // (-delta_plus dP/dvm)_p
    const double bwd_vp = (d0.vp - dm.vp) / h;            // (delta_minus dP/dvp)_p
    const double sec_w = (dp.w - 2.0 * d0.w + dm.w) / (h * h);
    const double bwd_w = (d0.w - dm.w) / h;               // (delta_minus dP/dw)_p
    const double fwd_w = (dp.w - d0.w) / h;               // (-delta_plus dP/dw)_p

    const double zp = z[p];
    const double dmz = (z[p] - z[p - 1]) / h;
    const double dpz = (z[p + 1] - z[p]) / h;
    const double ddz = (z[p + 1] - 2.0 * z[p] + z[p - 1]) / (h * h);

    return (d0.x - fwd_vm - bwd_vp + sec_w) * zp + (bwd_w - dm.vp) * dmz +
           (fwd_w - dp.vm) * dpz + d0.w * ddz;
}

JacobianRow jacobian_row(const SecondOrderOp& op, const GridFn& q, int p) {
    const double h = q.h();
    const StencilPartials d = stencil_partials(op, stencil_args(q, p));
    return JacobianRow{
        -d.vm / h + d.w / (h * h),
        d.x + d.vm / h - d.vp / h - 2.0 * d.w / (h * h),
        d.vp / h + d.w / (h * h),
    };
}

double adjoint_row_oracle(const SecondOrderOp& op, const GridFn& q, int p, const GridFn& z) {
    check_interior(q, p, 2, q.n() - 2);
    if (!(z.partition() == q.partition()))
        throw Error("argument must live on the same partition");
    // Column p of the Jacobian has entries in rows p-1, p, p+1 only; all
    // three rows are interior for p in 2..n-2.
    const JacobianRow above = jacobian_row(op, q, p - 1);
    const JacobianRow diag = jacobian_row(op, q, p);
    const JacobianRow below = jacobian_row(op, q, p + 1);
    return above.right * z[p - 1] + diag.center * z[p] + below.left * z[p + 1];
}

} // namespace dvar
