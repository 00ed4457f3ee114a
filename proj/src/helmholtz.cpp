#include "dvar/helmholtz.hpp"

#include <array>
#include <cmath>

namespace dvar {

namespace {

Witness witness_of(const GridFn& q, int p) {
    const auto vals = q.values();
    return Witness{q.partition().t0(), q.h(), q.n(),
                   std::vector<double>(vals.begin(), vals.end()), p};
}

/// Runs one sampling loop with resampling on expression domain errors.
/// `probe(grid, rng)` evaluates one sample and updates the caller's maxima.
template <class ProbeFn>
int run_samples(const SamplingConfig& cfg, ProbeFn&& probe) {
    cfg.validate();
    SampleRng rng(cfg.seed);
    int done = 0;
    int retries = 0;
    while (done < cfg.grids) {
        GridFn q = sample_grid(rng, cfg);
        try {
            probe(q, rng);
        } catch (const EvalError&) {
            if (++retries > cfg.retry_cap) break;
            continue;
        }
        ++done;
    }
    return done;
}

} // namespace

IndexedSeq helmholtz_residual(const SecondOrderOp& op, const GridFn& q) {
    const int n = q.n();
    const double h = q.h();
    std::vector<StencilPartials> d(static_cast<std::size_t>(n));
    for (int r = 1; r <= n - 1; ++r) {
        try {
            d[static_cast<std::size_t>(r)] = stencil_partials(op, stencil_args(q, r));
        } catch (const EvalError& e) {
            throw EvalError(std::string(e.what()) + " (at index p = " + std::to_string(r) + ")");
        }
    }
    std::vector<double> v(static_cast<std::size_t>(n - 2));
    for (int p = 2; p <= n - 1; ++p) {
        const auto& cur = d[static_cast<std::size_t>(p)];
        const auto& prev = d[static_cast<std::size_t>(p - 1)];
        v[static_cast<std::size_t>(p - 2)] = (cur.w - prev.w) / h - cur.vm - prev.vp;
    }
    return IndexedSeq(2, std::move(v));
}

Report check_helmholtz(const SecondOrderOp& op, const SamplingConfig& cfg) {
    Report rep;
    rep.tolerance_abs = cfg.tol_abs;
    rep.tolerance_rel = cfg.tol_rel;
    double scale = 0.0;
    rep.samples = run_samples(cfg, [&](const GridFn& q, SampleRng&) {
        const double h = q.h();
        for (int r = 1; r <= q.n() - 1; ++r) {
            const StencilPartials d = stencil_partials(op, stencil_args(q, r));
            const double s = std::abs(d.w) / h + std::abs(d.vm) + std::abs(d.vp);
            if (s > scale) scale = s;
        }
        const IndexedSeq res = helmholtz_residual(op, q);
        for (int p = res.first(); p <= res.last(); ++p) {
            const double r = std::abs(res[p]);
            if (r > rep.max_residual || !rep.witness) {
                rep.max_residual = r;
                rep.witness = witness_of(q, p);
            }
        }
    });
    rep.verdict = rep.samples > 0 ? classify_residual(rep.max_residual, scale, cfg)
                                  : Verdict::Inconclusive;
    rep.verdict_text = rep.verdict == Verdict::Satisfied   ? "Satisfied"
                       : rep.verdict == Verdict::Violated ? "Violated"
                                                          : "Inconclusive";
    return rep;
}

double selfadjoint_defect(const SecondOrderOp& op, const GridFn& q, int p) {
    if (p < 2 || p > q.n() - 2)
        throw Error("index p = " + std::to_string(p) + " outside valid range [2, " +
                    std::to_string(q.n() - 2) + "]");
    const JacobianRow above = jacobian_row(op, q, p - 1);
    const JacobianRow diag = jacobian_row(op, q, p);
    const JacobianRow below = jacobian_row(op, q, p + 1);
    return std::abs(diag.left - above.right) + std::abs(diag.right - below.left);
}

Report check_selfadjoint(const SecondOrderOp& op, const SamplingConfig& cfg) {
    Report rep;
    rep.tolerance_abs = cfg.tol_abs;
    rep.tolerance_rel = cfg.tol_rel;
    double scale = 0.0;
    rep.samples = run_samples(cfg, [&](const GridFn& q, SampleRng&) {
        const int n = q.n();
        for (int r = 1; r <= n - 1; ++r) {
            const JacobianRow row = jacobian_row(op, q, r);
            const double s = std::abs(row.left) + std::abs(row.center) + std::abs(row.right);
            if (s > scale) scale = s;
        }
        for (int p = 2; p <= n - 2; ++p) {
            const double defect = selfadjoint_defect(op, q, p);
            if (defect > rep.max_residual || !rep.witness) {
                rep.max_residual = defect;
                rep.witness = witness_of(q, p);
            }
        }
    });
    rep.verdict = rep.samples > 0 ? classify_residual(rep.max_residual, scale, cfg)
                                  : Verdict::Inconclusive;
    rep.verdict_text = rep.verdict == Verdict::Satisfied   ? "Satisfied"
                       : rep.verdict == Verdict::Violated ? "Violated"
                                                          : "Inconclusive";
    return rep;
}

double separability_residual(const SecondOrderOp& op, const StencilArgs& args) {
    if (!(args.xi > 0.0)) throw Error("separability residual needs xi > 0");
    const double inv_xi = 1.0 / args.xi;
    const std::array<HyperDual, 6> env{
        HyperDual(args.x),
        HyperDual(args.vm, 1.0, 0.0, 0.0),                          // y slot
        HyperDual(args.vp, 0.0, 1.0, 0.0),                          // z slot
        HyperDual((args.vp - args.vm) * inv_xi, -inv_xi, inv_xi, 0.0), // w = (z-y)/xi
        HyperDual(args.t),
        HyperDual(args.xi),
    };
    return op.body().eval(std::span<const HyperDual>(env)).d12;
}

} // namespace dvar
