#include "dvar/lagrange.hpp"

#include <array>
#include <cmath>

namespace dvar {

namespace {

template <class ProbeFn>
int run_samples(const SamplingConfig& cfg, ProbeFn&& probe) {
    cfg.validate();
    SampleRng rng(cfg.seed);
    int done = 0;
    int retries = 0;
    while (done < cfg.grids) {
        GridFn q = sample_grid(rng, cfg);
        try {
            probe(q);
        } catch (const EvalError&) {
            if (++retries > cfg.retry_cap) break;
            continue;
        }
        ++done;
    }
    return done;
}

Witness witness_of(const GridFn& q, int p) {
    const auto vals = q.values();
    return Witness{q.partition().t0(), q.h(), q.n(),
                   std::vector<double>(vals.begin(), vals.end()), p};
}

void set_verdict(Report& rep, double scale, const SamplingConfig& cfg, const char* positive,
                 const char* negative) {
    rep.verdict = rep.samples > 0 ? classify_residual(rep.max_residual, scale, cfg)
                                  : Verdict::Inconclusive;
    rep.verdict_text = rep.verdict == Verdict::Satisfied   ? positive
                       : rep.verdict == Verdict::Violated ? negative
                                                          : "Inconclusive";
}

Dual dual1(double value, double seed) {
    Dual d(value, 1);
    d.partial_ref(0) = seed;
    return d;
}

class ExprLagrangian final : public Lagrangian {
public:
    explicit ExprLagrangian(Expr body) : body_(std::move(body)) {
        if (body_.free_vars() != vocab::lagrangian)
            throw Error("a Lagrangian body must use the {x, v, t, xi} vocabulary");
    }

    double eval(double x, double v, double t, double xi) const override {
        const std::array<double, 4> env{x, v, t, xi};
        return body_.eval(std::span<const double>(env));
    }
    Dual eval(const Dual& x, const Dual& v, const Dual& t, const Dual& xi) const override {
        const std::array<Dual, 4> env{x, v, t, xi};
        return body_.eval(std::span<const Dual>(env));
    }
    HyperDual eval(const HyperDual& x, const HyperDual& v, const HyperDual& t,
                   const HyperDual& xi) const override {
        const std::array<HyperDual, 4> env{x, v, t, xi};
        return body_.eval(std::span<const HyperDual>(env));
    }

private:
    Expr body_;
};

class CombinationLagrangian final : public Lagrangian {
public:
    explicit CombinationLagrangian(std::vector<std::pair<double, LagrangianPtr>> terms)
        : terms_(std::move(terms)) {}

    template <class S>
    S eval_impl(const S& x, const S& v, const S& t, const S& xi) const {
        S acc(0.0);
        for (const auto& [coef, f] : terms_) acc += coef * f->eval(x, v, t, xi);
        return acc;
    }

    double eval(double x, double v, double t, double xi) const override {
        return eval_impl<double>(x, v, t, xi);
    }
    Dual eval(const Dual& x, const Dual& v, const Dual& t, const Dual& xi) const override {
        return eval_impl<Dual>(x, v, t, xi);
    }
    HyperDual eval(const HyperDual& x, const HyperDual& v, const HyperDual& t,
                   const HyperDual& xi) const override {
        return eval_impl<HyperDual>(x, v, t, xi);
    }

private:
    std::vector<std::pair<double, LagrangianPtr>> terms_;
};

/// Quadrature-backed half of a synthesized couple. The minus side evaluates
/// x * sum_k w_k * alpha(s_k x, s_k v, t, xi) with
/// alpha(x, y, t, xi) = P(x, y, z0, (z0-y)/xi, t, xi); the plus side uses
/// beta(x, z, t, xi) = P(x, y0, z, (z-y0)/xi, t, xi) - P(x, y0, z0, (z0-y0)/xi, t, xi).
/// Partials flow through the quadrature sum (nodes and weights are
/// constants), so dual evaluation differentiates under the integral.
class QuadratureLagrangian final : public Lagrangian {
public:
    enum class Side { Minus, Plus };

    QuadratureLagrangian(Expr op_body, Side side, QuadTable quad, double y0, double z0)
        : body_(std::move(op_body)), side_(side), quad_(std::move(quad)), y0_(y0), z0_(z0) {}

    template <class S>
    S eval_impl(const S& x, const S& v, const S& t, const S& xi) const {
        S acc(0.0);
        const int m = quad_.order();
        for (int k = 0; k < m; ++k) {
            const double lam = quad_.nodes[static_cast<std::size_t>(k)];
            const double wk = quad_.weights[static_cast<std::size_t>(k)];
            const S lx = lam * x;
            const S lv = lam * v;
            if (side_ == Side::Minus) {
                const std::array<S, 6> env{lx, lv, S(z0_), (S(z0_) - lv) / xi, t, xi};
                acc += wk * body_.eval(std::span<const S>(env));
            } else {
                const std::array<S, 6> env1{lx, S(y0_), lv, (lv - S(y0_)) / xi, t, xi};
                const std::array<S, 6> env0{lx, S(y0_), S(z0_), S(z0_ - y0_) / xi, t, xi};
                acc += wk * (body_.eval(std::span<const S>(env1)) -
                             body_.eval(std::span<const S>(env0)));
            }
        }
        return x * acc;
    }

    double eval(double x, double v, double t, double xi) const override {
        return eval_impl<double>(x, v, t, xi);
    }
    Dual eval(const Dual& x, const Dual& v, const Dual& t, const Dual& xi) const override {
        return eval_impl<Dual>(x, v, t, xi);
    }
    HyperDual eval(const HyperDual& x, const HyperDual& v, const HyperDual& t,
                   const HyperDual& xi) const override {
        return eval_impl<HyperDual>(x, v, t, xi);
    }

private:
    Expr body_;
    Side side_;
    QuadTable quad_;
    double y0_, z0_;
};

struct GradXV {
    double dx;
    double dv;
};

GradXV grad_xv(const Lagrangian& l, double x, double v, double t, double xi) {
    const Dual r = l.eval(Dual::seeded(x, 2, 0), Dual::seeded(v, 2, 1), Dual(t), Dual(xi));
    return GradXV{r.partial(0), r.partial(1)};
}

/// Euler-Lagrange residual plus a termwise magnitude scale for the
/// tolerance policy.
std::vector<double> el_residual_core(const LagrangianCouple& c, const GridFn& q,
                                     double* scale_out) {
    const int n = q.n();
    const double h = q.h();
    std::vector<GradXV> gm(static_cast<std::size_t>(n + 1));
    std::vector<GradXV> gp(static_cast<std::size_t>(n + 1));
    for (int r = 1; r <= n; ++r)
        gm[static_cast<std::size_t>(r)] =
            grad_xv(*c.l_minus, q[r], (q[r] - q[r - 1]) / h, q.time(r), h);
    for (int r = 0; r <= n - 1; ++r)
        gp[static_cast<std::size_t>(r)] =
            grad_xv(*c.l_plus, q[r], (q[r + 1] - q[r]) / h, q.time(r), h);
    std::vector<double> out(static_cast<std::size_t>(n - 1));
    for (int p = 1; p <= n - 1; ++p) {
        const auto& m0 = gm[static_cast<std::size_t>(p)];
        const auto& m1 = gm[static_cast<std::size_t>(p + 1)];
        const auto& p0 = gp[static_cast<std::size_t>(p)];
        const auto& pm = gp[static_cast<std::size_t>(p - 1)];
        out[static_cast<std::size_t>(p - 1)] =
            m0.dx + p0.dx + (m0.dv - m1.dv) / h - (p0.dv - pm.dv) / h;
        if (scale_out) {
            const double s = std::abs(m0.dx) + std::abs(p0.dx) +
                             (std::abs(m0.dv) + std::abs(m1.dv)) / h +
                             (std::abs(p0.dv) + std::abs(pm.dv)) / h;
            if (s > *scale_out) *scale_out = s;
        }
    }
    return out;
}

template <class S>
S two_point_map(const LagrangianCouple& c, const S& x, const S& y, double t, double xi) {
    const S v = (1.0 / xi) * (x - y);
    return c.l_minus->eval(x, v, S(t), S(xi)) + c.l_plus->eval(y, v, S(t - xi), S(xi));
}

} // namespace

LagrangianPtr lagrangian_from_expr(Expr body) {
    return std::make_shared<ExprLagrangian>(std::move(body));
}

LagrangianPtr lagrangian_from_text(std::string_view text) {
    return lagrangian_from_expr(Expr::parse(text, vocab::lagrangian));
}

LagrangianPtr lagrangian_zero() { return lagrangian_from_text("0"); }

LagrangianPtr lagrangian_linear_combination(
    std::vector<std::pair<double, LagrangianPtr>> terms) {
    return std::make_shared<CombinationLagrangian>(std::move(terms));
}

LagrangianCouple couple_from_exprs(std::string_view l_minus_text, std::string_view l_plus_text) {
    LagrangianCouple c;
    Expr lm = Expr::parse(l_minus_text, vocab::lagrangian);
    Expr lp = Expr::parse(l_plus_text, vocab::lagrangian);
    c.l_minus = lagrangian_from_expr(lm);
    c.l_plus = lagrangian_from_expr(lp);
    c.l_minus_expr = std::move(lm);
    c.l_plus_expr = std::move(lp);
    c.provenance = "expression";
    return c;
}

LagrangianCouple couple_difference(const LagrangianCouple& a, const LagrangianCouple& b) {
    LagrangianCouple c;
    c.provenance = "combination";
    if (a.l_minus_expr && a.l_plus_expr && b.l_minus_expr && b.l_plus_expr) {
        Expr lm(make_sub(a.l_minus_expr->root(), b.l_minus_expr->root()), vocab::lagrangian);
        Expr lp(make_sub(a.l_plus_expr->root(), b.l_plus_expr->root()), vocab::lagrangian);
        c.l_minus = lagrangian_from_expr(lm);
        c.l_plus = lagrangian_from_expr(lp);
        c.l_minus_expr = std::move(lm);
        c.l_plus_expr = std::move(lp);
    } else {
        c.l_minus = lagrangian_linear_combination({{1.0, a.l_minus}, {-1.0, b.l_minus}});
        c.l_plus = lagrangian_linear_combination({{1.0, a.l_plus}, {-1.0, b.l_plus}});
    }
    return c;
}

double action(const LagrangianCouple& c, const GridFn& q) {
    const int n = q.n();
    const double h = q.h();
    double acc = 0.0;
    for (int p = 1; p <= n; ++p)
        acc += c.l_minus->eval(q[p], (q[p] - q[p - 1]) / h, q.time(p), h);
    for (int p = 0; p <= n - 1; ++p)
        acc += c.l_plus->eval(q[p], (q[p + 1] - q[p]) / h, q.time(p), h);
    return h * acc;
}

IndexedSeq el_residual(const LagrangianCouple& c, const GridFn& q) {
    return IndexedSeq(1, el_residual_core(c, q, nullptr));
}

double directional_derivative(const LagrangianCouple& c, const GridFn& q, const GridFn& w) {
    if (!(w.partition() == q.partition()))
        throw Error("variation must live on the same partition");
    if (!in_boundary_class(w, BoundaryClass::Zero1))
        throw Error("variation must vanish at both endpoints (w_0 = w_n = 0)");
    const int n = q.n();
    const double h = q.h();
    Dual acc(0.0);
    for (int p = 1; p <= n; ++p)
        acc += c.l_minus->eval(dual1(q[p], w[p]),
                               dual1((q[p] - q[p - 1]) / h, (w[p] - w[p - 1]) / h),
                               Dual(q.time(p)), Dual(h));
    for (int p = 0; p <= n - 1; ++p)
        acc += c.l_plus->eval(dual1(q[p], w[p]),
                              dual1((q[p + 1] - q[p]) / h, (w[p + 1] - w[p]) / h),
                              Dual(q.time(p)), Dual(h));
    return h * acc.partial(0);
}

LagrangianCouple synthesize(const SecondOrderOp& op, int quad_order, double anchor_y0,
                            double anchor_z0) {
    if (quad_order < 1) throw Error("quadrature order must be >= 1");
    QuadTable table = gauss_legendre_01(quad_order);
    LagrangianCouple c;
    c.l_minus = std::make_shared<QuadratureLagrangian>(
        op.body(), QuadratureLagrangian::Side::Minus, table, anchor_y0, anchor_z0);
    c.l_plus = std::make_shared<QuadratureLagrangian>(
        op.body(), QuadratureLagrangian::Side::Plus, std::move(table), anchor_y0, anchor_z0);
    c.provenance = "synthesized";
    c.synth = SynthInfo{op.body().to_string(), op.label(), quad_order, anchor_y0, anchor_z0};
    return c;
}

LagrangianCouple synthesize(const SecondOrderOp& op, int quad_order) {
    return synthesize(op, quad_order, 0.0, 0.0);
}

Report verify_synthesis(const SecondOrderOp& op, const LagrangianCouple& c,
                        const SamplingConfig& cfg) {
    Report rep;
    rep.tolerance_abs = cfg.tol_abs;
    rep.tolerance_rel = cfg.tol_rel;
    double scale = 0.0;
    rep.samples = run_samples(cfg, [&](const GridFn& q) {
        const IndexedSeq scheme = eval_fde(op, q);
        const IndexedSeq el = el_residual(c, q);
        for (int p = 1; p <= q.n() - 1; ++p) {
            scale = std::max({scale, std::abs(scheme[p]), std::abs(el[p])});
            const double dev = std::abs(scheme[p] - el[p]);
            if (dev > rep.max_residual || !rep.witness) {
                rep.max_residual = dev;
                rep.witness = witness_of(q, p);
            }
        }
    });
    set_verdict(rep, scale, cfg, "Satisfied", "Violated");
    return rep;
}

Report null_check(const LagrangianCouple& c, const SamplingConfig& cfg) {
    Report rep;
    rep.tolerance_abs = cfg.tol_abs;
    rep.tolerance_rel = cfg.tol_rel;
    double scale = 0.0;
    rep.samples = run_samples(cfg, [&](const GridFn& q) {
        const std::vector<double> res = el_residual_core(c, q, &scale);
        for (int p = 1; p <= q.n() - 1; ++p) {
            const double r = std::abs(res[static_cast<std::size_t>(p - 1)]);
            if (r > rep.max_residual || !rep.witness) {
                rep.max_residual = r;
                rep.witness = witness_of(q, p);
            }
        }
    });
    set_verdict(rep, scale, cfg, "Null", "NotNull");
    return rep;
}

NullDecomposition null_decompose(const LagrangianCouple& c) {
    static const std::array<double, 5> xs{-2.0, -1.0, 0.5, 1.0, 2.0};
    static const std::array<double, 3> ts{-0.5, 0.0, 0.7};
    static const std::array<double, 3> xis{0.05, 0.1, 0.5};

    // Separability of the two-point map: mixed partial in (x, y) must vanish.
    double sep = 0.0, smax = 0.0;
    for (double x : xs)
        for (double y : xs)
            for (double t : ts)
                for (double xi : xis) {
                    const HyperDual r = two_point_map(c, HyperDual(x, 1.0, 0.0, 0.0),
                                                      HyperDual(y, 0.0, 1.0, 0.0), t, xi);
                    sep = std::max(sep, std::abs(r.d12));
                    smax = std::max(smax, std::abs(r.v));
                }
    if (sep > 1e-8 * (1.0 + smax))
        throw Error("null decomposition: two-point map is not separable (defect " +
                    std::to_string(sep) + "); the couple is not null within tolerance");

    const LagrangianCouple couple = c;
    auto s_plain = [couple](double x, double y, double t, double xi) {
        return two_point_map<double>(couple, x, y, t, xi);
    };
    auto part_a = [s_plain](double x, double t, double xi) {
        return s_plain(x, 0.0, t, xi) - s_plain(0.0, 0.0, t, xi);
    };
    auto part_b = [s_plain](double y, double t, double xi) { return s_plain(0.0, y, t, xi); };
    auto gamma = [part_a, part_b](double t, double xi) {
        return part_a(1.0, t, xi) + part_b(1.0, t + xi, xi);
    };

    double gdev = 0.0, gmax = 0.0;
    for (double x : std::array<double, 4>{-2.0, -1.0, 1.0, 2.0})
        for (double t : ts)
            for (double xi : xis) {
                const double base = gamma(t, xi);
                const double probed = part_a(x, t, xi) + part_b(x, t + xi, xi);
                gdev = std::max(gdev, std::abs(probed - base));
                gmax = std::max(gmax, std::abs(base));
            }
    if (gdev > 1e-8 * (1.0 + gmax))
        throw Error("null decomposition: gamma depends on x (drift " + std::to_string(gdev) +
                    "); the couple is not null within tolerance");

    NullDecomposition d;
    d.f = [part_a](double x, double t, double xi) { return xi * part_a(x, t, xi); };
    d.g = [gamma](double t, double xi) { return gamma(t - xi, xi); };
    d.separability_residual = sep;
    d.gamma_x_dependence = gdev;
    return d;
}

Report verify_null_decomposition(const LagrangianCouple& c, const NullDecomposition& d,
                                 const SamplingConfig& cfg) {
    Report rep;
    rep.tolerance_abs = cfg.tol_abs;
    rep.tolerance_rel = cfg.tol_rel;
    rep.separability_residual = d.separability_residual;
    rep.gamma_x_dependence = d.gamma_x_dependence;
    double scale = 0.0;
    rep.samples = run_samples(cfg, [&](const GridFn& q) {
        const int n = q.n();
        const double h = q.h();
        for (int p = 1; p <= n; ++p) {
            const double quotient = (q[p] - q[p - 1]) / h;
            const double lhs = c.l_minus->eval(q[p], quotient, q.time(p), h) +
                               c.l_plus->eval(q[p - 1], quotient, q.time(p - 1), h);
            const double f1 = d.f(q[p], q.time(p), h);
            const double f0 = d.f(q[p - 1], q.time(p - 1), h);
            const double g = d.g(q.time(p), h);
            const double rhs = (f1 - f0) / h + g;
            scale = std::max({scale, std::abs(lhs),
                              (std::abs(f1) + std::abs(f0)) / h + std::abs(g)});
            const double dev = std::abs(lhs - rhs);
            if (dev > rep.max_residual || !rep.witness) {
                rep.max_residual = dev;
                rep.witness = witness_of(q, p);
            }
        }
    });
    set_verdict(rep, scale, cfg, "Satisfied", "Violated");
    return rep;
}

SecondOrderOp euler_lagrange_op(const LagrangianCouple& c) {
    if (!c.l_minus_expr || !c.l_plus_expr)
        throw Error("euler_lagrange_op needs an expression-backed couple");
    const Expr dlm_dx = differentiate(*c.l_minus_expr, "x");
    const Expr dlm_dv = differentiate(*c.l_minus_expr, "v");
    const Expr dlp_dx = differentiate(*c.l_plus_expr, "x");
    const Expr dlp_dv = differentiate(*c.l_plus_expr, "v");

    auto fde = [](const char* text) { return Expr::parse(text, vocab::fde); };
    const std::map<std::string, Expr> minus_here{
        {"x", fde("x")}, {"v", fde("vm")}, {"t", fde("t")}, {"xi", fde("xi")}};
    const std::map<std::string, Expr> minus_next{
        {"x", fde("x + xi*vp")}, {"v", fde("vp")}, {"t", fde("t + xi")}, {"xi", fde("xi")}};
    const std::map<std::string, Expr> plus_here{
        {"x", fde("x")}, {"v", fde("vp")}, {"t", fde("t")}, {"xi", fde("xi")}};
    const std::map<std::string, Expr> plus_prev{
        {"x", fde("x - xi*vm")}, {"v", fde("vm")}, {"t", fde("t - xi")}, {"xi", fde("xi")}};

    const NodePtr xi = fde("xi").root();
    const NodePtr dx_terms = make_add(compose(dlm_dx, minus_here, vocab::fde).root(),
                                      compose(dlp_dx, plus_here, vocab::fde).root());
    const NodePtr minus_diff =
        make_div(make_sub(compose(dlm_dv, minus_here, vocab::fde).root(),
                          compose(dlm_dv, minus_next, vocab::fde).root()),
                 xi);
    const NodePtr plus_diff =
        make_div(make_sub(compose(dlp_dv, plus_here, vocab::fde).root(),
                          compose(dlp_dv, plus_prev, vocab::fde).root()),
                 xi);
    return SecondOrderOp(Expr(make_sub(make_add(dx_terms, minus_diff), plus_diff), vocab::fde),
                         "euler-lagrange");
}

} // namespace dvar
