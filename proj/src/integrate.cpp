#include "dvar/integrate.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "dvar/numfmt.hpp"

namespace dvar {

void StepConfig::validate() const {
    if (!(newton_tol > 0.0)) throw Error("newton_tol must be positive");
    if (max_iter < 1) throw Error("max_iter must be >= 1");
}

const char* step_failure_name(StepFailure f) {
    switch (f) {
        case StepFailure::DerivativeVanishes: return "DerivativeVanishes";
        case StepFailure::MaxIterExceeded:    return "MaxIterExceeded";
        case StepFailure::NonFinite:          return "NonFinite";
    }
    return "?";
}

StepResult step(const SecondOrderOp& op, double q_prev, double q_curr, double t, double h,
                const StepConfig& cfg) {
    cfg.validate();
    if (!(h > 0.0)) throw Error("step size must be positive");
    const double vm = (q_curr - q_prev) / h;
    auto residual = [&](double u, double* slope) {
        Dual vp(( u - q_curr) / h, 1);
        vp.partial_ref(0) = 1.0 / h;
        Dual w((u - 2.0 * q_curr + q_prev) / (h * h), 1);
        w.partial_ref(0) = 1.0 / (h * h);
        const std::array<Dual, 6> env{Dual(q_curr), Dual(vm), vp, w, Dual(t), Dual(h)};
        const Dual r = op.body().eval(std::span<const Dual>(env));
        *slope = r.partial(0);
        return r.value();
    };

    double u = cfg.initial_guess == StepConfig::Guess::LinearExtrapolation
                   ? 2.0 * q_curr - q_prev
                   : q_curr;
    const double tol = cfg.newton_tol * (1.0 + std::abs(q_curr));
    int iterations = 0;
    for (int it = 0;; ++it) {
        double slope = 0.0;
        const double value = residual(u, &slope);
        if (!std::isfinite(value) || !std::isfinite(slope))
            throw StepError(StepFailure::NonFinite, "scheme residual became non-finite");
        // A vanishing slope means the relation does not determine q_next,
        // even when the residual is already zero (e.g. the operator "0").
        if (std::abs(slope) < 1e-14 * (1.0 + std::abs(value)))
            throw StepError(StepFailure::DerivativeVanishes,
                            "the scheme does not determine the next value (dP/dq_next ~ 0)");
        if (std::abs(value) <= tol) return StepResult{u, iterations};
        if (it >= cfg.max_iter)
            throw StepError(StepFailure::MaxIterExceeded,
                            "Newton did not converge in " + std::to_string(cfg.max_iter) +
                                " iterations (residual " + std::to_string(value) + ")");
        u -= value / slope;
        ++iterations;
        if (!std::isfinite(u))
            throw StepError(StepFailure::NonFinite, "Newton iterate became non-finite");
    }
}

Trajectory run(const SecondOrderOp& op, double q0, double q1, const Partition& part,
               const StepConfig& cfg) {
    Trajectory traj{part, {q0, q1}, {0, 0}, false, -1, ""};
    traj.values.reserve(static_cast<std::size_t>(part.n() + 1));
    for (int p = 1; p <= part.n() - 1; ++p) {
        try {
            const StepResult r = step(op, traj.values[static_cast<std::size_t>(p - 1)],
                                      traj.values[static_cast<std::size_t>(p)], part.time(p),
                                      part.h(), cfg);
            traj.values.push_back(r.q_next);
            traj.newton_iterations.push_back(r.iterations);
        } catch (const StepError& e) {
            traj.failed_step = p;
            traj.failure_reason = step_failure_name(e.kind);
            return traj;
        } catch (const EvalError& e) {
            traj.failed_step = p;
            traj.failure_reason = std::string("DomainError: ") + e.what();
            return traj;
        }
    }
    traj.complete = true;
    return traj;
}

std::string Trajectory::to_csv() const {
    std::ostringstream out;
    out << "p,t,q,newton_iters\n";
    for (std::size_t p = 0; p < values.size(); ++p)
        out << p << ',' << shortest_repr(partition.time(static_cast<int>(p))) << ','
            << shortest_repr(values[p]) << ',' << newton_iterations[p] << '\n';
    if (complete)
        out << "# status=Complete\n";
    else
        out << "# status=FailedAtStep(p=" << failed_step << ", reason=" << failure_reason
            << ")\n";
    return out.str();
}

CompareResult compare(const SecondOrderOp& op_a, const SecondOrderOp& op_b, double q0, double q1,
                      const Partition& part, const StepConfig& cfg) {
    CompareResult r{run(op_a, q0, q1, part, cfg), run(op_b, q0, q1, part, cfg), 0.0, {}};
    const std::size_t common = std::min(r.a.values.size(), r.b.values.size());
    r.deviation.resize(common);
    for (std::size_t p = 0; p < common; ++p) {
        r.deviation[p] = std::abs(r.a.values[p] - r.b.values[p]);
        r.max_abs_deviation = std::max(r.max_abs_deviation, r.deviation[p]);
    }
    return r;
}

} // namespace dvar
