#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dvar/integrate.hpp"
#include "dvar/lagrange.hpp"
#include "support.hpp"

using namespace dvar;

TEST_CASE("step solves the linear oscillator scheme in closed form") {
    const SecondOrderOp op = SecondOrderOp::parse("x + w");
    const StepConfig cfg;
    const StepResult r = step(op, 1.0, 1.0, 0.0, 0.1, cfg);
    CHECK(r.q_next == doctest::Approx(0.99).epsilon(1e-14));
    CHECK(r.iterations <= 1); // affine scheme: one Newton update at most
}

TEST_CASE("step failures") {
    const StepConfig cfg;
    // No dependence on the unknown at all.
    CHECK_THROWS_AS(step(SecondOrderOp::parse("x"), 0.5, 0.5, 0.0, 0.1, cfg), StepError);
    try {
        step(SecondOrderOp::parse("x"), 0.5, 0.5, 0.0, 0.1, cfg);
    } catch (const StepError& e) {
        CHECK(e.kind == StepFailure::DerivativeVanishes);
    }
    // Scheme identically zero: satisfied by everything, determines nothing.
    try {
        step(SecondOrderOp::parse("0"), 0.5, 0.5, 0.0, 0.1, cfg);
    } catch (const StepError& e) {
        CHECK(e.kind == StepFailure::DerivativeVanishes);
    }
    CHECK_THROWS_AS(step(SecondOrderOp::parse("x + w"), 0.5, 0.5, 0.0, -0.1, cfg), Error);

    StepConfig bad;
    bad.newton_tol = 0.0;
    CHECK_THROWS_AS(step(SecondOrderOp::parse("x + w"), 0.5, 0.5, 0.0, 0.1, bad), Error);
}

TEST_CASE("Newton enforces the iteration cap") {
    // The cubic scheme needs several updates; a cap of one forces the error.
    StepConfig tight;
    tight.max_iter = 1;
    try {
        step(SecondOrderOp::parse("x + w + vp^3"), 2.0, 2.5, 0.0, 0.1, tight);
        FAIL("expected MaxIterExceeded");
    } catch (const StepError& e) {
        CHECK(e.kind == StepFailure::MaxIterExceeded);
    }
}

TEST_CASE("Newton root matches a bisection oracle on a cubic scheme") {
    const SecondOrderOp op = SecondOrderOp::parse("x + w + vp^3");
    const double h = 0.1, q_prev = 0.5, q_curr = 0.5;
    const StepResult r = step(op, q_prev, q_curr, 0.0, h, StepConfig{});

    // Independent oracle: plain bisection on the residual in double
    // arithmetic, no dual numbers involved.
    auto phi = [&](double u) {
        const double vp = (u - q_curr) / h;
        const double w = (u - 2.0 * q_curr + q_prev) / (h * h);
        return q_curr + w + vp * vp * vp;
    };
    double lo = -1.0, hi = 2.0;
    REQUIRE(phi(lo) < 0.0);
    REQUIRE(phi(hi) > 0.0);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) < 0.0 ? lo : hi) = mid;
    }
    const double bisect = 0.5 * (lo + hi);
    CHECK(std::abs(r.q_next - bisect) <= 1e-10);
}

TEST_CASE("run reproduces the explicit oscillator recurrence") {
    const SecondOrderOp op = SecondOrderOp::parse("x + w");
    const double h = 0.1;
    const int n = 500;
    const Trajectory traj = run(op, 1.0, std::cos(h), Partition(0.0, h, n), StepConfig{});
    REQUIRE(traj.complete);
    REQUIRE(static_cast<int>(traj.values.size()) == n + 1);

    double a = 1.0, b = std::cos(h), worst = 0.0;
    for (int p = 1; p <= n - 1; ++p) {
        const double next = (2.0 - h * h) * b - a;
        worst = std::max(worst, std::abs(traj.values[static_cast<std::size_t>(p + 1)] - next));
        a = b;
        b = next;
    }
    CHECK(worst <= 1e-12);

    // Residual postcondition: the recomputed scheme residual stays below the
    // Newton tolerance everywhere.
    double qmax = 0.0;
    for (double v : traj.values) qmax = std::max(qmax, std::abs(v));
    const GridFn grid(traj.partition, traj.values);
    const IndexedSeq res = eval_fde(op, grid);
    for (int p = 1; p <= n - 1; ++p)
        CHECK(std::abs(res[p]) <= 1e-12 * (1.0 + qmax) + 1e-12 * (1.0 + qmax) / (h * h));
}

TEST_CASE("run records failures with the offending step") {
    const Trajectory traj = run(SecondOrderOp::parse("0"), 1.0, 1.0,
                                Partition(0.0, 0.1, 10), StepConfig{});
    CHECK_FALSE(traj.complete);
    CHECK(traj.failed_step == 1);
    CHECK(traj.failure_reason == "DerivativeVanishes");
    CHECK(traj.values.size() == 2); // only the seeds were produced
}

TEST_CASE("friction scheme matches its hand-derived explicit recurrence") {
    // Centered direct discretization of x + v + w; solving the scheme for
    // the next value gives
    //   Q_{p+1} = [-Q_p + Q_{p-1}/(2h) + (2Q_p - Q_{p-1})/h^2] / [1/(2h) + 1/h^2].
    const SecondOrderOp op = direct_discretize(ContinuousOp::parse("x + v + w"), 0.5);
    const double h = 0.1;
    const Trajectory traj = run(op, 1.0, 0.95, Partition(0.0, h, 5), StepConfig{});
    REQUIRE(traj.complete);
    double qm = 1.0, qc = 0.95;
    for (int p = 1; p <= 4; ++p) {
        const double next =
            (-qc + qm / (2.0 * h) + (2.0 * qc - qm) / (h * h)) / (1.0 / (2.0 * h) + 1.0 / (h * h));
        CHECK(traj.values[static_cast<std::size_t>(p + 1)] ==
              doctest::Approx(next).epsilon(1e-12));
        qm = qc;
        qc = next;
    }
}

TEST_CASE("nonlinear implicit scheme integrates with the PreviousValue guess too") {
    const SecondOrderOp op = SecondOrderOp::parse("x + w + vp^3");
    StepConfig cfg;
    cfg.initial_guess = StepConfig::Guess::PreviousValue;
    const Trajectory traj = run(op, 0.5, 0.49, Partition(0.0, 0.1, 30), cfg);
    CHECK(traj.complete);
    const GridFn grid(traj.partition, traj.values);
    const IndexedSeq res = eval_fde(op, grid);
    for (int p = 1; p <= 29; ++p) CHECK(std::abs(res[p]) <= 1e-9);
}

TEST_CASE("compare: EL scheme of the quadratic Lagrangian equals the direct discretization") {
    const SecondOrderOp el = euler_lagrange_op(couple_from_exprs("(x^2 - v^2)/2", "0"));
    const SecondOrderOp direct = direct_discretize(ContinuousOp::parse("x + w"), 0.5);
    const CompareResult r =
        compare(el, direct, 1.0, 0.995, Partition(0.0, 0.1, 200), StepConfig{});
    CHECK(r.a.complete);
    CHECK(r.b.complete);
    CHECK(r.max_abs_deviation <= 1e-10);

    // Identical operators produce identical trajectories.
    const CompareResult same =
        compare(direct, direct, 1.0, 0.995, Partition(0.0, 0.1, 100), StepConfig{});
    CHECK(same.max_abs_deviation == 0.0);

    // Different blends of the sine discretization diverge on generic data.
    const ContinuousOp curvy = ContinuousOp::parse("x + sin(v)*w");
    const CompareResult diff =
        compare(direct_discretize(curvy, 0.0), direct_discretize(curvy, 1.0), 1.0, 0.9,
                Partition(0.0, 0.1, 50), StepConfig{});
    CHECK(diff.max_abs_deviation > 1e-6);
}

TEST_CASE("trajectory CSV carries rows and a status comment") {
    const Trajectory traj =
        run(SecondOrderOp::parse("x + w"), 1.0, 0.99, Partition(0.0, 0.1, 4), StepConfig{});
    const std::string csv = traj.to_csv();
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "p,t,q,newton_iters");
    std::getline(in, line);
    CHECK(line.substr(0, 4) == "0,0,");
    int rows = 1;
    std::string last;
    while (std::getline(in, line)) {
        last = line;
        ++rows;
    }
    CHECK(rows == 5 + 1); // n+1 data rows + status comment
    CHECK(last == "# status=Complete");

    const Trajectory failed =
        run(SecondOrderOp::parse("0"), 1.0, 1.0, Partition(0.0, 0.1, 4), StepConfig{});
    const std::string fcsv = failed.to_csv();
    CHECK(fcsv.find("# status=FailedAtStep(p=1, reason=DerivativeVanishes)") != std::string::npos);
}
