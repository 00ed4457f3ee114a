#pragma once

#include <string>
#include <vector>

#include "dvar/fdeop.hpp"

namespace dvar {

struct StepConfig {
    double newton_tol = 1e-12;
    int max_iter = 50;
    enum class Guess { LinearExtrapolation, PreviousValue };
    Guess initial_guess = Guess::LinearExtrapolation;

    void validate() const;
};

enum class StepFailure { DerivativeVanishes, MaxIterExceeded, NonFinite };

const char* step_failure_name(StepFailure f);

struct StepError : Error {
    StepError(StepFailure kind_, const std::string& msg) : Error(msg), kind(kind_) {}
    StepFailure kind;
};

struct StepResult {
    double q_next;
    int iterations;
};

/// Solves the implicit relation P(q_curr, vm, vp, w, t, h) = 0 for q_next by
/// Newton iteration, where vm is built from (q_prev, q_curr) and vp, w from
/// the unknown. The derivative dP/dq_next = dP/dvp * (1/h) + dP/dw * (1/h^2)
/// comes from one dual pass. Raises DerivativeVanishes when the scheme does
/// not determine q_next.
StepResult step(const SecondOrderOp& op, double q_prev, double q_curr, double t, double h,
                const StepConfig& cfg);

struct Trajectory {
    Partition partition;
    std::vector<double> values;            // computed entries, starting at Q_0
    std::vector<int> newton_iterations;    // aligned with values (0 for the two seeds)
    bool complete = false;
    int failed_step = -1;                  // scheme index p at which stepping failed
    std::string failure_reason;

    /// CSV "p,t,q,newton_iters" plus a trailing "# status=..." comment line.
    std::string to_csv() const;
};

/// Seeds Q_0 = q0, Q_1 = q1 and steps the scheme for p = 1..n-1.
Trajectory run(const SecondOrderOp& op, double q0, double q1, const Partition& part,
               const StepConfig& cfg);

struct CompareResult {
    Trajectory a;
    Trajectory b;
    double max_abs_deviation = 0.0;
    std::vector<double> deviation; // per index over the common computed prefix
};

CompareResult compare(const SecondOrderOp& op_a, const SecondOrderOp& op_b, double q0, double q1,
                      const Partition& part, const StepConfig& cfg);

} // namespace dvar
