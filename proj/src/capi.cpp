#include "dvar/dvar.h"

#include <cstring>
#include <json.hpp>
#include <new>
#include <string>

#include "dvar/helmholtz.hpp"
#include "dvar/integrate.hpp"
#include "dvar/lagrange.hpp"
#include "dvar/opfile.hpp"

using namespace dvar;

struct dvar_op {
    SecondOrderOp op;
};
struct dvar_couple {
    LagrangianCouple couple;
};
struct dvar_grid {
    GridFn grid;
};
struct dvar_trajectory {
    Trajectory traj;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

/// Runs fn, translating C++ exceptions into status codes + the thread-local
/// error message.
template <class Fn>
dvar_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return DVAR_OK;
    } catch (const ParseError& e) {
        set_error(e.what());
        return DVAR_ERR_PARSE;
    } catch (const EvalError& e) {
        set_error(e.what());
        return DVAR_ERR_DOMAIN;
    } catch (const StepError& e) {
        set_error(e.what());
        return DVAR_ERR_STEP;
    } catch (const IoError& e) {
        set_error(e.what());
        return DVAR_ERR_IO;
    } catch (const Error& e) {
        set_error(e.what());
        return DVAR_ERR_INVALID;
    } catch (const std::exception& e) {
        set_error(e.what());
        return DVAR_ERR_INTERNAL;
    }
}

SamplingConfig from_c(const dvar_sampling_config* cfg) {
    SamplingConfig out;
    if (!cfg) return out;
    out.seed = cfg->seed;
    out.grids = cfg->grids;
    out.n_min = cfg->n_min;
    out.n_max = cfg->n_max;
    if (cfg->h_set && cfg->h_count > 0)
        out.h_set.assign(cfg->h_set, cfg->h_set + cfg->h_count);
    out.q_amplitude = cfg->q_amplitude;
    out.t0_min = cfg->t0_min;
    out.t0_max = cfg->t0_max;
    out.tol_abs = cfg->tol_abs;
    out.tol_rel = cfg->tol_rel;
    return out;
}

StepConfig from_c(const dvar_step_config* cfg) {
    StepConfig out;
    if (!cfg) return out;
    out.newton_tol = cfg->newton_tol;
    out.max_iter = cfg->max_iter;
    out.initial_guess = cfg->extrapolate_guess ? StepConfig::Guess::LinearExtrapolation
                                               : StepConfig::Guess::PreviousValue;
    return out;
}

dvar_verdict to_c(Verdict v) {
    switch (v) {
        case Verdict::Satisfied: return DVAR_VERDICT_SATISFIED;
        case Verdict::Violated:  return DVAR_VERDICT_VIOLATED;
        case Verdict::Inconclusive: break;
    }
    return DVAR_VERDICT_INCONCLUSIVE;
}

void emit_report(const Report& rep, dvar_verdict* verdict, char** json) {
    if (verdict) *verdict = to_c(rep.verdict);
    if (json) *json = dup_string(report_to_json(rep));
}

void require(bool ok, const char* what) {
    if (!ok) throw Error(what);
}

} // namespace

extern "C" {

const char* dvar_last_error(void) { return g_last_error.c_str(); }

void dvar_string_free(char* s) { delete[] s; }

void dvar_sampling_config_init(dvar_sampling_config* cfg) {
    if (!cfg) return;
    const SamplingConfig d;
    cfg->seed = d.seed;
    cfg->grids = d.grids;
    cfg->n_min = d.n_min;
    cfg->n_max = d.n_max;
    cfg->h_set = nullptr;
    cfg->h_count = 0;
    cfg->q_amplitude = d.q_amplitude;
    cfg->t0_min = d.t0_min;
    cfg->t0_max = d.t0_max;
    cfg->tol_abs = d.tol_abs;
    cfg->tol_rel = d.tol_rel;
}

dvar_status dvar_op_parse(const char* text, const char* label, dvar_op** out) {
    return guarded([&] {
        require(text && out, "null argument");
        *out = new dvar_op{SecondOrderOp::parse(text, label ? label : "")};
    });
}

dvar_status dvar_op_discretize(const char* continuous_text, double blend, dvar_op** out) {
    return guarded([&] {
        require(continuous_text && out, "null argument");
        *out = new dvar_op{direct_discretize(ContinuousOp::parse(continuous_text), blend)};
    });
}

dvar_status dvar_op_load(const char* path, dvar_op** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = new dvar_op{load_fde_file(path)};
    });
}

dvar_status dvar_op_load_continuous(const char* path, double blend, dvar_op** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = new dvar_op{direct_discretize(load_continuous_file(path), blend)};
    });
}

dvar_status dvar_op_save(const dvar_op* op, const char* path) {
    return guarded([&] {
        require(op && path, "null argument");
        save_op_file(op->op, path);
    });
}

char* dvar_op_to_string(const dvar_op* op) {
    if (!op) return nullptr;
    return dup_string(op->op.body().to_string());
}

void dvar_op_free(dvar_op* op) { delete op; }

dvar_status dvar_couple_parse(const char* l_minus, const char* l_plus, dvar_couple** out) {
    return guarded([&] {
        require(l_minus && l_plus && out, "null argument");
        *out = new dvar_couple{couple_from_exprs(l_minus, l_plus)};
    });
}

dvar_status dvar_couple_load(const char* path, dvar_couple** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = new dvar_couple{load_couple_file(path)};
    });
}

dvar_status dvar_couple_save(const dvar_couple* c, const char* path) {
    return guarded([&] {
        require(c && path, "null argument");
        save_couple_file(c->couple, path);
    });
}

dvar_status dvar_couple_difference(const dvar_couple* a, const dvar_couple* b,
                                   dvar_couple** out) {
    return guarded([&] {
        require(a && b && out, "null argument");
        *out = new dvar_couple{couple_difference(a->couple, b->couple)};
    });
}

dvar_status dvar_synthesize(const dvar_op* op, int quad_order, dvar_couple** out) {
    return guarded([&] {
        require(op && out, "null argument");
        *out = new dvar_couple{synthesize(op->op, quad_order)};
    });
}

void dvar_couple_free(dvar_couple* c) { delete c; }

dvar_status dvar_check_helmholtz(const dvar_op* op, const dvar_sampling_config* cfg,
                                 dvar_verdict* verdict, char** json) {
    return guarded([&] {
        require(op, "null operator");
        emit_report(check_helmholtz(op->op, from_c(cfg)), verdict, json);
    });
}

dvar_status dvar_check_selfadjoint(const dvar_op* op, const dvar_sampling_config* cfg,
                                   dvar_verdict* verdict, char** json) {
    return guarded([&] {
        require(op, "null operator");
        emit_report(check_selfadjoint(op->op, from_c(cfg)), verdict, json);
    });
}

dvar_status dvar_verify_synthesis(const dvar_op* op, const dvar_couple* c,
                                  const dvar_sampling_config* cfg, dvar_verdict* verdict,
                                  char** json) {
    return guarded([&] {
        require(op && c, "null argument");
        emit_report(verify_synthesis(op->op, c->couple, from_c(cfg)), verdict, json);
    });
}

dvar_status dvar_null_check(const dvar_couple* c, const dvar_sampling_config* cfg,
                            dvar_verdict* verdict, char** json) {
    return guarded([&] {
        require(c, "null couple");
        emit_report(null_check(c->couple, from_c(cfg)), verdict, json);
    });
}

dvar_status dvar_null_decompose(const dvar_couple* c, const dvar_sampling_config* cfg,
                                dvar_verdict* verdict, char** json) {
    return guarded([&] {
        require(c, "null couple");
        const NullDecomposition d = null_decompose(c->couple);
        emit_report(verify_null_decomposition(c->couple, d, from_c(cfg)), verdict, json);
    });
}

dvar_status dvar_grid_create(double t0, double h, int n, const double* values,
                             dvar_grid** out) {
    return guarded([&] {
        require(values && out, "null argument");
        std::vector<double> v(values, values + n + 1);
        *out = new dvar_grid{GridFn(Partition(t0, h, n), std::move(v))};
    });
}

dvar_status dvar_grid_load_csv(const char* path, dvar_grid** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = new dvar_grid{GridFn::read_csv(std::string(path))};
    });
}

dvar_status dvar_grid_save_csv(const dvar_grid* g, const char* path) {
    return guarded([&] {
        require(g && path, "null argument");
        g->grid.write_csv(std::string(path));
    });
}

void dvar_grid_free(dvar_grid* g) { delete g; }

dvar_status dvar_el_residual(const dvar_couple* c, const dvar_grid* g, char** json) {
    return guarded([&] {
        require(c && g && json, "null argument");
        const IndexedSeq res = el_residual(c->couple, g->grid);
        nlohmann::ordered_json j;
        j["first_index"] = res.first();
        j["values"] = std::vector<double>(res.raw().begin(), res.raw().end());
        *json = dup_string(j.dump(2) + "\n");
    });
}

void dvar_step_config_init(dvar_step_config* cfg) {
    if (!cfg) return;
    const StepConfig d;
    cfg->newton_tol = d.newton_tol;
    cfg->max_iter = d.max_iter;
    cfg->extrapolate_guess = 1;
}

dvar_status dvar_integrate(const dvar_op* op, double q0, double q1, double t0, double h,
                           int steps, const dvar_step_config* cfg, dvar_trajectory** out) {
    return guarded([&] {
        require(op && out, "null argument");
        *out = new dvar_trajectory{run(op->op, q0, q1, Partition(t0, h, steps), from_c(cfg))};
    });
}

int dvar_trajectory_complete(const dvar_trajectory* t) { return t && t->traj.complete ? 1 : 0; }

char* dvar_trajectory_to_csv(const dvar_trajectory* t) {
    if (!t) return nullptr;
    return dup_string(t->traj.to_csv());
}

void dvar_trajectory_free(dvar_trajectory* t) { delete t; }

dvar_status dvar_compare(const dvar_op* a, const dvar_op* b, double q0, double q1, double t0,
                         double h, int steps, const dvar_step_config* cfg, int* identical,
                         char** json) {
    return guarded([&] {
        require(a && b, "null operator");
        const CompareResult r =
            compare(a->op, b->op, q0, q1, Partition(t0, h, steps), from_c(cfg));
        if (identical)
            *identical = (r.a.complete && r.b.complete && r.max_abs_deviation <= 1e-12) ? 1 : 0;
        if (json) {
            auto status_of = [](const Trajectory& t) {
                return t.complete ? std::string("Complete")
                                  : "FailedAtStep(p=" + std::to_string(t.failed_step) +
                                        ", reason=" + t.failure_reason + ")";
            };
            nlohmann::ordered_json j;
            j["status_a"] = status_of(r.a);
            j["status_b"] = status_of(r.b);
            j["max_abs_deviation"] = r.max_abs_deviation;
            j["deviation"] = r.deviation;
            *json = dup_string(j.dump(2) + "\n");
        }
    });
}

} // extern "C"
