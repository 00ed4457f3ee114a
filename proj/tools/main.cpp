// dvar command-line interface. Talks to the core exclusively through the C
// API in dvar/dvar.h; all numerics live behind that boundary.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dvar/dvar.h"

namespace {

constexpr int kExitPositive = 0; // Satisfied / Null / Complete
constexpr int kExitNegative = 1; // Violated / NotNull / Failed / Inconclusive
constexpr int kExitUsage = 2;    // usage or input errors

struct Fail {
    int code;
    std::string message;
};

[[noreturn]] void fail_usage(const std::string& msg) { throw Fail{kExitUsage, msg}; }

[[noreturn]] void fail_api(const std::string& context) {
    throw Fail{kExitUsage, context + ": " + dvar_last_error()};
}

std::string take_string(char* s) {
    std::string out = s ? s : "";
    dvar_string_free(s);
    return out;
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) fail_usage("cannot open '" + out_path + "' for writing");
    out << text;
}

int exit_code_for(dvar_verdict v) {
    return v == DVAR_VERDICT_SATISFIED ? kExitPositive : kExitNegative;
}

using OpHandle = std::unique_ptr<dvar_op, decltype(&dvar_op_free)>;
using CoupleHandle = std::unique_ptr<dvar_couple, decltype(&dvar_couple_free)>;
using GridHandle = std::unique_ptr<dvar_grid, decltype(&dvar_grid_free)>;
using TrajHandle = std::unique_ptr<dvar_trajectory, decltype(&dvar_trajectory_free)>;

// ---------------------------------------------------------------------------
// Shared option groups
// ---------------------------------------------------------------------------

struct OpSource {
    std::string inline_text;
    std::string file;
    std::string continuous;
    std::string continuous_file;
    double blend = 0.5;

    void add_flags(CLI::App* cmd, const std::string& prefix = "") {
        const std::string dash = "--" + prefix;
        cmd->add_option(dash + "op", inline_text,
                        "Scheme body over {x, vm, vp, w, t, xi}");
        cmd->add_option(dash + "op-file", file, "Operator file (role=fde)");
        cmd->add_option(dash + "continuous", continuous,
                        "Continuous body over {x, v, w, t}; discretized with --blend");
        cmd->add_option(dash + "continuous-file", continuous_file,
                        "Operator file (role=continuous); discretized with --blend");
        if (prefix.empty())
            cmd->add_option("--blend", blend,
                            "Velocity blend for direct discretization (0 backward, "
                            "1/2 centered, 1 forward)")
                ->capture_default_str();
    }

    OpHandle resolve(const std::string& what = "operator") const {
        const int sources = !inline_text.empty() + !file.empty() + !continuous.empty() +
                            !continuous_file.empty();
        if (sources == 0) fail_usage("missing " + what + " source (--op, --op-file, "
                                     "--continuous or --continuous-file)");
        if (sources > 1) fail_usage("conflicting " + what + " sources: give exactly one of "
                                    "--op, --op-file, --continuous, --continuous-file");
        dvar_op* op = nullptr;
        dvar_status st = DVAR_OK;
        if (!inline_text.empty())
            st = dvar_op_parse(inline_text.c_str(), nullptr, &op);
        else if (!file.empty())
            st = dvar_op_load(file.c_str(), &op);
        else if (!continuous.empty())
            st = dvar_op_discretize(continuous.c_str(), blend, &op);
        else
            st = dvar_op_load_continuous(continuous_file.c_str(), blend, &op);
        if (st != DVAR_OK) fail_api("cannot load " + what);
        return OpHandle(op, &dvar_op_free);
    }
};

struct CoupleSource {
    std::string l_minus;
    std::string l_plus;
    std::string file;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--l-minus", l_minus, "L- body over {x, v, t, xi}");
        cmd->add_option("--l-plus", l_plus, "L+ body over {x, v, t, xi}");
        cmd->add_option("--couple-file", file,
                        "Couple file (role=lagrangian_couple or role=lagrangian)");
    }

    CoupleHandle resolve() const {
        const bool has_inline = !l_minus.empty() || !l_plus.empty();
        if (has_inline && !file.empty())
            fail_usage("conflicting couple sources: --l-minus/--l-plus vs --couple-file");
        if (!has_inline && file.empty())
            fail_usage("missing couple source (--l-minus/--l-plus or --couple-file)");
        dvar_couple* c = nullptr;
        const dvar_status st =
            file.empty()
                ? dvar_couple_parse(l_minus.empty() ? "0" : l_minus.c_str(),
                                    l_plus.empty() ? "0" : l_plus.c_str(), &c)
                : dvar_couple_load(file.c_str(), &c);
        if (st != DVAR_OK) fail_api("cannot load couple");
        return CoupleHandle(c, &dvar_couple_free);
    }
};

struct SamplingFlags {
    dvar_sampling_config cfg{};
    std::vector<double> h_set;

    SamplingFlags() { dvar_sampling_config_init(&cfg); }

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--seed", cfg.seed, "Sampling seed")->capture_default_str();
        cmd->add_option("--grids", cfg.grids, "Number of sampled grids")->capture_default_str();
        cmd->add_option("--n-min", cfg.n_min, "Smallest sampled N (>= 4)")->capture_default_str();
        cmd->add_option("--n-max", cfg.n_max, "Largest sampled N (<= 64)")->capture_default_str();
        cmd->add_option("--h", h_set, "Step sizes to sample (default 0.05 0.1 0.5)");
        cmd->add_option("--amp", cfg.q_amplitude, "Grid value amplitude")->capture_default_str();
        cmd->add_option("--tol-abs", cfg.tol_abs, "Absolute tolerance")->capture_default_str();
        cmd->add_option("--tol-rel", cfg.tol_rel, "Relative tolerance")->capture_default_str();
    }

    const dvar_sampling_config* resolve() {
        if (!h_set.empty()) {
            cfg.h_set = h_set.data();
            cfg.h_count = static_cast<int>(h_set.size());
        }
        return &cfg;
    }
};

// ---------------------------------------------------------------------------
// Subcommand runners
// ---------------------------------------------------------------------------

int run_check(const OpSource& src, SamplingFlags& sampling, const std::string& out_path,
              bool selfadjoint) {
    const OpHandle op = src.resolve();
    dvar_verdict verdict;
    char* json = nullptr;
    const dvar_status st =
        selfadjoint ? dvar_check_selfadjoint(op.get(), sampling.resolve(), &verdict, &json)
                    : dvar_check_helmholtz(op.get(), sampling.resolve(), &verdict, &json);
    if (st != DVAR_OK) fail_api("check failed");
    write_output(take_string(json), out_path);
    return exit_code_for(verdict);
}

int run_synthesize(const OpSource& src, SamplingFlags& sampling, int quad_order,
                   const std::string& out_path) {
    const OpHandle op = src.resolve();
    dvar_couple* raw = nullptr;
    if (dvar_synthesize(op.get(), quad_order, &raw) != DVAR_OK) fail_api("synthesis failed");
    const CoupleHandle couple(raw, &dvar_couple_free);
    if (!out_path.empty() && dvar_couple_save(couple.get(), out_path.c_str()) != DVAR_OK)
        fail_api("cannot write couple file");
    dvar_verdict verdict;
    char* json = nullptr;
    if (dvar_verify_synthesis(op.get(), couple.get(), sampling.resolve(), &verdict, &json) !=
        DVAR_OK)
        fail_api("verification failed");
    std::cout << take_string(json);
    return exit_code_for(verdict);
}

int run_el_residual(const CoupleSource& src, const std::string& grid_path,
                    const std::string& out_path) {
    const CoupleHandle couple = src.resolve();
    dvar_grid* raw = nullptr;
    if (dvar_grid_load_csv(grid_path.c_str(), &raw) != DVAR_OK) fail_api("cannot load grid");
    const GridHandle grid(raw, &dvar_grid_free);
    char* json = nullptr;
    if (dvar_el_residual(couple.get(), grid.get(), &json) != DVAR_OK)
        fail_api("residual evaluation failed");
    write_output(take_string(json), out_path);
    return kExitPositive;
}

int run_null_check(const CoupleSource& src, SamplingFlags& sampling,
                   const std::string& out_path) {
    const CoupleHandle couple = src.resolve();
    dvar_verdict verdict;
    char* json = nullptr;
    if (dvar_null_check(couple.get(), sampling.resolve(), &verdict, &json) != DVAR_OK)
        fail_api("null check failed");
    write_output(take_string(json), out_path);
    return exit_code_for(verdict);
}

int run_null_decompose(const CoupleSource& src, SamplingFlags& sampling,
                       const std::string& out_path) {
    const CoupleHandle couple = src.resolve();
    dvar_verdict verdict;
    char* json = nullptr;
    if (dvar_null_decompose(couple.get(), sampling.resolve(), &verdict, &json) != DVAR_OK)
        fail_api("decomposition failed");
    write_output(take_string(json), out_path);
    return exit_code_for(verdict);
}

int run_integrate(const OpSource& src, double q0, double q1, double t0, double h, int steps,
                  const dvar_step_config& scfg, const std::string& out_path) {
    const OpHandle op = src.resolve();
    dvar_trajectory* raw = nullptr;
    if (dvar_integrate(op.get(), q0, q1, t0, h, steps, &scfg, &raw) != DVAR_OK)
        fail_api("integration failed");
    const TrajHandle traj(raw, &dvar_trajectory_free);
    write_output(take_string(dvar_trajectory_to_csv(traj.get())), out_path);
    return dvar_trajectory_complete(traj.get()) ? kExitPositive : kExitNegative;
}

int run_compare(const OpSource& a, const OpSource& b, double q0, double q1, double t0, double h,
                int steps, const dvar_step_config& scfg, const std::string& out_path) {
    const OpHandle op_a = a.resolve("operator A");
    const OpHandle op_b = b.resolve("operator B");
    int identical = 0;
    char* json = nullptr;
    if (dvar_compare(op_a.get(), op_b.get(), q0, q1, t0, h, steps, &scfg, &identical, &json) !=
        DVAR_OK)
        fail_api("comparison failed");
    write_output(take_string(json), out_path);
    return kExitPositive;
}

int run_demo(std::uint64_t seed) {
    dvar_sampling_config cfg;
    dvar_sampling_config_init(&cfg);
    cfg.seed = seed;

    bool all_ok = true;
    auto check_op = [&](const std::string& title, dvar_op* raw, dvar_verdict expect) {
        const OpHandle op(raw, &dvar_op_free);
        dvar_verdict verdict;
        char* json = nullptr;
        if (dvar_check_helmholtz(op.get(), &cfg, &verdict, &json) != DVAR_OK)
            fail_api("demo check failed");
        take_string(json);
        const char* name = verdict == DVAR_VERDICT_SATISFIED   ? "Satisfied"
                           : verdict == DVAR_VERDICT_VIOLATED ? "Violated"
                                                               : "Inconclusive";
        const bool ok = verdict == expect;
        all_ok = all_ok && ok;
        std::cout << (ok ? "  ok   " : "  FAIL ") << title << " -> " << name << "\n";
    };

    std::cout << "Helmholtz structure of classic schemes:\n";
    dvar_op* op = nullptr;
    if (dvar_op_parse("x + w", nullptr, &op) != DVAR_OK) fail_api("demo parse");
    check_op("oscillator scheme x + w", op, DVAR_VERDICT_SATISFIED);

    if (dvar_op_discretize("x + v + w", 0.5, &op) != DVAR_OK) fail_api("demo discretize");
    check_op("friction x + v + w, centered blend", op, DVAR_VERDICT_VIOLATED);

    for (double blend : {0.0, 0.5, 1.0}) {
        if (dvar_op_discretize("x + sin(v)*w", blend, &op) != DVAR_OK)
            fail_api("demo discretize");
        check_op("x + sin(v)*w at blend " + std::to_string(blend).substr(0, 3), op,
                 DVAR_VERDICT_VIOLATED);
    }

    if (dvar_op_parse("x + w + sin(t)", nullptr, &op) != DVAR_OK) fail_api("demo parse");
    check_op("driven oscillator x + w + sin(t)", op, DVAR_VERDICT_SATISFIED);

    std::cout << "Lagrangian synthesis round trip for x + w:\n";
    {
        if (dvar_op_parse("x + w", nullptr, &op) != DVAR_OK) fail_api("demo parse");
        const OpHandle osc(op, &dvar_op_free);
        dvar_couple* raw = nullptr;
        if (dvar_synthesize(osc.get(), 32, &raw) != DVAR_OK) fail_api("demo synth");
        const CoupleHandle synth(raw, &dvar_couple_free);
        dvar_verdict verdict;
        char* json = nullptr;
        if (dvar_verify_synthesis(osc.get(), synth.get(), &cfg, &verdict, &json) != DVAR_OK)
            fail_api("demo verify");
        take_string(json);
        bool ok = verdict == DVAR_VERDICT_SATISFIED;
        std::cout << (ok ? "  ok   " : "  FAIL ") << "synthesized couple regenerates the scheme\n";
        all_ok = all_ok && ok;

        // The quadratic Lagrangian generates the same scheme (a classic
        // variational integrator that coincides with a direct discretization).
        if (dvar_couple_parse("(x^2 - v^2)/2", "0", &raw) != DVAR_OK) fail_api("demo couple");
        const CoupleHandle quad(raw, &dvar_couple_free);
        if (dvar_verify_synthesis(osc.get(), quad.get(), &cfg, &verdict, &json) != DVAR_OK)
            fail_api("demo verify");
        take_string(json);
        ok = verdict == DVAR_VERDICT_SATISFIED;
        std::cout << (ok ? "  ok   " : "  FAIL ")
                  << "quadratic Lagrangian (x^2 - v^2)/2 generates the same scheme\n";
        all_ok = all_ok && ok;

        // Their difference is a null couple.
        if (dvar_couple_difference(quad.get(), synth.get(), &raw) != DVAR_OK)
            fail_api("demo difference");
        const CoupleHandle diff(raw, &dvar_couple_free);
        if (dvar_null_check(diff.get(), &cfg, &verdict, &json) != DVAR_OK)
            fail_api("demo null check");
        take_string(json);
        ok = verdict == DVAR_VERDICT_SATISFIED;
        std::cout << (ok ? "  ok   " : "  FAIL ") << "difference of the two couples is null\n";
        all_ok = all_ok && ok;
    }

    std::cout << (all_ok ? "demo: all expectations hold\n" : "demo: FAILURES above\n");
    return all_ok ? kExitPositive : kExitNegative;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dvar — discrete variational structure of finite-difference schemes"};
    app.require_subcommand(1);
    // --h is a sampling/integration flag, so help is long-form only.
    app.set_help_flag("--help", "Print help");

    // check-helmholtz / check-selfadjoint
    OpSource check_src;
    SamplingFlags check_sampling;
    std::string check_out;
    CLI::App* check = app.add_subcommand(
        "check-helmholtz", "Decide the discrete Helmholtz condition by randomized sampling");
    check_src.add_flags(check);
    check_sampling.add_flags(check);
    check->add_option("--out", check_out, "Write the JSON report here instead of stdout");

    OpSource sa_src;
    SamplingFlags sa_sampling;
    std::string sa_out;
    CLI::App* selfadj = app.add_subcommand(
        "check-selfadjoint", "Compare Frechet rows against the adjoint transpose oracle");
    sa_src.add_flags(selfadj);
    sa_sampling.add_flags(selfadj);
    selfadj->add_option("--out", sa_out, "Write the JSON report here instead of stdout");

    // synthesize
    OpSource synth_src;
    SamplingFlags synth_sampling;
    std::string synth_out;
    int quad_order = 32;
    CLI::App* synth = app.add_subcommand(
        "synthesize", "Construct a Lagrangian couple for a Helmholtz-satisfying operator");
    synth_src.add_flags(synth);
    synth_sampling.add_flags(synth);
    synth->add_option("--quad-order", quad_order, "Gauss-Legendre order")->capture_default_str();
    synth->add_option("--out", synth_out, "Couple file to write (verification JSON goes to stdout)");

    // el-residual
    CoupleSource el_src;
    std::string el_grid, el_out;
    CLI::App* el = app.add_subcommand(
        "el-residual", "Evaluate the discrete Euler-Lagrange residual along a grid CSV");
    el_src.add_flags(el);
    el->add_option("--grid", el_grid, "Grid CSV with header p,t,q")->required();
    el->add_option("--out", el_out, "Write the JSON here instead of stdout");

    // null-check / null-decompose
    CoupleSource nc_src;
    SamplingFlags nc_sampling;
    std::string nc_out;
    CLI::App* nullcheck =
        app.add_subcommand("null-check", "Decide whether a couple generates the null scheme");
    nc_src.add_flags(nullcheck);
    nc_sampling.add_flags(nullcheck);
    nullcheck->add_option("--out", nc_out, "Write the JSON report here instead of stdout");

    CoupleSource nd_src;
    SamplingFlags nd_sampling;
    std::string nd_out;
    CLI::App* nulldec = app.add_subcommand(
        "null-decompose", "Extract the telescoping certificate f, g of a null couple");
    nd_src.add_flags(nulldec);
    nd_sampling.add_flags(nulldec);
    nulldec->add_option("--out", nd_out, "Write the JSON report here instead of stdout");

    // integrate
    OpSource int_src;
    double q0 = 0.0, q1 = 0.0, t0 = 0.0, step_h = 0.1;
    int steps = 100;
    dvar_step_config scfg;
    dvar_step_config_init(&scfg);
    std::string int_out;
    CLI::App* integ = app.add_subcommand("integrate", "Run a scheme as an implicit time stepper");
    int_src.add_flags(integ);
    integ->add_option("--q0", q0, "Initial value Q_0")->required();
    integ->add_option("--q1", q1, "Second value Q_1")->required();
    integ->add_option("--t0", t0, "Initial time")->capture_default_str();
    integ->add_option("--h", step_h, "Step size")->capture_default_str();
    integ->add_option("--steps", steps, "Number of steps (>= 4)")->capture_default_str();
    integ->add_option("--newton-tol", scfg.newton_tol, "Newton residual tolerance")
        ->capture_default_str();
    integ->add_option("--max-iter", scfg.max_iter, "Newton iteration cap")->capture_default_str();
    integ->add_option("--out", int_out, "Write the trajectory CSV here instead of stdout");

    // compare
    OpSource cmp_a, cmp_b;
    double cq0 = 0.0, cq1 = 0.0, ct0 = 0.0, ch = 0.1;
    int csteps = 100;
    dvar_step_config cscfg;
    dvar_step_config_init(&cscfg);
    std::string cmp_out;
    CLI::App* cmp = app.add_subcommand("compare", "Integrate two schemes and report deviations");
    cmp_a.add_flags(cmp, "a-");
    cmp_b.add_flags(cmp, "b-");
    cmp->add_option("--blend-a", cmp_a.blend, "Blend for a continuous A source")
        ->capture_default_str();
    cmp->add_option("--blend-b", cmp_b.blend, "Blend for a continuous B source")
        ->capture_default_str();
    cmp->add_option("--q0", cq0, "Initial value Q_0")->required();
    cmp->add_option("--q1", cq1, "Second value Q_1")->required();
    cmp->add_option("--t0", ct0, "Initial time")->capture_default_str();
    cmp->add_option("--h", ch, "Step size")->capture_default_str();
    cmp->add_option("--steps", csteps, "Number of steps (>= 4)")->capture_default_str();
    cmp->add_option("--out", cmp_out, "Write the JSON here instead of stdout");

    // demo
    std::uint64_t demo_seed = 1;
    CLI::App* demo = app.add_subcommand(
        "demo", "Reproduce the classic examples end-to-end as a smoke test");
    demo->add_option("--seed", demo_seed, "Sampling seed")->capture_default_str();

    for (CLI::App* sub : {check, selfadj, synth, el, nullcheck, nulldec, integ, cmp, demo})
        sub->set_help_flag("--help", "Print help");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (check->parsed()) return run_check(check_src, check_sampling, check_out, false);
        if (selfadj->parsed()) return run_check(sa_src, sa_sampling, sa_out, true);
        if (synth->parsed())
            return run_synthesize(synth_src, synth_sampling, quad_order, synth_out);
        if (el->parsed()) return run_el_residual(el_src, el_grid, el_out);
        if (nullcheck->parsed()) return run_null_check(nc_src, nc_sampling, nc_out);
        if (nulldec->parsed()) return run_null_decompose(nd_src, nd_sampling, nd_out);
        if (integ->parsed())
            return run_integrate(int_src, q0, q1, t0, step_h, steps, scfg, int_out);
        if (cmp->parsed())
            return run_compare(cmp_a, cmp_b, cq0, cq1, ct0, ch, csteps, cscfg, cmp_out);
        if (demo->parsed()) return run_demo(demo_seed);
    } catch (const Fail& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    }
    return kExitUsage;
}
