#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "dvar/opfile.hpp"
#include "support.hpp"

using namespace dvar;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/dvar_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
    void write(const std::string& content) {
        std::ofstream out(path);
        out << content;
    }
};

} // namespace

TEST_CASE("fde operator files round trip") {
    TempFile f("op.fde");
    save_op_file(SecondOrderOp::parse("x + sin(0.5*vm + 0.5*vp)*w", "blended"), f.path);
    const SecondOrderOp back = load_fde_file(f.path);
    CHECK(back.label() == "blended");
    std::mt19937_64 gen(1);
    const GridFn q = testsup::random_grid(gen, 8, 8, {0.1}, 2.0);
    const SecondOrderOp orig = SecondOrderOp::parse("x + sin(0.5*vm + 0.5*vp)*w");
    for (int p = 1; p <= 7; ++p) CHECK(eval_fde_at(back, q, p) == eval_fde_at(orig, q, p));
}

TEST_CASE("continuous and role mismatches") {
    TempFile f("op.cont");
    f.write("role=continuous\nexpr=x + v + w\n");
    const ContinuousOp o = load_continuous_file(f.path);
    CHECK(o.body().to_string() == "x + v + w");
    CHECK_THROWS_AS(load_fde_file(f.path), Error);

    TempFile g("bad.kv");
    g.write("expr=x\n");
    CHECK_THROWS_AS(load_fde_file(g.path), Error); // missing role
    g.write("role=fde\n");
    CHECK_THROWS_AS(load_fde_file(g.path), Error); // missing expr
    g.write("role=fde\nexpr=x + w\nexpr=w\n");
    CHECK_THROWS_AS(load_fde_file(g.path), Error); // duplicate key
    CHECK_THROWS_AS(load_fde_file("/nonexistent/file"), Error);
}

TEST_CASE("expression couples round trip; comments are ignored") {
    TempFile f("couple.lag");
    f.write("# oscillator couple\nrole=lagrangian_couple\nl_minus=(x^2 - v^2)/2\nl_plus=0\n");
    const LagrangianCouple c = load_couple_file(f.path);
    CHECK(c.provenance == "expression");
    CHECK(c.l_minus->eval(2.0, 1.0, 0.0, 0.1) == 1.5);

    TempFile g("couple2.lag");
    save_couple_file(c, g.path);
    const LagrangianCouple back = load_couple_file(g.path);
    CHECK(back.l_minus->eval(0.7, -1.2, 0.3, 0.05) == c.l_minus->eval(0.7, -1.2, 0.3, 0.05));
}

TEST_CASE("a single-Lagrangian file loads as the couple (L, 0)") {
    TempFile f("single.lag");
    f.write("role=lagrangian\nexpr=(x^2 - v^2)/2\n");
    const LagrangianCouple c = load_couple_file(f.path);
    CHECK(c.l_minus->eval(1.0, 2.0, 0.0, 0.1) == -1.5);
    CHECK(c.l_plus->eval(1.0, 2.0, 0.0, 0.1) == 0.0);
}

TEST_CASE("synthesized couples serialize as a reconstruction recipe") {
    const LagrangianCouple c = synthesize(SecondOrderOp::parse("x + w", "osc"), 16);
    TempFile f("synth.lag");
    save_couple_file(c, f.path);

    std::ifstream in(f.path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content.find("source_op=x + w") != std::string::npos);
    CHECK(content.find("quad_order=16") != std::string::npos);

    const LagrangianCouple back = load_couple_file(f.path);
    CHECK(back.provenance == "synthesized");
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int rep = 0; rep < 50; ++rep) {
        const double x = u(gen), v = u(gen), t = u(gen);
        CHECK(back.l_minus->eval(x, v, t, 0.1) == c.l_minus->eval(x, v, t, 0.1));
        CHECK(back.l_plus->eval(x, v, t, 0.1) == c.l_plus->eval(x, v, t, 0.1));
    }
}
