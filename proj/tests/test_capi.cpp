#include <doctest.h>

#include <cstring>
#include <string>

#include <json.hpp>

#include "dvar/dvar.h"

namespace {

std::string take(char* s) {
    REQUIRE(s != nullptr);
    std::string out(s);
    dvar_string_free(s);
    return out;
}

} // namespace

TEST_CASE("C API: parse, check, report") {
    dvar_op* op = nullptr;
    REQUIRE(dvar_op_parse("x + w", "osc", &op) == DVAR_OK);

    dvar_sampling_config cfg;
    dvar_sampling_config_init(&cfg);
    cfg.seed = 42;
    cfg.grids = 12;

    dvar_verdict verdict;
    char* json = nullptr;
    REQUIRE(dvar_check_helmholtz(op, &cfg, &verdict, &json) == DVAR_OK);
    CHECK(verdict == DVAR_VERDICT_SATISFIED);
    const auto j = nlohmann::json::parse(take(json));
    CHECK(j.at("verdict") == "Satisfied");
    CHECK(j.at("samples") == 12);

    char* text = dvar_op_to_string(op);
    CHECK(take(text) == "x + w");
    dvar_op_free(op);
}

TEST_CASE("C API: errors set status and message") {
    dvar_op* op = nullptr;
    CHECK(dvar_op_parse("x + + w", nullptr, &op) == DVAR_ERR_PARSE);
    CHECK(std::strlen(dvar_last_error()) > 0);
    CHECK(dvar_op_parse(nullptr, nullptr, &op) == DVAR_ERR_INVALID);
    CHECK(dvar_op_load("/nonexistent/op.fde", &op) == DVAR_ERR_IO);

    // Out-parameters stay untouched on failure.
    CHECK(op == nullptr);

    dvar_couple* c = nullptr;
    CHECK(dvar_couple_parse("(x^2 - v^2)/2", "vm", &c) == DVAR_ERR_PARSE); // wrong vocabulary
}

TEST_CASE("C API: discretize, synthesize, verify") {
    dvar_op* op = nullptr;
    REQUIRE(dvar_op_discretize("x + w", 0.5, &op) == DVAR_OK);

    dvar_couple* couple = nullptr;
    REQUIRE(dvar_synthesize(op, 16, &couple) == DVAR_OK);

    dvar_sampling_config cfg;
    dvar_sampling_config_init(&cfg);
    cfg.grids = 12;

    dvar_verdict verdict;
    char* json = nullptr;
    REQUIRE(dvar_verify_synthesis(op, couple, &cfg, &verdict, &json) == DVAR_OK);
    CHECK(verdict == DVAR_VERDICT_SATISFIED);
    take(json);

    dvar_couple_free(couple);
    dvar_op_free(op);

    CHECK(dvar_op_discretize("x + v + w", 1.5, &op) == DVAR_ERR_INVALID); // blend out of range
}

TEST_CASE("C API: null couple workflow") {
    dvar_couple* c = nullptr;
    REQUIRE(dvar_couple_parse("v + 1", "0", &c) == DVAR_OK);

    dvar_sampling_config cfg;
    dvar_sampling_config_init(&cfg);
    cfg.grids = 12;

    dvar_verdict verdict;
    char* json = nullptr;
    REQUIRE(dvar_null_check(c, &cfg, &verdict, &json) == DVAR_OK);
    CHECK(verdict == DVAR_VERDICT_SATISFIED);
    CHECK(nlohmann::json::parse(take(json)).at("verdict") == "Null");

    REQUIRE(dvar_null_decompose(c, &cfg, &verdict, &json) == DVAR_OK);
    CHECK(verdict == DVAR_VERDICT_SATISFIED);
    const auto j = nlohmann::json::parse(take(json));
    CHECK(j.at("decomposition").at("separability_residual").get<double>() <= 1e-10);
    dvar_couple_free(c);

    // A generator couple is rejected by the decomposition.
    REQUIRE(dvar_couple_parse("(x^2 - v^2)/2", "0", &c) == DVAR_OK);
    CHECK(dvar_null_decompose(c, &cfg, &verdict, &json) == DVAR_ERR_INVALID);
    dvar_couple_free(c);
}

TEST_CASE("C API: grids and EL residuals") {
    const double values[] = {0.0, 1.0, 0.0, -1.0, 0.0};
    dvar_grid* g = nullptr;
    REQUIRE(dvar_grid_create(0.0, 1.0, 4, values, &g) == DVAR_OK);

    dvar_couple* c = nullptr;
    REQUIRE(dvar_couple_parse("(x^2 - v^2)/2", "0", &c) == DVAR_OK);

    char* json = nullptr;
    REQUIRE(dvar_el_residual(c, g, &json) == DVAR_OK);
    const auto j = nlohmann::json::parse(take(json));
    CHECK(j.at("first_index") == 1);
    REQUIRE(j.at("values").size() == 3);
    // Scheme value at p=1: Q_1 + (Q_2 - 2 Q_1 + Q_0) = 1 - 2 = -1.
    CHECK(j.at("values")[0].get<double>() == doctest::Approx(-1.0).epsilon(1e-12));

    dvar_couple_free(c);
    dvar_grid_free(g);
}

TEST_CASE("C API: integrate and compare") {
    dvar_op* op = nullptr;
    REQUIRE(dvar_op_parse("x + w", nullptr, &op) == DVAR_OK);

    dvar_step_config scfg;
    dvar_step_config_init(&scfg);

    dvar_trajectory* traj = nullptr;
    REQUIRE(dvar_integrate(op, 1.0, 0.99, 0.0, 0.1, 20, &scfg, &traj) == DVAR_OK);
    CHECK(dvar_trajectory_complete(traj) == 1);
    const std::string csv = take(dvar_trajectory_to_csv(traj));
    CHECK(csv.find("p,t,q,newton_iters") == 0);
    CHECK(csv.find("# status=Complete") != std::string::npos);
    dvar_trajectory_free(traj);

    int identical = 0;
    char* json = nullptr;
    REQUIRE(dvar_compare(op, op, 1.0, 0.99, 0.0, 0.1, 20, &scfg, &identical, &json) == DVAR_OK);
    CHECK(identical == 1);
    CHECK(nlohmann::json::parse(take(json)).at("max_abs_deviation") == 0.0);
    dvar_op_free(op);
}
