#pragma once

// Shared test utilities: finite-difference oracles (kept independent of the
// dual-number evaluation paths they check) and a random expression-text
// generator that only emits grammar-valid, domain-safe expressions.

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "dvar/expr.hpp"
#include "dvar/grid.hpp"

namespace testsup {

/// Central finite difference d e / d var at the binding point.
inline double fd_partial(const dvar::Expr& e, std::map<std::string, double> bindings,
                         const std::string& var, double step = 1e-6) {
    auto shifted = [&](double delta) {
        auto b = bindings;
        b[var] += delta;
        return e.eval(b);
    };
    return (shifted(step) - shifted(-step)) / (2.0 * step);
}

/// Second-order mixed finite difference d2 e / (da db).
inline double fd_mixed(const dvar::Expr& e, std::map<std::string, double> bindings,
                       const std::string& a, const std::string& b, double step = 1e-4) {
    auto at = (
        [&](double da, double db) {
            auto bb = bindings;
            bb[a] += da;
            bb[b] += db;
            return e.eval(bb);
        });
    return (at(step, step) - at(step, -step) - at(-step, step) + at(-step, -step)) /
           (4.0 * step * step);
}

/// Random expression text drawn from the grammar. Division denominators and
/// log/sqrt arguments are guarded so every generated expression is total on
/// bounded bindings.
class ExprGen {
public:
    ExprGen(std::uint64_t seed, std::vector<std::string> vars)
        : gen_(seed), vars_(std::move(vars)) {}

    std::string expr(int depth = 3) { return gen_expr(depth); }

    double uniform(double a, double b) {
        return a + (b - a) * std::uniform_real_distribution<double>(0.0, 1.0)(gen_);
    }

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen_); }

private:
    std::string number() {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", uniform(0.1, 2.5));
        return buf;
    }

    std::string gen_atom(int depth) {
        if (depth <= 0) return pick(2) == 0 ? number() : vars_[static_cast<std::size_t>(pick(static_cast<int>(vars_.size())))];
        switch (pick(6)) {
            case 0: return number();
            case 1: return vars_[static_cast<std::size_t>(pick(static_cast<int>(vars_.size())))];
            case 2: {
                static const char* fns[] = {"sin", "cos", "tanh"};
                return std::string(fns[pick(3)]) + "(" + gen_expr(depth - 1) + ")";
            }
            case 3: return "log(1.5 + (" + gen_expr(depth - 1) + ")^2)";
            case 4: return "sqrt(2 + (" + gen_expr(depth - 1) + ")^2)";
            default: return "(" + gen_expr(depth - 1) + ")";
        }
    }

    std::string gen_power(int depth) {
        std::string a = gen_atom(depth);
        if (pick(4) == 0) a += "^" + std::to_string(pick(4));
        return a;
    }

    std::string gen_factor(int depth) {
        return (pick(4) == 0 ? "-" : "") + gen_power(depth);
    }

    std::string gen_term(int depth) {
        std::string s = gen_factor(depth);
        const int extra = depth > 0 ? pick(3) : 0;
        for (int i = 0; i < extra; ++i) {
            if (pick(4) == 0)
                s += "/(2 + (" + gen_factor(depth - 1) + ")^2)";
            else
                s += "*" + gen_factor(depth - 1);
        }
        return s;
    }

    std::string gen_expr(int depth) {
        std::string s = gen_term(depth);
        const int extra = depth > 0 ? pick(3) : 0;
        for (int i = 0; i < extra; ++i)
            s += (pick(2) == 0 ? " + " : " - ") + gen_term(depth - 1);
        return s;
    }

    std::mt19937_64 gen_;
    std::vector<std::string> vars_;
};

/// Uniform random grid function on a fresh partition.
inline dvar::GridFn random_grid(std::mt19937_64& gen, int n_min, int n_max,
                                const std::vector<double>& h_set, double amp,
                                double t0_min = -1.0, double t0_max = 1.0) {
    std::uniform_int_distribution<int> npick(n_min, n_max);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int n = npick(gen);
    const double h = h_set[static_cast<std::size_t>(
        std::uniform_int_distribution<int>(0, static_cast<int>(h_set.size()) - 1)(gen))];
    const double t0 = t0_min + (t0_max - t0_min) * u01(gen);
    std::vector<double> q(static_cast<std::size_t>(n + 1));
    for (auto& v : q) v = -amp + 2.0 * amp * u01(gen);
    return dvar::GridFn(dvar::Partition(t0, h, n), std::move(q));
}

/// Zeroes the endpoints (Zero1) or the two outermost pairs (Zero2).
inline dvar::GridFn to_boundary_class(const dvar::GridFn& w, dvar::BoundaryClass c) {
    std::vector<double> v(w.values().begin(), w.values().end());
    const int n = w.n();
    if (c != dvar::BoundaryClass::Free) {
        v[0] = v[static_cast<std::size_t>(n)] = 0.0;
        if (c == dvar::BoundaryClass::Zero2)
            v[1] = v[static_cast<std::size_t>(n - 1)] = 0.0;
    }
    return dvar::GridFn(w.partition(), std::move(v));
}

} // namespace testsup
