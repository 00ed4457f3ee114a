#include "dvar/sampling.hpp"

#include <json.hpp>

namespace dvar {

void SamplingConfig::validate() const {
    if (grids < 1) throw Error("sampling needs at least one grid");
    if (n_min < 4) throw Error("sampling n_min must be >= 4");
    if (n_max < n_min || n_max > 64) throw Error("sampling n_max must lie in [n_min, 64]");
    if (h_set.empty()) throw Error("sampling h_set must not be empty");
    for (double h : h_set)
        if (!(h > 0.0)) throw Error("sampling step sizes must be positive");
    if (!(q_amplitude > 0.0)) throw Error("sampling amplitude must be positive");
    if (!(t0_min <= t0_max)) throw Error("sampling t0 range is empty");
    if (!(tol_abs >= 0.0) || !(tol_rel >= 0.0)) throw Error("tolerances must be >= 0");
}

GridFn sample_grid(SampleRng& rng, const SamplingConfig& cfg) {
    const int n = rng.uniform_int(cfg.n_min, cfg.n_max);
    const double h = rng.pick(cfg.h_set);
    const double t0 = rng.uniform(cfg.t0_min, cfg.t0_max);
    std::vector<double> q(static_cast<std::size_t>(n + 1));
    for (auto& v : q) v = rng.uniform(-cfg.q_amplitude, cfg.q_amplitude);
    return GridFn(Partition(t0, h, n), std::move(q));
}

Verdict classify_residual(double max_residual, double scale, const SamplingConfig& cfg) {
    const double bound = cfg.tol_abs + cfg.tol_rel * scale;
    if (max_residual <= bound) return Verdict::Satisfied;
    if (max_residual > 1000.0 * bound) return Verdict::Violated;
    return Verdict::Inconclusive;
}

std::string report_to_json(const Report& report) {
    nlohmann::ordered_json j;
    j["verdict"] = report.verdict_text;
    j["max_residual"] = report.max_residual;
    j["samples"] = report.samples;
    j["tolerance_abs"] = report.tolerance_abs;
    j["tolerance_rel"] = report.tolerance_rel;
    if (report.witness) {
        nlohmann::ordered_json w;
        w["t0"] = report.witness->t0;
        w["h"] = report.witness->h;
        w["n"] = report.witness->n;
        w["q"] = report.witness->q;
        w["p"] = report.witness->p;
        j["witness"] = w;
    } else {
        j["witness"] = nullptr;
    }
    if (report.separability_residual || report.gamma_x_dependence) {
        nlohmann::ordered_json d;
        if (report.separability_residual) d["separability_residual"] = *report.separability_residual;
        if (report.gamma_x_dependence) d["gamma_x_dependence"] = *report.gamma_x_dependence;
        j["decomposition"] = d;
    }
    return j.dump(2) + "\n";
}

} // namespace dvar
