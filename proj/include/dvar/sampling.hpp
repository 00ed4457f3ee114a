#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dvar/grid.hpp"

namespace dvar {

/// Randomized realization of the "for all partitions, for all grid
/// functions" quantifiers. Identical configs (seed included) reproduce
/// bit-identical sampling streams and reports.
struct SamplingConfig {
    std::uint64_t seed = 1;
    int grids = 32;
    int n_min = 4;
    int n_max = 24;
    std::vector<double> h_set{0.05, 0.1, 0.5};
    double q_amplitude = 2.0;
    double t0_min = -1.0;
    double t0_max = 1.0;
    double tol_abs = 1e-9;
    double tol_rel = 1e-9;
    int retry_cap = 100;

    void validate() const;
};

/// Deterministic uniform sampling on top of mt19937_64. Doubles are drawn as
/// (word >> 11) * 2^-53 so the stream does not depend on the standard
/// library's distribution implementations.
class SampleRng {
public:
    explicit SampleRng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double a, double b) {
        const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        return a + u * (b - a);
    }

    int uniform_int(int lo, int hi) { // inclusive
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(gen_() % span);
    }

    double pick(const std::vector<double>& xs) {
        return xs[static_cast<std::size_t>(uniform_int(0, static_cast<int>(xs.size()) - 1))];
    }

private:
    std::mt19937_64 gen_;
};

/// Draws one random (partition, grid-function) sample per the config.
GridFn sample_grid(SampleRng& rng, const SamplingConfig& cfg);

enum class Verdict { Satisfied, Violated, Inconclusive };

/// Grid point at which the largest residual was observed.
struct Witness {
    double t0;
    double h;
    int n;
    std::vector<double> q;
    int p;
};

struct Report {
    Verdict verdict = Verdict::Inconclusive;
    std::string verdict_text = "Inconclusive"; // "Satisfied"/"Violated" or "Null"/"NotNull"
    double max_residual = 0.0;
    int samples = 0;
    double tolerance_abs = 0.0;
    double tolerance_rel = 0.0;
    std::optional<Witness> witness;

    /// Extra detail for decomposition reports; serialized under
    /// "decomposition" when present.
    std::optional<double> separability_residual;
    std::optional<double> gamma_x_dependence;
};

/// Applies the shared tolerance policy: Satisfied (positive) when
/// max_residual <= tol_abs + tol_rel*scale, Violated (negative) beyond
/// 1000x that bound, Inconclusive in the gray zone between.
Verdict classify_residual(double max_residual, double scale, const SamplingConfig& cfg);

/// Serializes the report to the fixed JSON schema (verdict, max_residual,
/// samples, tolerance_abs, tolerance_rel, witness). Deterministic byte
/// output for identical reports.
std::string report_to_json(const Report& report);

} // namespace dvar
