#include "dvar/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dvar {

// Newton iteration on the Legendre polynomial recurrence; nodes computed on
// [-1, 1] by symmetry and mapped affinely to [0, 1].
QuadTable gauss_legendre_01(int order) {
    if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
    QuadTable table;
    table.nodes.resize(static_cast<std::size_t>(order));
    table.weights.resize(static_cast<std::size_t>(order));
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= order; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = order * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * pp * pp);
        // z is the i-th node from the right on [-1, 1]; map to [0, 1].
        table.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - z);
        table.nodes[static_cast<std::size_t>(order - 1 - i)] = 0.5 * (1.0 + z);
        table.weights[static_cast<std::size_t>(i)] = 0.5 * w;
        table.weights[static_cast<std::size_t>(order - 1 - i)] = 0.5 * w;
    }
    return table;
}

} // namespace dvar
