#pragma once

#include <vector>

namespace dvar {

/// Gauss-Legendre nodes and weights mapped to [0, 1]. Exact for polynomials
/// of degree <= 2*order - 1.
struct QuadTable {
    std::vector<double> nodes;
    std::vector<double> weights;
    int order() const { return static_cast<int>(nodes.size()); }
};

QuadTable gauss_legendre_01(int order);

} // namespace dvar
