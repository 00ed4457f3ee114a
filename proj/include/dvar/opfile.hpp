#pragma once

#include <string>

#include "dvar/fdeop.hpp"
#include "dvar/lagrange.hpp"

namespace dvar {

/// Key/value operator files:
///   role=fde|continuous|lagrangian|lagrangian_couple
///   expr=...            (fde, continuous, lagrangian)
///   label=...           (optional)
///   l_minus=... l_plus=...            (expression-backed couples)
///   source_op=... quad_order=... anchor_y0=... anchor_z0=...  (synthesized couples)
/// Lines starting with '#' and blank lines are ignored.

SecondOrderOp load_fde_file(const std::string& path);
ContinuousOp load_continuous_file(const std::string& path);

/// Loads role=lagrangian_couple; a role=lagrangian file is accepted as the
/// couple (L, 0).
LagrangianCouple load_couple_file(const std::string& path);

void save_op_file(const SecondOrderOp& op, const std::string& path);
void save_couple_file(const LagrangianCouple& c, const std::string& path);

} // namespace dvar
