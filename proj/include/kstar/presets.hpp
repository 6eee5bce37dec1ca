#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "kstar/errors.hpp"
#include "kstar/expr.hpp"

namespace kstar {

/// Built-in Kähler potentials: flat (any n), fubini-study and poincare-disk (n = 1).
inline Expr preset_potential(std::string_view name, int n) {
  if (name == "flat") {
    Expr phi = Expr::z(1) * Expr::zb(1);
    for (int k = 2; k <= n; ++k) phi = phi + Expr::z(k) * Expr::zb(k);
    return phi;
  }
  if (name == "fubini-study" || name == "poincare-disk") {
    if (n != 1) throw UsageError("preset '" + std::string(name) + "' is one-dimensional");
    return name == "fubini-study" ? parse("log(1+z1*zb1)", 1) : parse("-log(1-z1*zb1)", 1);
  }
  throw UsageError("unknown preset '" + std::string(name) + "' (expected flat, fubini-study or poincare-disk)");
}

inline std::vector<std::string> preset_names() { return {"flat", "fubini-study", "poincare-disk"}; }

/// Rejects base points outside a preset's domain.
inline void check_preset_point(std::string_view name, const ChartPoint& point) {
  if (name == "poincare-disk" && !(std::abs(point.z.at(0)) < 1.0))
    throw NumericalError("poincare-disk base point must satisfy |z| < 1");
}

}  // namespace kstar
