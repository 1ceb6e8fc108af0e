#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "lnsforge/errors.hpp"

namespace lnsforge {

// Normalized distance between an incumbent objective and the best known
// objective. Worth 1 when there is no incumbent or the signs differ; 0 on
// an exact match (including 0 vs 0, where the quotient is otherwise
// undefined).
inline double primal_gap(const std::optional<double>& f_xt, double f_star) {
  if (!std::isfinite(f_star))
    throw InvalidParameterError("primal_gap: f_star must be finite");
  if (!f_xt.has_value()) return 1.0;
  const double f = *f_xt;
  if (f * f_star < 0.0) return 1.0;
  if (f == f_star) return 0.0;  // covers the 0/0 case
  return std::abs(f - f_star) / std::max(std::abs(f), std::abs(f_star));
}

}  // namespace lnsforge
