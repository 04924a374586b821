#pragma once

#include <functional>

#include "expdol/types.hpp"

namespace expdol {

/// Objective callback: returns f(x) and, when grad is non-null, fills it
/// with the gradient at x.
using ObjectiveFn = std::function<double(const RealVector& x, RealVector* grad)>;

struct LbfgsOptions {
  double grad_tolerance = 1e-6;  // stop when ||grad||_inf falls below this
  int max_steps = 200;
  int memory = 8;
  // Iterates are clamped to [lower, upper] componentwise; exp(x) stays
  // representable inside the solver.
  double lower = -40.0;
  double upper = 40.0;
};

struct LbfgsResult {
  RealVector x;
  double value = 0.0;
  double grad_norm = 0.0;  // infinity norm at the returned point
  int steps = 0;
  bool converged = false;
  long clamp_events = 0;  // coordinates projected back into the box
};

/// Limited-memory BFGS with backtracking (Armijo) line search for smooth
/// convex objectives. Returns the best iterate found; converged is false
/// when max_steps ran out or the line search stalled first.
LbfgsResult minimize_lbfgs(const ObjectiveFn& f, RealVector x0,
                           const LbfgsOptions& opts);

}  // namespace expdol
