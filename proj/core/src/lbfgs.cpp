#include "expdol/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace expdol {

namespace {

long clamp_in_place(RealVector& x, double lo, double hi) {
  long events = 0;
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] < lo) {
      x[i] = lo;
      ++events;
    } else if (x[i] > hi) {
      x[i] = hi;
      ++events;
    }
  }
  return events;
}

struct Correction {
  RealVector s;
  RealVector y;
  double rho;  // 1 / (y^T s)
};

// Two-loop recursion: r = H_k * g with the implicit inverse-Hessian estimate.
RealVector apply_inverse_hessian(const std::deque<Correction>& mem,
                                 const RealVector& g) {
  RealVector q = g;
  std::vector<double> alpha(mem.size());
  for (std::size_t i = mem.size(); i-- > 0;) {
    alpha[i] = mem[i].rho * mem[i].s.dot(q);
    q -= alpha[i] * mem[i].y;
  }
  if (!mem.empty()) {
    const auto& last = mem.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t i = 0; i < mem.size(); ++i) {
    const double beta = mem[i].rho * mem[i].y.dot(q);
    q += (alpha[i] - beta) * mem[i].s;
  }
  return q;
}

}  // namespace

LbfgsResult minimize_lbfgs(const ObjectiveFn& f, RealVector x0,
                           const LbfgsOptions& opts) {
  LbfgsResult res;
  res.clamp_events += clamp_in_place(x0, opts.lower, opts.upper);

  RealVector x = std::move(x0);
  RealVector grad(x.size());
  double fx = f(x, &grad);

  res.x = x;
  res.value = fx;
  res.grad_norm = grad.size() ? grad.lpNorm<Eigen::Infinity>() : 0.0;
  if (!std::isfinite(fx)) return res;  // nothing sensible to do from here
  if (res.grad_norm <= opts.grad_tolerance) {
    res.converged = true;
    return res;
  }

  std::deque<Correction> memory;
  constexpr double kArmijo = 1e-4;
  constexpr double kShrink = 0.5;
  constexpr double kMinStep = 1e-20;
  constexpr double kEps = std::numeric_limits<double>::epsilon();

  for (int step = 0; step < opts.max_steps; ++step) {
    RealVector direction = -apply_inverse_hessian(memory, grad);
    double slope = direction.dot(grad);
    if (!(slope < 0.0)) {
      // Stale curvature produced an ascent direction; fall back to steepest
      // descent and drop the memory.
      memory.clear();
      direction = -grad;
      slope = -grad.squaredNorm();
    }
    if (-slope <= 8.0 * kEps * (std::abs(fx) + 1.0)) {
      break;  // any achievable decrease is below rounding noise in f
    }

    // Unit step first (well scaled once memory warms up); plain gradient
    // steps start at 1/||g||.
    double t = memory.empty()
                   ? std::min(1.0, 1.0 / grad.lpNorm<Eigen::Infinity>())
                   : 1.0;
    RealVector x_new;
    double f_new = fx;
    bool accepted = false;
    while (t >= kMinStep) {
      x_new = x + t * direction;
      res.clamp_events += clamp_in_place(x_new, opts.lower, opts.upper);
      f_new = f(x_new, nullptr);
      if (std::isfinite(f_new) && f_new <= fx + kArmijo * t * slope) {
        accepted = true;
        break;
      }
      if (std::isfinite(f_new) && -t * slope <= 8.0 * kEps * (std::abs(fx) + 1.0)) {
        break;  // remaining ladder rungs are all below rounding noise
      }
      t *= kShrink;
    }
    if (!accepted) break;  // stalled; report best point so far

    RealVector grad_new(x.size());
    f_new = f(x_new, &grad_new);

    RealVector s = x_new - x;
    RealVector y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      memory.push_back({std::move(s), std::move(y), 1.0 / sy});
      if (static_cast<int>(memory.size()) > opts.memory) memory.pop_front();
    }

    x = std::move(x_new);
    fx = f_new;
    grad = std::move(grad_new);
    res.steps = step + 1;

    const double gnorm = grad.size() ? grad.lpNorm<Eigen::Infinity>() : 0.0;
    if (fx <= res.value) {
      res.x = x;
      res.value = fx;
      res.grad_norm = gnorm;
    }
    if (gnorm <= opts.grad_tolerance) {
      res.x = x;
      res.value = fx;
      res.grad_norm = gnorm;
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace expdol
