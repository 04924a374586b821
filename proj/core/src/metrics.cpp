#include "expdol/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace expdol {

double nse(const ComplexMatrix& truth, const ComplexMatrix& estimate) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols()) {
    throw ContractViolation("nse: shape mismatch");
  }
  const double denom = truth.squaredNorm();
  if (!(denom > 0.0)) {
    throw ContractViolation("nse: ground truth must be nonzero");
  }
  return (truth - estimate).squaredNorm() / denom;
}

SupportSet estimated_support(const ComplexMatrix& estimate, double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw ContractViolation("estimated_support: delta must be in (0, 1)");
  }
  const RealVector row_power = estimate.rowwise().squaredNorm();
  const double cutoff = delta * row_power.maxCoeff();
  SupportSet s;
  for (Index i = 0; i < row_power.size(); ++i) {
    if (row_power[i] > cutoff) s.push_back(static_cast<int>(i));
  }
  return s;
}

SupportScore support_score(const SupportSet& true_support,
                           const ComplexMatrix& estimate, double delta) {
  const SupportSet est = estimated_support(estimate, delta);
  if (true_support.empty() && est.empty()) return {1.0, 1.0, 1.0};
  if (true_support.empty() || est.empty()) return {0.0, 0.0, 0.0};

  const std::set<int> truth(true_support.begin(), true_support.end());
  std::size_t hits = 0;
  for (int i : est) hits += truth.count(i);

  SupportScore score;
  score.precision = static_cast<double>(hits) / est.size();
  score.recall = static_cast<double>(hits) / truth.size();
  score.f1 = (score.precision + score.recall) > 0.0
                 ? 2.0 * score.precision * score.recall /
                       (score.precision + score.recall)
                 : 0.0;
  return score;
}

double f1_support(const SupportSet& true_support, const ComplexMatrix& estimate,
                  double delta) {
  return support_score(true_support, estimate, delta).f1;
}

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) {
    throw ContractViolation("quartiles: empty input");
  }
  std::sort(values.begin(), values.end());
  auto at = [&](double p) {
    const double h = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  return {at(0.25), at(0.5), at(0.75)};
}

double doa_leakage(const SupportSet& true_support,
                   const ComplexMatrix& estimate) {
  const RealVector row_power = estimate.rowwise().squaredNorm();
  const double total = row_power.sum();
  if (!(total > 0.0)) return 0.0;

  std::vector<char> inside(estimate.rows(), 0);
  for (int i : true_support) {
    for (int j = std::max(i - 1, 0);
         j <= std::min<int>(i + 1, static_cast<int>(estimate.rows()) - 1);
         ++j) {
      inside[j] = 1;
    }
  }
  double outside_power = 0.0;
  for (Index i = 0; i < row_power.size(); ++i) {
    if (!inside[i]) outside_power += row_power[i];
  }
  return outside_power / total;
}

}  // namespace expdol
