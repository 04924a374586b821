#pragma once

#include <optional>
#include <vector>

#include "expdol/types.hpp"

namespace expdol {

/// Per-trial evaluation record.
struct TrialOutcome {
  double nse = 0.0;
  double f1 = 0.0;
  double wall_time_s = 0.0;
  std::optional<double> lambda_rel_error;  // |lambda_hat - lambda| / lambda
  std::optional<double> lambda_db_error;   // |10 log10(lambda_hat / lambda)|
  std::optional<double> leakage_fraction;  // DOA runs only
};

/// Normalized squared error ||X - X_hat||_F^2 / ||X||_F^2. Truth must be
/// nonzero.
double nse(const ComplexMatrix& truth, const ComplexMatrix& estimate);

/// Rows whose squared norm exceeds delta * max row squared norm.
SupportSet estimated_support(const ComplexMatrix& estimate, double delta);

struct SupportScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Support recovery score under the relative row-power threshold delta
/// (default 0.01 = -20 dB). Both supports empty scores 1; exactly one empty
/// scores 0.
SupportScore support_score(const SupportSet& true_support,
                           const ComplexMatrix& estimate, double delta = 0.01);

double f1_support(const SupportSet& true_support, const ComplexMatrix& estimate,
                  double delta = 0.01);

struct Quartiles {
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
};

/// Linear-interpolation quantiles, inclusive method: the p-quantile sits at
/// fractional index p * (count - 1) of the sorted values.
Quartiles quartiles(std::vector<double> values);

/// Fraction of total estimate row power falling outside the true support
/// expanded by one grid cell on each side. Zero total power counts as zero
/// leakage.
double doa_leakage(const SupportSet& true_support,
                   const ComplexMatrix& estimate);

}  // namespace expdol
