#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "expdol/types.hpp"

namespace expdol {

/// Synthetic block-sparse recovery scenario: H has iid standard complex
/// Gaussian entries with unit-normalized columns; the signal support is
/// block_count contiguous blocks of block_length entries plus isolated_count
/// singletons, mutually non-adjacent; nonzeros are iid CN(0,1).
struct SyntheticSpec {
  int m = 40;
  int n = 300;
  int l = 5;
  int block_count = 3;
  int block_length = 5;
  int isolated_count = 5;
  double snr_db = 25.0;  // +infinity means noiseless
  std::uint64_t seed = 0;

  void validate() const;
};

/// Extended-source DOA scenario on a half-wavelength ULA: the dictionary holds
/// steering vectors on a uniform u = sin(angle) grid over [-1, 1); each
/// source occupies a closed u-interval with fixed amplitude and iid uniform
/// phase per grid point per snapshot.
struct DoaSpec {
  struct Source {
    double u_lo;
    double u_hi;
    double amplitude;
  };

  int m = 20;
  double grid_step = 0.01;
  std::vector<Source> sources = {{-0.5, -0.45, 1.0}, {0.0, 0.1, 0.5}};
  int l = 40;
  double snr_db = 15.0;
  std::uint64_t seed = 0;

  /// Number of grid points; grid_step must divide [-1, 1) evenly.
  int grid_size() const;
  void validate() const;
};

struct GeneratedInstance {
  ProblemInstance problem;
  SupportSet true_support;
};

/// Deterministic in the spec (seed included). Noise variance is set from the
/// realized signal power: lambda = ||H X||_F^2 / (M L 10^(snr/10)).
GeneratedInstance generate_synthetic(const SyntheticSpec& spec);
GeneratedInstance generate_doa(const DoaSpec& spec);

/// On-disk instance layout under `dir`: H.cmx, Y.cmx, X.cmx (when ground
/// truth exists) in the complex-matrix text format, plus meta.txt with
/// key=value lines (kind, seed, spec fields, support, noise_variance).
void save_instance(const std::string& dir, const GeneratedInstance& inst,
                   const std::string& spec_description);
GeneratedInstance load_instance(const std::string& dir);

std::string describe(const SyntheticSpec& spec);
std::string describe(const DoaSpec& spec);

}  // namespace expdol
