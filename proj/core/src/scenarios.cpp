#include "expdol/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "expdol/matrix_io.hpp"

namespace expdol {

namespace {

using Rng = std::mt19937_64;

Complex standard_complex_gaussian(Rng& rng) {
  // CN(0,1): real and imaginary parts N(0, 1/2).
  static constexpr double kHalfSigma = 0.70710678118654752440;
  std::normal_distribution<double> normal(0.0, kHalfSigma);
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

ComplexMatrix complex_gaussian_matrix(Index rows, Index cols, Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      m(i, j) = standard_complex_gaussian(rng);
    }
  }
  return m;
}

// Adds noise scaled so the expected SNR in dB matches spec; returns lambda.
double add_noise(ComplexMatrix& y, const ComplexMatrix& signal, double snr_db,
                 Rng& rng) {
  y = signal;
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  const double ml = static_cast<double>(y.rows() * y.cols());
  const double lambda =
      signal.squaredNorm() / (ml * std::pow(10.0, snr_db / 10.0));
  const double scale = std::sqrt(lambda);
  for (Index j = 0; j < y.cols(); ++j) {
    for (Index i = 0; i < y.rows(); ++i) {
      y(i, j) += scale * standard_complex_gaussian(rng);
    }
  }
  return lambda;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (m < 1 || n < 1 || l < 1) {
    throw ContractViolation("SyntheticSpec: dimensions must be >= 1");
  }
  if (block_count < 0 || block_length < 1 || isolated_count < 0) {
    throw ContractViolation("SyntheticSpec: bad support description");
  }
  if (block_count * block_length + isolated_count > n) {
    throw ContractViolation("SyntheticSpec: support does not fit in n");
  }
  if (std::isnan(snr_db)) {
    throw ContractViolation("SyntheticSpec: snr_db must not be NaN");
  }
}

GeneratedInstance generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  ComplexMatrix h = complex_gaussian_matrix(spec.m, spec.n, rng);
  for (Index j = 0; j < h.cols(); ++j) h.col(j).normalize();

  // Support placement: uniform rejection sampling. Blocks must be pairwise
  // non-touching and isolated entries non-adjacent to blocks and each other.
  std::uniform_int_distribution<int> any_index(0, spec.n - 1);
  std::uniform_int_distribution<int> block_start(
      0, spec.n - spec.block_length);
  constexpr int kMaxAttempts = 100000;
  std::vector<char> blocked;  // occupied or adjacent-to-occupied
  SupportSet support;
  bool placed = false;
  for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
    blocked.assign(spec.n, 0);
    support.clear();
    auto try_claim = [&](int lo, int hi) {  // [lo, hi] inclusive
      for (int i = lo; i <= hi; ++i) {
        if (blocked[i]) return false;
      }
      for (int i = std::max(lo - 1, 0); i <= std::min(hi + 1, spec.n - 1);
           ++i) {
        blocked[i] = 1;
      }
      for (int i = lo; i <= hi; ++i) support.push_back(i);
      return true;
    };
    bool ok = true;
    for (int b = 0; b < spec.block_count && ok; ++b) {
      const int start = block_start(rng);
      ok = try_claim(start, start + spec.block_length - 1);
    }
    for (int s = 0; s < spec.isolated_count && ok; ++s) {
      const int pos = any_index(rng);
      ok = try_claim(pos, pos);
    }
    placed = ok;
  }
  if (!placed) {
    throw GenerationError(
        "generate_synthetic: could not place support without adjacency "
        "collisions");
  }
  std::sort(support.begin(), support.end());

  ComplexMatrix x = ComplexMatrix::Zero(spec.n, spec.l);
  for (int row : support) {
    for (Index j = 0; j < x.cols(); ++j) {
      x(row, j) = standard_complex_gaussian(rng);
    }
  }

  GeneratedInstance out;
  const ComplexMatrix signal = h * x;
  out.problem.H = std::move(h);
  out.problem.true_noise_variance =
      add_noise(out.problem.Y, signal, spec.snr_db, rng);
  out.problem.ground_truth = std::move(x);
  out.true_support = std::move(support);
  out.problem.validate();
  return out;
}

int DoaSpec::grid_size() const {
  const double count = 2.0 / grid_step;
  const double rounded = std::round(count);
  if (!(grid_step > 0.0) || std::abs(count - rounded) > 1e-9 || rounded < 1) {
    throw ContractViolation("DoaSpec: grid_step must divide [-1, 1) evenly");
  }
  return static_cast<int>(rounded);
}

void DoaSpec::validate() const {
  if (m < 1 || l < 1) {
    throw ContractViolation("DoaSpec: dimensions must be >= 1");
  }
  (void)grid_size();
  if (sources.empty()) {
    throw ContractViolation("DoaSpec: need at least one source");
  }
  for (const auto& s : sources) {
    if (!(s.u_lo <= s.u_hi) || s.u_lo < -1.0 || s.u_hi >= 1.0) {
      throw ContractViolation("DoaSpec: source interval outside [-1, 1)");
    }
    if (!(s.amplitude > 0.0)) {
      throw ContractViolation("DoaSpec: amplitudes must be > 0");
    }
  }
  if (std::isnan(snr_db)) {
    throw ContractViolation("DoaSpec: snr_db must not be NaN");
  }
}

GeneratedInstance generate_doa(const DoaSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const int n = spec.grid_size();

  // Steering matrix over u_k = -1 + k * grid_step; element m of the column
  // is exp(j pi m u). Unit-modulus entries, then unit-norm columns.
  ComplexMatrix h(spec.m, n);
  for (int k = 0; k < n; ++k) {
    const double u = -1.0 + k * spec.grid_step;
    for (int i = 0; i < spec.m; ++i) {
      const double phase = std::numbers::pi * i * u;
      h(i, k) = Complex(std::cos(phase), std::sin(phase));
    }
  }
  h /= std::sqrt(static_cast<double>(spec.m));

  // Snap each source interval to the grid (closed, with a small tolerance
  // against accumulated rounding in u_k).
  const double snap_tol = spec.grid_step * 1e-9;
  std::vector<char> active(n, 0);
  ComplexMatrix x = ComplexMatrix::Zero(n, spec.l);
  std::uniform_real_distribution<double> phase_dist(
      0.0, 2.0 * std::numbers::pi);
  for (const auto& s : spec.sources) {
    bool hit = false;
    for (int k = 0; k < n; ++k) {
      const double u = -1.0 + k * spec.grid_step;
      if (u >= s.u_lo - snap_tol && u <= s.u_hi + snap_tol) {
        hit = true;
        active[k] = 1;
        for (Index j = 0; j < x.cols(); ++j) {
          const double phi = phase_dist(rng);
          x(k, j) += s.amplitude * Complex(std::cos(phi), std::sin(phi));
        }
      }
    }
    if (!hit) {
      throw GenerationError("generate_doa: source interval snapped to an "
                            "empty grid set");
    }
  }

  GeneratedInstance out;
  out.true_support.reserve(n);
  for (int k = 0; k < n; ++k) {
    if (active[k]) out.true_support.push_back(k);
  }
  const ComplexMatrix signal = h * x;
  out.problem.H = std::move(h);
  out.problem.true_noise_variance =
      add_noise(out.problem.Y, signal, spec.snr_db, rng);
  out.problem.ground_truth = std::move(x);
  out.problem.validate();
  return out;
}

namespace {

std::string join_ints(const SupportSet& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << v[i];
  }
  return os.str();
}

}  // namespace

std::string describe(const SyntheticSpec& spec) {
  std::ostringstream os;
  os << "kind=synthetic\nM=" << spec.m << "\nN=" << spec.n << "\nL=" << spec.l
     << "\nblock_count=" << spec.block_count
     << "\nblock_length=" << spec.block_length
     << "\nisolated_count=" << spec.isolated_count << "\nsnr_db=" << spec.snr_db
     << "\nseed=" << spec.seed;
  return os.str();
}

std::string describe(const DoaSpec& spec) {
  std::ostringstream os;
  os << "kind=doa\nM=" << spec.m << "\nN=" << spec.grid_size()
     << "\nL=" << spec.l << "\ngrid_step=" << spec.grid_step;
  for (const auto& s : spec.sources) {
    os << "\nsource=" << s.u_lo << ':' << s.u_hi << ':' << s.amplitude;
  }
  os << "\nsnr_db=" << spec.snr_db << "\nseed=" << spec.seed;
  return os.str();
}

void save_instance(const std::string& dir, const GeneratedInstance& inst,
                   const std::string& spec_description) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  save_complex_matrix(dir + "/H.cmx", inst.problem.H);
  save_complex_matrix(dir + "/Y.cmx", inst.problem.Y);
  if (inst.problem.ground_truth) {
    save_complex_matrix(dir + "/X.cmx", *inst.problem.ground_truth);
  }
  std::ofstream meta(dir + "/meta.txt");
  if (!meta) throw std::runtime_error("cannot write " + dir + "/meta.txt");
  meta << spec_description << '\n';
  meta << "support=" << join_ints(inst.true_support) << '\n';
  if (inst.problem.true_noise_variance) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", *inst.problem.true_noise_variance);
    meta << "noise_variance=" << buf << '\n';
  }
}

GeneratedInstance load_instance(const std::string& dir) {
  namespace fs = std::filesystem;
  GeneratedInstance out;
  out.problem.H = load_complex_matrix(dir + "/H.cmx");
  out.problem.Y = load_complex_matrix(dir + "/Y.cmx");
  if (fs::exists(dir + "/X.cmx")) {
    out.problem.ground_truth = load_complex_matrix(dir + "/X.cmx");
  }
  std::ifstream meta(dir + "/meta.txt");
  if (!meta) throw std::runtime_error("cannot read " + dir + "/meta.txt");
  std::string line;
  while (std::getline(meta, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "support" && !value.empty()) {
      std::stringstream ss(value);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        out.true_support.push_back(std::stoi(tok));
      }
    } else if (key == "noise_variance") {
      out.problem.true_noise_variance = std::stod(value);
    }
  }
  out.problem.validate();
  return out;
}

}  // namespace expdol
