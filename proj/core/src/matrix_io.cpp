#include "expdol/matrix_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace expdol {

std::string format_complex(Complex value) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.17g%+.17gj", value.real(), value.imag());
  return buf;
}

void write_complex_matrix(std::ostream& os, const ComplexMatrix& m) {
  if (!all_finite(m)) {
    throw ContractViolation("write_complex_matrix: nonfinite entries");
  }
  os << "complex-matrix " << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) os << ' ';
      os << format_complex(m(i, j));
    }
    os << '\n';
  }
}

namespace {

Complex parse_complex(const std::string& token) {
  const char* p = token.c_str();
  char* end = nullptr;
  const double re = std::strtod(p, &end);
  if (end == p || (*end != '+' && *end != '-')) {
    throw std::runtime_error("bad complex entry '" + token + "'");
  }
  p = end;
  const double im = std::strtod(p, &end);
  if (end == p || *end != 'j' || *(end + 1) != '\0') {
    throw std::runtime_error("bad complex entry '" + token + "'");
  }
  if (!std::isfinite(re) || !std::isfinite(im)) {
    throw std::runtime_error("nonfinite complex entry '" + token + "'");
  }
  return {re, im};
}

}  // namespace

ComplexMatrix read_complex_matrix(std::istream& is) {
  std::string magic;
  Index rows = -1;
  Index cols = -1;
  if (!(is >> magic >> rows >> cols) || magic != "complex-matrix" ||
      rows < 0 || cols < 0) {
    throw std::runtime_error("read_complex_matrix: bad header");
  }
  ComplexMatrix m(rows, cols);
  std::string token;
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (!(is >> token)) {
        throw std::runtime_error("read_complex_matrix: truncated matrix");
      }
      m(i, j) = parse_complex(token);
    }
  }
  return m;
}

void save_complex_matrix(const std::string& path, const ComplexMatrix& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_complex_matrix(os, m);
  if (!os) throw std::runtime_error("write to " + path + " failed");
}

ComplexMatrix load_complex_matrix(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_complex_matrix(is);
}

}  // namespace expdol
