#pragma once

#include <iosfwd>
#include <string>

#include "expdol/types.hpp"

namespace expdol {

/// Text format for complex matrices:
///
///   complex-matrix <rows> <cols>
///   <re>(+|-)<im>j <re>(+|-)<im>j ...     one line per row
///
/// Entries are printed with 17 significant digits, which round-trips IEEE
/// doubles exactly. Nonfinite entries are rejected on both paths.
void write_complex_matrix(std::ostream& os, const ComplexMatrix& m);
ComplexMatrix read_complex_matrix(std::istream& is);

void save_complex_matrix(const std::string& path, const ComplexMatrix& m);
ComplexMatrix load_complex_matrix(const std::string& path);

/// One matrix entry in the format above, e.g. "1.5-2.25e-09j".
std::string format_complex(Complex value);

}  // namespace expdol
