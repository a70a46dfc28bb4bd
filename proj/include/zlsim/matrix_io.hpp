#pragma once

// Matrix files.
//
// Binary: "ZLM4", uint32 rows, uint32 cols (little-endian), then rows*cols
// 4-bit codes packed row-major, two per byte, low nibble first.
// CSV: one row per line of real numbers, quantised with fp4_encode.

#include <iosfwd>
#include <string>

#include "zlsim/cascade.hpp"

namespace zlsim::io {

cascade::Grid<lowprec::Fp4> read_fp4_binary(std::istream& in);
void write_fp4_binary(std::ostream& out, const cascade::Grid<lowprec::Fp4>& m);

cascade::Grid<lowprec::Fp4> read_fp4_csv(std::istream& in,
                                         lowprec::Fp4Rounding mode = lowprec::Fp4Rounding::nearest_even);
void write_fp4_csv(std::ostream& out, const cascade::Grid<lowprec::Fp4>& m);

// Picks the reader from the magic bytes.
cascade::Grid<lowprec::Fp4> load_fp4_matrix(const std::string& path);

// slot,column,code,value
void write_sums_csv(std::ostream& out, const cascade::OutputSums& sums);

}  // namespace zlsim::io
