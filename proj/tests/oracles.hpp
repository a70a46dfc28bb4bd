#pragma once

// Reference models for the tests. They decode from the bit fields directly
// and do arithmetic on exact doubles, sharing nothing with src/.

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

// sign, exponent field, mantissa field with the usual subnormal row
inline double decode_bits(unsigned code, int ebits, int mbits, int bias) {
  const unsigned m = code & ((1u << mbits) - 1);
  const unsigned e = (code >> mbits) & ((1u << ebits) - 1);
  const bool neg = (code >> (ebits + mbits)) & 1u;
  const double frac = static_cast<double>(m) / (1u << mbits);
  const double mag = e == 0 ? std::ldexp(frac, 1 - bias) : std::ldexp(1.0 + frac, static_cast<int>(e) - bias);
  return neg ? -mag : mag;
}

inline double fp4(unsigned code) { return decode_bits(code, 2, 1, 1); }
inline double fp5(unsigned code) { return decode_bits(code, 3, 1, 2); }
inline double fp8(unsigned code, bool e5m2 = false) {
  return e5m2 ? decode_bits(code, 5, 2, 15) : decode_bits(code, 4, 3, 7);
}

// Largest code magnitude on `grid` that is <= |x|, carrying x's sign.
// Returns the real value; saturates at the top of the grid.
inline double truncate_to(const std::vector<double>& grid, double x) {
  const double a = std::fabs(x);
  double best = 0;
  for (double g : grid) {
    if (g >= 0 && g <= a && g > best) best = g;
  }
  return std::signbit(x) ? -best : best;
}

inline std::vector<double> fp5_grid() {
  std::vector<double> g;
  for (unsigned c = 0; c < 16; ++c) g.push_back(fp5(c));
  return g;
}

inline std::vector<double> fp8_grid(bool e5m2 = false) {
  std::vector<double> g;
  for (unsigned c = 0; c < 128; ++c) g.push_back(fp8(c, e5m2));
  return g;
}

// exact product truncated toward zero to FP5
inline double mul(unsigned a4, unsigned b4) {
  const double x = fp4(a4) * fp4(b4);
  if (x == 0) return 0.0;
  return truncate_to(fp5_grid(), x);
}

// acc + p, truncated toward zero to FP8 and saturated. Returns a real; a
// zero result carries the sign the hardware should produce.
inline double add(double acc, double p, bool e5m2 = false) {
  if (p == 0) return acc;
  const double s = acc + p;
  if (s == 0) return 0.0;
  return truncate_to(fp8_grid(e5m2), s);
}

// Plain fold over decoded values through the two oracles above.
inline double column(const std::vector<unsigned>& w4, const std::vector<unsigned>& a4, double bias,
                     bool e5m2 = false) {
  double acc = bias;
  for (std::size_t i = 0; i < w4.size(); ++i) acc = add(acc, mul(a4[i], w4[i]), e5m2);
  return acc;
}

}  // namespace oracle
