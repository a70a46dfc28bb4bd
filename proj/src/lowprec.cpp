#include "zlsim/lowprec.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace zlsim::lowprec {

namespace {

// value = (negative ? -1 : 1) * magnitude * 2^exponent, magnitude an integer.
struct Unpacked {
  bool negative = false;
  std::uint64_t magnitude = 0;
  int exponent = 0;
};

Unpacked unpack_fp4(Fp4 v) {
  const unsigned e = (v.code >> 1) & 0x3u;
  const unsigned m = v.code & 0x1u;
  if (e == 0) return {sign_bit(v), m, -1};
  return {sign_bit(v), 2u | m, static_cast<int>(e) - 2};
}

Unpacked unpack_fp5(Fp5 v) {
  const unsigned e = (v.code >> 1) & 0x7u;
  const unsigned m = v.code & 0x1u;
  if (e == 0) return {sign_bit(v), m, -2};
  return {sign_bit(v), 2u | m, static_cast<int>(e) - 3};
}

Unpacked unpack_fp8(Fp8 v) {
  const auto l = layout(v.format);
  const unsigned man_mask = (1u << l.mantissa_bits) - 1u;
  const unsigned e = (v.code & 0x7Fu) >> l.mantissa_bits;
  const unsigned m = v.code & man_mask;
  const int emin = 1 - l.bias;
  if (e == 0) return {sign_bit(v), m, emin - l.mantissa_bits};
  return {sign_bit(v), (1u << l.mantissa_bits) | m,
          static_cast<int>(e) - l.bias - l.mantissa_bits};
}

double to_real(const Unpacked& u) {
  const double v = std::ldexp(static_cast<double>(u.magnitude), u.exponent);
  return u.negative ? -v : v;
}

// Truncate |value| = magnitude * 2^exponent toward zero onto the FP8 grid,
// clamping to max-normal. magnitude must be nonzero.
Fp8 pack_fp8_truncate(bool negative, std::uint64_t magnitude, int exponent, Fp8Format f) {
  assert(magnitude != 0);
  const auto l = layout(f);
  const int emax = ((1 << l.exponent_bits) - 1) - l.bias;
  const int emin = 1 - l.bias;
  const std::uint8_t sign = negative ? 0x80u : 0x00u;

  const int msb = std::bit_width(magnitude) - 1;
  const int value_exp = msb + exponent;  // value in [2^value_exp, 2^(value_exp+1))
  if (value_exp > emax) return fp8_max_normal(f, negative);

  if (value_exp >= emin) {
    const int shift = msb - l.mantissa_bits;
    const std::uint64_t sig = shift >= 0 ? (magnitude >> shift) : (magnitude << -shift);
    const unsigned m = static_cast<unsigned>(sig) & ((1u << l.mantissa_bits) - 1u);
    const unsigned e = static_cast<unsigned>(value_exp + l.bias);
    return Fp8{static_cast<std::uint8_t>(sign | (e << l.mantissa_bits) | m), f};
  }

  // Subnormal row: quantum 2^(emin - mantissa_bits).
  const int shift = (emin - l.mantissa_bits) - exponent;
  const std::uint64_t q = shift >= 64 ? 0 : (shift >= 0 ? (magnitude >> shift) : (magnitude << -shift));
  if (q == 0) return fp8_zero(f, negative);  // underflow flushes to signed zero
  return Fp8{static_cast<std::uint8_t>(sign | static_cast<unsigned>(q)), f};
}

Fp8 add_unpacked(Fp8 acc, const Unpacked& p) {
  const Unpacked a = unpack_fp8(acc);
  if (a.magnitude == 0) {
    return pack_fp8_truncate(p.negative, p.magnitude, p.exponent, acc.format);
  }
  // Align on the smaller exponent; no bits are dropped before the add.
  const int e = std::min(a.exponent, p.exponent);
  const auto aligned = [e](const Unpacked& u) {
    const auto mag = static_cast<std::int64_t>(u.magnitude << (u.exponent - e));
    return u.negative ? -mag : mag;
  };
  const std::int64_t sum = aligned(a) + aligned(p);
  if (sum == 0) return fp8_zero(acc.format);
  const bool negative = sum < 0;
  return pack_fp8_truncate(negative, static_cast<std::uint64_t>(negative ? -sum : sum), e,
                           acc.format);
}

}  // namespace

std::string_view to_string(Fp8Format f) { return f == Fp8Format::e4m3 ? "e4m3" : "e5m2"; }

Fp8Format parse_fp8_format(std::string_view s) {
  if (s == "e4m3" || s == "1-4-3") return Fp8Format::e4m3;
  if (s == "e5m2" || s == "1-5-2") return Fp8Format::e5m2;
  throw std::invalid_argument("unknown FP8 format '" + std::string(s) + "'");
}

Fp4 fp4_encode(double x, Fp4Rounding mode) {
  if (!std::isfinite(x)) throw std::invalid_argument("fp4_encode: non-finite input");
  const bool negative = std::signbit(x);
  double a = std::fabs(x);

  // Quantum of the binade holding a: 0.5 below 1, 2^(E-1) for a in [2^E, 2^(E+1)).
  int quantum_exp = -1;
  if (a >= 1.0) {
    int e2 = 0;
    std::frexp(a, &e2);  // a = f * 2^e2, f in [0.5, 1)
    quantum_exp = (e2 - 1) - 1;
  }
  const double q = std::ldexp(a, -quantum_exp);
  double steps = std::floor(q);
  if (mode == Fp4Rounding::nearest_even) {
    const double frac = q - steps;
    if (frac > 0.5 || (frac == 0.5 && std::fmod(steps, 2.0) != 0.0)) steps += 1.0;
  }
  a = std::min(std::ldexp(steps, quantum_exp), 6.0);

  std::uint8_t code = 0;
  if (a == 0.0) return Fp4{0};
  if (a < 1.0) {
    code = 0x1;  // 0.5
  } else {
    int e2 = 0;
    const double f = std::frexp(a, &e2);  // a = f * 2^e2
    const unsigned e_field = static_cast<unsigned>(e2);  // (e2 - 1) + bias 1
    const unsigned m = f > 0.5 ? 1u : 0u;
    code = static_cast<std::uint8_t>((e_field << 1) | m);
  }
  if (negative) code |= 0x8u;
  return Fp4{code};
}

Fp4 negate(Fp4 v) { return Fp4{static_cast<std::uint8_t>(v.code ^ 0x8u)}; }

double decode(Fp4 v) { return to_real(unpack_fp4(v)); }
double decode(Fp5 v) { return to_real(unpack_fp5(v)); }
double decode(Fp8 v) { return to_real(unpack_fp8(v)); }

double fp8_max_value(Fp8Format f) { return decode(fp8_max_normal(f)); }

Fp5 fp4_mul(Fp4 a, Fp4 b) {
  if (is_zero(a) || is_zero(b)) return fp5_zero();

  // Every nonzero FP4 is 1.0b or 1.1b times a power of two (0.5 = 1.0b * 2^-1).
  const auto split = [](Fp4 v) {
    const unsigned e = (v.code >> 1) & 0x3u;
    const unsigned m = v.code & 0x1u;
    if (e == 0) return std::pair{2u, -1};  // subnormal 0.5
    return std::pair{2u | m, static_cast<int>(e) - 1};
  };
  const auto [ma, ea] = split(a);
  const auto [mb, eb] = split(b);

  // Mantissa product in quarters: 4 = 1.00b, 6 = 1.10b, 9 = 10.01b.
  const unsigned product = ma * mb;
  int exponent = ea + eb;
  unsigned mantissa_bit = 0;
  switch (product) {
    case 4: mantissa_bit = 0; break;
    case 6: mantissa_bit = 1; break;
    case 9: mantissa_bit = 0; exponent += 1; break;  // 10.01b -> 10b -> 1.0b * 2
    default: assert(false && "impossible FP4 mantissa product");
  }
  assert(exponent >= -2 && exponent <= 5);

  std::uint8_t code = 0;
  if (exponent == -2) {
    assert(mantissa_bit == 0);
    code = 0x1;  // 0.25 lives in the subnormal row
  } else {
    code = static_cast<std::uint8_t>((static_cast<unsigned>(exponent + 2) << 1) | mantissa_bit);
  }
  if (sign_bit(a) != sign_bit(b)) code |= 0x10u;
  return Fp5{code};
}

Fp8 fp8_add_fp5(Fp8 acc, Fp5 p) {
  if (is_zero(p)) return acc;
  return add_unpacked(acc, unpack_fp5(p));
}

Fp8 fp8_add_fp8(Fp8 acc, Fp8 p) {
  if (acc.format != p.format) throw std::invalid_argument("fp8_add_fp8: format mismatch");
  if (is_zero(p)) return acc;
  return add_unpacked(acc, unpack_fp8(p));
}

Fp8 fp8_from_real(double x, Fp8Format f) {
  if (!std::isfinite(x)) throw std::invalid_argument("fp8_from_real: non-finite input");
  if (x == 0.0) return fp8_zero(f, std::signbit(x));
  int e2 = 0;
  const double frac = std::frexp(std::fabs(x), &e2);
  // 40 bits covers every representable FP8 value plus truncation headroom.
  const auto mag = static_cast<std::uint64_t>(std::ldexp(frac, 40));
  if (mag == 0) return fp8_zero(f, x < 0);
  return pack_fp8_truncate(x < 0, mag, e2 - 40, f);
}

ArithmeticTables::ArithmeticTables(Fp8Format f) : format_(f) {
  for (unsigned a = 0; a < 16; ++a) {
    for (unsigned b = 0; b < 16; ++b) {
      mul_[(a << 4) | b] = fp4_mul(Fp4{static_cast<std::uint8_t>(a)},
                                   Fp4{static_cast<std::uint8_t>(b)}).code;
    }
  }
  for (unsigned acc = 0; acc < 256; ++acc) {
    for (unsigned p = 0; p < 32; ++p) {
      add_[(acc << 5) | p] = fp8_add_fp5(Fp8{static_cast<std::uint8_t>(acc), f},
                                         Fp5{static_cast<std::uint8_t>(p)}).code;
    }
  }
}

const ArithmeticTables& tables(Fp8Format f) {
  static const ArithmeticTables e4m3(Fp8Format::e4m3);
  static const ArithmeticTables e5m2(Fp8Format::e5m2);
  return f == Fp8Format::e4m3 ? e4m3 : e5m2;
}

void write_mul_truth_table(std::ostream& os) {
  os << "a_code,b_code,result_code,a_real,b_real,result_real\n";
  for (unsigned a = 0; a < 16; ++a) {
    for (unsigned b = 0; b < 16; ++b) {
      const Fp4 fa{static_cast<std::uint8_t>(a)};
      const Fp4 fb{static_cast<std::uint8_t>(b)};
      const Fp5 r = fp4_mul(fa, fb);
      os << a << ',' << b << ',' << unsigned{r.code} << ',' << decode(fa) << ','
         << decode(fb) << ',' << decode(r) << '\n';
    }
  }
}

void write_add_truth_table(std::ostream& os, Fp8Format f) {
  os << "a_code,b_code,result_code,a_real,b_real,result_real\n";
  for (unsigned a = 0; a < 256; ++a) {
    for (unsigned b = 0; b < 32; ++b) {
      const Fp8 fa{static_cast<std::uint8_t>(a), f};
      const Fp5 fb{static_cast<std::uint8_t>(b)};
      const Fp8 r = fp8_add_fp5(fa, fb);
      os << a << ',' << b << ',' << unsigned{r.code} << ',' << decode(fa) << ','
         << decode(fb) << ',' << decode(r) << '\n';
    }
  }
}

}  // namespace zlsim::lowprec
