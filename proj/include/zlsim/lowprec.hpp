#pragma once

// Bit-exact emulation of the PE number formats.
//
//   FP4  s.ee.m     E2M1, bias 1, one subnormal step (0.5). Magnitudes 0..6.
//   FP5  s.eee.m    E3M1, bias 2. 0.25 is the only value in the subnormal row;
//                   every product of two FP4 values lands on an FP5 code.
//   FP8  s.eeee.mmm bias 7 (default) or s.eeeee.mm bias 15. Subnormals kept,
//                   no Inf/NaN: the top exponent field holds ordinary normals.
//
// All decoded values are dyadic rationals with at most 34 significant bits,
// so `double` holds them exactly.

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string_view>

namespace zlsim::lowprec {

static_assert(std::numeric_limits<double>::digits >= 53);

enum class Fp8Format : std::uint8_t { e4m3, e5m2 };

std::string_view to_string(Fp8Format f);
Fp8Format parse_fp8_format(std::string_view s);

struct Fp4 {
  std::uint8_t code = 0;  // low 4 bits
  friend constexpr auto operator<=>(Fp4, Fp4) = default;
};

struct Fp5 {
  std::uint8_t code = 0;  // low 5 bits
  friend constexpr auto operator<=>(Fp5, Fp5) = default;
};

struct Fp8 {
  std::uint8_t code = 0;
  Fp8Format format = Fp8Format::e4m3;
  friend constexpr auto operator<=>(const Fp8&, const Fp8&) = default;
};

struct Fp8Layout {
  int exponent_bits;
  int mantissa_bits;
  int bias;
};

constexpr Fp8Layout layout(Fp8Format f) {
  return f == Fp8Format::e4m3 ? Fp8Layout{4, 3, 7} : Fp8Layout{5, 2, 15};
}

enum class Fp4Rounding {
  nearest_even,  // round to nearest, ties to even mantissa; clamp beyond +-6
  saturate,      // round toward zero; clamp beyond +-6
};

Fp4 fp4_encode(double x, Fp4Rounding mode = Fp4Rounding::nearest_even);
Fp4 negate(Fp4 v);

double decode(Fp4 v);
double decode(Fp5 v);
double decode(Fp8 v);

constexpr bool sign_bit(Fp4 v) { return (v.code & 0x8u) != 0; }
constexpr bool sign_bit(Fp5 v) { return (v.code & 0x10u) != 0; }
constexpr bool sign_bit(Fp8 v) { return (v.code & 0x80u) != 0; }
constexpr bool is_zero(Fp4 v) { return (v.code & 0x7u) == 0; }
constexpr bool is_zero(Fp5 v) { return (v.code & 0xFu) == 0; }
constexpr bool is_zero(Fp8 v) { return (v.code & 0x7Fu) == 0; }

constexpr Fp5 fp5_zero() { return Fp5{0}; }
constexpr Fp8 fp8_zero(Fp8Format f, bool negative = false) {
  return Fp8{static_cast<std::uint8_t>(negative ? 0x80u : 0x00u), f};
}
constexpr Fp8 fp8_max_normal(Fp8Format f, bool negative = false) {
  return Fp8{static_cast<std::uint8_t>(negative ? 0xFFu : 0x7Fu), f};
}
constexpr bool is_saturated(Fp8 v) { return (v.code & 0x7Fu) == 0x7Fu; }

// Largest finite FP8 magnitude, e.g. 480 for e4m3.
double fp8_max_value(Fp8Format f);

// FP4 x FP4 -> FP5. The 2.25 mantissa state (10.01b) is truncated to 10b and
// renormalised; a zero operand gives the canonical +0 code.
Fp5 fp4_mul(Fp4 a, Fp4 b);

// Saturating truncating FP8 + FP5 adder. The exact sum is truncated toward
// zero to the FP8 grid; magnitudes above max-normal clamp to it; an exact-zero
// result of nonzero operands is +0. Adding a zero leaves acc untouched.
Fp8 fp8_add_fp5(Fp8 acc, Fp5 p);

// Same rules with an FP8 addend; used by the output-sum accumulation stage.
Fp8 fp8_add_fp8(Fp8 acc, Fp8 p);

// Truncate-toward-zero quantisation of a real to FP8 (saturating). Used for
// bias vectors supplied as reals.
Fp8 fp8_from_real(double x, Fp8Format f);

// Precomputed kernels for the hot loop; built from fp4_mul/fp8_add_fp5 once
// per format. Reference code should call the functions above instead.
class ArithmeticTables {
 public:
  explicit ArithmeticTables(Fp8Format f);

  std::uint8_t mul(std::uint8_t a4, std::uint8_t b4) const { return mul_[(a4 << 4) | b4]; }
  std::uint8_t add(std::uint8_t acc8, std::uint8_t p5) const { return add_[(acc8 << 5) | p5]; }
  // Fused multiply-accumulate on raw codes.
  std::uint8_t mac(std::uint8_t acc8, std::uint8_t a4, std::uint8_t w4) const {
    return add_[(acc8 << 5) | mul_[(a4 << 4) | w4]];
  }
  Fp8Format format() const { return format_; }

 private:
  Fp8Format format_;
  std::array<std::uint8_t, 256> mul_{};
  std::array<std::uint8_t, 256 * 32> add_{};
};

const ArithmeticTables& tables(Fp8Format f);

// Audit truth tables: a_code,b_code,result_code,a_real,b_real,result_real.
void write_mul_truth_table(std::ostream& os);
void write_add_truth_table(std::ostream& os, Fp8Format f);

}  // namespace zlsim::lowprec
