#pragma once

// Compile-time dimensional analysis. A Quantity carries SI base-unit
// exponents (mass, length, time, current, temperature) in its type, so
// adding watts to amps or returning pascals from a flow function fails to
// compile. Values are stored in SI base units.

#include <cmath>

namespace zlsim::units {

template <int M, int L, int T, int I, int K>
struct Quantity {
  double v = 0.0;

  constexpr Quantity() = default;
  constexpr explicit Quantity(double x) : v(x) {}
  constexpr double value() const { return v; }

  constexpr Quantity operator+(Quantity o) const { return Quantity{v + o.v}; }
  constexpr Quantity operator-(Quantity o) const { return Quantity{v - o.v}; }
  constexpr Quantity operator*(double s) const { return Quantity{v * s}; }
  constexpr Quantity operator/(double s) const { return Quantity{v / s}; }
  constexpr Quantity& operator+=(Quantity o) {
    v += o.v;
    return *this;
  }
  constexpr auto operator<=>(const Quantity&) const = default;
};

template <int M, int L, int T, int I, int K>
constexpr Quantity<M, L, T, I, K> operator*(double s, Quantity<M, L, T, I, K> q) {
  return Quantity<M, L, T, I, K>{s * q.v};
}

template <int M1, int L1, int T1, int I1, int K1, int M2, int L2, int T2, int I2, int K2>
constexpr auto operator*(Quantity<M1, L1, T1, I1, K1> a, Quantity<M2, L2, T2, I2, K2> b) {
  return Quantity<M1 + M2, L1 + L2, T1 + T2, I1 + I2, K1 + K2>{a.v * b.v};
}

template <int M1, int L1, int T1, int I1, int K1, int M2, int L2, int T2, int I2, int K2>
constexpr auto operator/(Quantity<M1, L1, T1, I1, K1> a, Quantity<M2, L2, T2, I2, K2> b) {
  return Quantity<M1 - M2, L1 - L2, T1 - T2, I1 - I2, K1 - K2>{a.v / b.v};
}

template <int M, int L, int T, int I, int K>
constexpr auto operator/(double s, Quantity<M, L, T, I, K> q) {
  return Quantity<-M, -L, -T, -I, -K>{s / q.v};
}

// only even exponents have a square root
template <int M, int L, int T, int I, int K>
auto sqrt(Quantity<M, L, T, I, K> q) {
  static_assert(M % 2 == 0 && L % 2 == 0 && T % 2 == 0 && I % 2 == 0 && K % 2 == 0);
  return Quantity<M / 2, L / 2, T / 2, I / 2, K / 2>{std::sqrt(q.v)};
}

using Scalar = Quantity<0, 0, 0, 0, 0>;
using Mass = Quantity<1, 0, 0, 0, 0>;
using Length = Quantity<0, 1, 0, 0, 0>;
using Area = Quantity<0, 2, 0, 0, 0>;
using Volume = Quantity<0, 3, 0, 0, 0>;
using Time = Quantity<0, 0, 1, 0, 0>;
using Frequency = Quantity<0, 0, -1, 0, 0>;
using Current = Quantity<0, 0, 0, 1, 0>;
using TempDiff = Quantity<0, 0, 0, 0, 1>;
using Energy = Quantity<1, 2, -2, 0, 0>;
using Power = Quantity<1, 2, -3, 0, 0>;
using Voltage = Quantity<1, 2, -3, -1, 0>;
using Resistance = Quantity<1, 2, -3, -2, 0>;
using Resistivity = Quantity<1, 3, -3, -2, 0>;
using Capacitance = Quantity<-1, -2, 4, 2, 0>;
using Pressure = Quantity<1, -1, -2, 0, 0>;
using Density = Quantity<1, -3, 0, 0, 0>;
using MassFlow = Quantity<1, 0, -1, 0, 0>;
using VolumeFlow = Quantity<0, 3, -1, 0, 0>;
using Velocity = Quantity<0, 1, -1, 0, 0>;
using SpecificHeat = Quantity<0, 2, -2, 0, -1>;       // J/(kg K)
using HeatTransferCoeff = Quantity<1, 0, -3, 0, -1>;  // W/(m2 K)
using CurrentDensity = Quantity<0, -2, 0, 1, 0>;
using AreaDensity = Quantity<0, -1, 0, 0, 0>;         // m2/m3

// constructors from the units the tables use
constexpr Length um(double x) { return Length{x * 1e-6}; }
constexpr Length mm(double x) { return Length{x * 1e-3}; }
constexpr Area um2(double x) { return Area{x * 1e-12}; }
constexpr Area mm2(double x) { return Area{x * 1e-6}; }
constexpr Capacitance fF(double x) { return Capacitance{x * 1e-15}; }
constexpr Voltage volts(double x) { return Voltage{x}; }
constexpr Frequency hz(double x) { return Frequency{x}; }
constexpr Power watts(double x) { return Power{x}; }
constexpr Current amps(double x) { return Current{x}; }
constexpr Resistivity nohm_m(double x) { return Resistivity{x * 1e-9}; }
constexpr Density kg_m3(double x) { return Density{x}; }
constexpr SpecificHeat j_kgk(double x) { return SpecificHeat{x}; }
constexpr TempDiff kelvin(double x) { return TempDiff{x}; }
constexpr HeatTransferCoeff w_m2k(double x) { return HeatTransferCoeff{x}; }
constexpr AreaDensity m2_m3(double x) { return AreaDensity{x}; }

// and back
constexpr double in_um2(Area a) { return a.v * 1e12; }
constexpr double in_mm2(Area a) { return a.v * 1e6; }
constexpr double in_cm2(Area a) { return a.v * 1e4; }
constexpr double in_mohm(Resistance r) { return r.v * 1e3; }
constexpr double in_mv(Voltage u) { return u.v * 1e3; }
constexpr double in_uw(Power p) { return p.v * 1e6; }
constexpr double in_a_cm2(CurrentDensity j) { return j.v * 1e-4; }
constexpr double in_kpa(Pressure p) { return p.v * 1e-3; }
constexpr double in_l_min(VolumeFlow q) { return q.v * 1e3 * 60.0; }

}  // namespace zlsim::units
