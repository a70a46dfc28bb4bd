#pragma once

// Functional model of a weight-stationary CASCADE device.
//
// Every logical output column is a row-ascending fold
//   acc = bias[c]; for r in rows: acc = acc + w[r][phys(crow(r), c)] * a[s][r]
// over all arrays (CRows). The inter-array latch/adder keeps the same total
// order, so the fold is the whole contract. Routing picks which physical
// column carries logical column c inside each CRow.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "zlsim/fault_map.hpp"
#include "zlsim/lowprec.hpp"

namespace zlsim::cascade {

using lowprec::Fp4;
using lowprec::Fp5;
using lowprec::Fp8;
using lowprec::Fp8Format;

struct ArrayGeometry {
  int rows_per_array = 64;
  int active_columns = 8192;
  int spare_columns = 16;
  int arrays = 384;
  int batch_slots = 32768;
  double core_clock_hz = 12e9;
  int support_clock_divisor = 8;

  int total_columns() const { return active_columns + spare_columns; }
  int total_rows() const { return rows_per_array * arrays; }
  std::int64_t pe_count() const {
    return static_cast<std::int64_t>(total_rows()) * total_columns();
  }
  std::int64_t active_pe_count() const {
    return static_cast<std::int64_t>(total_rows()) * active_columns;
  }
  void validate() const;

  static ArrayGeometry full_scale() { return {}; }
  static ArrayGeometry toy(int arrays, int rows, int active, int spares, int slots);
};

template <class T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  const T* row(std::size_t r) const { return data_.data() + r * cols_; }
  T* row(std::size_t r) { return data_.data() + r * cols_; }
  const std::vector<T>& data() const { return data_; }
  bool operator==(const Grid&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

// rows x columns of FP4 weights. A device holds rows x physical columns; a
// logical matrix is rows x logical columns.
using WeightMatrix = Grid<Fp4>;
// slots x rows
using ActivationBatch = Grid<Fp4>;

struct OutputSums {
  Grid<Fp8> sums;  // slots x logical columns
  bool bias_seeded = true;
  std::vector<bool> mapped_out;  // logical columns with no physical path
};

enum class CrestSelect { left, direct, right };

// phys[crow][logical]; kUnmapped marks a logical column dropped by
// degradation.
struct ColumnRouting {
  static constexpr int kUnmapped = -1;
  std::vector<std::vector<int>> phys;

  static ColumnRouting direct(const ArrayGeometry& g);
  int crows() const { return static_cast<int>(phys.size()); }
  int logical_columns() const { return phys.empty() ? 0 : static_cast<int>(phys[0].size()); }
  bool mapped(int logical) const { return phys[0][logical] != kUnmapped; }
  // Mux setting at the top of `crow` for the column that carries `logical`.
  CrestSelect select(int crow, int logical) const;
  std::vector<int> path(int logical) const;
  bool operator==(const ColumnRouting&) const = default;
};

struct Device {
  ArrayGeometry geometry;
  Fp8Format format = Fp8Format::e4m3;
  WeightMatrix weights;  // total_rows x total_columns
  ColumnRouting routing;
  FaultMap faults;

  explicit Device(const ArrayGeometry& g, Fp8Format f = Fp8Format::e4m3);
};

// Load a full physical weight matrix.
void load_weights(Device& dev, const WeightMatrix& physical);
// Scatter a logical matrix onto the physical columns named by `routing`
// and adopt that routing. Unused physical segments are left untouched.
void place_logical(Device& dev, const WeightMatrix& logical, const ColumnRouting& routing);
// Gather logical column `logical` back out along the current routing.
std::vector<Fp4> logical_column_weights(const Device& dev, int logical);

std::vector<Fp8> zero_bias(const ArrayGeometry& g, Fp8Format f);

OutputSums run_batch(const Device& dev, const ActivationBatch& acts, const std::vector<Fp8>& bias);

// Output of one slot pushed down an explicit physical path (one column per
// CRow) with explicit weights for every row. Faults are taken from the device.
Fp8 trace_path(const Device& dev, const std::vector<int>& path, const std::vector<Fp4>& weights,
               const ActivationBatch& acts, int slot, Fp8 bias);

// Plain sequential fold; shares nothing with run_batch beyond lowprec.
Fp8 reference_column_oracle(const std::vector<Fp4>& w, const std::vector<Fp4>& a, Fp8 bias);

// Output-sum stage: add a pass's sums into a running FP8 total.
void accumulate_pass(Grid<Fp8>& total, const Grid<Fp8>& pass);

// Exact product (slots x logical columns) of decoded inputs plus decoded bias.
Grid<double> exact_matmul(const WeightMatrix& logical, const ActivationBatch& acts,
                          const std::vector<Fp8>& bias);

struct ErrorStats {
  double max_abs = 0.0;
  double mean_abs = 0.0;
  std::size_t saturation_count = 0;
};

ErrorStats error_stats(const OutputSums& sums, const Grid<double>& exact);

}  // namespace zlsim::cascade
