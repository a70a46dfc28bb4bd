#include "zlsim/cascade.hpp"

#include <cmath>
#include <string>

namespace zlsim::cascade {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void ArrayGeometry::validate() const {
  require(rows_per_array >= 1, "rows_per_array must be >= 1");
  require(active_columns >= 1, "active_columns must be >= 1");
  require(spare_columns >= 0, "spare_columns must be >= 0");
  require(arrays >= 1, "arrays must be >= 1");
  require(batch_slots >= 1, "batch_slots must be >= 1");
  require(core_clock_hz > 0.0, "core_clock_hz must be positive");
  require(support_clock_divisor >= 1, "support_clock_divisor must be >= 1");
}

ArrayGeometry ArrayGeometry::toy(int arrays, int rows, int active, int spares, int slots) {
  ArrayGeometry g;
  g.arrays = arrays;
  g.rows_per_array = rows;
  g.active_columns = active;
  g.spare_columns = spares;
  g.batch_slots = slots;
  g.validate();
  return g;
}

ColumnRouting ColumnRouting::direct(const ArrayGeometry& g) {
  ColumnRouting r;
  r.phys.assign(g.arrays, std::vector<int>(g.active_columns));
  for (auto& row : r.phys) {
    for (int c = 0; c < g.active_columns; ++c) row[c] = c;
  }
  return r;
}

CrestSelect ColumnRouting::select(int crow, int logical) const {
  if (crow == 0) return CrestSelect::direct;
  const int here = phys[crow][logical];
  const int prev = phys[crow - 1][logical];
  if (prev == here - 1) return CrestSelect::left;
  if (prev == here + 1) return CrestSelect::right;
  if (prev != here) throw std::logic_error("routing jumps more than one column");
  return CrestSelect::direct;
}

std::vector<int> ColumnRouting::path(int logical) const {
  std::vector<int> p(phys.size());
  for (std::size_t k = 0; k < phys.size(); ++k) p[k] = phys[k][logical];
  return p;
}

Device::Device(const ArrayGeometry& g, Fp8Format f)
    : geometry(g),
      format(f),
      weights(static_cast<std::size_t>(g.total_rows()), static_cast<std::size_t>(g.total_columns())),
      routing(ColumnRouting::direct(g)),
      faults(g.arrays, g.total_columns()) {
  g.validate();
}

void load_weights(Device& dev, const WeightMatrix& physical) {
  const auto& g = dev.geometry;
  require(physical.rows() == static_cast<std::size_t>(g.total_rows()) &&
              physical.cols() == static_cast<std::size_t>(g.total_columns()),
          "weight matrix is " + std::to_string(physical.rows()) + "x" +
              std::to_string(physical.cols()) + ", device needs " +
              std::to_string(g.total_rows()) + "x" + std::to_string(g.total_columns()));
  dev.weights = physical;
}

void place_logical(Device& dev, const WeightMatrix& logical, const ColumnRouting& routing) {
  const auto& g = dev.geometry;
  require(logical.rows() == static_cast<std::size_t>(g.total_rows()) &&
              logical.cols() == static_cast<std::size_t>(g.active_columns),
          "logical weight matrix does not match geometry");
  require(routing.crows() == g.arrays && routing.logical_columns() == g.active_columns,
          "routing does not match geometry");
  for (int k = 0; k < g.arrays; ++k) {
    for (int c = 0; c < g.active_columns; ++c) {
      const int p = routing.phys[k][c];
      if (p == ColumnRouting::kUnmapped) continue;
      for (int i = 0; i < g.rows_per_array; ++i) {
        const std::size_t r = static_cast<std::size_t>(k) * g.rows_per_array + i;
        dev.weights.at(r, p) = logical.at(r, c);
      }
    }
  }
  dev.routing = routing;
}

std::vector<Fp4> logical_column_weights(const Device& dev, int logical) {
  const auto& g = dev.geometry;
  std::vector<Fp4> w(g.total_rows());
  for (int k = 0; k < g.arrays; ++k) {
    const int p = dev.routing.phys[k][logical];
    for (int i = 0; i < g.rows_per_array; ++i) {
      const std::size_t r = static_cast<std::size_t>(k) * g.rows_per_array + i;
      w[r] = p == ColumnRouting::kUnmapped ? Fp4{} : dev.weights.at(r, p);
    }
  }
  return w;
}

std::vector<Fp8> zero_bias(const ArrayGeometry& g, Fp8Format f) {
  return std::vector<Fp8>(g.active_columns, lowprec::fp8_zero(f));
}

OutputSums run_batch(const Device& dev, const ActivationBatch& acts, const std::vector<Fp8>& bias) {
  const auto& g = dev.geometry;
  require(acts.cols() == static_cast<std::size_t>(g.total_rows()),
          "activation batch has " + std::to_string(acts.cols()) + " rows, device has " +
              std::to_string(g.total_rows()));
  require(bias.size() == static_cast<std::size_t>(g.active_columns),
          "bias length must equal active_columns");
  const auto& t = lowprec::tables(dev.format);
  const std::size_t slots = acts.rows();
  const std::size_t cols = static_cast<std::size_t>(g.active_columns);

  OutputSums out;
  out.sums = Grid<Fp8>(slots, cols, lowprec::fp8_zero(dev.format));
  out.mapped_out.assign(cols, false);
  for (std::size_t c = 0; c < cols; ++c) {
    if (!dev.routing.mapped(static_cast<int>(c))) out.mapped_out[c] = true;
  }

  for (std::size_t s = 0; s < slots; ++s) {
    const Fp4* a = acts.row(s);
    for (std::size_t c = 0; c < cols; ++c) {
      std::uint8_t acc = bias[c].code;
      if (!out.mapped_out[c]) {
        for (int k = 0; k < g.arrays; ++k) {
          const int p = dev.routing.phys[k][c];
          const std::size_t r0 = static_cast<std::size_t>(k) * g.rows_per_array;
          for (int i = 0; i < g.rows_per_array; ++i) {
            acc = t.mac(acc, a[r0 + i].code, dev.weights.at(r0 + i, p).code);
          }
          if (dev.faults.corrupts(k, p, static_cast<int>(s))) acc = static_cast<std::uint8_t>(~acc);
        }
      }
      out.sums.at(s, c) = Fp8{acc, dev.format};
    }
  }
  return out;
}

Fp8 trace_path(const Device& dev, const std::vector<int>& path, const std::vector<Fp4>& weights,
               const ActivationBatch& acts, int slot, Fp8 bias) {
  const auto& g = dev.geometry;
  require(path.size() == static_cast<std::size_t>(g.arrays), "path must name one column per CRow");
  require(weights.size() == static_cast<std::size_t>(g.total_rows()), "path weights length mismatch");
  Fp8 acc = bias;
  const Fp4* a = acts.row(static_cast<std::size_t>(slot));
  for (int k = 0; k < g.arrays; ++k) {
    for (int i = 0; i < g.rows_per_array; ++i) {
      const std::size_t r = static_cast<std::size_t>(k) * g.rows_per_array + i;
      acc = lowprec::fp8_add_fp5(acc, lowprec::fp4_mul(a[r], weights[r]));
    }
    if (dev.faults.corrupts(k, path[k], slot)) acc.code = static_cast<std::uint8_t>(~acc.code);
  }
  return acc;
}

Fp8 reference_column_oracle(const std::vector<Fp4>& w, const std::vector<Fp4>& a, Fp8 bias) {
  if (w.size() != a.size()) throw std::invalid_argument("oracle: weight/activation length mismatch");
  Fp8 acc = bias;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc = lowprec::fp8_add_fp5(acc, lowprec::fp4_mul(a[i], w[i]));
  }
  return acc;
}

void accumulate_pass(Grid<Fp8>& total, const Grid<Fp8>& pass) {
  require(total.rows() == pass.rows() && total.cols() == pass.cols(), "pass shape mismatch");
  for (std::size_t s = 0; s < total.rows(); ++s) {
    for (std::size_t c = 0; c < total.cols(); ++c) {
      total.at(s, c) = lowprec::fp8_add_fp8(total.at(s, c), pass.at(s, c));
    }
  }
}

Grid<double> exact_matmul(const WeightMatrix& logical, const ActivationBatch& acts,
                          const std::vector<Fp8>& bias) {
  require(logical.rows() == acts.cols(), "exact_matmul: inner dimension mismatch");
  require(bias.size() == logical.cols(), "exact_matmul: bias length mismatch");
  Grid<double> out(acts.rows(), logical.cols());
  for (std::size_t s = 0; s < acts.rows(); ++s) {
    for (std::size_t c = 0; c < logical.cols(); ++c) {
      // products are multiples of 2^-2 below 2^6; the sum stays exact in double
      double sum = lowprec::decode(bias[c]);
      for (std::size_t r = 0; r < logical.rows(); ++r) {
        sum += lowprec::decode(acts.at(s, r)) * lowprec::decode(logical.at(r, c));
      }
      out.at(s, c) = sum;
    }
  }
  return out;
}

ErrorStats error_stats(const OutputSums& sums, const Grid<double>& exact) {
  require(sums.sums.rows() == exact.rows() && sums.sums.cols() == exact.cols(),
          "error_stats: shape mismatch");
  ErrorStats st;
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t s = 0; s < exact.rows(); ++s) {
    for (std::size_t c = 0; c < exact.cols(); ++c) {
      if (!sums.mapped_out.empty() && sums.mapped_out[c]) continue;
      const Fp8 v = sums.sums.at(s, c);
      const double err = std::fabs(lowprec::decode(v) - exact.at(s, c));
      st.max_abs = std::max(st.max_abs, err);
      total += err;
      ++n;
      if (lowprec::is_saturated(v)) ++st.saturation_count;
    }
  }
  st.mean_abs = n ? total / static_cast<double>(n) : 0.0;
  return st;
}

}  // namespace zlsim::cascade
