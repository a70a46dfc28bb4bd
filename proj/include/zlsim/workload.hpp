#pragma once

// Transformer inference cost accounting. Each row is an order-of-magnitude
// expression taken as an exact count (constant factor 1, one op per MAC).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace zlsim::workload {

struct ModelDims {
  double d = 16384;
  double h = 128;
  double V = 128000;
  double N = 80;
  double ffn = 4 * 16384.0;
  double B = 1024;
  double L = 2000;
  double max_L = 128000;

  void validate() const;
  static ModelDims llama_405b() { return {}; }
};

struct CostRow {
  std::string name;
  std::string order;  // symbolic expression, for the CSV
  double count = 0.0;
  double share = 0.0;
};

struct CostBreakdown {
  std::vector<CostRow> rows;
  double total = 0.0;

  const CostRow& row(const std::string& name) const;
};

CostBreakdown flops_breakdown(const ModelDims& m);
CostBreakdown weights_breakdown(const ModelDims& m);

struct ReuseBalance {
  double total_ops = 0.0;
  double total_weights = 0.0;
  double weight_bytes = 0.0;
  double compute_time_s = 0.0;
  double load_time_s = 0.0;
  double ratio = 0.0;  // load / compute
  bool balanced = false;
};

ReuseBalance reuse_balance(const ModelDims& m, double peak_flops, double target_fraction, double hbm_bw,
                           double bytes_per_weight = 0.5, double band_lo = 0.5, double band_hi = 2.0);

// name,order,count,share
void write_breakdown_csv(std::ostream& out, const CostBreakdown& b);

}  // namespace zlsim::workload
