#include "zlsim/workload.hpp"

#include <ostream>
#include <stdexcept>

namespace zlsim::workload {

void ModelDims::validate() const {
  if (d <= 0 || h <= 0 || V <= 0 || N < 0 || ffn <= 0 || B <= 0 || L <= 0 || max_L <= 0) {
    throw std::invalid_argument("model dimensions must be positive (N may be zero)");
  }
}

const CostRow& CostBreakdown::row(const std::string& name) const {
  for (const auto& r : rows) {
    if (r.name == name) return r;
  }
  throw std::out_of_range("no cost row '" + name + "'");
}

namespace {

void finish(CostBreakdown& b) {
  b.total = 0.0;
  for (const auto& r : b.rows) b.total += r.count;
  for (auto& r : b.rows) r.share = b.total > 0 ? r.count / b.total : 0.0;
}

}  // namespace

CostBreakdown flops_breakdown(const ModelDims& m) {
  m.validate();
  const double B = m.B, L = m.L, d = m.d, N = m.N, h = m.h, V = m.V, f = m.ffn;
  CostBreakdown b;
  b.rows = {
      {"embedding", "B*L*d", B * L * d},
      {"rope", "B*L*d", B * L * d},
      {"norm_pre_attention", "B*N*L*d", B * N * L * d},
      {"qkv_projection", "B*N*L*3*d*d", B * N * L * 3 * d * d},
      {"attention_score", "B*N*h*L*L", B * N * h * L * L},
      {"softmax", "B*N*h*L*L", B * N * h * L * L},
      {"value_weighting", "B*N*h*L*L*(d/h)", B * N * h * L * L * (d / h)},
      {"output_projection", "B*N*L*d*d", B * N * L * d * d},
      {"residual_post_attention", "B*N*L*d", B * N * L * d},
      {"norm_pre_ffn", "B*N*L*d", B * N * L * d},
      {"ffn_up", "B*N*L*d*4d", B * N * L * d * f},
      {"ffn_gate", "B*N*L*d*4d", B * N * L * d * f},
      {"swiglu", "B*N*L*4d", B * N * L * f},
      {"ffn_down", "B*N*L*4d*d", B * N * L * f * d},
      {"residual_post_ffn", "B*N*L*d", B * N * L * d},
      {"final_norm", "B*L*d", B * L * d},
      {"lm_head", "B*1*d*V", B * d * V},
  };
  finish(b);
  return b;
}

CostBreakdown weights_breakdown(const ModelDims& m) {
  m.validate();
  const double d = m.d, N = m.N, V = m.V, f = m.ffn;
  CostBreakdown b;
  b.rows = {
      {"embedding", "V*d", V * d},
      {"norm_pre_attention", "N*d", N * d},
      {"qkv_projection", "N*3*d*d", N * 3 * d * d},
      {"output_projection", "N*d*d", N * d * d},
      {"norm_pre_ffn", "N*d", N * d},
      {"ffn_up", "N*d*4d", N * d * f},
      {"ffn_gate", "N*d*4d", N * d * f},
      {"ffn_down", "N*4d*d", N * f * d},
      {"final_norm", "d", d},
      {"lm_head", "V*d", V * d},
  };
  finish(b);
  return b;
}

ReuseBalance reuse_balance(const ModelDims& m, double peak_flops, double target_fraction, double hbm_bw,
                           double bytes_per_weight, double band_lo, double band_hi) {
  if (peak_flops <= 0 || target_fraction <= 0 || hbm_bw <= 0 || bytes_per_weight <= 0) {
    throw std::invalid_argument("reuse_balance: rates must be positive");
  }
  ReuseBalance r;
  r.total_ops = flops_breakdown(m).total;
  r.total_weights = weights_breakdown(m).total;
  r.weight_bytes = r.total_weights * bytes_per_weight;
  r.compute_time_s = r.total_ops / (peak_flops * target_fraction);
  r.load_time_s = r.weight_bytes / hbm_bw;
  r.ratio = r.load_time_s / r.compute_time_s;
  r.balanced = r.ratio >= band_lo && r.ratio <= band_hi;
  return r;
}

void write_breakdown_csv(std::ostream& out, const CostBreakdown& b) {
  out << "name,order,count,share\n";
  for (const auto& r : b.rows) out << r.name << ',' << r.order << ',' << r.count << ',' << r.share << '\n';
  out << "total,," << b.total << ",1\n";
}

}  // namespace zlsim::workload
