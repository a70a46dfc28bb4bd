#include <doctest.h>

#include <sstream>

#include "zlsim/workload.hpp"

using namespace zlsim::workload;

namespace {

ModelDims unit() {
  ModelDims m;
  m.d = m.h = m.V = m.N = m.B = m.L = 1;
  m.ffn = 4;
  return m;
}

double share_sum(const CostBreakdown& b) {
  double s = 0;
  for (const auto& r : b.rows) s += r.share;
  return s;
}

}  // namespace

TEST_CASE("inference op counts") {
  const auto f = flops_breakdown(ModelDims::llama_405b());
  CHECK(f.total == doctest::Approx(7.09e17).epsilon(0.005));
  CHECK(f.row("qkv_projection").count == doctest::Approx(1.32e17).epsilon(0.005));
  CHECK(f.row("qkv_projection").share * 100 == doctest::Approx(18.61).epsilon(0.005));
  CHECK(f.row("output_projection").count == doctest::Approx(4.40e16).epsilon(0.005));
  CHECK(f.row("value_weighting").count == doctest::Approx(5.37e15).epsilon(0.005));
  for (const char* n : {"ffn_up", "ffn_gate", "ffn_down"}) {
    CHECK(f.row(n).count == doctest::Approx(1.76e17).epsilon(0.005));
    CHECK(f.row(n).share * 100 == doctest::Approx(24.81).epsilon(0.005));
  }
  const double ffn = f.row("ffn_up").share + f.row("ffn_gate").share + f.row("ffn_down").share;
  CHECK(std::abs(ffn * 100 - 74.4) <= 0.5);
  CHECK(share_sum(f) == doctest::Approx(1.0).epsilon(1e-9));
  double sum = 0;
  for (const auto& r : f.rows) sum += r.count;
  CHECK(sum == doctest::Approx(f.total).epsilon(1e-12));
  CHECK_THROWS(f.row("nope"));
}

TEST_CASE("unit dims give the bare expressions") {
  const auto f = flops_breakdown(unit());
  CHECK(f.row("qkv_projection").count == 3);
  CHECK(f.row("ffn_up").count == 4);
  CHECK(f.row("swiglu").count == 4);
  CHECK(f.row("embedding").count == 1);
  CHECK(f.row("lm_head").count == 1);
  const auto w = weights_breakdown(unit());
  CHECK(w.row("qkv_projection").count == 3);
}

TEST_CASE("weights") {
  const auto m = ModelDims::llama_405b();
  const auto w = weights_breakdown(m);
  CHECK(w.total == doctest::Approx(3.48e11).epsilon(0.005));
  CHECK(w.row("qkv_projection").count == doctest::Approx(6.44e10).epsilon(0.005));
  CHECK(w.row("ffn_up").count == doctest::Approx(8.59e10).epsilon(0.005));
  CHECK(w.row("embedding").count + w.row("lm_head").count == doctest::Approx(2 * 2.10e9).epsilon(0.005));
  CHECK(share_sum(w) == doctest::Approx(1.0).epsilon(1e-9));

  auto flat = m;
  flat.N = 0;
  const auto w0 = weights_breakdown(flat);
  CHECK(w0.total == 2 * m.V * m.d + m.d);
}

TEST_CASE("weights ignore batch and context") {
  auto m = ModelDims::llama_405b();
  const double base = weights_breakdown(m).total;
  m.B = 3;
  m.L = 17;
  CHECK(weights_breakdown(m).total == base);
}

TEST_CASE("scaling laws") {
  const auto m = ModelDims::llama_405b();
  auto b2 = m;
  b2.B *= 2;
  auto n2 = m;
  n2.N *= 2;
  auto l2 = m;
  l2.L *= 2;
  const auto f = flops_breakdown(m), fb = flops_breakdown(b2), fn = flops_breakdown(n2), fl = flops_breakdown(l2);
  for (const auto& r : f.rows) {
    CHECK(fb.row(r.name).count == doctest::Approx(2 * r.count));
    const bool quadratic = r.name == "attention_score" || r.name == "softmax" || r.name == "value_weighting";
    CHECK(fl.row(r.name).count == doctest::Approx((quadratic ? 4 : (r.name == "lm_head" ? 1 : 2)) * r.count));
    const bool per_layer = fn.row(r.name).count != r.count;
    if (per_layer) CHECK(fn.row(r.name).count == doctest::Approx(2 * r.count));
  }
}

TEST_CASE("reuse balance") {
  const auto m = ModelDims::llama_405b();
  const auto b = reuse_balance(m, 1507534e15, 0.8, 2.56e14);
  CHECK(b.weight_bytes == doctest::Approx(1.74e11).epsilon(0.005));
  CHECK(b.compute_time_s == doctest::Approx(0.00059).epsilon(0.01));
  CHECK(b.load_time_s == doctest::Approx(0.00068).epsilon(0.01));
  CHECK(b.balanced);
  auto half = m;
  half.B /= 2;
  const auto h = reuse_balance(half, 1507534e15, 0.8, 2.56e14);
  CHECK(h.compute_time_s == doctest::Approx(b.compute_time_s / 2));
  CHECK(h.load_time_s == b.load_time_s);
  CHECK(!reuse_balance(m, 1507534e15, 0.8, 2.56e11).balanced);
  CHECK_THROWS(reuse_balance(m, 0, 0.8, 2.56e14));
}

TEST_CASE("csv") {
  std::ostringstream os;
  write_breakdown_csv(os, weights_breakdown(ModelDims::llama_405b()));
  CHECK(os.str().rfind("name,order,count,share\n", 0) == 0);
  CHECK(os.str().find("qkv_projection,N*3*d*d,") != std::string::npos);
}

TEST_CASE("dims validate") {
  auto m = ModelDims::llama_405b();
  m.d = -1;
  CHECK_THROWS(m.validate());
}
