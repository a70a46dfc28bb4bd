#include <doctest.h>

#include <random>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "zlsim/cascade.hpp"
#include "zlsim/fault_map.hpp"
#include "zlsim/matrix_io.hpp"

using namespace zlsim;
using namespace zlsim::cascade;
using lowprec::decode;
using lowprec::fp4_encode;

namespace {

WeightMatrix random_weights(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> code(0, 15);
  WeightMatrix w(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) w.at(r, c) = Fp4{static_cast<std::uint8_t>(code(rng))};
  }
  return w;
}

std::vector<unsigned> column_codes(const WeightMatrix& w, std::size_t c) {
  std::vector<unsigned> out;
  for (std::size_t r = 0; r < w.rows(); ++r) out.push_back(w.at(r, c).code);
  return out;
}

std::vector<unsigned> row_codes(const ActivationBatch& a, std::size_t s) {
  std::vector<unsigned> out;
  for (std::size_t r = 0; r < a.cols(); ++r) out.push_back(a.at(s, r).code);
  return out;
}

}  // namespace

TEST_CASE("geometry") {
  const auto g = ArrayGeometry::full_scale();
  CHECK(g.total_columns() == 8208);
  CHECK(g.total_rows() == 24576);
  CHECK(g.active_pe_count() == 201326592);
  CHECK_NOTHROW(g.validate());
  auto bad = g;
  bad.arrays = 0;
  CHECK_THROWS(bad.validate());
  bad = g;
  bad.spare_columns = -1;
  CHECK_THROWS(bad.validate());
  const auto t = ArrayGeometry::toy(1, 1, 1, 0, 1);
  CHECK_NOTHROW(t.validate());
  CHECK(t.pe_count() == 1);
}

TEST_CASE("load and read back") {
  const auto g = ArrayGeometry::toy(1, 2, 2, 0, 1);
  Device dev(g);
  WeightMatrix w(2, 2);
  w.at(0, 0) = fp4_encode(1);
  w.at(0, 1) = fp4_encode(-2);
  w.at(1, 0) = fp4_encode(3);
  w.at(1, 1) = fp4_encode(0.5);
  load_weights(dev, w);
  CHECK(dev.weights == w);
  CHECK_THROWS(load_weights(dev, WeightMatrix(3, 2)));
}

TEST_CASE("single PE truncation example") {
  const auto g = ArrayGeometry::toy(1, 1, 1, 0, 1);
  Device dev(g);
  WeightMatrix w(1, 1, fp4_encode(1.5));
  load_weights(dev, w);
  ActivationBatch a(1, 1, fp4_encode(1.5));
  const auto out = run_batch(dev, a, zero_bias(g, dev.format));
  CHECK(decode(out.sums.at(0, 0)) == 2.0);
  CHECK(decode(reference_column_oracle({fp4_encode(1.5)}, {fp4_encode(1.5)}, zero_bias(g, dev.format)[0])) == 2.0);
}

TEST_CASE("oracle on empty input returns the bias") {
  const Fp8 b = lowprec::fp8_from_real(3.5, Fp8Format::e4m3);
  CHECK(reference_column_oracle({}, {}, b).code == b.code);
  CHECK_THROWS(reference_column_oracle({fp4_encode(1)}, {}, b));
}

TEST_CASE("one-hot column") {
  const auto g = ArrayGeometry::toy(2, 4, 3, 1, 2);
  Device dev(g);
  WeightMatrix w(8, 3);
  for (int c = 0; c < 3; ++c) w.at(0, c) = fp4_encode(3.0);
  place_logical(dev, w, ColumnRouting::direct(g));
  ActivationBatch a(2, 8, fp4_encode(1.0));
  const auto out = run_batch(dev, a, zero_bias(g, dev.format));
  for (int s = 0; s < 2; ++s) {
    for (int c = 0; c < 3; ++c) CHECK(decode(out.sums.at(s, c)) == 3.0);
  }
}

TEST_CASE("zero activations return the bias") {
  const auto g = ArrayGeometry::toy(2, 8, 4, 2, 3);
  std::mt19937_64 rng(5);
  Device dev(g);
  load_weights(dev, random_weights(16, 6, rng));
  std::vector<Fp8> bias;
  for (int c = 0; c < 4; ++c) bias.push_back(Fp8{static_cast<std::uint8_t>(17 * c + 3), dev.format});
  const auto out = run_batch(dev, ActivationBatch(3, 16), bias);
  CHECK(out.bias_seeded);
  for (int s = 0; s < 3; ++s) {
    for (int c = 0; c < 4; ++c) CHECK(out.sums.at(s, c).code == bias[c].code);
  }
}

TEST_CASE("run_batch matches the scalar oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> dim(1, 8);
    const auto g = ArrayGeometry::toy(dim(rng), dim(rng), dim(rng) * 4, dim(rng) % 3, dim(rng) * 8);
    const auto fmt = trial % 2 ? Fp8Format::e5m2 : Fp8Format::e4m3;
    Device dev(g, fmt);
    const auto w = random_weights(g.total_rows(), g.active_columns, rng);
    place_logical(dev, w, ColumnRouting::direct(g));
    const auto a = random_weights(g.batch_slots, g.total_rows(), rng);
    std::vector<Fp8> bias;
    std::uniform_int_distribution<int> code(0, 255);
    for (int c = 0; c < g.active_columns; ++c) bias.push_back(Fp8{static_cast<std::uint8_t>(code(rng)), fmt});
    const auto out = run_batch(dev, a, bias);
    for (int c = 0; c < g.active_columns; ++c) {
      const auto wc = column_codes(w, c);
      for (int s = 0; s < g.batch_slots; ++s) {
        const double want = oracle::column(wc, row_codes(a, s), oracle::fp8(bias[c].code, fmt == Fp8Format::e5m2),
                                           fmt == Fp8Format::e5m2);
        REQUIRE(decode(out.sums.at(s, c)) == want);
      }
    }
  }
}

TEST_CASE("columns are independent") {
  const auto g = ArrayGeometry::toy(2, 8, 6, 2, 4);
  std::mt19937_64 rng(3);
  auto w = random_weights(16, 6, rng);
  const auto a = random_weights(4, 16, rng);
  Device d1(g);
  place_logical(d1, w, ColumnRouting::direct(g));
  const auto before = run_batch(d1, a, zero_bias(g, d1.format));
  for (int r = 0; r < 16; ++r) w.at(r, 2) = Fp4{static_cast<std::uint8_t>((w.at(r, 2).code + 5) & 0xF)};
  Device d2(g);
  place_logical(d2, w, ColumnRouting::direct(g));
  const auto after = run_batch(d2, a, zero_bias(g, d2.format));
  for (int s = 0; s < 4; ++s) {
    for (int c = 0; c < 6; ++c) {
      if (c != 2) CHECK(after.sums.at(s, c).code == before.sums.at(s, c).code);
    }
  }
}

TEST_CASE("rerouted columns read their weights from the routed segments") {
  const auto g = ArrayGeometry::toy(3, 4, 4, 2, 3);
  std::mt19937_64 rng(8);
  const auto w = random_weights(12, 4, rng);
  const auto a = random_weights(3, 12, rng);
  ColumnRouting r = ColumnRouting::direct(g);
  // column 1 steps right in CRow 1; columns 2 and 3 shift with it
  r.phys[1] = {0, 2, 3, 4};
  Device dev(g);
  place_logical(dev, w, r);
  CHECK(dev.routing == r);
  CHECK(r.select(1, 1) == CrestSelect::left);  // fed from the column to its left
  CHECK(r.select(2, 1) == CrestSelect::right);
  CHECK(r.select(0, 1) == CrestSelect::direct);
  CHECK(r.path(2) == std::vector<int>{2, 3, 2});
  for (int c = 0; c < 4; ++c) {
    const auto got = logical_column_weights(dev, c);
    for (int i = 0; i < 12; ++i) CHECK(got[i].code == w.at(i, c).code);
  }
  Device direct(g);
  place_logical(direct, w, ColumnRouting::direct(g));
  const auto bias = zero_bias(g, dev.format);
  CHECK(run_batch(dev, a, bias).sums == run_batch(direct, a, bias).sums);
}

TEST_CASE("defects invert the segment output") {
  const auto g = ArrayGeometry::toy(2, 2, 2, 1, 1);
  Device dev(g);
  WeightMatrix w(4, 2, fp4_encode(1));
  place_logical(dev, w, ColumnRouting::direct(g));
  ActivationBatch a(1, 4, fp4_encode(1));
  const auto bias = zero_bias(g, dev.format);
  dev.faults.add_defect({1, 0});
  const auto out = run_batch(dev, a, bias);
  CHECK(decode(out.sums.at(0, 1)) == 4.0);
  CHECK(out.sums.at(0, 0).code == static_cast<std::uint8_t>(~lowprec::fp8_from_real(4.0, dev.format).code));
  CHECK_THROWS(dev.faults.add_defect({2, 0}));
  CHECK_THROWS(dev.faults.add_defect({0, 3}));
}

TEST_CASE("transient upsets hit one slot") {
  const auto g = ArrayGeometry::toy(1, 2, 1, 1, 3);
  Device dev(g);
  place_logical(dev, WeightMatrix(2, 1, fp4_encode(1)), ColumnRouting::direct(g));
  dev.faults.add_transient({0, 0, 1});
  const auto out = run_batch(dev, ActivationBatch(3, 2, fp4_encode(1)), zero_bias(g, dev.format));
  CHECK(decode(out.sums.at(0, 0)) == 2.0);
  CHECK(decode(out.sums.at(1, 0)) != 2.0);
  CHECK(decode(out.sums.at(2, 0)) == 2.0);
}

TEST_CASE("trace_path follows an explicit route") {
  const auto g = ArrayGeometry::toy(2, 3, 2, 1, 2);
  std::mt19937_64 rng(1);
  Device dev(g);
  const auto w = random_weights(6, 2, rng);
  place_logical(dev, w, ColumnRouting::direct(g));
  const auto a = random_weights(2, 6, rng);
  const auto out = run_batch(dev, a, zero_bias(g, dev.format));
  for (int s = 0; s < 2; ++s) {
    CHECK(trace_path(dev, {1, 1}, logical_column_weights(dev, 1), a, s, lowprec::fp8_zero(dev.format)).code ==
          out.sums.at(s, 1).code);
  }
}

TEST_CASE("error stats") {
  const auto g = ArrayGeometry::toy(1, 4, 2, 0, 2);
  Device dev(g);
  WeightMatrix w(4, 2, fp4_encode(1));
  place_logical(dev, w, ColumnRouting::direct(g));
  ActivationBatch a(2, 4, fp4_encode(0.5));
  const auto bias = zero_bias(g, dev.format);
  const auto out = run_batch(dev, a, bias);
  const auto st = error_stats(out, exact_matmul(w, a, bias));
  CHECK(st.max_abs == 0.0);
  CHECK(st.saturation_count == 0);

  // 16 rows of 6 x 6: each product truncates to 32, the sum saturates at 480
  const auto gs = ArrayGeometry::toy(1, 16, 2, 0, 2);
  Device ds(gs);
  WeightMatrix big(16, 2, fp4_encode(6));
  place_logical(ds, big, ColumnRouting::direct(gs));
  ActivationBatch hot(2, 16, fp4_encode(6));
  const auto bs = zero_bias(gs, ds.format);
  const auto st2 = error_stats(run_batch(ds, hot, bs), exact_matmul(big, hot, bs));
  CHECK(st2.saturation_count == 4);
  CHECK(st2.max_abs == 16 * 36 - 480.0);

  // random matmul: stats recomputed from the oracle pipeline
  std::mt19937_64 rng(4);
  const auto g2 = ArrayGeometry::toy(2, 32, 16, 0, 8);
  Device d2(g2);
  const auto w2 = random_weights(64, 16, rng);
  place_logical(d2, w2, ColumnRouting::direct(g2));
  const auto a2 = random_weights(8, 64, rng);
  const auto b2 = zero_bias(g2, d2.format);
  const auto st3 = error_stats(run_batch(d2, a2, b2), exact_matmul(w2, a2, b2));
  double max_abs = 0, sum = 0;
  std::size_t satn = 0;
  for (int s = 0; s < 8; ++s) {
    for (int c = 0; c < 16; ++c) {
      double exact = 0;
      for (int r = 0; r < 64; ++r) exact += oracle::fp4(a2.at(s, r).code) * oracle::fp4(w2.at(r, c).code);
      const double got = oracle::column(column_codes(w2, c), row_codes(a2, s), 0.0);
      max_abs = std::max(max_abs, std::fabs(got - exact));
      sum += std::fabs(got - exact);
      if (std::fabs(got) == 480.0) ++satn;
    }
  }
  CHECK(st3.max_abs == max_abs);
  CHECK(st3.mean_abs == doctest::Approx(sum / 128));
  CHECK(st3.saturation_count == satn);
}

TEST_CASE("pass accumulation uses the fp8 adder") {
  Grid<Fp8> total(1, 2, lowprec::fp8_from_real(1.0, Fp8Format::e4m3));
  Grid<Fp8> pass(1, 2, lowprec::fp8_from_real(0.5, Fp8Format::e4m3));
  accumulate_pass(total, pass);
  CHECK(decode(total.at(0, 0)) == 1.5);
  CHECK_THROWS(accumulate_pass(total, Grid<Fp8>(2, 2)));
}

TEST_CASE("matrix files round trip") {
  std::mt19937_64 rng(2);
  const auto m = random_weights(5, 7, rng);
  std::stringstream bin;
  io::write_fp4_binary(bin, m);
  CHECK(bin.str().substr(0, 4) == "ZLM4");
  CHECK(bin.str().size() == 12 + (35 + 1) / 2);
  CHECK(io::read_fp4_binary(bin) == m);
  std::stringstream csv;
  io::write_fp4_csv(csv, m);
  auto back = io::read_fp4_csv(csv);
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 7; ++c) CHECK(decode(back.at(r, c)) == decode(m.at(r, c)));
  }
  std::stringstream bad("ZLM4\x01");
  CHECK_THROWS(io::read_fp4_binary(bad));
  std::stringstream ragged("1,2\n3\n");
  CHECK_THROWS(io::read_fp4_csv(ragged));
}
