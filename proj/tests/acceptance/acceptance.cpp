// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "zlsim/cascade.hpp"
#include "zlsim/cli.hpp"
#include "zlsim/crest.hpp"
#include "zlsim/goldens.hpp"
#include "zlsim/hilt.hpp"
#include "zlsim/lowprec.hpp"
#include "zlsim/report.hpp"
#include "zlsim/schedule.hpp"
#include "zlsim/sysmodel.hpp"
#include "zlsim/workload.hpp"

using namespace zlsim;
using report::Tolerance;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Collects checks; the first few failures go into the detail string.
struct Checker {
  int failed = 0;
  int total = 0;
  std::string first;

  void expect(bool cond, const std::string& what) {
    ++total;
    if (cond) return;
    if (failed++ < 3) first += (first.empty() ? "" : "; ") + what;
  }
  void near(const std::string& name, double got, double want, Tolerance t) {
    std::ostringstream s;
    s << name << " " << report::format_number(got) << " vs " << report::format_number(want);
    expect(t.accepts(got, want), s.str());
  }
  Outcome done(const std::string& extra = {}) const {
    std::ostringstream s;
    s << (total - failed) << "/" << total << " checks";
    if (!extra.empty()) s << ", " << extra;
    if (failed) s << ", " << first;
    return {failed == 0, s.str()};
  }
};

std::string secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f s", s);
  return buf;
}

Outcome arithmetic() {
  using namespace lowprec;
  Checker c;
  const auto t0 = Clock::now();
  int mismatches = 0;
  for (unsigned a = 0; a < 16; ++a) {
    for (unsigned b = 0; b < 16; ++b) {
      const Fp5 p = fp4_mul(Fp4{static_cast<std::uint8_t>(a)}, Fp4{static_cast<std::uint8_t>(b)});
      mismatches += decode(p) != oracle::mul(a, b);
    }
  }
  c.expect(mismatches == 0, std::to_string(mismatches) + " product mismatches");
  for (auto f : {Fp8Format::e4m3, Fp8Format::e5m2}) {
    const bool wide = f == Fp8Format::e5m2;
    int bad = 0;
    for (unsigned a = 0; a < 256; ++a) {
      for (unsigned p = 0; p < 32; ++p) {
        const Fp8 r = fp8_add_fp5(Fp8{static_cast<std::uint8_t>(a), f}, Fp5{static_cast<std::uint8_t>(p)});
        const double pv = (p & 0xF) == 0 ? 0.0 : oracle::fp5(p);
        const double want = oracle::add(oracle::fp8(a, wide), pv, wide);
        const double got = decode(r);
        bad += !(got == want && std::signbit(got) == std::signbit(want));
      }
    }
    c.expect(bad == 0, std::to_string(bad) + " sum mismatches in " + std::string(to_string(f)));
  }
  c.expect(decode(fp4_mul(fp4_encode(1.5), fp4_encode(1.5))) == 2.0, "1.5 x 1.5 != 2.0");
  const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  c.expect(dt < 1.0, "runtime " + secs(dt));
  return c.done("256 products, 2x256x32 sums, " + secs(dt));
}

Outcome dataflow() {
  using namespace cascade;
  Checker c;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> d8(1, 8), d32(1, 32), d64(1, 64), d4(0, 4), fp4c(0, 15), fp8c(0, 255);
  long long compared = 0, bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto g = ArrayGeometry::toy(d8(rng), d8(rng), d32(rng), d4(rng), d64(rng));
    const auto fmt = trial % 2 ? Fp8Format::e5m2 : Fp8Format::e4m3;
    Device dev(g, fmt);
    WeightMatrix w(g.total_rows(), g.active_columns);
    for (int r = 0; r < g.total_rows(); ++r) {
      for (int col = 0; col < g.active_columns; ++col) w.at(r, col) = Fp4{static_cast<std::uint8_t>(fp4c(rng))};
    }
    place_logical(dev, w, ColumnRouting::direct(g));
    ActivationBatch a(g.batch_slots, g.total_rows());
    for (int s = 0; s < g.batch_slots; ++s) {
      for (int r = 0; r < g.total_rows(); ++r) a.at(s, r) = Fp4{static_cast<std::uint8_t>(fp4c(rng))};
    }
    std::vector<Fp8> bias;
    for (int col = 0; col < g.active_columns; ++col) bias.push_back(Fp8{static_cast<std::uint8_t>(fp8c(rng)), fmt});
    const auto out = run_batch(dev, a, bias);
    for (int col = 0; col < g.active_columns; ++col) {
      std::vector<Fp4> wc(g.total_rows());
      for (int r = 0; r < g.total_rows(); ++r) wc[r] = w.at(r, col);
      for (int s = 0; s < g.batch_slots; ++s) {
        std::vector<Fp4> ac(a.row(s), a.row(s) + g.total_rows());
        ++compared;
        bad += out.sums.at(s, col).code != reference_column_oracle(wc, ac, bias[col]).code;
      }
    }
  }
  const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  c.expect(bad == 0, std::to_string(bad) + " of " + std::to_string(compared) + " sums differ");
  c.expect(dt < 30.0, "runtime " + secs(dt));
  return c.done("1000 runs, " + std::to_string(compared) + " sums, " + secs(dt));
}

Outcome crest_props() {
  using namespace crest;
  Checker c;
  const auto t0 = Clock::now();
  CampaignParams p;
  p.trials = 1000;
  p.defects = 1;
  p.seed = 1;
  const auto single = run_campaign(p);
  c.expect(single.detected == 1000, std::to_string(single.detected) + " detected");
  c.expect(single.isolated == 1000 && single.misisolated == 0,
           std::to_string(single.isolated) + " isolated, " + std::to_string(single.misisolated) + " wrong CRow");
  c.expect(single.repaired == 1000, std::to_string(single.repaired) + " repaired");
  c.expect(single.output_matches == 1000, std::to_string(single.output_matches) + " outputs restored");

  p.trials = 20;
  p.distribution = Distribution::clustered;
  p.seed = 3;
  p.defects = 15;
  const auto c15 = run_campaign(p);
  c.expect(c15.repaired == c15.defects && c15.misisolated == 0, "15-cluster not fully repaired");
  c.expect(c15.min_residual_perf == 1.0, "15-cluster lost performance");
  c.expect(c15.output_matches == p.trials, "15-cluster outputs differ");
  p.defects = 16;
  const auto c16 = run_campaign(p);
  c.expect(c16.min_residual_perf < 1.0, "16-cluster did not degrade");
  c.expect(c16.min_residual_perf == degrade(1), "16-cluster residual is not one column");
  c.expect(c16.output_matches == p.trials, "16-cluster surviving outputs differ");
  const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  c.expect(dt < 60.0, "runtime " + secs(dt));
  return c.done("1000 single + 2x20 clustered, " + secs(dt));
}

Outcome schedule_goldens() {
  using namespace schedule;
  Checker c;
  const auto seq = milestones(ScheduleParams::full_scale(Merge::sequential));
  const auto tree = milestones(ScheduleParams::full_scale(Merge::tree));
  c.near("array 1 done", static_cast<double>(seq.array1_done_clock), 88, Tolerance::exact());
  c.near("batch 1 done", static_cast<double>(seq.batch1_done_clock), 472, Tolerance::exact());
  c.near("HILT to HILT", static_cast<double>(seq.all_done_clock), 33260, Tolerance::exact());
  c.near("efficiency", seq.efficiency * 100, 98.52, Tolerance::abs(0.01));
  c.near("tree HILT to HILT", static_cast<double>(tree.all_done_clock), 32885, Tolerance::exact());
  c.near("tree efficiency", tree.efficiency * 100, 99.64, Tolerance::abs(0.01));
  return c.done();
}

Outcome hilt_goldens() {
  Checker c;
  c.near("activation latches", static_cast<double>(hilt::standard_activation_hilt().total_latches()), 139812,
         Tolerance::exact());
  c.near("output sum latches", static_cast<double>(hilt::standard_output_sum_hilt().total_latches()), 279624,
         Tolerance::exact());
  const auto a = sysmodel::hilt_areas(sysmodel::zettalith());
  c.near("TRIMERA activation bits", a.activation_trimera_bits, 3221225472.0, Tolerance::exact());
  c.near("TRIMERA output bits", a.output_trimera_bits, 2151677952.0, Tolerance::exact());
  return c.done();
}

Outcome workload_goldens() {
  using namespace workload;
  Checker c;
  const auto t = Tolerance::rel(0.005);
  const auto m = ModelDims::llama_405b();
  const auto f = flops_breakdown(m);
  c.near("ops total", f.total, 7.09e17, t);
  for (const char* n : {"ffn_up", "ffn_gate", "ffn_down"}) c.near(std::string(n) + " share", f.row(n).share * 100, 24.81, t);
  c.near("qkv share", f.row("qkv_projection").share * 100, 18.61, t);
  c.near("output projection share", f.row("output_projection").share * 100, 6.20, t);
  const auto w = weights_breakdown(m);
  c.near("weights", w.total, 3.48e11, t);
  const auto b = reuse_balance(m, 1507534e15, 0.8, 2.56e14);
  c.near("weight bytes", b.weight_bytes, 1.74e11, t);
  c.near("load time", b.load_time_s, 0.00068, t);
  c.near("compute time", b.compute_time_s, 0.00059, t);
  return c.done();
}

Outcome system_goldens() {
  using namespace sysmodel;
  Checker c;
  const auto t0 = Clock::now();
  const auto dp = zettalith();
  const auto full = goldens::golden_report(dp);
  c.expect(full.all_pass(), std::to_string(full.failures()) + " golden rows fail");

  const auto p = pe_power(dp);
  c.near("PE power uW", p.scaled_w * 1e6, 2.3, Tolerance::rel(0.05));
  const auto a = pe_area(dp);
  c.near("PE area um2", a.pe_um2, 0.70, Tolerance::rel(0.02));
  c.near("clock domain mm2", a.array_um2 * 1e-6, 0.367, Tolerance::rel(0.02));
  const auto s = system_performance(dp);
  c.near("sparse PFLOPS", s.sparse_flops / 1e15, 1507534, Tolerance::rel(0.01));
  const auto fb = fabric_bandwidth(dp);
  c.near("vertical TB/s", fb.vertical_tb_s, 39, Tolerance::exact());
  c.near("horizontal TB/s", fb.horizontal_tb_s, 11, Tolerance::exact());
  const auto bonds = hybrid_bond_count(dp);
  c.near("bonds", static_cast<double>(bonds.total), 1922688, Tolerance::exact());
  c.near("bond pitch", bonds.pitch_um, 8.6, Tolerance::rel(0.02));
  const auto ch = parasitic_chain(standard_chain(dp));
  c.near("CGA wires mOhm", ch.row("CGA wires").resistance_mohm, 10.56, Tolerance::rel(0.02));
  c.near("CGA wires W", ch.row("CGA wires").total_w, 0.164, Tolerance::rel(0.02));
  c.near("chain system W", ch.system_w, 1200, Tolerance::rel(0.05));
  const auto cool = cooling(dp);
  c.near("mdot", cool.mdot_kg_s, 4.07, Tolerance::rel(0.02));
  c.near("L/min", cool.vdot_l_min, 168, Tolerance::rel(0.02));
  c.near("dP kPa", cool.dp_kpa, 7.85, Tolerance::rel(0.02));
  const auto hx = heat_exchanger(dp);
  c.near("Opteon area", hx.opteon_area_m2, 0.10, Tolerance::rel(0.02));
  c.near("water area", hx.water_area_m2, 4.8, Tolerance::rel(0.02));
  c.near("HX volume", hx.volume_m3, 0.0016, Tolerance::rel(0.02));
  c.near("ExaLith EFLOPS", system_performance(exalith()).sparse_flops / 1e18, 6.4, Tolerance::rel(0.01));
  c.near("NEXAI TFLOPS", system_performance(nexai()).dense_flops / 1e12, 12583, Tolerance::rel(0.01));
  c.near("GPU perf ratio", s.sparse_flops / 1e15 / dp.gpu.sparse_pflops, 1047, Tolerance::rel(0.005));
  const double gpu_eff = dp.gpu.sparse_pflops * 1e3 / (dp.gpu.power_kw * 1e3);
  c.near("GPU efficiency ratio", s.flops_per_watt / 1e12 / gpu_eff, 1490, Tolerance::rel(0.005));
  const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  c.expect(dt < 5.0, "runtime " + secs(dt));
  return c.done(std::to_string(full.rows().size()) + " golden rows, " + secs(dt));
}

std::string cli_out(std::vector<std::string> args) {
  args.insert(args.begin(), "zlsim");
  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  std::ostringstream out, err;
  cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return out.str() + "\x1f" + err.str();
}

Outcome determinism() {
  Checker c;
  for (const char* f : {"csv", "json", "table"}) {
    c.expect(cli_out({"goldens", "--format", f}) == cli_out({"goldens", "--format", f}),
             std::string("goldens differ in ") + f);
  }
  const std::string cfg = std::string(ZLSIM_SOURCE_DIR) + "/configs/";
  for (const char* f : {"crest_single.cfg", "crest_cluster15.cfg", "crest_cluster16.cfg"}) {
    c.expect(cli_out({"crest", "--config", cfg + f, "--set", "trials=50"}) ==
                 cli_out({"crest", "--config", cfg + f, "--set", "trials=50"}),
             std::string("campaign differs for ") + f);
  }
  c.expect(cli_out({"simulate", "--config", cfg + "toy_simulate.cfg", "--format", "csv"}) ==
               cli_out({"simulate", "--config", cfg + "toy_simulate.cfg", "--format", "csv"}),
           "simulate differs");
  crest::CampaignParams p;
  p.trials = 100;
  p.seed = 99;
  std::ostringstream x, y;
  crest::write_campaign_csv(x, crest::run_campaign(p));
  crest::write_campaign_csv(y, crest::run_campaign(p));
  c.expect(x.str() == y.str(), "campaign csv differs");
  return c.done();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 arithmetic exhaustive oracle", arithmetic},
      {"2 dataflow equivalence", dataflow},
      {"3 CREST properties", crest_props},
      {"4 schedule goldens", schedule_goldens},
      {"5 HILT goldens", hilt_goldens},
      {"6 workload goldens", workload_goldens},
      {"7 system model goldens", system_goldens},
      {"8 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.ok;
    std::printf("%s  %s  (%s)\n", o.ok ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
