#include "zlsim/goldens.hpp"

#include "zlsim/cascade.hpp"
#include "zlsim/crest.hpp"
#include "zlsim/hilt.hpp"
#include "zlsim/lowprec.hpp"
#include "zlsim/schedule.hpp"
#include "zlsim/workload.hpp"

namespace zlsim::goldens {

using report::Tolerance;

namespace {

constexpr double kHbmBandwidth = 2.56e14;  // bytes/s, all HBM stacks
constexpr double kTargetUse = 0.80;

void arithmetic_rows(report::Report& r) {
  using namespace lowprec;
  const Fp4 a = fp4_encode(1.5);
  const Fp5 p = fp4_mul(a, a);
  r.check("fp4 1.5 x 1.5", decode(p), "", 2.0, Tolerance::exact(), "truncation example");
  const auto g = cascade::ArrayGeometry::toy(1, 1, 1, 0, 1);
  cascade::Device dev(g);
  cascade::WeightMatrix w(1, 1);
  w.at(0, 0) = a;
  cascade::load_weights(dev, w);
  cascade::ActivationBatch acts(1, 1);
  acts.at(0, 0) = a;
  const auto out = cascade::run_batch(dev, acts, cascade::zero_bias(g, dev.format));
  r.check("single PE sum 1.5 x 1.5", decode(out.sums.at(0, 0)), "", 2.0, Tolerance::exact(), "truncation example");
}

void geometry_rows(report::Report& r, const cascade::ArrayGeometry& g) {
  r.check("active weights", static_cast<double>(g.active_pe_count()), "weights", 201326592, Tolerance::exact(),
          "weight preload");
  r.check("PEs including spares", static_cast<double>(g.pe_count()), "PEs", 201719808, Tolerance::exact(),
          "Table 11");
  r.check("array PEs including spares", static_cast<double>(g.rows_per_array) * g.total_columns(), "PEs", 525312,
          Tolerance::exact(), "Table 11");
  r.check("spare columns per TRIMERA", static_cast<double>(g.spare_columns) * g.arrays, "columns", 6144,
          Tolerance::exact(), "Table 11");
}

void hilt_rows(report::Report& r, const sysmodel::DesignPoint& dp) {
  const auto act = hilt::standard_activation_hilt();
  const auto sum = hilt::standard_output_sum_hilt();
  r.check("activation HILT latches", static_cast<double>(act.total_latches()), "latches", 139812,
          Tolerance::exact(), "Table 11");
  r.check("output sum HILT latches", static_cast<double>(sum.total_latches()), "latches", 279624,
          Tolerance::exact(), "Table 11");
  const auto a = sysmodel::hilt_areas(dp);
  r.check("array activation HILT bits", a.activation_array_bits, "bits", 8388608, Tolerance::exact(), "Table 11");
  r.check("TRIMERA activation HILT bits", a.activation_trimera_bits, "bits", 3221225472.0, Tolerance::exact(),
          "Table 11");
  r.check("TRIMERA output sum HILT bits", a.output_trimera_bits, "bits", 2151677952.0, Tolerance::exact(),
          "Table 11");
  r.check("HILT bitcell", a.bitcell_um2, "um2", 0.012, Tolerance::rel(0.02), "Table 11");
  r.check("array activation HILT bitcell area", a.activation_array_bitcell_um2, "um2", 102098, Tolerance::rel(0.01),
          "Table 11");
  r.check("array activation HILT total area", a.activation_array_total_um2, "um2", 121545, Tolerance::rel(0.01),
          "Table 11");
  r.check("TRIMERA activation HILT area", a.activation_trimera_mm2, "mm2", 47, Tolerance::rel(0.02), "Table 11");
  r.check("output sum HILT bitcell area", a.output_trimera_bitcell_um2, "um2", 26188078, Tolerance::rel(0.01),
          "Table 11");
  r.check("output sum HILT total area", a.output_trimera_total_um2, "um2", 31176283, Tolerance::rel(0.01),
          "Table 11");
  const auto tree = hilt::standard_broadcast_tree();
  r.check("broadcast tree depth", tree.depth_clocks(), "clocks", 25, Tolerance::exact(), "Table 7");
  r.check("broadcast tree reach", static_cast<double>(tree.reach()), "columns", 8208, Tolerance::exact(), "Table 7");
}

void schedule_rows(report::Report& r, const cascade::ArrayGeometry& g) {
  using namespace schedule;
  const auto seq = milestones(ScheduleParams::from_geometry(g, Merge::sequential));
  const auto tree = milestones(ScheduleParams::from_geometry(g, Merge::tree));
  r.check("first compute clock", static_cast<double>(seq.first_compute_clock), "clock", 25, Tolerance::exact(),
          "Table 7");
  r.check("array 1 done clock", static_cast<double>(seq.array1_done_clock), "clock", 88, Tolerance::exact(),
          "pipeline walk-through");
  r.check("batch 1 done clock", static_cast<double>(seq.batch1_done_clock), "clock", 472, Tolerance::exact(),
          "pipeline walk-through");
  r.check("HILT to HILT clocks", static_cast<double>(seq.all_done_clock), "clocks", 33260, Tolerance::exact(),
          "pipeline walk-through");
  r.check("efficiency", seq.efficiency * 100.0, "%", 98.52, Tolerance::abs(0.01), "pipeline walk-through");
  r.check("tree HILT to HILT clocks", static_cast<double>(tree.all_done_clock), "clocks", 32885, Tolerance::exact(),
          "adder tree");
  r.check("tree efficiency", tree.efficiency * 100.0, "%", 99.64, Tolerance::abs(0.01), "adder tree");
  r.add("last batch done clock", static_cast<double>(seq.last_batch_done_clock), "clock", "pipeline walk-through");
  r.check("full batch MACs", static_cast<double>(full_batch_macs(g, 156)), "MACs", 1029142883598340.0,
          Tolerance::abs(5), "full batch");
}

void workload_rows(report::Report& r, double peak_sparse) {
  using namespace workload;
  const auto m = ModelDims::llama_405b();
  const auto f = flops_breakdown(m);
  r.check("inference ops total", f.total, "ops", 7.09e17, Tolerance::rel(0.005), "Table 9");
  r.check("QKV projection share", f.row("qkv_projection").share * 100.0, "%", 18.61, Tolerance::rel(0.005),
          "Table 9");
  r.check("output projection share", f.row("output_projection").share * 100.0, "%", 6.20, Tolerance::rel(0.005),
          "Table 9");
  for (const char* n : {"ffn_up", "ffn_gate", "ffn_down"}) {
    r.check(std::string(n) + " share", f.row(n).share * 100.0, "%", 24.81, Tolerance::rel(0.005), "Table 9");
  }
  r.check("value weighting share", f.row("value_weighting").share * 100.0, "%", 0.76, Tolerance::rel(0.01),
          "Table 9");
  const auto w = weights_breakdown(m);
  r.check("weights total", w.total, "weights", 3.48e11, Tolerance::rel(0.005), "Table 10");
  r.check("FFN up weight share", w.row("ffn_up").share * 100.0, "%", 24.70, Tolerance::rel(0.005), "Table 10");
  const auto b = reuse_balance(m, peak_sparse, kTargetUse, kHbmBandwidth);
  r.check("weight bytes", b.weight_bytes, "bytes", 1.74e11, Tolerance::rel(0.005), "Table 10");
  r.check("weight load time", b.load_time_s, "s", 0.00068, Tolerance::rel(0.005), "Table 10");
  r.check("batch compute time", b.compute_time_s, "s", 0.00059, Tolerance::rel(0.005), "Table 9");
}

void crest_rows(report::Report& r, const cascade::ArrayGeometry& g) {
  r.check("degrade, one excess column", crest::degrade(1), "fraction", 0.999999, Tolerance::abs(1e-12),
          "graceful degradation");
  r.add("degrade, one TRIMERA mapped out", crest::degrade(0, 1), "fraction", "graceful degradation");
  r.add("stated loss per TRIMERA", 0.64, "%", "graceful degradation");
  r.add("tabulated loss per TRIMERA", 0.78, "%", "Table 23");

  crest::CampaignParams p;
  p.trials = 5;
  p.distribution = crest::Distribution::clustered;
  p.seed = 20;
  p.defects = 15;
  const auto c15 = crest::run_campaign(p);
  r.check("15 clustered defects repaired", c15.repaired, "defects", c15.defects, Tolerance::exact(),
          "cluster repair");
  r.check("15 clustered residual performance", c15.min_residual_perf, "fraction", 1.0, Tolerance::exact(),
          "cluster repair");
  p.defects = 16;
  const auto c16 = crest::run_campaign(p);
  r.check("16 clustered residual performance", c16.min_residual_perf, "fraction", 1.0, Tolerance::below(),
          "cluster repair");

  crest::BistReport bist;
  {
    cascade::Device dev(cascade::ArrayGeometry::toy(2, 4, 8, 2, 1));
    bist = crest::post_bist_campaign(dev);
  }
  r.check("self test code pairs per PE", bist.min_pairs_per_pe, "pairs", 256, Tolerance::exact(), "self test");
  auto sp = schedule::ScheduleParams::from_geometry(g);
  sp.batch_slots = bist.slots_per_phase;
  const double clocks = bist.phases * static_cast<double>(schedule::milestones(sp).all_done_clock);
  r.add("self test time per TRIMERA, this vector set", clocks / g.core_clock_hz * 1e3, "ms", "self test");
  r.add("stated self test time", 2132, "ms", "self test");
}

void system_rows(report::Report& r, const sysmodel::DesignPoint& dp) {
  using namespace sysmodel;
  const auto pw = pe_power(dp);
  r.check("PE power", pw.scaled_w * 1e6, "uW", 2.3, Tolerance::rel(0.05), "Table 5");
  const auto ar = pe_area(dp);
  r.check("PE area", ar.pe_um2, "um2", 0.70, Tolerance::rel(0.02), "Table 2");
  r.check("clock domain area", ar.array_um2 * 1e-6, "mm2", 0.367, Tolerance::rel(0.02), "Table 4");
  r.check("max PEs in die", ar.max_pes_in_die / 1e6, "million", 205, Tolerance::rel(0.01), "Table 2");
  const auto sp = system_performance(dp);
  r.check("PE performance", sp.pe_flops / 1e9, "GFLOPS", 24, Tolerance::rel(0.01), "Table 2");
  r.check("SLD performance sparse", sp.sparse_flops_trimera / 1e15, "PFLOPS", 9664, Tolerance::rel(0.01), "Table 2");
  r.check("SLD array power", sp.sld_power_w, "W", 458, Tolerance::rel(0.02), "Table 2");
  r.check("SLD power density", sp.power_density_w_cm2, "W/cm2", 321, Tolerance::rel(0.02), "Table 2");
  r.check("system active PEs", static_cast<double>(sp.pes_total), "PEs", 31406948352.0, Tolerance::exact(),
          "Table 20");
  r.check("system sparse", sp.sparse_flops / 1e15, "PFLOPS", 1507534, Tolerance::rel(0.01), "Table 20");
  r.check("system dense", sp.dense_flops / 1e15, "PFLOPS", 753767, Tolerance::rel(0.01), "Table 20");
  r.check("system PE power", sp.pe_power_total_w / 1e3, "kW", 72, Tolerance::rel(0.02), "Table 2");
  r.check("system power", sp.system_power_w / 1e3, "kW", 84, Tolerance::rel(0.02), "Table 2");

  const auto fb = fabric_bandwidth(dp);
  r.check("vertical link bumps", fb.vertical_bumps, "ubumps", 39000, Tolerance::exact(), "Table 12");
  r.check("vertical link lanes", fb.vertical_lanes, "lanes", 9750, Tolerance::exact(), "Table 12");
  r.check("vertical link bandwidth", fb.vertical_tb_s, "TB/s", 39, Tolerance::exact(), "Table 12");
  r.check("wire density", fb.wire_density_per_um, "wires/um", 3, Tolerance::exact(), "Table 12");
  r.check("horizontal link bandwidth", fb.horizontal_tb_s, "TB/s", 11, Tolerance::exact(), "Table 12");
  r.check("CPU fabric bandwidth", fb.cpu_fabric_tb_s, "TB/s", 624, Tolerance::exact(), "Table 2");
  r.check("interchip fabric bandwidth", fb.aggregate_tb_s, "TB/s", 7800, Tolerance::exact(), "Table 20");

  const auto hb = hybrid_bond_count(dp);
  r.check("bonds per array", hb.per_array, "bonds", 4665, Tolerance::exact(), "Table 13");
  r.check("bonds per SLD-HILT", hb.total, "bonds", 1922688, Tolerance::exact(), "Table 13");
  r.check("hybrid bond pitch", hb.pitch_um, "um", 8.6, Tolerance::rel(0.02), "Table 13");

  const auto ch = parasitic_chain(standard_chain(dp));
  r.check("CGA wires resistance", ch.row("CGA wires").resistance_mohm, "mOhm", 10.56, Tolerance::rel(0.02),
          "Table 15");
  r.check("CGA wires power", ch.row("CGA wires").total_w, "W", 0.164, Tolerance::rel(0.02), "Table 15");
  r.check("PSU rails power", ch.row("PSU rails").total_w, "W", 1.373, Tolerance::rel(0.02), "Table 15");
  r.check("HILT TSV current density", ch.row("HILT TSVs").current_density_a_cm2, "A/cm2", 38287,
          Tolerance::rel(0.02), "Table 15");
  r.check("stack parasitic power", ch.stack_w, "W", 6.9, Tolerance::rel(0.02), "Table 15");
  r.check("system parasitic power", ch.system_w / 1e3, "kW", 1.2, Tolerance::rel(0.05), "Table 15");
  r.check("stack supply drop", ch.drop_mv, "mV", 10, Tolerance::rel(0.05), "Table 15");
  r.check("parasitic share of system power", ch.system_w / sp.system_power_w * 100.0, "%", 1.5,
          Tolerance::at_most(), "Table 15");
  const auto em = electromigration_screen(ch, dp.electrical.copper_em_limit, dp.electrical.solder_em_limit);
  double em_fail = 0;
  for (const auto& v : em) em_fail += v.pass ? 0 : 1;
  r.check("electromigration failures", em_fail, "rows", 0, Tolerance::exact(), "Table 15");

  const auto co = cooling(dp);
  r.check("heat to remove", co.q_w, "W", 84305, Tolerance::rel(0.01), "Table 17");
  r.check("coolant mass flow", co.mdot_kg_s, "kg/s", 4.07, Tolerance::rel(0.02), "Table 17");
  r.check("coolant volume flow", co.vdot_l_min, "L/min", 168, Tolerance::rel(0.02), "Table 17");
  r.check("nozzle area", co.nozzle_area_mm2, "mm2", 946, Tolerance::exact(), "Table 17");
  r.check("nozzle velocity", co.velocity_m_s, "m/s", 2.96, Tolerance::rel(0.02), "Table 17");
  r.check("nozzle pressure drop", co.dp_kpa, "kPa", 7.85, Tolerance::rel(0.02), "Table 17");

  const auto hx = heat_exchanger(dp);
  r.check("PSU heat", hx.psu_heat_w, "W", 11496, Tolerance::rel(0.01), "Table 18");
  r.check("total heat", hx.q_total_w, "W", 95801, Tolerance::rel(0.01), "Table 18");
  r.check("Opteon exchange area", hx.opteon_area_m2, "m2", 0.10, Tolerance::rel(0.02), "Table 18");
  r.check("water exchange area", hx.water_area_m2, "m2", 4.8, Tolerance::rel(0.02), "Table 18");
  r.check("exchanger volume", hx.volume_m3, "m3", 0.0016, Tolerance::rel(0.02), "Table 18");
  r.check("exchanger height", hx.height_mm, "mm", 14, Tolerance::rel(0.02), "Table 18");

  r.check("GPU rack performance ratio", sp.sparse_flops / 1e15 / dp.gpu.sparse_pflops, "x", 1047,
          Tolerance::rel(0.005), "Table 20");
  r.check("GPU rack efficiency ratio", sp.flops_per_watt / 1e12 / (dp.gpu.sparse_pflops * 1e3 / (dp.gpu.power_kw * 1e3)),
          "x", 1490, Tolerance::rel(0.005), "Table 20");

  const double spare_160 =
      static_cast<double>(160) / (dp.geometry.active_columns + 160) * 100.0;
  r.check("spare column overhead at 160", spare_160, "%", 2.0, Tolerance::below(), "design knobs");

  const auto six = system_performance(apply_knob(dp, "clock", "6e9"));
  r.check("6 GHz sparse", six.sparse_flops / 1e18, "EFLOPS", 750, Tolerance::rel(0.01), "clock knob");
  r.check("6 GHz power density", six.power_density_w_cm2, "W/cm2", 160, Tolerance::rel(0.02), "clock knob");

  const auto tall = apply_knob(dp, "array_shape", "128x4096");
  r.check("128x4096 shape active PEs", static_cast<double>(tall.geometry.active_pe_count()), "PEs",
          static_cast<double>(dp.geometry.active_pe_count()), Tolerance::exact(), "design knobs");
}

void preset_rows(report::Report& r) {
  using namespace sysmodel;
  const auto ex = exalith();
  const auto exs = system_performance(ex);
  r.check("ExaLith sparse", exs.sparse_flops / 1e18, "EFLOPS", 6.4, Tolerance::rel(0.01), "Table 21");
  r.check("ExaLith dense", exs.dense_flops / 1e18, "EFLOPS", 3.22, Tolerance::rel(0.01), "Table 21");
  r.check("ExaLith SLD power density", exs.power_density_w_cm2, "W/cm2", 214, Tolerance::rel(0.02), "Table 21");
  r.check("ExaLith array power", exs.sld_power_w, "W", 306, Tolerance::rel(0.02), "Table 21");
  const auto nx = nexai();
  const auto nxs = system_performance(nx);
  r.check("NEXAI dense", nxs.dense_flops / 1e12, "TFLOPS", 12583, Tolerance::rel(0.01), "Table 22");
  r.check("NEXAI PE area", pe_area(nx).pe_um2, "um2", 0.77, Tolerance::rel(0.02), "Table 22");
  r.check("NEXAI PEs including spares", static_cast<double>(nx.geometry.pe_count()), "PEs", 532480,
          Tolerance::exact(), "Table 22");
  const double t = nx.weights_per_inference * nx.bytes_per_weight / nx.hbf_bandwidth;
  r.add("NEXAI HBF time per inference", t * 1e3, "ms", "Table 22");
  r.add("NEXAI stated HBF time per inference", 17.0, "ms", "Table 22");
  r.add("NEXAI HBF limited rate", 1.0 / t, "tokens/s", "Table 22");
  r.add("NEXAI stated token rate", 59, "tokens/s", "Table 22");
}

}  // namespace

report::Report golden_report(const sysmodel::DesignPoint& dp) {
  dp.validate();
  report::Report r("goldens");
  arithmetic_rows(r);
  geometry_rows(r, dp.geometry);
  hilt_rows(r, dp);
  schedule_rows(r, dp.geometry);
  workload_rows(r, sysmodel::system_performance(dp).sparse_flops);
  crest_rows(r, dp.geometry);
  system_rows(r, dp);
  preset_rows(r);
  return r;
}

}  // namespace zlsim::goldens
