#pragma once

// Closed-form system model: PE power and area, device and system
// performance, data fabric, hybrid bonds, supply parasitics,
// electromigration, coolant flow and heat exchanger sizing.
//
// A DesignPoint is a flat bag of named scalars (see fields()); presets fill
// it and key=value files or overrides adjust it.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "zlsim/cascade.hpp"
#include "zlsim/config.hpp"
#include "zlsim/report.hpp"

namespace zlsim::sysmodel {

struct ProcessParams {
  double sc_density_mtr_mm2 = 344;  // standard-cell density of the PE node
  double full_custom_factor = 2.1;
  double node_power_scale = 0.53;
};

struct PeParams {
  double transistors = 505;
  double gate_cap_ff = 0.06;  // per transistor
  double interconnect_cap_ff = 10;
  double clock_overhead_cap_ff = 6;
  double custom_cap_factor = 2.2;
  double vdd = 0.7;
  double clock_hz = 12e9;
  double alpha_base = 0.10;
  double sparsity = 0.90;
  double alpha_zero = 0.04;
  double peak_use = 0.753;
};

struct CountParams {
  double trimeras = 156;
  double cpus = 16;
  double hbm_stacks = 156;
};

struct FabricParams {
  double gt_per_lane = 32;  // GT/s
  double bumps_per_lane = 4;
  double bump_pitch_um = 20;
  double vertical_bump_rows = 60;
  double chip_width_mm = 13;
  double horizontal_bump_cols = 100;
  double horizontal_width_mm = 2.2;
};

struct HiltParams {
  double bitcell_transistors = 8;
  double density_mtr_mm2 = 313;
  double full_custom_factor = 2.1;
  double overhead = 0.16;
};

// Per-array SLD-HILT bond line items. Column-proportional items scale with
// the physical column count.
struct BondParams {
  double weight_bus = 256;
  double weight_enables_per_column = 0.25;
  double activations = 256;
  double crest_bus = 32;
  double crest_decoder = 11;
  double clocks = 6;
  double ground_per_column = 0.125;
  double power_per_column = 0.125;
  double sum_bits = 8;
  double min_pitch_um = 3.0;
};

struct CoolingParams {
  double q_w = 0;  // 0: derive from PE power + other power
  double density = 1456;
  double cp = 1090;
  double t_in_c = 30;
  double t_out_c = 49;
  double nozzle_width_mm = 11;
  double nozzle_height_mm = 0.5;
  double nozzles = 0;  // 0: one per module (trimeras + cpus)
  double cd = 0.9;
  double h_cond = 50000;
  double u_water = 2000;
  double water_dt = 10;
  double channel_density = 3000;
  double pche_diameter_mm = 380;
  double psu_efficiency = 0.88;
};

struct ElectricalParams {
  double side_current_a = 661.56;  // per TRIMERA, each of the supply and return chains
  double cga_rings = 8;
  double cga_power_columns = 130;
  double cga_ground_columns = 132;
  double copper_em_limit = 1e6;  // A/cm2 onset
  double solder_em_limit = 1e4;
};

struct GpuParams {
  double sparse_pflops = 1440;
  double power_kw = 120;
};

struct DesignPoint {
  std::string name = "zettalith";
  ProcessParams process;
  PeParams pe;
  cascade::ArrayGeometry geometry;
  CountParams counts;
  double die_area_mm2 = 143;
  FabricParams fabric;
  HiltParams hilt;
  BondParams bonds;
  CoolingParams thermal;
  ElectricalParams electrical;
  double other_power_w = 12956;  // CPUs, I/O, HBM
  GpuParams gpu;
  double hbf_bandwidth = 0;         // bytes/s; 0 when absent
  double weights_per_inference = 0;  // active weights streamed per inference
  double bytes_per_weight = 0.5;

  void validate() const;
  // Assign one field by its flat key; throws on unknown key or bad value.
  void set(const std::string& key, const std::string& value);
  void apply(const config::KeyValues& kv);
  static std::vector<std::string> keys();
};

DesignPoint zettalith();
DesignPoint exalith();
DesignPoint nexai();
DesignPoint preset(std::string_view name);
// "preset=" selects the base, every other key overrides it.
DesignPoint from_config(const config::KeyValues& kv);

struct PePower {
  double c_total_f = 0;
  double alpha_avg = 0;
  double baseline_w = 0;  // before node scaling
  double scaled_w = 0;
};
PePower pe_power(const DesignPoint& dp);

struct PeArea {
  double pe_um2 = 0;
  double array_um2 = 0;  // one array including spare columns: a 12 GHz clock domain
  double max_pes_in_die = 0;
};
PeArea pe_area(const DesignPoint& dp);

struct SystemPerformance {
  std::int64_t pes_per_trimera = 0;  // active
  std::int64_t pes_total = 0;
  double pe_flops = 0;  // 2 ops per MAC
  double dense_flops_trimera = 0;
  double sparse_flops_trimera = 0;
  double dense_flops = 0;
  double sparse_flops = 0;
  double sld_power_w = 0;
  double power_density_w_cm2 = 0;
  double pe_power_total_w = 0;
  double system_power_w = 0;
  double flops_per_watt = 0;  // sparse
};
SystemPerformance system_performance(const DesignPoint& dp);

struct FabricBandwidth {
  double vertical_bumps = 0;
  double vertical_lanes = 0;
  double vertical_tb_s = 0;
  double wire_density_per_um = 0;
  double horizontal_bumps = 0;
  double horizontal_lanes = 0;
  double horizontal_tb_s = 0;
  double aggregate_tb_s = 0;
  double cpu_fabric_tb_s = 0;
};
FabricBandwidth fabric_bandwidth(const DesignPoint& dp);

struct HybridBonds {
  double per_array = 0;
  double column_io = 0;
  double total = 0;
  double pitch_um = 0;
  bool manufacturable = false;
};
HybridBonds hybrid_bond_count(const DesignPoint& dp);

enum class Material { copper, solder };

struct ChainElement {
  std::string name;
  double quantity = 1;
  double resistivity_nohm_m = 17.7;
  double length_um = 1;
  double area_um2 = 1;
  Material material = Material::copper;
  bool ground_side = false;
};

struct ChainSpec {
  std::vector<ChainElement> elements;
  double side_current_a = 0;
  double modules = 1;  // copies of the stack in the system
};

struct ChainRow {
  ChainElement element;
  double current_ma = 0;
  double resistance_mohm = 0;
  double voltage_mv = 0;
  double power_uw = 0;
  double total_w = 0;
  double current_density_a_cm2 = 0;
};

struct ChainResult {
  std::vector<ChainRow> rows;
  double drop_mv = 0;
  double stack_w = 0;
  double system_w = 0;
  const ChainRow& row(std::string_view name, bool ground_side = false) const;
};

int cga_wires_per_column(int rings);
ChainSpec standard_chain(const DesignPoint& dp);
ChainResult parasitic_chain(const ChainSpec& spec);

struct EmVerdict {
  std::string name;
  bool ground_side = false;
  Material material = Material::copper;
  double current_density_a_cm2 = 0;
  double limit_a_cm2 = 0;
  bool pass = false;         // below the onset threshold
  bool tenfold_margin = false;  // at least 10x below it
};
std::vector<EmVerdict> electromigration_screen(const ChainResult& chain, double copper_limit = 1e6,
                                               double solder_limit = 1e4);

struct CoolingResult {
  double q_w = 0;
  double mdot_kg_s = 0;
  double vdot_m3_s = 0;
  double vdot_l_min = 0;
  double nozzle_area_mm2 = 0;
  double velocity_m_s = 0;
  double dp_kpa = 0;
};
// Heat load of the design point: PE power plus other power unless q_w is set.
double heat_load_w(const DesignPoint& dp);
CoolingResult cooling(const DesignPoint& dp);
CoolingResult cooling(const CoolingParams& c, double q_w, double nozzle_count);

struct HeatExchanger {
  double psu_heat_w = 0;
  double q_total_w = 0;
  double opteon_area_m2 = 0;
  double water_area_m2 = 0;
  double max_area_m2 = 0;
  double volume_m3 = 0;
  double height_mm = 0;
};
HeatExchanger heat_exchanger(const DesignPoint& dp);
HeatExchanger heat_exchanger(const CoolingParams& c, double q_w);

struct HiltAreas {
  double bitcell_um2 = 0;
  double activation_array_bits = 0;
  double activation_array_bitcell_um2 = 0;
  double activation_array_total_um2 = 0;
  double activation_trimera_bits = 0;
  double activation_trimera_mm2 = 0;
  double output_trimera_bits = 0;
  double output_trimera_bitcell_um2 = 0;
  double output_trimera_total_um2 = 0;
};
HiltAreas hilt_areas(const DesignPoint& dp);

// Full derived report for one design point (values only, no expectations).
report::Report derive(const DesignPoint& dp);

// Re-derive `derive()` for each knob value; rows are prefixed "<knob>=<value>/".
// Knobs: clock (Hz), spare_columns, array_shape ("RxC"), fabric_bw (TB/s per
// vertical link), hilt_overhead (fraction), cga_rings.
report::Report knob_sweep(const DesignPoint& dp, std::string_view knob, const std::vector<std::string>& values);
DesignPoint apply_knob(const DesignPoint& dp, std::string_view knob, const std::string& value);

}  // namespace zlsim::sysmodel
