#include "zlsim/sysmodel.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "zlsim/hilt.hpp"
#include "zlsim/units.hpp"

namespace zlsim::sysmodel {

namespace u = units;

namespace {

struct Field {
  const char* key;
  std::function<double&(DesignPoint&)> ref;
};

struct IntField {
  const char* key;
  std::function<int&(DesignPoint&)> ref;
};

#define ZL_FIELD(k, member) Field{k, [](DesignPoint& d) -> double& { return d.member; }}
#define ZL_INT(k, member) IntField{k, [](DesignPoint& d) -> int& { return d.member; }}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      ZL_FIELD("process.sc_density_mtr_mm2", process.sc_density_mtr_mm2),
      ZL_FIELD("process.full_custom_factor", process.full_custom_factor),
      ZL_FIELD("process.node_power_scale", process.node_power_scale),
      ZL_FIELD("pe.transistors", pe.transistors),
      ZL_FIELD("pe.gate_cap_ff", pe.gate_cap_ff),
      ZL_FIELD("pe.interconnect_cap_ff", pe.interconnect_cap_ff),
      ZL_FIELD("pe.clock_overhead_cap_ff", pe.clock_overhead_cap_ff),
      ZL_FIELD("pe.custom_cap_factor", pe.custom_cap_factor),
      ZL_FIELD("pe.vdd", pe.vdd),
      ZL_FIELD("pe.clock_hz", pe.clock_hz),
      ZL_FIELD("pe.alpha_base", pe.alpha_base),
      ZL_FIELD("pe.sparsity", pe.sparsity),
      ZL_FIELD("pe.alpha_zero", pe.alpha_zero),
      ZL_FIELD("pe.peak_use", pe.peak_use),
      ZL_FIELD("counts.trimeras", counts.trimeras),
      ZL_FIELD("counts.cpus", counts.cpus),
      ZL_FIELD("counts.hbm_stacks", counts.hbm_stacks),
      ZL_FIELD("die.area_mm2", die_area_mm2),
      ZL_FIELD("fabric.gt_per_lane", fabric.gt_per_lane),
      ZL_FIELD("fabric.bumps_per_lane", fabric.bumps_per_lane),
      ZL_FIELD("fabric.bump_pitch_um", fabric.bump_pitch_um),
      ZL_FIELD("fabric.vertical_bump_rows", fabric.vertical_bump_rows),
      ZL_FIELD("fabric.chip_width_mm", fabric.chip_width_mm),
      ZL_FIELD("fabric.horizontal_bump_cols", fabric.horizontal_bump_cols),
      ZL_FIELD("fabric.horizontal_width_mm", fabric.horizontal_width_mm),
      ZL_FIELD("hilt.bitcell_transistors", hilt.bitcell_transistors),
      ZL_FIELD("hilt.density_mtr_mm2", hilt.density_mtr_mm2),
      ZL_FIELD("hilt.full_custom_factor", hilt.full_custom_factor),
      ZL_FIELD("hilt.overhead", hilt.overhead),
      ZL_FIELD("bonds.weight_bus", bonds.weight_bus),
      ZL_FIELD("bonds.weight_enables_per_column", bonds.weight_enables_per_column),
      ZL_FIELD("bonds.activations", bonds.activations),
      ZL_FIELD("bonds.crest_bus", bonds.crest_bus),
      ZL_FIELD("bonds.crest_decoder", bonds.crest_decoder),
      ZL_FIELD("bonds.clocks", bonds.clocks),
      ZL_FIELD("bonds.ground_per_column", bonds.ground_per_column),
      ZL_FIELD("bonds.power_per_column", bonds.power_per_column),
      ZL_FIELD("bonds.sum_bits", bonds.sum_bits),
      ZL_FIELD("bonds.min_pitch_um", bonds.min_pitch_um),
      ZL_FIELD("thermal.q_w", thermal.q_w),
      ZL_FIELD("thermal.density", thermal.density),
      ZL_FIELD("thermal.cp", thermal.cp),
      ZL_FIELD("thermal.t_in_c", thermal.t_in_c),
      ZL_FIELD("thermal.t_out_c", thermal.t_out_c),
      ZL_FIELD("thermal.nozzle_width_mm", thermal.nozzle_width_mm),
      ZL_FIELD("thermal.nozzle_height_mm", thermal.nozzle_height_mm),
      ZL_FIELD("thermal.nozzles", thermal.nozzles),
      ZL_FIELD("thermal.cd", thermal.cd),
      ZL_FIELD("thermal.h_cond", thermal.h_cond),
      ZL_FIELD("thermal.u_water", thermal.u_water),
      ZL_FIELD("thermal.water_dt", thermal.water_dt),
      ZL_FIELD("thermal.channel_density", thermal.channel_density),
      ZL_FIELD("thermal.pche_diameter_mm", thermal.pche_diameter_mm),
      ZL_FIELD("thermal.psu_efficiency", thermal.psu_efficiency),
      ZL_FIELD("electrical.side_current_a", electrical.side_current_a),
      ZL_FIELD("electrical.cga_rings", electrical.cga_rings),
      ZL_FIELD("electrical.cga_power_columns", electrical.cga_power_columns),
      ZL_FIELD("electrical.cga_ground_columns", electrical.cga_ground_columns),
      ZL_FIELD("electrical.copper_em_limit", electrical.copper_em_limit),
      ZL_FIELD("electrical.solder_em_limit", electrical.solder_em_limit),
      ZL_FIELD("system.other_power_w", other_power_w),
      ZL_FIELD("gpu.sparse_pflops", gpu.sparse_pflops),
      ZL_FIELD("gpu.power_kw", gpu.power_kw),
      ZL_FIELD("hbf.bandwidth", hbf_bandwidth),
      ZL_FIELD("hbf.weights_per_inference", weights_per_inference),
      ZL_FIELD("hbf.bytes_per_weight", bytes_per_weight),
  };
  return f;
}

const std::vector<IntField>& int_fields() {
  static const std::vector<IntField> f = {
      ZL_INT("geometry.rows_per_array", geometry.rows_per_array),
      ZL_INT("geometry.active_columns", geometry.active_columns),
      ZL_INT("geometry.spare_columns", geometry.spare_columns),
      ZL_INT("geometry.arrays", geometry.arrays),
      ZL_INT("geometry.batch_slots", geometry.batch_slots),
      ZL_INT("geometry.support_clock_divisor", geometry.support_clock_divisor),
  };
  return f;
}

#undef ZL_FIELD
#undef ZL_INT

void positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

void fraction(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(what) + " must be in [0,1]");
}

}  // namespace

std::vector<std::string> DesignPoint::keys() {
  std::vector<std::string> k{"preset", "name"};
  for (const auto& f : fields()) k.emplace_back(f.key);
  for (const auto& f : int_fields()) k.emplace_back(f.key);
  return k;
}

void DesignPoint::set(const std::string& key, const std::string& value) {
  if (key == "name") {
    name = value;
    return;
  }
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.ref(*this) = config::parse_double(key, value);
      return;
    }
  }
  for (const auto& f : int_fields()) {
    if (key == f.key) {
      const double v = config::parse_double(key, value);
      if (v != std::floor(v)) throw std::invalid_argument("config key '" + key + "' must be an integer");
      f.ref(*this) = static_cast<int>(v);
      return;
    }
  }
  throw std::invalid_argument("unknown design-point key '" + key + "'");
}

void DesignPoint::apply(const config::KeyValues& kv) {
  for (const auto& [k, v] : kv.values()) {
    if (k == "preset") continue;
    set(k, v);
  }
  validate();
}

void DesignPoint::validate() const {
  geometry.validate();
  positive(process.sc_density_mtr_mm2, "process.sc_density_mtr_mm2");
  positive(process.full_custom_factor, "process.full_custom_factor");
  positive(process.node_power_scale, "process.node_power_scale");
  positive(pe.transistors, "pe.transistors");
  positive(pe.custom_cap_factor, "pe.custom_cap_factor");
  positive(pe.vdd, "pe.vdd");
  if (pe.clock_hz < 0) throw std::invalid_argument("pe.clock_hz must be non-negative");
  fraction(pe.sparsity, "pe.sparsity");
  fraction(pe.peak_use, "pe.peak_use");
  fraction(pe.alpha_base, "pe.alpha_base");
  fraction(pe.alpha_zero, "pe.alpha_zero");
  positive(counts.trimeras, "counts.trimeras");
  positive(die_area_mm2, "die.area_mm2");
  positive(fabric.bump_pitch_um, "fabric.bump_pitch_um");
  positive(fabric.bumps_per_lane, "fabric.bumps_per_lane");
  fraction(hilt.overhead, "hilt.overhead");
  if (hilt.overhead >= 1.0) throw std::invalid_argument("hilt.overhead must be below 1");
  positive(thermal.density, "thermal.density");
  positive(thermal.cp, "thermal.cp");
  if (thermal.t_out_c <= thermal.t_in_c) throw std::invalid_argument("thermal.t_out_c must exceed thermal.t_in_c");
  positive(thermal.cd, "thermal.cd");
  positive(thermal.psu_efficiency, "thermal.psu_efficiency");
  positive(electrical.side_current_a, "electrical.side_current_a");
}

DesignPoint zettalith() { return DesignPoint{}; }

DesignPoint exalith() {
  DesignPoint d;
  d.name = "exalith";
  d.pe.clock_hz = 8e9;
  d.counts.trimeras = 1;
  d.counts.cpus = 1;
  d.counts.hbm_stacks = 1;
  d.other_power_w = 190;  // CPU stack 130 W, HBM 30 W, HBF 30 W
  d.hbf_bandwidth = 1e12;
  return d;
}

DesignPoint nexai() {
  DesignPoint d;
  d.name = "nexai";
  d.process.sc_density_mtr_mm2 = 313;
  d.geometry.active_columns = 512;
  d.geometry.spare_columns = 8;
  d.geometry.arrays = 16;
  d.geometry.batch_slots = 4096;
  d.counts.trimeras = 1;
  d.counts.cpus = 0;
  d.counts.hbm_stacks = 0;
  d.other_power_w = 0;
  d.hbf_bandwidth = 1.2e12;
  d.weights_per_inference = 37e9;
  return d;
}

DesignPoint preset(std::string_view name) {
  if (name == "zettalith") return zettalith();
  if (name == "exalith") return exalith();
  if (name == "nexai") return nexai();
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

DesignPoint from_config(const config::KeyValues& kv) {
  DesignPoint d = preset(kv.get_string("preset", "zettalith"));
  d.apply(kv);
  return d;
}

PePower pe_power(const DesignPoint& dp) {
  const auto& p = dp.pe;
  const u::Capacitance c = (u::fF(p.transistors * p.gate_cap_ff) + u::fF(p.interconnect_cap_ff) +
                            u::fF(p.clock_overhead_cap_ff)) /
                           p.custom_cap_factor;
  const double alpha = p.sparsity * p.alpha_zero + (1.0 - p.sparsity) * p.alpha_base;
  const u::Voltage v = u::volts(p.vdd);
  const u::Power base = alpha * c * v * v * u::hz(p.clock_hz) * p.peak_use;
  PePower r;
  r.c_total_f = c.value();
  r.alpha_avg = alpha;
  r.baseline_w = base.value();
  r.scaled_w = (base * dp.process.node_power_scale).value();
  return r;
}

PeArea pe_area(const DesignPoint& dp) {
  // MTr/mm2 equals transistors per um2
  const double per_um2 = dp.process.sc_density_mtr_mm2 * dp.process.full_custom_factor;
  const u::Area pe = u::um2(dp.pe.transistors / per_um2);
  PeArea r;
  r.pe_um2 = u::in_um2(pe);
  const double array_pes = static_cast<double>(dp.geometry.rows_per_array) * dp.geometry.total_columns();
  r.array_um2 = u::in_um2(pe * array_pes);
  r.max_pes_in_die = (u::mm2(dp.die_area_mm2) / pe).value();
  return r;
}

SystemPerformance system_performance(const DesignPoint& dp) {
  SystemPerformance s;
  s.pes_per_trimera = dp.geometry.active_pe_count();
  s.pes_total = static_cast<std::int64_t>(std::llround(static_cast<double>(s.pes_per_trimera) * dp.counts.trimeras));
  s.pe_flops = 2.0 * dp.pe.clock_hz;
  s.dense_flops_trimera = static_cast<double>(s.pes_per_trimera) * s.pe_flops;
  s.sparse_flops_trimera = 2.0 * s.dense_flops_trimera;
  s.dense_flops = static_cast<double>(s.pes_total) * s.pe_flops;
  s.sparse_flops = 2.0 * s.dense_flops;
  const double pe_w = pe_power(dp).scaled_w;
  s.sld_power_w = static_cast<double>(s.pes_per_trimera) * pe_w;
  s.power_density_w_cm2 = s.sld_power_w / u::in_cm2(u::mm2(dp.die_area_mm2));
  s.pe_power_total_w = static_cast<double>(s.pes_total) * pe_w;
  s.system_power_w = s.pe_power_total_w + dp.other_power_w;
  s.flops_per_watt = s.system_power_w > 0 ? s.sparse_flops / s.system_power_w : 0.0;
  return s;
}

FabricBandwidth fabric_bandwidth(const DesignPoint& dp) {
  const auto& f = dp.fabric;
  FabricBandwidth b;
  const double per_row = std::floor(f.chip_width_mm * 1000.0 / f.bump_pitch_um);
  b.vertical_bumps = per_row * f.vertical_bump_rows;
  b.vertical_lanes = std::floor(b.vertical_bumps / f.bumps_per_lane);
  b.vertical_tb_s = b.vertical_lanes * f.gt_per_lane * 1e9 / 8.0 / 1e12;
  b.wire_density_per_um = b.vertical_bumps / (f.chip_width_mm * 1000.0);
  const double per_col = std::floor(f.horizontal_width_mm * 1000.0 / f.bump_pitch_um);
  b.horizontal_bumps = per_col * f.horizontal_bump_cols;
  b.horizontal_lanes = std::floor(b.horizontal_bumps / f.bumps_per_lane);
  b.horizontal_tb_s = b.horizontal_lanes * f.gt_per_lane * 1e9 / 8.0 / 1e12;
  b.aggregate_tb_s = dp.counts.trimeras * (b.vertical_tb_s + b.horizontal_tb_s);
  b.cpu_fabric_tb_s = dp.counts.cpus * b.vertical_tb_s;
  return b;
}

HybridBonds hybrid_bond_count(const DesignPoint& dp) {
  const auto& b = dp.bonds;
  const double cols = dp.geometry.total_columns();
  HybridBonds h;
  h.per_array = b.weight_bus + std::ceil(b.weight_enables_per_column * cols) + b.activations + b.crest_bus +
                b.crest_decoder + b.clocks + std::ceil(b.ground_per_column * cols) +
                std::ceil(b.power_per_column * cols);
  // partial-sum/bias inputs plus sum outputs
  h.column_io = 2.0 * cols * b.sum_bits;
  h.total = h.per_array * dp.geometry.arrays + h.column_io;
  h.pitch_um = u::sqrt(u::mm2(dp.die_area_mm2) / h.total).value() * 1e6;
  h.manufacturable = h.pitch_um >= b.min_pitch_um;
  return h;
}

int cga_wires_per_column(int rings) {
  if (rings < 0) throw std::invalid_argument("CGA rings must be non-negative");
  return 1 + 3 * rings * (rings + 1);
}

ChainSpec standard_chain(const DesignPoint& dp) {
  const auto& e = dp.electrical;
  const double wires = cga_wires_per_column(static_cast<int>(e.cga_rings));
  const double pc = e.cga_power_columns;
  const double gc = e.cga_ground_columns;
  const auto cu = Material::copper;
  const auto sn = Material::solder;
  // round structures use the disc area of their diameter
  const auto disc = [](double d_um) { return M_PI * d_um * d_um / 4.0; };
  ChainSpec s;
  s.side_current_a = e.side_current_a;
  s.modules = dp.counts.trimeras + dp.counts.cpus;
  s.elements = {
      {"PSU rails solder", 60, 13.2, 100, 800000, sn, false},
      {"PSU rails", 60, 17.7, 16000, 1504000, cu, false},
      {"CGA wires", pc * wires, 17.7, 3000, disc(80), cu, false},
      {"CGA solder", pc, 13.2, 20, disc(640), sn, false},
      {"SCB TSVs", pc, 17.7, 710, disc(640), cu, false},
      {"SCB RDL", 100 * pc, 17.7, 40, 225, cu, false},
      {"ubump solder", 264000, 13.2, 3, disc(12), sn, false},
      {"ubump Cu pillar", 264000, 17.7, 10, disc(10), cu, false},
      {"BID metal stack", 264000, 17.7, 11, 16, cu, false},
      {"BID TSVs", 88000, 17.7, 100, disc(5), cu, false},
      {"HILT TSVs", 88000, 17.7, 100, disc(5), cu, false},
      {"HILT metal stack", 393984, 17.7, 11, 1, cu, false},
      {"SLD RDL", 393984, 17.7, 100, 40, cu, false},
      {"SLD metal stack", 393984, 17.7, 11, 1, cu, false},
      {"SLD metal stack", 393984, 17.7, 11, 1, cu, true},
      {"SLD RDL", 393984, 17.7, 100, 40, cu, true},
      {"HILT metal stack", 393984, 17.7, 11, 1, cu, true},
      {"HILT TSVs", 176000, 17.7, 100, disc(5), cu, true},
      {"BID TSVs", 176000, 17.7, 100, disc(5), cu, true},
      {"BID metal stack", 528000, 17.7, 11, 16, cu, true},
      {"ubump Cu pillar", 528000, 17.7, 10, disc(10), cu, true},
      {"ubump solder", 528000, 13.2, 3, disc(12), sn, true},
      {"SCB RDL", 100 * gc, 17.7, 40, 225, cu, true},
      {"SCB TSVs", gc, 17.7, 710, disc(640), cu, true},
      {"CGA solder", gc, 13.2, 20, disc(640), sn, true},
      {"CGA wires", gc * wires, 17.7, 3000, disc(80), cu, true},
      {"PSU rails", 12, 17.7, 16000, 4512000, cu, true},
      {"PSU rails solder", 12, 13.2, 100, 8000000, sn, true},
  };
  return s;
}

const ChainRow& ChainResult::row(std::string_view name, bool ground_side) const {
  for (const auto& r : rows) {
    if (r.element.name == name && r.element.ground_side == ground_side) return r;
  }
  throw std::out_of_range("no chain element '" + std::string(name) + "'");
}

ChainResult parasitic_chain(const ChainSpec& spec) {
  positive(spec.side_current_a, "chain side current");
  ChainResult out;
  for (const auto& e : spec.elements) {
    positive(e.quantity, "chain quantity");
    positive(e.resistivity_nohm_m, "chain resistivity");
    positive(e.length_um, "chain length");
    positive(e.area_um2, "chain area");
    const u::Area a = u::um2(e.area_um2);
    const u::Resistance r = u::nohm_m(e.resistivity_nohm_m) * u::um(e.length_um) / a;
    const u::Current i = u::amps(spec.side_current_a / e.quantity);
    const u::Voltage v = i * r;
    const u::Power p = i * i * r;
    ChainRow row;
    row.element = e;
    row.current_ma = i.value() * 1e3;
    row.resistance_mohm = u::in_mohm(r);
    row.voltage_mv = u::in_mv(v);
    row.power_uw = u::in_uw(p);
    row.total_w = (p * e.quantity).value();
    row.current_density_a_cm2 = u::in_a_cm2(i / a);
    out.drop_mv += row.voltage_mv;
    out.stack_w += row.total_w;
    out.rows.push_back(row);
  }
  out.system_w = out.stack_w * spec.modules;
  return out;
}

std::vector<EmVerdict> electromigration_screen(const ChainResult& chain, double copper_limit, double solder_limit) {
  std::vector<EmVerdict> out;
  for (const auto& r : chain.rows) {
    EmVerdict v;
    v.name = r.element.name;
    v.ground_side = r.element.ground_side;
    v.material = r.element.material;
    v.current_density_a_cm2 = r.current_density_a_cm2;
    v.limit_a_cm2 = r.element.material == Material::copper ? copper_limit : solder_limit;
    v.pass = v.current_density_a_cm2 < v.limit_a_cm2;
    v.tenfold_margin = v.current_density_a_cm2 < v.limit_a_cm2 / 10.0;
    out.push_back(v);
  }
  return out;
}

double heat_load_w(const DesignPoint& dp) {
  if (dp.thermal.q_w > 0) return dp.thermal.q_w;
  return system_performance(dp).system_power_w;
}

CoolingResult cooling(const CoolingParams& c, double q_w, double nozzle_count) {
  const double dt = c.t_out_c - c.t_in_c;
  if (dt <= 0) throw std::invalid_argument("cooling: outlet must be hotter than inlet");
  positive(nozzle_count, "nozzle count");
  const u::Power q = u::watts(q_w);
  const u::Density rho = u::kg_m3(c.density);
  const u::MassFlow mdot = q / (u::j_kgk(c.cp) * u::kelvin(dt));
  const u::VolumeFlow vdot = mdot / rho;
  const u::Area a = u::mm2(c.nozzle_width_mm * c.nozzle_height_mm) * nozzle_count;
  const u::Velocity vel = vdot / a;
  const u::Pressure dp = mdot * mdot / (2.0 * rho * (c.cd * c.cd) * a * a);
  CoolingResult r;
  r.q_w = q_w;
  r.mdot_kg_s = mdot.value();
  r.vdot_m3_s = vdot.value();
  r.vdot_l_min = u::in_l_min(vdot);
  r.nozzle_area_mm2 = u::in_mm2(a);
  r.velocity_m_s = vel.value();
  r.dp_kpa = u::in_kpa(dp);
  return r;
}

CoolingResult cooling(const DesignPoint& dp) {
  const double nozzles = dp.thermal.nozzles > 0 ? dp.thermal.nozzles : dp.counts.trimeras + dp.counts.cpus;
  return cooling(dp.thermal, heat_load_w(dp), nozzles);
}

HeatExchanger heat_exchanger(const CoolingParams& c, double q_w) {
  positive(c.h_cond, "thermal.h_cond");
  positive(c.u_water, "thermal.u_water");
  positive(c.water_dt, "thermal.water_dt");
  positive(c.channel_density, "thermal.channel_density");
  HeatExchanger h;
  // PSU conversion loss lands in the same coolant
  h.psu_heat_w = q_w * (1.0 / c.psu_efficiency - 1.0);
  h.q_total_w = q_w + h.psu_heat_w;
  const u::Power q = u::watts(h.q_total_w);
  const u::Area a_opteon = q / (u::w_m2k(c.h_cond) * u::kelvin(c.t_out_c - c.t_in_c));
  const u::Area a_water = q / (u::w_m2k(c.u_water) * u::kelvin(c.water_dt));
  const u::Area a_max = std::max(a_opteon, a_water);
  const u::Volume vol = a_max / u::m2_m3(c.channel_density);
  const u::Length r = u::mm(c.pche_diameter_mm) / 2.0;
  const u::Length height = vol / (M_PI * r * r);
  h.opteon_area_m2 = a_opteon.value();
  h.water_area_m2 = a_water.value();
  h.max_area_m2 = a_max.value();
  h.volume_m3 = vol.value();
  h.height_mm = height.value() * 1e3;
  return h;
}

HeatExchanger heat_exchanger(const DesignPoint& dp) { return heat_exchanger(dp.thermal, heat_load_w(dp)); }

HiltAreas hilt_areas(const DesignPoint& dp) {
  const auto& g = dp.geometry;
  HiltAreas h;
  h.bitcell_um2 = hilt::hilt_bitcell_area(dp.hilt.bitcell_transistors, dp.hilt.density_mtr_mm2,
                                          dp.hilt.full_custom_factor);
  const double act_bits_per_row = 4.0 * g.batch_slots;
  const double sum_bits_per_col = 8.0 * g.batch_slots;
  h.activation_array_bits = act_bits_per_row * g.rows_per_array;
  const auto arr = hilt::hilt_area(static_cast<std::int64_t>(h.activation_array_bits), h.bitcell_um2, dp.hilt.overhead);
  h.activation_array_bitcell_um2 = arr.bitcell_um2;
  h.activation_array_total_um2 = arr.total_um2;
  h.activation_trimera_bits = act_bits_per_row * g.total_rows();
  h.activation_trimera_mm2 =
      hilt::hilt_area(static_cast<std::int64_t>(h.activation_trimera_bits), h.bitcell_um2, dp.hilt.overhead).total_um2 *
      1e-6;
  h.output_trimera_bits = sum_bits_per_col * g.total_columns();
  const auto out = hilt::hilt_area(static_cast<std::int64_t>(h.output_trimera_bits), h.bitcell_um2, dp.hilt.overhead);
  h.output_trimera_bitcell_um2 = out.bitcell_um2;
  h.output_trimera_total_um2 = out.total_um2;
  return h;
}

report::Report derive(const DesignPoint& dp) {
  dp.validate();
  report::Report r(dp.name);
  const auto pw = pe_power(dp);
  r.add("pe.capacitance", pw.c_total_f * 1e15, "fF", "Table 5");
  r.add("pe.alpha_avg", pw.alpha_avg, "", "Table 5");
  r.add("pe.power_baseline", pw.baseline_w * 1e6, "uW", "Table 5");
  r.add("pe.power", pw.scaled_w * 1e6, "uW", "Table 5");
  const auto ar = pe_area(dp);
  r.add("pe.area", ar.pe_um2, "um2", "Table 4");
  r.add("array.area", ar.array_um2 * 1e-6, "mm2", "Table 4");
  r.add("die.max_pes", ar.max_pes_in_die, "PEs", "Table 2");
  const auto sp = system_performance(dp);
  r.add("trimera.active_pes", static_cast<double>(sp.pes_per_trimera), "PEs", "Table 2");
  r.add("trimera.dense", sp.dense_flops_trimera / 1e15, "PFLOPS", "Table 2");
  r.add("trimera.sparse", sp.sparse_flops_trimera / 1e15, "PFLOPS", "Table 2");
  r.add("system.active_pes", static_cast<double>(sp.pes_total), "PEs", "Table 2");
  r.add("system.dense", sp.dense_flops / 1e15, "PFLOPS", "Table 2");
  r.add("system.sparse", sp.sparse_flops / 1e15, "PFLOPS", "Table 2");
  r.add("sld.power", sp.sld_power_w, "W", "Table 2");
  r.add("sld.power_density", sp.power_density_w_cm2, "W/cm2", "Table 2");
  r.add("system.pe_power", sp.pe_power_total_w / 1e3, "kW", "Table 2");
  r.add("system.power", sp.system_power_w / 1e3, "kW", "Table 2");
  r.add("system.efficiency", sp.flops_per_watt / 1e12, "TFLOPS/W", "Table 20");
  const double spare_share = static_cast<double>(dp.geometry.spare_columns) / dp.geometry.total_columns();
  r.add("crest.spare_overhead", spare_share * 100.0, "%", "Table 11");
  const auto fb = fabric_bandwidth(dp);
  r.add("fabric.vertical_bumps", fb.vertical_bumps, "ubumps", "Table 12");
  r.add("fabric.vertical_lanes", fb.vertical_lanes, "lanes", "Table 12");
  r.add("fabric.vertical_bw", fb.vertical_tb_s, "TB/s", "Table 12");
  r.add("fabric.wire_density", fb.wire_density_per_um, "wires/um", "Table 12");
  r.add("fabric.horizontal_bumps", fb.horizontal_bumps, "ubumps", "Table 12");
  r.add("fabric.horizontal_lanes", fb.horizontal_lanes, "lanes", "Table 12");
  r.add("fabric.horizontal_bw", fb.horizontal_tb_s, "TB/s", "Table 12");
  r.add("fabric.aggregate_bw", fb.aggregate_tb_s, "TB/s", "Table 20");
  r.add("fabric.cpu_bw", fb.cpu_fabric_tb_s, "TB/s", "Table 2");
  const auto hb = hybrid_bond_count(dp);
  r.add("bonds.per_array", hb.per_array, "bonds", "Table 13");
  r.add("bonds.total", hb.total, "bonds", "Table 13");
  r.add("bonds.pitch", hb.pitch_um, "um", "Table 13");
  r.add("bonds.manufacturable", hb.manufacturable ? 1.0 : 0.0, "flag", "Table 13");
  const auto ha = hilt_areas(dp);
  r.add("hilt.bitcell", ha.bitcell_um2, "um2", "Table 11");
  r.add("hilt.activation_array_bitcells", ha.activation_array_bitcell_um2, "um2", "Table 11");
  r.add("hilt.activation_array_total", ha.activation_array_total_um2, "um2", "Table 11");
  r.add("hilt.activation_trimera_area", ha.activation_trimera_mm2, "mm2", "Table 11");
  r.add("hilt.output_trimera_bitcells", ha.output_trimera_bitcell_um2, "um2", "Table 11");
  r.add("hilt.output_trimera_total", ha.output_trimera_total_um2, "um2", "Table 11");
  const auto ch = parasitic_chain(standard_chain(dp));
  r.add("chain.cga_wires_resistance", ch.row("CGA wires").resistance_mohm, "mOhm", "Table 15");
  r.add("chain.cga_wires_total", ch.row("CGA wires").total_w, "W", "Table 15");
  r.add("chain.drop", ch.drop_mv, "mV", "Table 15");
  r.add("chain.stack_power", ch.stack_w, "W", "Table 15");
  r.add("chain.system_power", ch.system_w / 1e3, "kW", "Table 15");
  const auto em = electromigration_screen(ch, dp.electrical.copper_em_limit, dp.electrical.solder_em_limit);
  double em_fail = 0, em_margin_miss = 0;
  for (const auto& v : em) {
    em_fail += v.pass ? 0 : 1;
    em_margin_miss += v.tenfold_margin ? 0 : 1;
  }
  r.add("em.failures", em_fail, "rows", "Table 15");
  r.add("em.rows_without_10x_margin", em_margin_miss, "rows", "Table 15");
  const auto co = cooling(dp);
  r.add("cooling.q", co.q_w, "W", "Table 17");
  r.add("cooling.mdot", co.mdot_kg_s, "kg/s", "Table 17");
  r.add("cooling.vdot", co.vdot_l_min, "L/min", "Table 17");
  r.add("cooling.velocity", co.velocity_m_s, "m/s", "Table 17");
  r.add("cooling.dp", co.dp_kpa, "kPa", "Table 17");
  const auto hx = heat_exchanger(dp);
  r.add("hx.q_total", hx.q_total_w, "W", "Table 18");
  r.add("hx.opteon_area", hx.opteon_area_m2, "m2", "Table 18");
  r.add("hx.water_area", hx.water_area_m2, "m2", "Table 18");
  r.add("hx.volume", hx.volume_m3, "m3", "Table 18");
  r.add("hx.height", hx.height_mm, "mm", "Table 18");
  if (dp.hbf_bandwidth > 0 && dp.weights_per_inference > 0) {
    const double t = dp.weights_per_inference * dp.bytes_per_weight / dp.hbf_bandwidth;
    r.add("hbf.inference_time", t * 1e3, "ms", "Table 22");
    r.add("hbf.token_rate", 1.0 / t, "tokens/s", "Table 22");
  }
  return r;
}

DesignPoint apply_knob(const DesignPoint& dp, std::string_view knob, const std::string& value) {
  DesignPoint d = dp;
  if (knob == "clock") {
    d.pe.clock_hz = config::parse_double("clock", value);
  } else if (knob == "spare_columns") {
    d.set("geometry.spare_columns", value);
  } else if (knob == "array_shape") {
    const auto x = value.find('x');
    if (x == std::string::npos) throw std::invalid_argument("array_shape must look like 128x4096");
    d.set("geometry.rows_per_array", value.substr(0, x));
    d.set("geometry.active_columns", value.substr(x + 1));
  } else if (knob == "fabric_bw") {
    const double tb_s = config::parse_double("fabric_bw", value);
    const double lanes = std::ceil(tb_s * 1e12 * 8.0 / (d.fabric.gt_per_lane * 1e9));
    const double per_row = std::floor(d.fabric.chip_width_mm * 1000.0 / d.fabric.bump_pitch_um);
    d.fabric.vertical_bump_rows = std::ceil(lanes * d.fabric.bumps_per_lane / per_row);
  } else if (knob == "hilt_overhead") {
    d.hilt.overhead = config::parse_double("hilt_overhead", value);
  } else if (knob == "cga_rings") {
    d.electrical.cga_rings = config::parse_double("cga_rings", value);
  } else {
    throw std::invalid_argument("unknown knob '" + std::string(knob) + "'");
  }
  d.validate();
  return d;
}

report::Report knob_sweep(const DesignPoint& dp, std::string_view knob, const std::vector<std::string>& values) {
  report::Report out(dp.name + " sweep " + std::string(knob));
  for (const auto& v : values) {
    const auto r = derive(apply_knob(dp, knob, v));
    for (auto row : r.rows()) {
      row.name = std::string(knob) + "=" + v + "/" + row.name;
      out.add(row.name, row.value, row.units, row.anchor);
    }
  }
  return out;
}

}  // namespace zlsim::sysmodel
