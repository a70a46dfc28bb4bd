#include "zlsim/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "zlsim/cascade.hpp"
#include "zlsim/config.hpp"
#include "zlsim/crest.hpp"
#include "zlsim/goldens.hpp"
#include "zlsim/matrix_io.hpp"
#include "zlsim/report.hpp"
#include "zlsim/schedule.hpp"
#include "zlsim/sysmodel.hpp"
#include "zlsim/workload.hpp"

namespace zlsim::cli {

namespace {

namespace fs = std::filesystem;
using report::Report;

// bad key, bad value, missing file
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string command;
  std::string config_path;
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::vector<std::string> overrides;
  std::string out_path;
  report::Format format = report::Format::table;
};

struct Context {
  Options opt;
  config::KeyValues kv;
  fs::path base;  // relative paths in the config resolve against this
  std::ostream& out;
  std::ostream& err;

  std::uint64_t seed() const {
    if (opt.seed_given) return opt.seed;
    return static_cast<std::uint64_t>(kv.get_int("seed", 1));
  }
  std::string path(const std::string& key) const {
    const fs::path p = kv.get_string(key, "");
    return (p.is_relative() ? base / p : p).string();
  }
};

void reject_unknown(const config::KeyValues& kv, const std::vector<std::string>& known,
                    const std::vector<std::string>& prefixes = {}) {
  const auto bad = kv.unknown_keys(known, prefixes);
  if (!bad.empty()) throw UsageError("unknown config key '" + bad.front() + "'");
}

// Writes to --out when given, else to the console stream.
template <class F>
void emit(const Context& ctx, F&& write) {
  if (ctx.opt.out_path.empty()) {
    write(ctx.out);
    return;
  }
  std::ofstream f(ctx.opt.out_path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + ctx.opt.out_path);
  write(f);
  if (!f) throw UsageError("write failed: " + ctx.opt.out_path);
}

void emit_report(const Context& ctx, const Report& r) {
  emit(ctx, [&](std::ostream& os) { report::write(os, r, ctx.opt.format); });
}

const std::vector<std::string> kGeometryKeys = {
    "geometry.arrays",        "geometry.rows_per_array", "geometry.active_columns",
    "geometry.spare_columns", "geometry.batch_slots",    "geometry.core_clock_hz",
    "geometry.support_clock_divisor"};

cascade::ArrayGeometry geometry_from(const config::KeyValues& kv, cascade::ArrayGeometry g) {
  g.arrays = static_cast<int>(kv.get_int("geometry.arrays", g.arrays));
  g.rows_per_array = static_cast<int>(kv.get_int("geometry.rows_per_array", g.rows_per_array));
  g.active_columns = static_cast<int>(kv.get_int("geometry.active_columns", g.active_columns));
  g.spare_columns = static_cast<int>(kv.get_int("geometry.spare_columns", g.spare_columns));
  g.batch_slots = static_cast<int>(kv.get_int("geometry.batch_slots", g.batch_slots));
  g.core_clock_hz = kv.get_double("geometry.core_clock_hz", g.core_clock_hz);
  g.support_clock_divisor =
      static_cast<int>(kv.get_int("geometry.support_clock_divisor", g.support_clock_divisor));
  g.validate();
  return g;
}

// "crow:col,crow:col"
std::set<SegmentId> parse_segments(const std::string& text) {
  std::set<SegmentId> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw UsageError("fault '" + item + "' is not crow:column");
    try {
      out.insert({std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1))});
    } catch (const std::logic_error&) {
      throw UsageError("fault '" + item + "' is not crow:column");
    }
  }
  return out;
}

cascade::Grid<lowprec::Fp4> random_fp4(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> code(0, 15);
  cascade::Grid<lowprec::Fp4> m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = lowprec::Fp4{static_cast<std::uint8_t>(code(rng))};
  }
  return m;
}

cascade::Grid<lowprec::Fp4> load_matrix(const Context& ctx, const std::string& key) {
  const auto p = ctx.path(key);
  if (!fs::exists(p)) throw UsageError("missing file for " + key + ": " + p);
  return io::load_fp4_matrix(p);
}

int cmd_simulate(Context& ctx) {
  auto& kv = ctx.kv;
  std::vector<std::string> known = kGeometryKeys;
  known.insert(known.end(), {"seed", "format", "weights", "activations", "faults", "repair", "threshold",
                             "test_slots", "sums"});
  reject_unknown(kv, known);

  const auto g = geometry_from(kv, cascade::ArrayGeometry::toy(2, 8, 16, 4, 8));
  const auto fmt = lowprec::parse_fp8_format(kv.get_string("format", "e4m3"));
  std::mt19937_64 rng(ctx.seed());

  const auto rows = static_cast<std::size_t>(g.total_rows());
  auto logical = kv.has("weights") ? load_matrix(ctx, "weights")
                                   : random_fp4(rows, static_cast<std::size_t>(g.active_columns), rng);
  auto acts = kv.has("activations") ? load_matrix(ctx, "activations")
                                    : random_fp4(static_cast<std::size_t>(g.batch_slots), rows, rng);
  if (logical.rows() != rows || logical.cols() != static_cast<std::size_t>(g.active_columns)) {
    throw UsageError("weights must be " + std::to_string(rows) + " x " + std::to_string(g.active_columns));
  }
  if (acts.cols() != rows) throw UsageError("activations must have " + std::to_string(rows) + " columns");

  cascade::Device dev(g, fmt);
  for (const auto& s : parse_segments(kv.get_string("faults", ""))) {
    if (s.crow < 0 || s.crow >= g.arrays || s.column < 0 || s.column >= g.total_columns()) {
      throw UsageError("fault outside the device");
    }
    dev.faults.add_defect(s);
  }
  const int threshold = static_cast<int>(kv.get_int("threshold", 3));
  const bool repair = kv.get_bool("repair", true);

  Report r("simulate");
  r.add("defects injected", static_cast<double>(dev.faults.size()), "segments");
  if (repair) {
    crest::Controller ctl(dev, logical, threshold);
    const int slots = static_cast<int>(kv.get_int("test_slots", 8));
    const auto wl = crest::test_workload(g, std::max(slots, threshold), threshold, rng());
    const auto sw = ctl.sweep(wl);
    r.add("crest rounds", sw.rounds, "rounds");
    r.add("crest faulty tests", sw.faulty_tests, "tests");
    r.add("crest repairs", sw.repairs, "segments");
    r.add("mapped out columns", static_cast<double>(ctl.plan().mapped_out.size()), "columns");
    r.add("residual performance",
          crest::degrade(static_cast<std::int64_t>(ctl.plan().mapped_out.size())), "fraction");
  } else {
    cascade::place_logical(dev, logical, cascade::ColumnRouting::direct(g));
  }

  const auto bias = cascade::zero_bias(g, fmt);
  const auto sums = cascade::run_batch(dev, acts, bias);
  const auto stats = cascade::error_stats(sums, cascade::exact_matmul(logical, acts, bias));

  std::size_t mismatches = 0;
  for (int c = 0; c < g.active_columns; ++c) {
    if (sums.mapped_out[c]) continue;
    std::vector<lowprec::Fp4> w(rows);
    for (std::size_t i = 0; i < rows; ++i) w[i] = logical.at(i, c);
    for (std::size_t s = 0; s < acts.rows(); ++s) {
      const std::vector<lowprec::Fp4> a(acts.row(s), acts.row(s) + rows);
      if (cascade::reference_column_oracle(w, a, bias[c]).code != sums.sums.at(s, c).code) ++mismatches;
    }
  }
  r.add("max abs error vs exact", stats.max_abs, "");
  r.add("mean abs error vs exact", stats.mean_abs, "");
  r.add("saturated sums", static_cast<double>(stats.saturation_count), "sums");
  r.add("oracle mismatches", static_cast<double>(mismatches), "sums");

  if (kv.has("sums") || !ctx.opt.out_path.empty()) {
    const std::string p = !ctx.opt.out_path.empty() ? ctx.opt.out_path : ctx.path("sums");
    std::ofstream f(p, std::ios::binary);
    if (!f) throw UsageError("cannot write " + p);
    io::write_sums_csv(f, sums);
  }
  report::write(ctx.out, r, ctx.opt.format);
  ctx.out << "oracle: " << (mismatches == 0 ? "MATCH" : "MISMATCH") << "\n";
  return mismatches == 0 ? kOk : kVerifyFailed;
}

int cmd_crest(Context& ctx) {
  auto& kv = ctx.kv;
  std::vector<std::string> known = kGeometryKeys;
  known.insert(known.end(), {"seed", "trials", "defects", "distribution", "threshold", "test_slots", "repair",
                             "bist_trials", "summary"});
  reject_unknown(kv, known);

  crest::CampaignParams p;
  p.geometry = geometry_from(kv, p.geometry);
  p.trials = static_cast<int>(kv.get_int("trials", p.trials));
  p.defects = static_cast<int>(kv.get_int("defects", p.defects));
  p.distribution = crest::parse_distribution(kv.get_string("distribution", "uniform"));
  p.threshold = static_cast<int>(kv.get_int("threshold", p.threshold));
  p.test_slots = static_cast<int>(kv.get_int("test_slots", p.test_slots));
  p.repair = kv.get_bool("repair", true);
  p.seed = ctx.seed();
  const auto res = crest::run_campaign(p);
  emit(ctx, [&](std::ostream& os) { crest::write_campaign_csv(os, res); });

  Report r("crest");
  r.add("trials", static_cast<double>(res.trials.size()), "trials");
  r.add("defects", res.defects, "segments");
  r.add("detected", res.detected, "segments");
  r.add("isolated", res.isolated, "segments");
  r.add("misisolated", res.misisolated, "segments");
  r.add("repaired", res.repaired, "segments");
  r.add("output matches", res.output_matches, "trials");
  r.add("min residual performance", res.min_residual_perf, "fraction");
  const int bist_trials = static_cast<int>(kv.get_int("bist_trials", 0));
  if (bist_trials > 0) {
    const auto b = crest::bist_fault_coverage(p.geometry, bist_trials, p.seed);
    r.add("self test coverage", b.coverage(), "fraction");
    r.add("self test time", b.time_s * 1e3, "ms");
  }
  // Campaign CSV owns --out; the summary goes to the console unless it would
  // collide with the CSV there.
  if (!ctx.opt.out_path.empty() || kv.get_bool("summary", false)) report::write(ctx.out, r, ctx.opt.format);
  const bool ok = !p.repair || res.output_matches == static_cast<int>(res.trials.size());
  return ok ? kOk : kVerifyFailed;
}

int cmd_schedule(Context& ctx) {
  auto& kv = ctx.kv;
  std::vector<std::string> known = kGeometryKeys;
  known.insert(known.end(), {"seed", "merge", "fill_depth", "writeback_clocks", "clock_stepped", "trimeras"});
  reject_unknown(kv, known);

  const auto g = geometry_from(kv, cascade::ArrayGeometry::full_scale());
  auto p = schedule::ScheduleParams::from_geometry(g, schedule::parse_merge(kv.get_string("merge", "sequential")));
  p.fill_depth = kv.get_int("fill_depth", p.fill_depth);
  p.writeback_clocks = kv.get_int("writeback_clocks", p.writeback_clocks);
  p.validate();
  const auto t = schedule::milestones(p);
  Report r("schedule");
  r.add("first compute clock", static_cast<double>(t.first_compute_clock), "clock");
  r.add("array 1 done clock", static_cast<double>(t.array1_done_clock), "clock");
  r.add("batch 1 done clock", static_cast<double>(t.batch1_done_clock), "clock");
  r.add("last batch done clock", static_cast<double>(t.last_batch_done_clock), "clock");
  r.add("HILT to HILT clocks", static_cast<double>(t.all_done_clock), "clocks");
  r.add("efficiency", t.efficiency * 100.0, "%");
  r.add("pass time", static_cast<double>(t.all_done_clock) / g.core_clock_hz * 1e6, "us");
  const auto tp = schedule::throughput(g.active_pe_count(), g.core_clock_hz, t.efficiency);
  r.add("sustained dense per TRIMERA", tp.flops_per_s / 1e15, "PFLOPS");
  r.add("full batch MACs", static_cast<double>(schedule::full_batch_macs(g, kv.get_int("trimeras", 156))),
        "MACs");
  bool ok = true;
  if (kv.get_bool("clock_stepped", false)) {
    const auto done = schedule::simulate_clocks(p);
    const auto last = done.empty() ? 0 : *std::max_element(done.begin(), done.end());
    r.add("clock stepped last slot", static_cast<double>(last), "clock");
    r.check("clock stepped agrees", static_cast<double>(last), "clock", static_cast<double>(t.last_batch_done_clock),
            report::Tolerance::exact(), "closed form");
    ok = r.all_pass();
  }
  emit_report(ctx, r);
  return ok ? kOk : kVerifyFailed;
}

int cmd_workload(Context& ctx) {
  auto& kv = ctx.kv;
  reject_unknown(kv, {"seed", "model.d", "model.h", "model.V", "model.N", "model.ffn", "model.B", "model.L",
                      "peak_flops", "target_fraction", "hbm_bandwidth", "bytes_per_weight"});
  auto m = workload::ModelDims::llama_405b();
  m.d = kv.get_double("model.d", m.d);
  m.h = kv.get_double("model.h", m.h);
  m.V = kv.get_double("model.V", m.V);
  m.N = kv.get_double("model.N", m.N);
  m.ffn = kv.get_double("model.ffn", 4 * m.d);
  m.B = kv.get_double("model.B", m.B);
  m.L = kv.get_double("model.L", m.L);
  m.validate();
  const double peak = kv.get_double("peak_flops", sysmodel::system_performance(sysmodel::zettalith()).sparse_flops);
  const auto f = workload::flops_breakdown(m);
  const auto w = workload::weights_breakdown(m);
  const auto b = workload::reuse_balance(m, peak, kv.get_double("target_fraction", 0.8),
                                         kv.get_double("hbm_bandwidth", 2.56e14),
                                         kv.get_double("bytes_per_weight", 0.5));
  Report r("workload");
  for (const auto& row : f.rows) r.add("ops/" + row.name, row.count, "ops").anchor = row.order;
  r.add("ops/total", f.total, "ops");
  for (const auto& row : w.rows) r.add("weights/" + row.name, row.count, "weights").anchor = row.order;
  r.add("weights/total", w.total, "weights");
  r.add("weight bytes", b.weight_bytes, "bytes");
  r.add("compute time", b.compute_time_s, "s");
  r.add("weight load time", b.load_time_s, "s");
  r.add("load to compute ratio", b.ratio, "");
  r.add("balanced", b.balanced ? 1 : 0, "");
  emit_report(ctx, r);
  return kOk;
}

// Design point from the config, minus the keys `extra` names.
sysmodel::DesignPoint design_point(const config::KeyValues& kv, const std::vector<std::string>& extra) {
  config::KeyValues dp_kv;
  for (const auto& [k, v] : kv.values()) {
    if (std::find(extra.begin(), extra.end(), k) == extra.end()) dp_kv.set(k, v);
  }
  const auto keys = sysmodel::DesignPoint::keys();
  reject_unknown(dp_kv, keys);
  return sysmodel::from_config(dp_kv);
}

int cmd_model(Context& ctx) {
  emit_report(ctx, sysmodel::derive(design_point(ctx.kv, {"seed"})));
  return kOk;
}

int cmd_goldens(Context& ctx) {
  const auto r = goldens::golden_report(design_point(ctx.kv, {"seed"}));
  emit_report(ctx, r);
  if (!ctx.opt.out_path.empty()) {
    ctx.out << r.rows().size() << " rows, " << r.failures() << " failed\n";
  }
  return r.all_pass() ? kOk : kVerifyFailed;
}

int cmd_sweep(Context& ctx) {
  const auto dp = design_point(ctx.kv, {"seed", "knob", "values"});
  if (!ctx.kv.has("knob") || !ctx.kv.has("values")) throw UsageError("sweep needs knob= and values=");
  std::vector<std::string> values;
  std::stringstream ss(ctx.kv.get_string("values", ""));
  std::string v;
  while (std::getline(ss, v, ',')) {
    if (!v.empty()) values.push_back(v);
  }
  emit_report(ctx, sysmodel::knob_sweep(dp, ctx.kv.get_string("knob", ""), values));
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opt;
  std::string format = "table";
  CLI::App app{"CASCADE / CREST simulator and system model"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", opt.config_path, "key=value config file");
  auto* seed = app.add_option("--seed", opt.seed, "seed for every random draw");
  app.add_option("--set", opt.overrides, "key=value override, applied after the config file")
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("--out", opt.out_path, "output file");
  app.add_option("--format", format, "csv, json or table")->check(CLI::IsMember({"csv", "json", "table"}));
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "run a batch through a device and check it against the column oracle"},
      {"crest", "fault campaign: detect, isolate and repair injected defects"},
      {"schedule", "clock milestones of one batch pass"},
      {"workload", "transformer op and weight counts, weight-load balance"},
      {"model", "derived system figures for a design point"},
      {"goldens", "regress the published figures; exit 1 on any failure"},
      {"sweep", "re-derive the system model over knob values"}};
  for (const auto& [name, help] : commands) {
    app.add_subcommand(name, help)->callback([&opt, n = name] { opt.command = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "zlsim: " << e.what() << "\n" << app.help();
    return kUsage;
  }
  opt.seed_given = seed->count() > 0;
  opt.format = report::parse_format(format);

  try {
    Context ctx{opt, {}, fs::current_path(), out, err};
    if (!opt.config_path.empty()) {
      if (!fs::exists(opt.config_path)) throw UsageError("config not found: " + opt.config_path);
      ctx.kv = config::KeyValues::load(opt.config_path);
      ctx.base = fs::absolute(opt.config_path).parent_path();
    }
    for (const auto& s : opt.overrides) ctx.kv.apply_override(s);

    if (opt.command == "simulate") return cmd_simulate(ctx);
    if (opt.command == "crest") return cmd_crest(ctx);
    if (opt.command == "schedule") return cmd_schedule(ctx);
    if (opt.command == "workload") return cmd_workload(ctx);
    if (opt.command == "model") return cmd_model(ctx);
    if (opt.command == "goldens") return cmd_goldens(ctx);
    if (opt.command == "sweep") return cmd_sweep(ctx);
    err << "zlsim: no command\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "zlsim: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace zlsim::cli
