#include "zlsim/crest.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "zlsim/report.hpp"
#include "zlsim/schedule.hpp"

namespace zlsim::crest {

using cascade::Fp4;
using cascade::Fp8;

namespace {

std::vector<Fp4> weights_along(const Device& dev, const std::vector<int>& path) {
  const auto& g = dev.geometry;
  std::vector<Fp4> w(static_cast<std::size_t>(g.total_rows()));
  for (int k = 0; k < g.arrays; ++k) {
    for (int i = 0; i < g.rows_per_array; ++i) {
      const std::size_t r = static_cast<std::size_t>(k) * g.rows_per_array + i;
      w[r] = dev.weights.at(r, static_cast<std::size_t>(path[k]));
    }
  }
  return w;
}

// Grid of blocked segments, [crow * columns + col].
std::vector<char> blocked_grid(const ArrayGeometry& g, const std::set<SegmentId>& known, int cmp) {
  const int cols = g.total_columns();
  std::vector<char> b(static_cast<std::size_t>(g.arrays) * cols, 0);
  for (const auto& s : known) b[static_cast<std::size_t>(s.crow) * cols + s.column] = 1;
  if (cmp >= 0) {
    for (int k = 0; k < g.arrays; ++k) b[static_cast<std::size_t>(k) * cols + cmp] = 1;
  }
  return b;
}

// Least fixpoint of: leftmost unblocked position above both the previous
// logical column and the neighbours' shifts minus one. False if it runs off
// the right edge.
bool pack(const ArrayGeometry& g, const std::vector<char>& blocked, int logical, std::vector<std::vector<int>>& s) {
  const int A = g.arrays;
  const int P = g.total_columns();
  s.assign(A, std::vector<int>(logical, 0));
  if (logical == 0) return true;
  bool changed = true;
  auto place = [&](int k) {
    const char* row = blocked.data() + static_cast<std::size_t>(k) * P;
    int prev = -1;
    for (int c = 0; c < logical; ++c) {
      int lo = std::max(prev + 1, s[k][c]);
      if (k > 0) lo = std::max(lo, s[k - 1][c] - 1);
      if (k + 1 < A) lo = std::max(lo, s[k + 1][c] - 1);
      while (lo < P && row[lo]) ++lo;
      if (lo >= P) return false;
      if (lo != s[k][c]) {
        s[k][c] = lo;
        changed = true;
      }
      prev = lo;
    }
    return true;
  };
  while (changed) {
    changed = false;
    for (int k = 0; k < A; ++k) {
      if (!place(k)) return false;
    }
    for (int k = A - 1; k >= 0; --k) {
      if (!place(k)) return false;
    }
  }
  return true;
}

}  // namespace

int pick_comparison_column(const ArrayGeometry& g, const std::set<SegmentId>& known) {
  for (int p = g.total_columns() - 1; p >= g.active_columns; --p) {
    const bool bad = std::any_of(known.begin(), known.end(), [&](const SegmentId& s) { return s.column == p; });
    if (!bad) return p;
  }
  return -1;
}

RepairPlan plan_routing(const ArrayGeometry& g, const std::set<SegmentId>& known) {
  g.validate();
  for (const auto& s : known) {
    if (s.crow < 0 || s.crow >= g.arrays || s.column < 0 || s.column >= g.total_columns()) {
      throw std::out_of_range("known defect outside the device");
    }
  }
  RepairPlan plan;
  plan.comparison_column = pick_comparison_column(g, known);
  const auto blocked = blocked_grid(g, known, plan.comparison_column);
  std::vector<std::vector<int>> s;
  int logical = g.active_columns;
  while (!pack(g, blocked, logical, s)) --logical;
  plan.routing.phys.assign(g.arrays, std::vector<int>(g.active_columns, ColumnRouting::kUnmapped));
  for (int k = 0; k < g.arrays; ++k) {
    for (int c = 0; c < logical; ++c) plan.routing.phys[k][c] = s[k][c];
  }
  for (int c = logical; c < g.active_columns; ++c) plan.mapped_out.push_back(c);
  return plan;
}

void check_routing(const ArrayGeometry& g, const ColumnRouting& r, const std::set<SegmentId>& known) {
  if (r.crows() != g.arrays || r.logical_columns() != g.active_columns) {
    throw std::logic_error("routing shape does not match geometry");
  }
  for (int k = 0; k < g.arrays; ++k) {
    std::vector<char> used(static_cast<std::size_t>(g.total_columns()), 0);
    for (int c = 0; c < g.active_columns; ++c) {
      const int p = r.phys[k][c];
      const bool mapped = r.phys[0][c] != ColumnRouting::kUnmapped;
      if (!mapped) {
        if (p != ColumnRouting::kUnmapped) throw std::logic_error("partially mapped column");
        continue;
      }
      if (p < 0 || p >= g.total_columns()) throw std::logic_error("routing outside the device");
      if (used[p]) throw std::logic_error("two columns share a segment");
      used[p] = 1;
      if (known.count({k, p})) throw std::logic_error("routing uses a known defect");
      if (k > 0 && std::abs(p - r.phys[k - 1][c]) > 1) throw std::logic_error("routing jumps more than one column");
    }
  }
}

TestResult compare_paths(Device& dev, const std::vector<int>& path, int cmp_col, const ActivationBatch& workload,
                         int threshold) {
  const auto& g = dev.geometry;
  if (threshold < 1) throw std::invalid_argument("threshold must be >= 1");
  if (cmp_col < 0 || cmp_col >= g.total_columns()) throw TestSetupError("comparison column outside the device");
  if (dev.faults.column_has_defect(cmp_col)) throw TestSetupError("comparison column is defective");
  const auto w = weights_along(dev, path);
  for (std::size_t r = 0; r < w.size(); ++r) dev.weights.at(r, static_cast<std::size_t>(cmp_col)) = w[r];
  const std::vector<int> ref(static_cast<std::size_t>(g.arrays), cmp_col);
  const Fp8 bias = lowprec::fp8_zero(dev.format);
  TestResult t;
  int run = 0;
  for (std::size_t s = 0; s < workload.rows(); ++s) {
    const int slot = static_cast<int>(s);
    const Fp8 a = cascade::trace_path(dev, path, w, workload, slot, bias);
    const Fp8 b = cascade::trace_path(dev, ref, w, workload, slot, bias);
    if (a.code != b.code) {
      ++t.mismatches;
      t.longest_run = std::max(t.longest_run, ++run);
    } else {
      run = 0;
    }
  }
  if (t.longest_run >= threshold) {
    t.verdict = Verdict::faulty;
  } else if (t.mismatches > 0) {
    t.warning = true;
  }
  return t;
}

TestResult cyclic_test(Device& dev, int col, int cmp_col, const ActivationBatch& workload, int threshold) {
  if (col < 0 || col >= dev.geometry.active_columns) throw std::out_of_range("column under test out of range");
  if (!dev.routing.mapped(col)) throw std::invalid_argument("column under test is mapped out");
  const auto path = dev.routing.path(col);
  if (std::find(path.begin(), path.end(), cmp_col) != path.end()) {
    throw TestSetupError("comparison column is on the tested path");
  }
  return compare_paths(dev, path, cmp_col, workload, threshold);
}

Probe isolation_probe(const Device& dev, int col, int k, int cmp_col, const std::set<SegmentId>& known,
                      const std::set<SegmentId>& verified, Trust trust) {
  const auto& g = dev.geometry;
  const int A = g.arrays;
  const int P = g.total_columns();
  Probe probe;
  probe.path = dev.routing.path(col);
  auto& path = probe.path;
  if (k >= A - 1) return probe;
  std::vector<char> crow_has_known(static_cast<std::size_t>(A), 0);
  for (const auto& s : known) crow_has_known[s.crow] = 1;
  auto ok = [&](int j, int q) { return q >= 0 && q < P && q != path[j] && q != cmp_col && !known.count({j, q}); };
  auto suspect = [&](int j, int q) {
    if (verified.count({j, q})) return 0;
    return trust == Trust::strict || crow_has_known[j] ? 1 : 0;
  };
  // cost[j][q]: fewest suspect segments on a legal detour from (j, q) to the
  // last CRow; kNone if there is none
  constexpr int kNone = 1 << 29;
  std::vector<std::vector<int>> cost(A, std::vector<int>(P, kNone));
  for (int q = 0; q < P; ++q) {
    if (ok(A - 1, q)) cost[A - 1][q] = suspect(A - 1, q);
  }
  for (int j = A - 2; j > k; --j) {
    for (int q = 0; q < P; ++q) {
      if (!ok(j, q)) continue;
      int best = kNone;
      for (int d = -1; d <= 1; ++d) {
        if (q + d >= 0 && q + d < P) best = std::min(best, cost[j + 1][q + d]);
      }
      if (best < kNone) cost[j][q] = best + suspect(j, q);
    }
  }
  auto score = [&](int j, int q) {
    if (q == path[j] - 1) return 0;
    if (q == path[j] + 1) return 1;
    return 2 + std::abs(q - path[j]);
  };
  int at = path[k];
  for (int j = k + 1; j < A; ++j) {
    int best = -1;
    for (int d = -1; d <= 1; ++d) {
      const int q = at + d;
      if (q < 0 || q >= P || cost[j][q] >= kNone) continue;
      if (best < 0 || cost[j][q] < cost[j][best] || (cost[j][q] == cost[j][best] && score(j, q) < score(j, best))) {
        best = q;
      }
    }
    if (best < 0) return {};
    if (j == k + 1) probe.suspect = cost[j][best];
    path[j] = best;
    at = best;
  }
  return probe;
}

Isolation locate(Device& dev, int col, int cmp_col, const std::set<SegmentId>& known, const ActivationBatch& workload,
                 int threshold, std::set<SegmentId>* verified, Trust trust) {
  static const std::set<SegmentId> none;
  Isolation first;
  for (int k = 0; k < dev.geometry.arrays; ++k) {
    const auto probe = isolation_probe(dev, col, k, cmp_col, known, verified ? *verified : none, trust);
    if (probe.path.empty()) continue;
    if (compare_paths(dev, probe.path, cmp_col, workload, threshold).verdict == Verdict::faulty) {
      const bool clean = probe.suspect == 0;
      if (trust == Trust::strict) return {k, clean};
      if (clean) return {k, true};
      if (first.crow < 0) first = {k, false};
    } else if (verified) {
      for (int j = 0; j < dev.geometry.arrays; ++j) verified->insert({j, probe.path[j]});
    }
  }
  if (first.crow >= 0) return first;
  throw InconsistentFault("column " + std::to_string(col) + " passed every isolation probe");
}

int isolate(Device& dev, int col, int cmp_col, const std::set<SegmentId>& known, const ActivationBatch& workload,
            int threshold) {
  return locate(dev, col, cmp_col, known, workload, threshold, nullptr, Trust::lenient).crow;
}

double degrade(std::int64_t excess_columns, int mapped_out_trimeras, int trimeras) {
  if (excess_columns < 0 || mapped_out_trimeras < 0) throw std::invalid_argument("negative loss count");
  if (trimeras < 1) throw std::invalid_argument("trimeras must be >= 1");
  return 1.0 - static_cast<double>(excess_columns) * 1e-6 - static_cast<double>(mapped_out_trimeras) / trimeras;
}

std::string to_string(LogEntry::Kind k) {
  switch (k) {
    case LogEntry::Kind::test_ok: return "ok";
    case LogEntry::Kind::test_warning: return "warning";
    case LogEntry::Kind::test_faulty: return "faulty";
    case LogEntry::Kind::isolated: return "isolated";
    case LogEntry::Kind::repaired: return "repaired";
    case LogEntry::Kind::degraded: return "degraded";
    case LogEntry::Kind::inconsistent: return "inconsistent";
  }
  return "?";
}

Controller::Controller(Device& dev, WeightMatrix logical, int threshold)
    : dev_(dev), logical_(std::move(logical)), threshold_(threshold) {
  if (threshold < 1) throw std::invalid_argument("threshold must be >= 1");
  replan();
}

void Controller::replan() {
  const std::size_t before = plan_.mapped_out.size();
  plan_ = plan_routing(dev_.geometry, known_);
  cascade::place_logical(dev_, logical_, plan_.routing);
  for (std::size_t i = before; i < plan_.mapped_out.size(); ++i) {
    log_.push_back({LogEntry::Kind::degraded, plan_.mapped_out[i], -1, -1});
  }
}

TestResult Controller::test(int col, const ActivationBatch& workload) {
  if (plan_.comparison_column < 0) throw TestSetupError("no spare left for comparison");
  const auto t = cyclic_test(dev_, col, plan_.comparison_column, workload, threshold_);
  if (t.verdict == Verdict::ok) {
    for (int k = 0; k < dev_.geometry.arrays; ++k) verified_.insert({k, plan_.routing.phys[k][col]});
  }
  const auto kind = t.verdict == Verdict::faulty ? LogEntry::Kind::test_faulty
                    : t.warning                  ? LogEntry::Kind::test_warning
                                                 : LogEntry::Kind::test_ok;
  log_.push_back({kind, col, -1, -1});
  return t;
}

Isolation Controller::locate(int col, const ActivationBatch& workload, Trust trust) {
  const auto iso = crest::locate(dev_, col, plan_.comparison_column, known_, workload, threshold_, &verified_, trust);
  log_.push_back({LogEntry::Kind::isolated, col, iso.crow, plan_.routing.phys[iso.crow][col]});
  return iso;
}

int Controller::isolate(int col, const ActivationBatch& workload) { return locate(col, workload, Trust::lenient).crow; }

const RepairPlan& Controller::repair(int col, int crow) {
  const int p = plan_.routing.phys.at(crow).at(col);
  if (p == ColumnRouting::kUnmapped) throw std::invalid_argument("cannot repair a mapped-out column");
  known_.insert({crow, p});
  log_.push_back({LogEntry::Kind::repaired, col, crow, p});
  replan();
  return plan_;
}

Controller::SweepSummary Controller::sweep(const ActivationBatch& workload, int max_rounds,
                                          const std::function<void(int)>& on_faulty) {
  const auto& g = dev_.geometry;
  if (max_rounds <= 0) max_rounds = g.spare_columns + 4;
  const int retries = g.spare_columns + 2;
  SweepSummary sum;
  bool found = false;

  enum class Outcome { passed, waiting, gave_up };
  // Test `col` until it passes; repairs only on conclusive isolation unless
  // `force` is set.
  auto settle = [&](int col, bool force) {
    for (int attempt = 0; plan_.routing.mapped(col); ++attempt) {
      if (plan_.comparison_column < 0) return Outcome::gave_up;
      if (test(col, workload).verdict == Verdict::ok) return Outcome::passed;
      found = true;
      ++sum.faulty_tests;
      if (on_faulty) on_faulty(col);
      if (attempt >= retries) return Outcome::gave_up;
      Isolation iso;
      try {
        iso = locate(col, workload, force ? Trust::lenient : Trust::strict);
      } catch (const InconsistentFault&) {
        log_.push_back({LogEntry::Kind::inconsistent, col, -1, -1});
        ++sum.inconsistent;
        return Outcome::gave_up;
      }
      if (!iso.conclusive && !force) return Outcome::waiting;
      force = false;
      repair(col, iso.crow);
      ++sum.repairs;
    }
    return Outcome::passed;
  };

  while (sum.rounds < max_rounds) {
    ++sum.rounds;
    found = false;
    std::vector<int> waiting;
    for (int col = 0; col < g.active_columns; ++col) {
      if (plan_.comparison_column < 0) return sum;
      if (settle(col, false) == Outcome::waiting) waiting.push_back(col);
    }
    while (!waiting.empty()) {
      std::vector<int> still;
      for (int col : waiting) {
        if (settle(col, false) == Outcome::waiting) still.push_back(col);
      }
      if (still.size() == waiting.size()) {
        settle(still.front(), true);
        still.erase(still.begin());
      }
      waiting = std::move(still);
    }
    if (!found) {
      sum.clean = true;
      break;
    }
  }
  return sum;
}

ActivationBatch test_workload(const ArrayGeometry& g, int slots, int zero_slots, std::uint64_t seed) {
  if (slots < 1 || zero_slots < 0 || zero_slots > slots) throw std::invalid_argument("bad test workload shape");
  ActivationBatch a(static_cast<std::size_t>(slots), static_cast<std::size_t>(g.total_rows()));
  std::mt19937_64 rng(seed);
  // 0, +0.5, -0.5, +1, -1
  static const std::uint8_t codes[] = {0x0, 0x1, 0x9, 0x2, 0xA};
  std::uniform_int_distribution<int> pick(0, 4);
  std::bernoulli_distribution live(0.25);
  for (int s = zero_slots; s < slots; ++s) {
    for (int r = 0; r < g.total_rows(); ++r) {
      if (live(rng)) a.at(s, r) = Fp4{codes[pick(rng)]};
    }
  }
  return a;
}

namespace {

constexpr int kCodes = 16;

Fp4 bist_weight(int phase, std::size_t r, int p) { return Fp4{static_cast<std::uint8_t>((phase + r + p) % kCodes)}; }

ActivationBatch bist_vectors(const ArrayGeometry& g) {
  ActivationBatch a(kCodes + 1, static_cast<std::size_t>(g.total_rows()));
  for (int s = 0; s < kCodes; ++s) {
    for (int r = 0; r < g.total_rows(); ++r) a.at(s, r) = Fp4{static_cast<std::uint8_t>((s + r) % kCodes)};
  }
  return a;  // last slot stays all-zero
}

}  // namespace

BistReport post_bist_campaign(const Device& dev) {
  const auto& g = dev.geometry;
  const auto acts = bist_vectors(g);
  const Fp8 bias = lowprec::fp8_zero(dev.format);
  BistReport rep;
  rep.phases = kCodes;
  rep.slots_per_phase = static_cast<int>(acts.rows());

  // every PE sees (s + r, phase + r + p): all 256 pairs over the phases
  rep.min_pairs_per_pe = kCodes * kCodes;
  for (int r = 0; r < g.total_rows(); ++r) {
    for (int p = 0; p < g.total_columns(); ++p) {
      std::vector<char> seen(kCodes * kCodes, 0);
      for (int v = 0; v < kCodes; ++v) {
        const int w = bist_weight(v, static_cast<std::size_t>(r), p).code;
        for (std::size_t s = 0; s < acts.rows(); ++s) seen[acts.at(s, r).code * kCodes + w] = 1;
      }
      rep.min_pairs_per_pe = std::min(rep.min_pairs_per_pe, static_cast<int>(std::count(seen.begin(), seen.end(), 1)));
    }
  }

  std::vector<char> flagged(static_cast<std::size_t>(g.total_columns()), 0);
  std::vector<Fp4> w(static_cast<std::size_t>(g.total_rows()));
  std::vector<Fp4> a(w.size());
  for (int p = 0; p < g.total_columns(); ++p) {
    if (!dev.faults.column_has_defect(p) && dev.faults.transients().empty()) continue;  // fault-free: outputs match
    const std::vector<int> path(static_cast<std::size_t>(g.arrays), p);
    for (int v = 0; v < kCodes && !flagged[p]; ++v) {
      for (std::size_t r = 0; r < w.size(); ++r) w[r] = bist_weight(v, r, p);
      for (std::size_t s = 0; s < acts.rows() && !flagged[p]; ++s) {
        for (std::size_t r = 0; r < a.size(); ++r) a[r] = acts.at(s, r);
        const Fp8 want = cascade::reference_column_oracle(w, a, bias);
        const Fp8 got = cascade::trace_path(dev, path, w, acts, static_cast<int>(s), bias);
        if (want.code != got.code) flagged[p] = 1;
      }
    }
  }
  for (const auto& d : dev.faults.defects()) {
    ++rep.injected;
    rep.detected += flagged[d.column];
  }
  auto sp = schedule::ScheduleParams::from_geometry(g);
  sp.batch_slots = rep.slots_per_phase;
  rep.clocks = static_cast<double>(rep.phases) * static_cast<double>(schedule::milestones(sp).all_done_clock);
  rep.time_s = rep.clocks / g.core_clock_hz;
  return rep;
}

BistReport bist_fault_coverage(const ArrayGeometry& g, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> crow(0, g.arrays - 1);
  std::uniform_int_distribution<int> col(0, g.total_columns() - 1);
  BistReport total;
  for (int i = 0; i < count; ++i) {
    Device dev(g);
    dev.faults.add_defect({crow(rng), col(rng)});
    const auto r = post_bist_campaign(dev);
    if (i == 0) total = r;
    else {
      total.injected += r.injected;
      total.detected += r.detected;
    }
  }
  if (count == 0) total = post_bist_campaign(Device(g));
  return total;
}

Distribution parse_distribution(const std::string& s) {
  if (s == "uniform") return Distribution::uniform;
  if (s == "clustered") return Distribution::clustered;
  throw std::invalid_argument("unknown defect distribution '" + s + "'");
}

std::string to_string(Distribution d) { return d == Distribution::uniform ? "uniform" : "clustered"; }

std::set<SegmentId> draw_defects(const ArrayGeometry& g, int count, Distribution d, std::mt19937_64& rng) {
  if (count < 0) throw std::invalid_argument("defect count must be >= 0");
  std::set<SegmentId> out;
  if (count == 0) return out;
  if (d == Distribution::clustered) {
    if (count > g.active_columns) throw std::invalid_argument("cluster wider than the active columns");
    const int crow = std::uniform_int_distribution<int>(0, g.arrays - 1)(rng);
    const int start = std::uniform_int_distribution<int>(0, g.active_columns - count)(rng);
    for (int i = 0; i < count; ++i) out.insert({crow, start + i});
    return out;
  }
  if (static_cast<std::int64_t>(count) > static_cast<std::int64_t>(g.arrays) * g.active_columns) {
    throw std::invalid_argument("more defects than active segments");
  }
  std::uniform_int_distribution<int> crow(0, g.arrays - 1);
  std::uniform_int_distribution<int> col(0, g.active_columns - 1);
  while (static_cast<int>(out.size()) < count) out.insert({crow(rng), col(rng)});
  return out;
}

TrialResult run_trial(const CampaignParams& p, int trial, const std::set<SegmentId>& defects, std::uint64_t seed) {
  const auto& g = p.geometry;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> code(0, 15);
  WeightMatrix logical(static_cast<std::size_t>(g.total_rows()), static_cast<std::size_t>(g.active_columns));
  for (std::size_t r = 0; r < logical.rows(); ++r) {
    for (std::size_t c = 0; c < logical.cols(); ++c) logical.at(r, c) = Fp4{static_cast<std::uint8_t>(code(rng))};
  }
  ActivationBatch eval(static_cast<std::size_t>(g.batch_slots), static_cast<std::size_t>(g.total_rows()));
  for (std::size_t s = 0; s < eval.rows(); ++s) {
    for (std::size_t r = 0; r < eval.cols(); ++r) eval.at(s, r) = Fp4{static_cast<std::uint8_t>(code(rng))};
  }
  const auto workload = test_workload(g, std::max(p.test_slots, p.threshold), p.threshold, rng());

  Device dev(g);
  for (const auto& d : defects) dev.faults.add_defect(d);
  Controller ctl(dev, logical, p.threshold);

  TrialResult t;
  t.trial = trial;
  t.defects = static_cast<int>(defects.size());
  std::set<SegmentId> seen;
  auto note_detected = [&](int col) {
    for (int k = 0; k < g.arrays; ++k) {
      const SegmentId s{k, ctl.plan().routing.phys[k][col]};
      if (defects.count(s)) seen.insert(s);
    }
  };

  if (p.repair) {
    ctl.sweep(workload, 0, note_detected);
  } else {
    for (int col = 0; col < g.active_columns; ++col) {
      if (ctl.test(col, workload).verdict == Verdict::faulty) note_detected(col);
    }
  }

  t.detected = static_cast<int>(seen.size());
  for (const auto& k : ctl.known_defects()) {
    if (defects.count(k)) ++t.isolated;
    else ++t.misisolated;
  }
  const auto& routing = ctl.plan().routing;
  for (const auto& d : defects) {
    const auto& row = routing.phys[d.crow];
    if (std::find(row.begin(), row.end(), d.column) == row.end()) ++t.repaired;
  }
  t.residual_perf = degrade(static_cast<std::int64_t>(ctl.plan().mapped_out.size()));

  Device clean(g);
  cascade::place_logical(clean, logical, ColumnRouting::direct(g));
  const auto bias = cascade::zero_bias(g, dev.format);
  const auto want = cascade::run_batch(clean, eval, bias);
  const auto got = cascade::run_batch(dev, eval, bias);
  t.output_match = true;
  for (std::size_t s = 0; s < eval.rows() && t.output_match; ++s) {
    for (int c = 0; c < g.active_columns; ++c) {
      if (got.mapped_out[c]) continue;
      if (got.sums.at(s, c).code != want.sums.at(s, c).code) {
        t.output_match = false;
        break;
      }
    }
  }
  return t;
}

CampaignResult run_campaign(const CampaignParams& p) {
  p.geometry.validate();
  if (p.trials < 0) throw std::invalid_argument("trials must be >= 0");
  std::mt19937_64 rng(p.seed);
  CampaignResult out;
  for (int i = 0; i < p.trials; ++i) {
    const auto defects = draw_defects(p.geometry, p.defects, p.distribution, rng);
    const auto t = run_trial(p, i, defects, rng());
    out.defects += t.defects;
    out.detected += t.detected;
    out.isolated += t.isolated;
    out.repaired += t.repaired;
    out.misisolated += t.misisolated;
    out.output_matches += t.output_match ? 1 : 0;
    out.min_residual_perf = std::min(out.min_residual_perf, t.residual_perf);
    out.trials.push_back(t);
  }
  return out;
}

void write_campaign_csv(std::ostream& out, const CampaignResult& r) {
  out << "trial,defects,detected,isolated,repaired,residual_perf,misisolated,output_match\n";
  for (const auto& t : r.trials) {
    out << t.trial << ',' << t.defects << ',' << t.detected << ',' << t.isolated << ',' << t.repaired << ','
        << report::format_number(t.residual_perf) << ',' << t.misisolated << ',' << (t.output_match ? 1 : 0)
        << '\n';
  }
  out << "total," << r.defects << ',' << r.detected << ',' << r.isolated << ',' << r.repaired << ','
      << report::format_number(r.min_residual_perf) << ',' << r.misisolated << ',' << r.output_matches << '\n';
}

}  // namespace zlsim::crest
