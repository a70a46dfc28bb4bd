#include "zlsim/schedule.hpp"

#include <stdexcept>
#include <string>

namespace zlsim::schedule {

std::string_view to_string(Merge m) { return m == Merge::sequential ? "sequential" : "tree"; }

Merge parse_merge(std::string_view s) {
  if (s == "sequential") return Merge::sequential;
  if (s == "tree") return Merge::tree;
  throw std::invalid_argument("unknown merge mode '" + std::string(s) + "'");
}

void ScheduleParams::validate() const {
  if (fill_depth < 1 || rows_per_array < 1 || arrays < 1 || batch_slots < 1 || writeback_clocks < 0) {
    throw std::invalid_argument("schedule parameters must be positive");
  }
}

ScheduleParams ScheduleParams::full_scale(Merge m) {
  ScheduleParams p;
  p.merge = m;
  return p;
}

ScheduleParams ScheduleParams::from_geometry(const cascade::ArrayGeometry& g, Merge m) {
  ScheduleParams p;
  p.rows_per_array = g.rows_per_array;
  p.arrays = g.arrays;
  p.batch_slots = g.batch_slots;
  p.merge = m;
  return p;
}

int ceil_log2(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("ceil_log2 of non-positive value");
  int k = 0;
  while ((std::int64_t{1} << k) < n) ++k;
  return k;
}

std::int64_t merge_latency(const ScheduleParams& p) {
  return p.merge == Merge::sequential ? p.arrays : ceil_log2(p.arrays);
}

ScheduleTrace milestones(const ScheduleParams& p) {
  p.validate();
  ScheduleTrace t;
  t.first_compute_clock = p.fill_depth;
  t.array1_done_clock = p.fill_depth + p.rows_per_array - 1;
  t.batch1_done_clock = t.array1_done_clock + merge_latency(p);
  t.last_batch_done_clock = t.batch_done(p.batch_slots);
  t.all_done_clock = p.batch_slots + t.array1_done_clock + merge_latency(p) + p.writeback_clocks;
  t.efficiency = static_cast<double>(p.batch_slots) / static_cast<double>(t.all_done_clock);
  return t;
}

double efficiency(const ScheduleParams& p) { return milestones(p).efficiency; }

Throughput throughput(std::int64_t pes, double core_clock_hz, double eff) {
  Throughput t;
  t.macs_per_s = static_cast<double>(pes) * core_clock_hz * eff;
  t.flops_per_s = 2.0 * t.macs_per_s;
  t.sparse_flops_per_s = 2.0 * t.flops_per_s;
  return t;
}

std::int64_t full_batch_macs(const cascade::ArrayGeometry& g, std::int64_t trimeras) {
  return static_cast<std::int64_t>(g.batch_slots) * g.total_rows() * g.active_columns * trimeras;
}

std::vector<std::int64_t> simulate_clocks(const ScheduleParams& p) {
  p.validate();
  struct InFlight {
    std::int64_t slot;
    std::int64_t row = 0;       // next PE row inside the array segment
    std::int64_t partials = 0;  // partial sums still to be merged
    std::int64_t merges = 0;
  };
  std::vector<std::int64_t> done(static_cast<std::size_t>(p.batch_slots), -1);
  std::vector<InFlight> live;
  std::int64_t issued = 0;
  std::int64_t finished = 0;
  // Clock numbering starts at 1 with the first HILT read; the first PE op
  // happens on clock fill_depth.
  for (std::int64_t clock = 1; finished < p.batch_slots; ++clock) {
    // one new slot reaches the top PE row each clock once the pipe is full
    if (clock >= p.fill_depth && issued < p.batch_slots) live.push_back({issued++});
    for (auto it = live.begin(); it != live.end();) {
      auto& f = *it;
      bool complete = false;
      if (f.row < p.rows_per_array) {
        // every array's segment multiplies the broadcast activation in parallel
        ++f.row;
        if (f.row == p.rows_per_array) {
          f.partials = p.arrays;
          complete = p.merge == Merge::tree && p.arrays == 1;
        }
      } else if (p.merge == Merge::sequential) {
        // arrays-1 inter-array adds, then the add into the output sum
        ++f.merges;
        complete = f.merges == p.arrays;
      } else {
        // one tree level per clock; the root feeds the output-sum adder directly
        f.partials = (f.partials + 1) / 2;
        complete = f.partials == 1;
      }
      if (complete) {
        done[static_cast<std::size_t>(f.slot)] = clock;
        ++finished;
        it = live.erase(it);
      } else {
        ++it;
      }
    }
  }
  return done;
}

}  // namespace zlsim::schedule
