#pragma once

// Clock accounting for one pass of a batch through a CASCADE device.

#include <cstdint>
#include <string_view>
#include <vector>

#include "zlsim/cascade.hpp"

namespace zlsim::schedule {

enum class Merge { sequential, tree };

std::string_view to_string(Merge m);
Merge parse_merge(std::string_view s);

struct ScheduleParams {
  std::int64_t fill_depth = 25;  // clocks from HILT read to first PE op
  std::int64_t rows_per_array = 64;
  std::int64_t arrays = 384;
  std::int64_t batch_slots = 32768;
  std::int64_t writeback_clocks = 20;
  Merge merge = Merge::sequential;

  void validate() const;
  static ScheduleParams full_scale(Merge m = Merge::sequential);
  static ScheduleParams from_geometry(const cascade::ArrayGeometry& g, Merge m = Merge::sequential);
};

struct ScheduleTrace {
  std::int64_t first_compute_clock = 0;
  std::int64_t array1_done_clock = 0;
  std::int64_t batch1_done_clock = 0;
  std::int64_t last_batch_done_clock = 0;
  std::int64_t all_done_clock = 0;  // HILT to HILT
  double efficiency = 0.0;

  std::int64_t batch_done(std::int64_t k) const { return batch1_done_clock + (k - 1); }
};

// ceil(log2(n)) for n >= 1
int ceil_log2(std::int64_t n);

std::int64_t merge_latency(const ScheduleParams& p);
ScheduleTrace milestones(const ScheduleParams& p);
double efficiency(const ScheduleParams& p);

struct Throughput {
  double macs_per_s = 0.0;
  double flops_per_s = 0.0;         // 2 ops per MAC
  double sparse_flops_per_s = 0.0;  // reporting convention: 2x dense
};

// pes x clock x efficiency; pass efficiency 1.0 for peak figures.
Throughput throughput(std::int64_t pes, double core_clock_hz, double efficiency = 1.0);

// MACs for one complete batch on `trimeras` devices: slots x rows x cols x trimeras.
std::int64_t full_batch_macs(const cascade::ArrayGeometry& g, std::int64_t trimeras);

// Clock-stepped timing model: each clock moves every in-flight slot one
// stage. Returns the clock at which each slot's output sum is complete.
// Intended for toy sizes (cost is slots x stages).
std::vector<std::int64_t> simulate_clocks(const ScheduleParams& p);

}  // namespace zlsim::schedule
