#pragma once

// Cyclic redundant spare testing: compare an active column against a spare
// carrying a copy of its weights, walk the CREST muxes to find the bad CRow,
// and reroute around it through spare segments.
//
// Routing model: within every CRow logical columns keep their left-to-right
// order on physical columns, and a column moves by at most one position
// between consecutive CRows (the 3-way mux). A known-defective segment shifts
// everything to its right over by one in that CRow; neighbouring CRows ramp
// the shift in and out.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "zlsim/cascade.hpp"
#include "zlsim/fault_map.hpp"

namespace zlsim::crest {

using cascade::ActivationBatch;
using cascade::ArrayGeometry;
using cascade::ColumnRouting;
using cascade::Device;
using cascade::WeightMatrix;

struct RepairPlan {
  ColumnRouting routing;
  int comparison_column = -1;     // physical column kept back for testing; -1 if none left
  std::vector<int> mapped_out;    // logical columns dropped for lack of spares
  bool complete() const { return mapped_out.empty(); }
};

// Highest-index spare with no known defect, or -1.
int pick_comparison_column(const ArrayGeometry& g, const std::set<SegmentId>& known);

// Least order-preserving routing that avoids every known defect and the
// comparison column. Drops the highest logical columns until one fits.
RepairPlan plan_routing(const ArrayGeometry& g, const std::set<SegmentId>& known);

// Throws std::logic_error if `r` breaks the nearest-neighbour rule, maps two
// logical columns onto one segment, or uses a known defect.
void check_routing(const ArrayGeometry& g, const ColumnRouting& r, const std::set<SegmentId>& known = {});

enum class Verdict { ok, faulty };

struct TestResult {
  Verdict verdict = Verdict::ok;
  int mismatches = 0;
  int longest_run = 0;
  bool warning = false;  // mismatched, but below the threshold
};

struct TestSetupError : std::logic_error {
  using std::logic_error::logic_error;
};

struct InconsistentFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Copy `weights` (one per row) into `cmp_col`, run both paths over the
// workload and compare FP8 outputs slot by slot.
TestResult compare_paths(Device& dev, const std::vector<int>& path, int cmp_col, const ActivationBatch& workload,
                         int threshold);

// Test logical column `col` against spare `cmp_col`.
TestResult cyclic_test(Device& dev, int col, int cmp_col, const ActivationBatch& workload, int threshold = 3);

// How much to trust detour segments that have not carried a passing test.
// strict: none of them. lenient: only those in CRows with a known defect
// are suspect (defects cluster by CRow).
enum class Trust { strict, lenient };

// Probe for step k: the column's own path through CRow k, then a detour
// through neighbouring segments for the CRows below. The detour avoids the
// column, known defects and the comparison column and takes as few suspect
// segments as it can. Empty path: no detour exists.
struct Probe {
  std::vector<int> path;
  int suspect = 0;  // suspect segments on the detour
};
Probe isolation_probe(const Device& dev, int col, int k, int cmp_col, const std::set<SegmentId>& known,
                      const std::set<SegmentId>& verified = {}, Trust trust = Trust::lenient);

struct Isolation {
  int crow = -1;
  bool conclusive = false;  // the deciding probe had a clean detour
};

// Walk the probes in CRow order. strict: the first failing probe decides,
// conclusive only if its detour is clean. lenient: the first failing probe
// with a clean detour, else the first failing one. Passing probes add their
// segments to `verified` when given. Throws InconsistentFault if every
// probe passes.
Isolation locate(Device& dev, int col, int cmp_col, const std::set<SegmentId>& known, const ActivationBatch& workload,
                 int threshold, std::set<SegmentId>* verified, Trust trust);

// Returns the CRow holding the defect seen by column `col`.
int isolate(Device& dev, int col, int cmp_col, const std::set<SegmentId>& known, const ActivationBatch& workload,
            int threshold = 3);

// 1 - excess*1e-6 - mapped_out_trimeras/trimeras
double degrade(std::int64_t excess_columns, int mapped_out_trimeras = 0, int trimeras = 156);

struct LogEntry {
  enum class Kind { test_ok, test_warning, test_faulty, isolated, repaired, degraded, inconsistent };
  Kind kind;
  int column = -1;
  int crow = -1;
  int physical = -1;
};

std::string to_string(LogEntry::Kind k);

// Owns the test/repair state of one device.
class Controller {
 public:
  Controller(Device& dev, WeightMatrix logical, int threshold = 3);

  const RepairPlan& plan() const { return plan_; }
  const std::set<SegmentId>& known_defects() const { return known_; }
  // segments that have carried a passing test
  const std::set<SegmentId>& verified() const { return verified_; }
  const std::vector<LogEntry>& log() const { return log_; }
  int threshold() const { return threshold_; }

  TestResult test(int col, const ActivationBatch& workload);
  int isolate(int col, const ActivationBatch& workload);
  Isolation locate(int col, const ActivationBatch& workload, Trust trust);
  // Mark (crow, current physical column of `col`) bad and replan.
  const RepairPlan& repair(int col, int crow);

  struct SweepSummary {
    int rounds = 0;
    int faulty_tests = 0;
    int repairs = 0;
    int inconsistent = 0;
    bool clean = false;  // last round found nothing
  };
  // Test every mapped column in ascending order, repairing as faults show
  // up, until a round comes back clean or `max_rounds` is hit. A failing
  // column whose isolation is not conclusive waits until the others have
  // been tested; if none of the waiting columns can be settled, the first
  // one is isolated with lenient trust. `on_faulty` sees each failing test.
  SweepSummary sweep(const ActivationBatch& workload, int max_rounds = 0,
                     const std::function<void(int)>& on_faulty = {});

 private:
  void replan();

  Device& dev_;
  WeightMatrix logical_;
  int threshold_;
  std::set<SegmentId> known_;
  std::set<SegmentId> verified_;
  RepairPlan plan_;
  std::vector<LogEntry> log_;
};

// Sparse small activations: `zero_slots` all-zero slots then entries from
// {0, +-0.5, +-1}. Zero slots push a corrupted code straight to the output.
ActivationBatch test_workload(const ArrayGeometry& g, int slots, int zero_slots, std::uint64_t seed);

struct BistReport {
  int phases = 0;          // weight loads
  int slots_per_phase = 0;
  int min_pairs_per_pe = 0;  // distinct (activation, weight) code pairs seen by the least-covered PE
  int injected = 0;
  int detected = 0;
  double clocks = 0;        // at this geometry
  double time_s = 0;
  double coverage() const { return injected ? static_cast<double>(detected) / injected : 1.0; }
};

// Power-on self test over every physical column with direct routing. Counts
// the device's defects that sit in a column the vectors flag.
BistReport post_bist_campaign(const Device& dev);
// `count` single-defect devices, each run through the self test.
BistReport bist_fault_coverage(const ArrayGeometry& g, int count, std::uint64_t seed);

enum class Distribution { uniform, clustered };
Distribution parse_distribution(const std::string& s);
std::string to_string(Distribution d);

struct CampaignParams {
  ArrayGeometry geometry = ArrayGeometry::toy(8, 8, 32, 16, 8);
  int trials = 100;
  int defects = 1;
  Distribution distribution = Distribution::uniform;
  std::uint64_t seed = 1;
  int threshold = 3;
  int test_slots = 8;
  bool repair = true;
};

struct TrialResult {
  int trial = 0;
  int defects = 0;
  int detected = 0;
  int isolated = 0;   // known defects that are real
  int repaired = 0;   // real defects no mapped column passes through
  int misisolated = 0;
  double residual_perf = 1.0;
  bool output_match = false;  // mapped columns equal the fault-free run
};

struct CampaignResult {
  std::vector<TrialResult> trials;
  int defects = 0;
  int detected = 0;
  int isolated = 0;
  int repaired = 0;
  int misisolated = 0;
  int output_matches = 0;
  double min_residual_perf = 1.0;
};

// Defects land in active physical columns only.
std::set<SegmentId> draw_defects(const ArrayGeometry& g, int count, Distribution d, std::mt19937_64& rng);

TrialResult run_trial(const CampaignParams& p, int trial, const std::set<SegmentId>& defects, std::uint64_t seed);
CampaignResult run_campaign(const CampaignParams& p);
void write_campaign_csv(std::ostream& out, const CampaignResult& r);

}  // namespace zlsim::crest
