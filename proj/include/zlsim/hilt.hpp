#pragma once

// Hierarchical integrated latch trees: staged mux memories that behave as
// large sequential-access FIFOs, plus the activation broadcast latch tree.

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace zlsim::hilt {

enum class HiltRole { activation, output_sum };

struct HiltStage {
  std::int64_t latches = 0;
  int mux_fanout = 1;  // 1 marks the interface stage
};

struct HiltSpec {
  std::vector<HiltStage> stages;
  int word_bits = 4;
  HiltRole role = HiltRole::activation;

  std::int64_t total_latches() const;
  std::int64_t storage_bits() const { return stages.empty() ? 0 : stages.front().latches; }
  std::int64_t capacity_words() const { return storage_bits() / word_bits; }
  // Throws if a stage count is not the previous one divided by its fanout or
  // the last stage is not one word wide.
  void validate() const;
};

HiltSpec standard_activation_hilt();
HiltSpec standard_output_sum_hilt();

// Area of the storage stage only. Bitcells cover `bits`; decoders and clock
// buffers take `overhead` of the finished macro, so total = bitcells / (1 - overhead).
struct HiltArea {
  double bitcell_um2 = 0.0;
  double total_um2 = 0.0;
};
HiltArea hilt_area(std::int64_t bits, double bitcell_area_um2, double overhead);
// One full-custom bitcell: transistors / (density MTr/mm2 * full-custom factor), in um2.
double hilt_bitcell_area(double transistors, double density_mtr_per_mm2, double full_custom_factor);

// One line of the activation pipeline table (HILT read through PE).
struct PipelineStep {
  int first_clock = 0;
  int last_clock = 0;
  std::string phase;
  std::int64_t activations = 0;
  int spare = 0;
  std::int64_t bits = 0;
  double fanout = 0.0;
  std::int64_t clock_gen = 0;
};

struct BroadcastTreeSpec {
  std::vector<PipelineStep> steps;

  // Steps from the HILT-to-SLD hop to the PE row.
  std::vector<PipelineStep> levels() const;
  // Paths arriving at the PE row, spares included.
  std::int64_t reach() const;
  int depth_clocks() const { return steps.empty() ? 0 : steps.back().last_clock; }
  // Number of replicating hops between the single SLD input and the PEs.
  int fanout_levels() const;
};

BroadcastTreeSpec standard_broadcast_tree();

// Mux select at each fanout stage for word `index`, first stage first.
std::vector<int> mux_path(const HiltSpec& spec, std::int64_t index);

struct ReadoutWord {
  std::uint64_t word = 0;
  std::int64_t support_clock = 0;
  std::vector<int> selects;
};

class HiltFifo {
 public:
  explicit HiltFifo(HiltSpec spec);

  // Replaces the contents; throws std::length_error above capacity.
  void load(const std::vector<std::uint64_t>& words);
  bool empty() const { return next_ >= words_.size(); }
  std::size_t size() const { return words_.size() - next_; }
  ReadoutWord read();
  const HiltSpec& spec() const { return spec_; }

 private:
  HiltSpec spec_;
  std::vector<std::uint64_t> words_;
  std::size_t next_ = 0;
  std::int64_t clock_ = 0;
};

std::vector<ReadoutWord> sequence_readout(const HiltSpec& spec, const std::vector<std::uint64_t>& contents);

// 8-bit words in, 128-bit words out; byte 0 is the oldest input.
class SipoFifo {
 public:
  using Wide = std::array<std::uint8_t, 16>;
  std::optional<Wide> push(std::uint8_t v);
  int pending() const { return fill_; }

 private:
  Wide buf_{};
  int fill_ = 0;
};

}  // namespace zlsim::hilt
