#include "zlsim/hilt.hpp"

#include <stdexcept>
#include <utility>

namespace zlsim::hilt {

std::int64_t HiltSpec::total_latches() const {
  std::int64_t n = 0;
  for (const auto& s : stages) n += s.latches;
  return n;
}

void HiltSpec::validate() const {
  if (stages.empty()) throw std::invalid_argument("HILT needs at least one stage");
  for (std::size_t i = 0; i + 1 < stages.size(); ++i) {
    const auto& s = stages[i];
    if (s.mux_fanout < 1 || s.latches % s.mux_fanout != 0 ||
        s.latches / s.mux_fanout != stages[i + 1].latches) {
      throw std::invalid_argument("HILT stage " + std::to_string(i) + " does not feed the next stage");
    }
  }
  if (stages.back().latches != word_bits) {
    throw std::invalid_argument("HILT interface stage must be one word wide");
  }
}

HiltSpec standard_activation_hilt() {
  return {{{131072, 16}, {8192, 16}, {512, 16}, {32, 8}, {4, 1}}, 4, HiltRole::activation};
}

HiltSpec standard_output_sum_hilt() {
  return {{{262144, 16}, {16384, 16}, {1024, 16}, {64, 8}, {8, 1}}, 8, HiltRole::output_sum};
}

HiltArea hilt_area(std::int64_t bits, double bitcell_area_um2, double overhead) {
  if (bits < 0) throw std::invalid_argument("hilt_area: negative bit count");
  if (bitcell_area_um2 <= 0.0) throw std::invalid_argument("hilt_area: bitcell area must be positive");
  if (overhead < 0.0 || overhead >= 1.0) throw std::invalid_argument("hilt_area: overhead must be in [0,1)");
  HiltArea a;
  a.bitcell_um2 = static_cast<double>(bits) * bitcell_area_um2;
  a.total_um2 = a.bitcell_um2 / (1.0 - overhead);
  return a;
}

double hilt_bitcell_area(double transistors, double density_mtr_per_mm2, double full_custom_factor) {
  if (transistors <= 0 || density_mtr_per_mm2 <= 0 || full_custom_factor <= 0) {
    throw std::invalid_argument("hilt_bitcell_area: inputs must be positive");
  }
  // MTr/mm2 is Tr/um2
  return transistors / (density_mtr_per_mm2 * full_custom_factor);
}

BroadcastTreeSpec standard_broadcast_tree() {
  BroadcastTreeSpec t;
  t.steps = {
      {1, 3, "Read MUX", 32768, 1, 131072, 0.0625, 1},
      {4, 7, "Read MUX", 2048, 1, 8192, 0.0625, 1},
      {8, 11, "Read MUX", 128, 1, 512, 0.0625, 1},
      {12, 15, "Read MUX", 8, 1, 32, 0.125, 1},
      {16, 16, "Read MUX", 1, 1, 4, 1, 1},
      {17, 17, "HILT->SLD", 1, 1, 4, 2, 1},
      {18, 18, "Broadcast", 2, 1, 8, 2, 2},
      {19, 19, "Broadcast", 4, 1, 16, 2.25, 4},
      {20, 20, "Broadcast", 8, 1, 36, 4, 9},
      {21, 21, "Broadcast", 32, 1, 132, 4, 33},
      {22, 22, "Broadcast", 128, 1, 520, 4, 130},
      {23, 23, "Broadcast", 512, 4, 2064, 4, 516},
      {24, 24, "Broadcast", 2048, 8, 8224, 4, 2056},
      {25, 25, "PE", 8192, 16, 32832, 0, 8208},
  };
  return t;
}

std::vector<PipelineStep> BroadcastTreeSpec::levels() const {
  std::vector<PipelineStep> out;
  for (const auto& s : steps) {
    if (s.phase != "Read MUX") out.push_back(s);
  }
  return out;
}

std::int64_t BroadcastTreeSpec::reach() const {
  if (steps.empty()) return 0;
  return steps.back().activations + steps.back().spare;
}

int BroadcastTreeSpec::fanout_levels() const {
  int n = 0;
  const auto lv = levels();
  for (std::size_t i = 1; i < lv.size(); ++i) {
    if (lv[i].activations > lv[i - 1].activations) ++n;
  }
  return n;
}

std::vector<int> mux_path(const HiltSpec& spec, std::int64_t index) {
  if (index < 0 || index >= spec.capacity_words()) throw std::out_of_range("HILT word index out of range");
  // mixed radix, first stage select changes fastest
  std::vector<int> fanouts;
  for (const auto& s : spec.stages) {
    if (s.mux_fanout > 1) fanouts.push_back(s.mux_fanout);
  }
  std::vector<int> sel(fanouts.size());
  std::int64_t rest = index;
  for (std::size_t i = 0; i < fanouts.size(); ++i) {
    sel[i] = static_cast<int>(rest % fanouts[i]);
    rest /= fanouts[i];
  }
  return sel;
}

HiltFifo::HiltFifo(HiltSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

void HiltFifo::load(const std::vector<std::uint64_t>& words) {
  if (static_cast<std::int64_t>(words.size()) > spec_.capacity_words()) {
    throw std::length_error("HILT overflow: " + std::to_string(words.size()) + " words, capacity " +
                            std::to_string(spec_.capacity_words()));
  }
  const std::uint64_t mask = spec_.word_bits >= 64 ? ~0ULL : ((1ULL << spec_.word_bits) - 1);
  for (auto w : words) {
    if (w & ~mask) throw std::invalid_argument("HILT word wider than word_bits");
  }
  words_ = words;
  next_ = 0;
  clock_ = 0;
}

ReadoutWord HiltFifo::read() {
  if (empty()) throw std::out_of_range("HILT read past end");
  ReadoutWord r;
  r.word = words_[next_];
  r.support_clock = clock_++;
  r.selects = mux_path(spec_, static_cast<std::int64_t>(next_));
  ++next_;
  return r;
}

std::vector<ReadoutWord> sequence_readout(const HiltSpec& spec, const std::vector<std::uint64_t>& contents) {
  HiltFifo f(spec);
  f.load(contents);
  std::vector<ReadoutWord> out;
  out.reserve(contents.size());
  while (!f.empty()) out.push_back(f.read());
  return out;
}

std::optional<SipoFifo::Wide> SipoFifo::push(std::uint8_t v) {
  buf_[fill_++] = v;
  if (fill_ < 16) return std::nullopt;
  fill_ = 0;
  return buf_;
}

}  // namespace zlsim::hilt
