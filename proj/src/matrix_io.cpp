#include "zlsim/matrix_io.hpp"

#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace zlsim::io {

using cascade::Grid;
using lowprec::Fp4;

namespace {

constexpr std::array<char, 4> kMagic{'Z', 'L', 'M', '4'};

std::uint32_t read_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) throw std::runtime_error("truncated matrix header");
  return std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
         (std::uint32_t{b[3]} << 24);
}

void write_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                     static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(b, 4);
}

}  // namespace

Grid<Fp4> read_fp4_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4) || magic != kMagic) throw std::runtime_error("bad matrix magic");
  const std::uint32_t rows = read_u32(in);
  const std::uint32_t cols = read_u32(in);
  Grid<Fp4> m(rows, cols);
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  std::string body((n + 1) / 2, '\0');
  if (!in.read(body.data(), static_cast<std::streamsize>(body.size()))) {
    throw std::runtime_error("truncated matrix body");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto byte = static_cast<unsigned char>(body[i / 2]);
    const auto code = static_cast<std::uint8_t>((i % 2 == 0) ? (byte & 0x0F) : (byte >> 4));
    m.at(i / cols, i % cols) = Fp4{code};
  }
  return m;
}

void write_fp4_binary(std::ostream& out, const Grid<Fp4>& m) {
  out.write(kMagic.data(), 4);
  write_u32(out, static_cast<std::uint32_t>(m.rows()));
  write_u32(out, static_cast<std::uint32_t>(m.cols()));
  const auto& d = m.data();
  for (std::size_t i = 0; i < d.size(); i += 2) {
    const unsigned lo = d[i].code & 0x0F;
    const unsigned hi = i + 1 < d.size() ? (d[i + 1].code & 0x0F) : 0;
    out.put(static_cast<char>(lo | (hi << 4)));
  }
}

Grid<Fp4> read_fp4_csv(std::istream& in, lowprec::Fp4Rounding mode) {
  std::vector<std::vector<Fp4>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<Fp4> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      row.push_back(lowprec::fp4_encode(v, mode));
    }
    if (!rows.empty() && row.size() != rows[0].size()) throw std::runtime_error("ragged CSV matrix");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return {};
  Grid<Fp4> m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m.at(r, c) = rows[r][c];
  }
  return m;
}

void write_fp4_csv(std::ostream& out, const Grid<Fp4>& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << lowprec::decode(m.at(r, c));
    }
    out << '\n';
  }
}

Grid<Fp4> load_fp4_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  const bool binary = in.gcount() == 4 && magic == kMagic;
  in.clear();
  in.seekg(0);
  return binary ? read_fp4_binary(in) : read_fp4_csv(in);
}

void write_sums_csv(std::ostream& out, const cascade::OutputSums& sums) {
  out << "slot,column,code,value\n";
  for (std::size_t s = 0; s < sums.sums.rows(); ++s) {
    for (std::size_t c = 0; c < sums.sums.cols(); ++c) {
      const auto v = sums.sums.at(s, c);
      out << s << ',' << c << ',' << unsigned{v.code} << ',' << lowprec::decode(v) << '\n';
    }
  }
}

}  // namespace zlsim::io
