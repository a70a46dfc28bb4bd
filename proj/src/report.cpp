#include "zlsim/report.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace zlsim::report {

bool Tolerance::accepts(double value, double expected) const {
  switch (kind) {
    case TolKind::exact:
      return value == expected;
    case TolKind::relative:
      if (expected == 0.0) return std::fabs(value) <= amount;
      return std::fabs(value - expected) <= amount * std::fabs(expected);
    case TolKind::absolute:
      return std::fabs(value - expected) <= amount;
    case TolKind::at_most:
      return value <= expected;
    case TolKind::below:
      return value < expected;
  }
  return false;
}

std::string Tolerance::describe() const {
  std::ostringstream s;
  switch (kind) {
    case TolKind::exact: return "exact";
    case TolKind::relative: s << "+-" << format_number(amount * 100.0) << "%"; break;
    case TolKind::absolute: s << "+-" << format_number(amount); break;
    case TolKind::at_most: return "<=";
    case TolKind::below: return "<";
  }
  return s.str();
}

Row& Report::add(std::string name, double value, std::string units, std::string anchor) {
  rows_.push_back({std::move(name), value, std::move(units), std::nullopt, {}, std::move(anchor)});
  return rows_.back();
}

Row& Report::check(std::string name, double value, std::string units, double expected, Tolerance tol,
                   std::string anchor) {
  rows_.push_back({std::move(name), value, std::move(units), expected, tol, std::move(anchor)});
  return rows_.back();
}

void Report::append(const Report& other) { rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end()); }

const Row& Report::row(std::string_view name) const {
  for (const auto& r : rows_) {
    if (r.name == name) return r;
  }
  throw std::out_of_range("no report row '" + std::string(name) + "'");
}

std::size_t Report::failures() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.pass() ? 0 : 1;
  return n;
}

Format parse_format(std::string_view s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  if (s == "table") return Format::table;
  throw std::invalid_argument("unknown format '" + std::string(s) + "'");
}

std::string format_number(double v) {
  if (v == 0.0) return "0";
  std::ostringstream s;
  s.imbue(std::locale::classic());
  const double a = std::fabs(v);
  if (a == std::floor(a) && a < 1e15) {
    s << std::fixed << std::setprecision(0) << v;
  } else {
    s << std::setprecision(10) << v;
  }
  return s.str();
}

namespace {

const char* verdict(const Row& r) {
  if (!r.checked()) return "INFO";
  return r.pass() ? "PASS" : "FAIL";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write(std::ostream& out, const Report& r, Format f) {
  switch (f) {
    case Format::csv: {
      out << "name,value,units,expected,tolerance,verdict,anchor\n";
      for (const auto& row : r.rows()) {
        out << csv_field(row.name) << ',' << format_number(row.value) << ',' << csv_field(row.units) << ','
            << (row.expected ? format_number(*row.expected) : "") << ','
            << (row.expected ? row.tolerance.describe() : "") << ',' << verdict(row) << ','
            << csv_field(row.anchor) << '\n';
      }
      break;
    }
    case Format::json: {
      nlohmann::ordered_json j;
      j["title"] = r.title();
      j["failures"] = r.failures();
      auto& rows = j["rows"] = nlohmann::ordered_json::array();
      for (const auto& row : r.rows()) {
        nlohmann::ordered_json e;
        e["name"] = row.name;
        e["value"] = row.value;
        e["units"] = row.units;
        if (row.expected) {
          e["expected"] = *row.expected;
          e["tolerance"] = row.tolerance.describe();
        }
        e["verdict"] = verdict(row);
        e["anchor"] = row.anchor;
        rows.push_back(std::move(e));
      }
      out << j.dump(2) << '\n';
      break;
    }
    case Format::table: {
      std::size_t wn = 4, wv = 5;
      for (const auto& row : r.rows()) {
        wn = std::max(wn, row.name.size());
        wv = std::max(wv, format_number(row.value).size());
      }
      if (!r.title().empty()) out << r.title() << '\n';
      out << std::left << std::setw(static_cast<int>(wn)) << "name" << "  " << std::right
          << std::setw(static_cast<int>(wv)) << "value" << "  " << std::left << std::setw(10) << "units"
          << "  " << std::setw(14) << "expected" << "  " << std::setw(8) << "tol" << "  " << std::setw(7)
          << "verdict" << "  anchor\n";
      for (const auto& row : r.rows()) {
        out << std::left << std::setw(static_cast<int>(wn)) << row.name << "  " << std::right
            << std::setw(static_cast<int>(wv)) << format_number(row.value) << "  " << std::left
            << std::setw(10) << row.units << "  " << std::setw(14)
            << (row.expected ? format_number(*row.expected) : "-") << "  " << std::setw(8)
            << (row.expected ? row.tolerance.describe() : "-") << "  " << std::setw(7) << verdict(row)
            << "  " << row.anchor << '\n';
      }
      out << r.failures() << " failing row(s)\n";
      break;
    }
  }
}

}  // namespace zlsim::report
