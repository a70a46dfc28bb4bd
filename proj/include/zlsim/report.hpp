#pragma once

// Named-quantity reports with optional expected values and tolerances.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace zlsim::report {

enum class TolKind { exact, relative, absolute, at_most, below };

struct Tolerance {
  TolKind kind = TolKind::exact;
  double amount = 0.0;

  static Tolerance exact() { return {TolKind::exact, 0.0}; }
  static Tolerance rel(double f) { return {TolKind::relative, f}; }
  static Tolerance abs(double d) { return {TolKind::absolute, d}; }
  // one-sided bounds: value <= expected, value < expected
  static Tolerance at_most() { return {TolKind::at_most, 0.0}; }
  static Tolerance below() { return {TolKind::below, 0.0}; }
  bool accepts(double value, double expected) const;
  std::string describe() const;
};

struct Row {
  std::string name;
  double value = 0.0;
  std::string units;
  std::optional<double> expected;
  Tolerance tolerance;
  std::string anchor;

  bool checked() const { return expected.has_value(); }
  bool pass() const { return !expected || tolerance.accepts(value, *expected); }
};

class Report {
 public:
  Report() = default;
  explicit Report(std::string title) : title_(std::move(title)) {}

  // informational row
  Row& add(std::string name, double value, std::string units, std::string anchor = {});
  // regression row
  Row& check(std::string name, double value, std::string units, double expected, Tolerance tol,
             std::string anchor);
  void append(const Report& other);

  const std::vector<Row>& rows() const { return rows_; }
  const Row& row(std::string_view name) const;
  const std::string& title() const { return title_; }
  std::size_t failures() const;
  bool all_pass() const { return failures() == 0; }

 private:
  std::string title_;
  std::vector<Row> rows_;
};

enum class Format { csv, json, table };
Format parse_format(std::string_view s);

// Values print with up to 10 significant digits; same input gives the same bytes.
void write(std::ostream& out, const Report& r, Format f);
std::string format_number(double v);

}  // namespace zlsim::report
