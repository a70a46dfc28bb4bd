#include <doctest.h>

#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "zlsim/config.hpp"
#include "zlsim/goldens.hpp"
#include "zlsim/report.hpp"
#include "zlsim/sysmodel.hpp"

using namespace zlsim;
using report::Tolerance;

TEST_CASE("tolerance kinds") {
  CHECK(Tolerance::exact().accepts(3, 3));
  CHECK(!Tolerance::exact().accepts(3.0000001, 3));
  CHECK(Tolerance::rel(0.05).accepts(104.9, 100));
  CHECK(!Tolerance::rel(0.05).accepts(105.1, 100));
  CHECK(Tolerance::rel(0.05).accepts(-95.5, -100));
  CHECK(Tolerance::rel(0.01).accepts(0.005, 0));
  CHECK(Tolerance::abs(5).accepts(1029142883598335.0, 1029142883598340.0));
  CHECK(!Tolerance::abs(0.01).accepts(98.53, 98.515));
  CHECK(Tolerance::at_most().accepts(1.5, 1.5));
  CHECK(!Tolerance::at_most().accepts(1.51, 1.5));
  CHECK(!Tolerance::below().accepts(2, 2));
  CHECK(Tolerance::below().accepts(1.99, 2));

  CHECK(Tolerance::exact().describe() == "exact");
  CHECK(Tolerance::rel(0.005).describe() == "+-0.5%");
  CHECK(Tolerance::abs(5).describe() == "+-5");
  CHECK(Tolerance::below().describe() == "<");
}

TEST_CASE("report rows") {
  report::Report r("t");
  r.add("info", 1.0, "x");
  r.check("good", 2.0, "y", 2.0, Tolerance::exact(), "Table 1");
  r.check("bad", 3.0, "z", 2.0, Tolerance::rel(0.1), "Table 2");
  CHECK(r.rows().size() == 3);
  CHECK(!r.row("info").checked());
  CHECK(r.row("info").pass());
  CHECK(r.failures() == 1);
  CHECK(!r.all_pass());
  CHECK_THROWS_AS(r.row("missing"), std::out_of_range);
  report::Report s;
  s.append(r);
  s.append(r);
  CHECK(s.failures() == 2);
}

TEST_CASE("number formatting") {
  CHECK(report::format_number(0) == "0");
  CHECK(report::format_number(-0.0) == "0");
  CHECK(report::format_number(33260) == "33260");
  CHECK(report::format_number(201326592) == "201326592");
  CHECK(report::format_number(0.5) == "0.5");
  CHECK(report::format_number(98.52) == "98.52");
  CHECK(report::format_number(1.0 / 3) == "0.3333333333");
  CHECK(report::format_number(1.5e20) == "1.5e+20");
}

TEST_CASE("report output formats") {
  report::Report r("demo");
  r.add("a,b", 1.25, "W", "Table 3");
  r.check("c", 2, "", 2, Tolerance::exact(), "Table 4");
  r.check("d", 5, "", 4, Tolerance::abs(0.5), "x");

  std::ostringstream csv;
  report::write(csv, r, report::Format::csv);
  CHECK(csv.str() ==
        "name,value,units,expected,tolerance,verdict,anchor\n"
        "\"a,b\",1.25,W,,,INFO,Table 3\n"
        "c,2,,2,exact,PASS,Table 4\n"
        "d,5,,4,+-0.5,FAIL,x\n");

  std::ostringstream js;
  report::write(js, r, report::Format::json);
  const auto j = nlohmann::json::parse(js.str());
  CHECK(j["title"] == "demo");
  CHECK(j["failures"] == 1);
  CHECK(j["rows"].size() == 3);
  CHECK(j["rows"][0]["name"] == "a,b");
  CHECK(!j["rows"][0].contains("expected"));
  CHECK(j["rows"][2]["verdict"] == "FAIL");
  CHECK(j["rows"][1]["expected"] == 2.0);

  std::ostringstream tb;
  report::write(tb, r, report::Format::table);
  CHECK(tb.str().find("demo\n") == 0);
  CHECK(tb.str().find("FAIL") != std::string::npos);

  CHECK(report::parse_format("json") == report::Format::json);
  CHECK_THROWS(report::parse_format("xml"));
}

TEST_CASE("report output is deterministic") {
  for (auto f : {report::Format::csv, report::Format::json, report::Format::table}) {
    std::ostringstream a, b;
    report::write(a, goldens::golden_report(sysmodel::zettalith()), f);
    report::write(b, goldens::golden_report(sysmodel::zettalith()), f);
    CHECK(a.str() == b.str());
  }
}

TEST_CASE("key=value parsing") {
  std::istringstream in(
      "# header\n"
      "\n"
      "  a = 1   # trailing\n"
      "b=two words\n"
      "a = 3\n"
      "flag = yes\n");
  auto kv = config::KeyValues::parse(in);
  CHECK(kv.get_int("a", 0) == 3);
  CHECK(kv.get_string("b", "") == "two words");
  CHECK(kv.get_bool("flag", false));
  CHECK(kv.get_double("missing", 2.5) == 2.5);
  CHECK(kv.get_string("missing", "x") == "x");
  CHECK_FALSE(kv.has("missing"));

  kv.apply_override("a=7");
  kv.apply_override(" c = 1e3 ");
  CHECK(kv.get_int("a", 0) == 7);
  CHECK(kv.get_double("c", 0) == 1000);
  CHECK_THROWS(kv.apply_override("novalue"));
  CHECK_THROWS(kv.apply_override("=1"));

  CHECK_THROWS(kv.get_double("b", 0));
  CHECK_THROWS(kv.get_bool("a", false));
  kv.set("frac", "1.5");
  CHECK_THROWS(kv.get_int("frac", 0));
  kv.set("tail", "12abc");
  CHECK_THROWS(kv.get_double("tail", 0));

  std::istringstream bad("just a line\n");
  CHECK_THROWS_AS(config::KeyValues::parse(bad), std::invalid_argument);
  std::istringstream empty_key(" = 4\n");
  CHECK_THROWS(config::KeyValues::parse(empty_key));
  CHECK_THROWS(config::KeyValues::load("/nonexistent/file.cfg"));
}

TEST_CASE("merge and unknown keys") {
  config::KeyValues a, b;
  a.set("x", "1");
  a.set("model.d", "2");
  b.set("x", "5");
  b.set("stray", "0");
  a.merge(b);
  CHECK(a.get_int("x", 0) == 5);
  const auto u = a.unknown_keys({"x"}, {"model."});
  REQUIRE(u.size() == 1);
  CHECK(u[0] == "stray");
}

TEST_CASE("config files in the repo parse") {
  for (const char* f : {"zettalith.cfg", "exalith.cfg", "nexai.cfg", "toy_simulate.cfg", "crest_single.cfg"}) {
    CAPTURE(f);
    CHECK_NOTHROW(config::KeyValues::load(std::string(ZLSIM_SOURCE_DIR) + "/configs/" + f));
  }
}
