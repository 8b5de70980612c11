#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "ellab/errors.hpp"
#include "ellab/report.hpp"

using namespace ellab;
namespace fs = std::filesystem;

TEST_CASE("certificate survives parse, emit, parse") {
  auto cert = compute_K({2, 1, 1, 1}, {1, 2, 1});
  cert.residual_scale = 1.0 / 3.0;
  const auto text = to_json(cert).dump();
  const auto back = certificate_from_json(json::parse(text));
  CHECK(back.K == cert.K);
  CHECK(back.residual == cert.residual);
  CHECK(back.residual_scale == cert.residual_scale);
  CHECK(back.margin_a == cert.margin_a);
  CHECK(back.margin_b == cert.margin_b);
  CHECK(back.source == cert.source);
  CHECK(back.unique == cert.unique);
  CHECK(to_json(back).dump() == text);
}

TEST_CASE("non-finite numbers are strings") {
  CHECK(number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(std::isnan(number_from_json(number(std::nan("")))));
  CHECK(number_from_json(number(0.1)) == 0.1);
  CHECK_THROWS_AS(number_from_json(json("seven")), ConfigError);
  CHECK_THROWS_AS(certificate_from_json(json::object()), ConfigError);
}

TEST_CASE("csv header and formatting") {
  CsvTable t{csv_schema::half_means, {}};
  t.add({1.0, 0.5, 1e-17});
  t.add({2.0, 1.0 / 3.0, 0.0});
  const auto s = t.to_string();
  CHECK(s.substr(0, s.find('\n')) == "R,mean,err");
  CHECK(s == "R,mean,err\n1,0.5,1e-17\n2,0.3333333333333333,0\n");
}

TEST_CASE("failing gate keeps its name and both sides") {
  ProblemInstance inst;
  inst.n = 6;
  inst.exps = {0, 1, 1};
  inst.coeffs = {3, 1, 1, 1};
  Report rep("check-hypotheses");
  for (const auto& g : validate_hypotheses(inst).gates) rep.add_gate(g);
  CHECK_FALSE(rep.pass());
  const auto j = rep.to_json();
  CHECK(j["schema"] == report_schema);
  bool seen = false;
  for (const auto& c : j["checks"])
    if (c["name"] == "energy_subcritical") {
      seen = true;
      CHECK(c["pass"] == false);
      CHECK(c["lhs"] == 1.0);
      CHECK(c["rhs"] == 1.0);
      CHECK(c["relation"] == "<");
    }
  CHECK(seen);
}

TEST_CASE("writing into an unusable directory") {
  const auto base = fs::temp_directory_path() / "ellab_report_test";
  fs::remove_all(base);
  fs::create_directories(base);
  { std::ofstream(base / "blocker") << "x"; }
  CHECK_THROWS_AS(ensure_directory(base / "blocker" / "sub"), IoError);
  CHECK_THROWS_AS(write_text(base / "blocker" / "f.txt", "x"), IoError);
  write_text(base / "ok.txt", "y");
  CHECK(fs::file_size(base / "ok.txt") == 1);
  fs::remove_all(base);
}
