#include "ellab/report.hpp"

#include <cmath>
#include <fstream>

#include "ellab/config.hpp"
#include "ellab/errors.hpp"

namespace ellab {

json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
  }
  throw ConfigError("expected a number in report");
}

json to_json(const Check& c) {
  return json{{"name", c.name}, {"lhs", number(c.lhs)}, {"relation", c.relation}, {"rhs", number(c.rhs)},
              {"pass", c.pass}};
}

Report::Report(std::string command) : command_(std::move(command)) {}

void Report::add_check(const std::string& name, double lhs, const std::string& relation, double rhs, bool pass) {
  checks_.push_back({name, lhs, rhs, relation, pass});
}

void Report::add_gate(const GateResult& g) {
  if (!g.applicable) return;
  add_check(g.name, g.value, g.relation, g.threshold ? *g.threshold : HUGE_VAL, g.pass);
}

bool Report::pass() const {
  for (const auto& c : checks_)
    if (!c.pass) return false;
  return true;
}

json Report::to_json() const {
  json j;
  j["schema"] = report_schema;
  j["command"] = command_;
  j["pass"] = pass();
  json cs = json::array();
  for (const auto& c : checks_) cs.push_back(ellab::to_json(c));
  j["checks"] = cs;
  j["results"] = data_;
  return j;
}

json to_json(const ProportionalityCertificate& c) {
  return json{{"K", number(c.K)},
              {"residual", number(c.residual)},
              {"residual_scale", number(c.residual_scale)},
              {"margin_a", number(c.margin_a)},
              {"margin_b", number(c.margin_b)},
              {"unique", c.unique},
              {"source", to_string(c.source)},
              {"sign_changes", c.sign_changes}};
}

ProportionalityCertificate certificate_from_json(const json& j) {
  ProportionalityCertificate c;
  try {
    c.K = number_from_json(j.at("K"));
    c.residual = number_from_json(j.at("residual"));
    c.residual_scale = number_from_json(j.at("residual_scale"));
    c.margin_a = number_from_json(j.at("margin_a"));
    c.margin_b = number_from_json(j.at("margin_b"));
    c.unique = j.at("unique").get<bool>();
    c.source = k_source_from_string(j.at("source").get<std::string>());
    c.sign_changes = j.at("sign_changes").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed certificate: ") + e.what());
  }
  return c;
}

std::string CsvTable::to_string() const {
  std::string out = header + "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  os << text;
  if (!os.flush()) throw IoError("cannot write " + path.string());
}

}  // namespace ellab
