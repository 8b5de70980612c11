#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "ellab/proportionality.hpp"
#include "ellab/system_model.hpp"

namespace ellab {

using json = nlohmann::ordered_json;

inline constexpr const char* report_schema = "ellab.report/1";

namespace csv_schema {
inline constexpr const char* ivp_trace = "t,u,du";
inline constexpr const char* pair_trace = "t,u,v";
inline constexpr const char* radial_field = "r,u,v";
inline constexpr const char* box_field = "x,y,u,v";
inline constexpr const char* half_means = "R,mean,err";
inline constexpr const char* pohozaev = "X,h";
inline constexpr const char* barrier = "r,lap_W,rhs";
inline constexpr const char* continuation = "s,sup_u,sup_v,min_u,min_v,residual";
}  // namespace csv_schema

/// One inequality or equality verdict; both sides are kept for failing gates.
struct Check {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string relation;  // "<=", ">=", "==" ...
  bool pass = false;
};

json to_json(const Check& c);

/// JSON report for one command. Non-finite numbers are written as strings.
class Report {
 public:
  explicit Report(std::string command);

  void add_check(Check c) { checks_.push_back(std::move(c)); }
  void add_check(const std::string& name, double lhs, const std::string& relation, double rhs, bool pass);
  void add_gate(const GateResult& g);
  json& data() { return data_; }
  const std::vector<Check>& checks() const { return checks_; }
  bool pass() const;

  json to_json() const;

 private:
  std::string command_;
  json data_ = json::object();
  std::vector<Check> checks_;
};

/// Finite doubles as numbers, others as "nan", "inf", "-inf".
json number(double x);
double number_from_json(const json& j);

json to_json(const ProportionalityCertificate& c);
ProportionalityCertificate certificate_from_json(const json& j);

/// Numeric CSV with a documented header row; shortest round-trip formatting.
struct CsvTable {
  std::string header;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) { rows.push_back(std::move(row)); }
  std::string to_string() const;
};

/// Throws IoError when the directory cannot be created or the file written.
void ensure_directory(const std::filesystem::path& dir);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ellab
