#pragma once
// Command-line front end: report records and subcommand dispatch for sl, schrod, qdiff and auto.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "trf/numkit.hpp"

namespace trf::cli {

inline constexpr const char* kSchemaVersion = "trf-report/1";

enum ExitCode { kOk = 0, kCheckFailed = 1, kUsage = 2 };

struct Check {
  std::string name;
  cplx lhs;
  cplx rhs;
  double abs_err = 0.0;
  double tol = 0.0;
  bool pass = false;
};
// abs_err = |lhs - rhs|, pass iff abs_err <= tol (a NaN never passes)
Check make_check(std::string name, cplx lhs, cplx rhs, double tol);

struct ReportRecord {
  std::string schema_version = kSchemaVersion;
  std::string task;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  std::vector<Check> checks;
  std::string error;  // diagnostic when the computation itself failed
  double runtime_s = 0.0;

  bool all_pass() const;
};

nlohmann::json to_json(const ReportRecord& r);
// Rejects records whose pass flags disagree with abs_err <= tol.
ReportRecord report_from_json(const nlohmann::json& j);
std::string serialize(const ReportRecord& r);

// "re,im" or "re"
cplx parse_complex(const std::string& text);

// Full command line including argv[0]. Reports go to --out or `out`; usage text and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trf::cli
