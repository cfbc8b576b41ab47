#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfsi/config.hpp"

namespace mfsi {

const char* version_string();

// Reads a JSON config, applies "section.key=value" overrides in order and
// validates. Throws ConfigError listing every violation.
Config load_config(const std::string& path, const std::vector<std::string>& overrides);

struct RunResult {
  int exit_code = 0;
  nlohmann::json report;
};

// Executes c.mode, writes report.json and the mode's CSVs into c.out_dir.
// Errors are caught, recorded in report.json ("status", "reason", "message")
// and mapped to a nonzero exit code.
RunResult run(const Config& c, std::ostream& log);

// Individual modes; each fills `report` and writes its artifacts.
void run_solve(const Config& c, nlohmann::json& report, std::ostream& log);
void run_spectrum(const Config& c, nlohmann::json& report, std::ostream& log);
void run_resolvent(const Config& c, nlohmann::json& report, std::ostream& log);
void run_mms_verify(const Config& c, nlohmann::json& report, std::ostream& log);
void run_decouple_check(const Config& c, nlohmann::json& report, std::ostream& log);

// Smallest observed order between consecutive rows, NaN for the first row.
struct MmsRow {
  std::string recipe;
  double h = 0, error_u = 0, error_eta1 = 0, error_d = 0, observed_order = 0;
};
std::vector<MmsRow> mms_convergence(const Config& base, const std::vector<std::string>& recipes,
                                    const std::vector<double>& refinements);
void write_mms_csv(const std::string& path, const std::vector<MmsRow>& rows);

}  // namespace mfsi
