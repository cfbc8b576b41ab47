#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mfsi {

struct GeometryConfig {
  int dim = 2;
  double L = 1.0;
  double H_f = 1.0;
  double H_s = 0.5;
  double alpha = 0.4;
  int n_h = 24;
  int n_zf = 24;
  int n_zs = 16;
};

struct PhysicsConfig {
  double mu_s = 1.0;
  double lambda_s = 1.0;
  double delta = 0.5;
  double T = 1.0;
};

struct DiscretizationConfig {
  int K = 4;
  int M = 0;  // time samples; 0 selects 4K+4
  int samples() const { return M > 0 ? M : 4 * K + 4; }
};

struct ForcingConfig {
  std::string id = "mixed";
  double amplitude = 2.5;  // calibrated small level at the desk mesh
  bool f = true;
  bool g = true;
  bool h = true;
};

struct SolverConfig {
  double tol = 1e-10;
  double tol_res = 0.0;  // 0 selects 10 h^2
  int maxit = 50;
  int kmax_scan = 64;
};

struct Config {
  GeometryConfig geometry;
  PhysicsConfig physics;
  DiscretizationConfig discretization;
  ForcingConfig forcing;
  SolverConfig solver;
  std::string mode = "solve";
  std::string out_dir = ".";
  int workers = 0;
  std::uint64_t seed = 1;
};

inline const std::vector<std::string>& known_modes() {
  static const std::vector<std::string> m{"solve", "spectrum", "resolvent", "mms-verify", "decouple-check"};
  return m;
}

nlohmann::json to_json(const Config& c);
// Unknown keys are rejected; missing keys keep their defaults.
Config config_from_json(const nlohmann::json& j);
// Every violated invariant, empty when valid.
std::vector<std::string> validate(const Config& c);
// Throws ConfigError listing all violations.
void require_valid(const Config& c);
// "section.key=value"; value parsed as JSON when possible, else as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

}  // namespace mfsi
