#include "mfsi/config.hpp"

#include <algorithm>
#include <cmath>

#include "mfsi/errors.hpp"

namespace mfsi {

using nlohmann::json;

const char* reason_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidConfig: return "invalid-config";
    case ErrorKind::SmallnessViolation: return "smallness-violation";
    case ErrorKind::PicardDivergence: return "picard-divergence";
    case ErrorKind::MaxitExceeded: return "maxit-exceeded";
    case ErrorKind::SingularSystem: return "singular-system";
    case ErrorKind::DofBudget: return "dof-budget-exceeded";
    case ErrorKind::Numerical: return "numerical-failure";
  }
  return "unknown";
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidConfig: return 2;
    case ErrorKind::PicardDivergence: return 3;
    case ErrorKind::SmallnessViolation: return 4;
    case ErrorKind::MaxitExceeded: return 5;
    case ErrorKind::SingularSystem: return 6;
    case ErrorKind::DofBudget: return 7;
    case ErrorKind::Numerical: return 8;
  }
  return 1;
}

namespace {
std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += "\n  - " + x;
  return s;
}
}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(ErrorKind::InvalidConfig, "invalid configuration:" + join(violations)),
      violations_(std::move(violations)) {}

SmallnessError::SmallnessError(double m, double d0, int s)
    : Error(ErrorKind::SmallnessViolation,
            "smallness violated at sample " + std::to_string(s) + ": max|eta1| = " + std::to_string(m) +
                " > delta0 = " + std::to_string(d0)),
      max_abs(m), delta0(d0), sample(s) {}

json to_json(const Config& c) {
  return json{
      {"geometry",
       {{"dim", c.geometry.dim}, {"L", c.geometry.L}, {"H_f", c.geometry.H_f}, {"H_s", c.geometry.H_s},
        {"alpha", c.geometry.alpha}, {"n_h", c.geometry.n_h}, {"n_zf", c.geometry.n_zf}, {"n_zs", c.geometry.n_zs}}},
      {"physics",
       {{"mu_s", c.physics.mu_s}, {"lambda_s", c.physics.lambda_s}, {"delta", c.physics.delta}, {"T", c.physics.T}}},
      {"discretization", {{"K", c.discretization.K}, {"M", c.discretization.M}}},
      {"forcing",
       {{"id", c.forcing.id}, {"amplitude", c.forcing.amplitude}, {"f", c.forcing.f}, {"g", c.forcing.g},
        {"h", c.forcing.h}}},
      {"solver",
       {{"tol", c.solver.tol}, {"tol_res", c.solver.tol_res}, {"maxit", c.solver.maxit},
        {"kmax_scan", c.solver.kmax_scan}}},
      {"mode", c.mode},
      {"out_dir", c.out_dir},
      {"workers", c.workers},
      {"seed", c.seed},
  };
}

namespace {

template <class T>
void read(const json& sec, const char* key, T& dst, std::vector<std::string>& errs, const std::string& where) {
  if (!sec.contains(key)) return;
  try {
    dst = sec.at(key).get<T>();
  } catch (const json::exception&) {
    errs.push_back(where + "." + key + ": wrong type");
  }
}

void check_keys(const json& sec, const std::vector<std::string>& allowed, const std::string& where,
                std::vector<std::string>& errs) {
  if (!sec.is_object()) {
    errs.push_back(where + ": expected an object");
    return;
  }
  for (const auto& [k, v] : sec.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) errs.push_back(where + "." + k + ": unknown key");
}

}  // namespace

Config config_from_json(const json& j) {
  Config c;
  std::vector<std::string> errs;
  check_keys(j, {"geometry", "physics", "discretization", "forcing", "solver", "mode", "out_dir", "workers", "seed"},
             "config", errs);
  if (!errs.empty()) throw ConfigError(errs);
  if (j.contains("geometry")) {
    const auto& s = j["geometry"];
    check_keys(s, {"dim", "L", "H_f", "H_s", "alpha", "n_h", "n_zf", "n_zs"}, "geometry", errs);
    auto& g = c.geometry;
    read(s, "dim", g.dim, errs, "geometry");
    read(s, "L", g.L, errs, "geometry");
    read(s, "H_f", g.H_f, errs, "geometry");
    read(s, "H_s", g.H_s, errs, "geometry");
    read(s, "alpha", g.alpha, errs, "geometry");
    read(s, "n_h", g.n_h, errs, "geometry");
    read(s, "n_zf", g.n_zf, errs, "geometry");
    read(s, "n_zs", g.n_zs, errs, "geometry");
  }
  if (j.contains("physics")) {
    const auto& s = j["physics"];
    check_keys(s, {"mu_s", "lambda_s", "delta", "T"}, "physics", errs);
    read(s, "mu_s", c.physics.mu_s, errs, "physics");
    read(s, "lambda_s", c.physics.lambda_s, errs, "physics");
    read(s, "delta", c.physics.delta, errs, "physics");
    read(s, "T", c.physics.T, errs, "physics");
  }
  if (j.contains("discretization")) {
    const auto& s = j["discretization"];
    check_keys(s, {"K", "M"}, "discretization", errs);
    read(s, "K", c.discretization.K, errs, "discretization");
    read(s, "M", c.discretization.M, errs, "discretization");
  }
  if (j.contains("forcing")) {
    const auto& s = j["forcing"];
    check_keys(s, {"id", "amplitude", "f", "g", "h"}, "forcing", errs);
    read(s, "id", c.forcing.id, errs, "forcing");
    read(s, "amplitude", c.forcing.amplitude, errs, "forcing");
    read(s, "f", c.forcing.f, errs, "forcing");
    read(s, "g", c.forcing.g, errs, "forcing");
    read(s, "h", c.forcing.h, errs, "forcing");
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    check_keys(s, {"tol", "tol_res", "maxit", "kmax_scan"}, "solver", errs);
    read(s, "tol", c.solver.tol, errs, "solver");
    read(s, "tol_res", c.solver.tol_res, errs, "solver");
    read(s, "maxit", c.solver.maxit, errs, "solver");
    read(s, "kmax_scan", c.solver.kmax_scan, errs, "solver");
  }
  read(j, "mode", c.mode, errs, "config");
  read(j, "out_dir", c.out_dir, errs, "config");
  read(j, "workers", c.workers, errs, "config");
  read(j, "seed", c.seed, errs, "config");
  if (!errs.empty()) throw ConfigError(errs);
  return c;
}

std::vector<std::string> validate(const Config& c) {
  std::vector<std::string> e;
  const auto& g = c.geometry;
  if (g.dim == 3)
    e.push_back("geometry.dim: 3 is not supported by this build, only dim = 2");
  else if (g.dim != 2)
    e.push_back("geometry.dim: must be 2");
  if (!(g.L > 0)) e.push_back("geometry.L: must be positive");
  if (!(g.H_f > 0)) e.push_back("geometry.H_f: must be positive");
  if (!(g.H_s > 0)) e.push_back("geometry.H_s: must be positive");
  if (!(g.alpha > 0)) e.push_back("geometry.alpha: must be positive");
  if (g.H_f > 0 && g.H_s > 0 && g.alpha >= std::min(g.H_f, g.H_s))
    e.push_back("geometry.alpha: cutoff exceeds domain (need alpha < min(H_f, H_s))");
  if (g.n_h < 6) e.push_back("geometry.n_h: at least 6 cells required");
  if (g.n_zf < 6) e.push_back("geometry.n_zf: at least 6 cells required");
  if (g.n_zs < 6) e.push_back("geometry.n_zs: at least 6 cells required");
  const auto& p = c.physics;
  if (!(p.mu_s > 0)) e.push_back("physics.mu_s: must be positive (strong ellipticity)");
  if (!(p.mu_s + p.lambda_s > 0)) e.push_back("physics.lambda_s: need mu_s + lambda_s > 0 (strong ellipticity)");
  if (!(p.delta > 0)) e.push_back("physics.delta: viscoelastic damping delta > 0 is required");
  if (!(p.T > 0)) e.push_back("physics.T: period must be positive");
  if (c.discretization.K < 1) e.push_back("discretization.K: at least one harmonic required");
  if (c.discretization.M != 0 && c.discretization.M < 2 * (2 * c.discretization.K + 1))
    e.push_back("discretization.M: need M >= 2(2K+1) time samples");
  if (!(c.solver.tol > 0)) e.push_back("solver.tol: must be positive");
  if (c.solver.tol_res < 0) e.push_back("solver.tol_res: must be non-negative (0 selects 10 h^2)");
  if (c.solver.maxit < 1) e.push_back("solver.maxit: must be at least 1");
  if (c.solver.kmax_scan < 0) e.push_back("solver.kmax_scan: must be non-negative");
  if (std::find(known_modes().begin(), known_modes().end(), c.mode) == known_modes().end())
    e.push_back("mode: unknown mode '" + c.mode + "'");
  if (c.workers < 0) e.push_back("workers: must be non-negative");
  if (!std::isfinite(c.forcing.amplitude)) e.push_back("forcing.amplitude: must be finite");
  return e;
}

void require_valid(const Config& c) {
  auto v = validate(c);
  if (!v.empty()) throw ConfigError(v);
}

void apply_override(json& j, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError({"--set " + assignment + ": expected key=value"});
  std::string key = assignment.substr(0, eq), val = assignment.substr(eq + 1);
  json parsed;
  try {
    parsed = json::parse(val);
  } catch (const json::exception&) {
    parsed = val;
  }
  json* node = &j;
  std::size_t start = 0;
  for (;;) {
    auto dot = key.find('.', start);
    std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (dot == std::string::npos) {
      (*node)[part] = parsed;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace mfsi
