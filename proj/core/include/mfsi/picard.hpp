#pragma once
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfsi/errors.hpp"
#include "mfsi/nonlinear.hpp"

namespace mfsi {

// Everything the fixed-point map needs; the harmonic factorizations are reused
// across iterates.
struct PicardContext {
  const Grid& g;
  const Operators& op;
  const Liftings& L;
  const HarmonicSolver& S;
  Cutoff cutoff;
  int M;  // time samples for the nonlinear terms
};

// Discrete strong norm: Parseval sum over harmonics of the L2 pieces of
// (u, Lap u, p, grad p, eta1, Lap^2 eta1, eta2, Lap eta2, d1, grad d1, d2,
// grad D, Lame D) with D = d1 + delta d2.
double picard_norm(const PicardContext& c, const PeriodicState& v);
// Parseval L2 norm of (u, p, eta1, eta2, d1, d2).
double l2_norm(const PicardContext& c, const PeriodicState& v);
PeriodicState difference(const PeriodicState& a, const PeriodicState& b);

// Solution of the linear periodic problem with data (F(v) + f, P_m G(v) + g, h).
PeriodicState phi_map(const PicardContext& c, const PeriodicState& v, const Forcings& f);

// ||v - Phi(v)|| / ||Phi(v)|| in the L2 norm.
double nonlinear_residual(const PicardContext& c, const PeriodicState& v, const Forcings& f);

// Largest max|eta1| / delta0 over the M time samples.
double smallness_margin(const PicardContext& c, const PeriodicState& v);

struct SolveReport {
  int iterates = 0;
  std::vector<double> updates;  // ||v^{n+1} - v^n||
  std::vector<double> ratios;   // updates[n] / updates[n-1]
  double final_residual = 0;
  double smallness_margin = 0;  // max over every iterate
  double wall_time = 0;
  bool converged = false;
  std::string status = "running";
  nlohmann::json to_json() const;
};

class PicardFailure : public Error {
public:
  PicardFailure(ErrorKind k, const std::string& msg, SolveReport r) : Error(k, msg), report(std::move(r)) {}
  SolveReport report;
};

struct FixedPoint {
  PeriodicState state;
  SolveReport report;
};

// v^{n+1} = Phi(v^n) from v^0 = 0. Throws PicardFailure on divergence (ratio
// > 1 for 3 consecutive iterates), smallness violation or maxit.
FixedPoint solve_fixed_point(const PicardContext& c, const Forcings& f, double tol, double tol_res, int maxit);

}  // namespace mfsi
