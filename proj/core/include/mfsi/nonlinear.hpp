#pragma once
#include "mfsi/fd.hpp"
#include "mfsi/harmonic_solver.hpp"
#include "mfsi/transform.hpp"

namespace mfsi {

// Local second-order jet of the reference velocity and pressure gradient.
struct FlowJet {
  double u[2];
  double du[2][2];      // du[k][l] = d u_k / d y_l
  double ddu[2][2][2];  // ddu[k][l][m]
  double dp[2];
};

// Velocity and pressure at one time sample, differentiable anywhere in the
// fluid box (boundary values included in the stencils).
class FlowField {
public:
  // u on interior faces, e2 plate velocity, p on cells
  FlowField(const Grid& g, const Operators& op, const Vec& u, const Vec& e2, const Vec& p);
  FlowJet at(double x, double z) const;

private:
  TensorField u1_, u3_, p_;
};

// Pointwise transformed terms.
double F_point(int alpha, const TransformPoint& t, const FlowJet& j);
double G_point(const TransformPoint& t, const FlowJet& j);
double convection_point(int alpha, const FlowJet& j);

struct FValues {
  Vec interior;   // Grid::u order
  Vec interface;  // vertical component at interface faces (xc_i, 0)
};
FValues eval_F(const Grid& g, const DiffeoFields& d, const FlowField& f);
// G at plate nodes before mean removal.
Vec eval_G(const Grid& g, const DiffeoFields& d, const FlowField& f);

// Harmonics 0..K of (F, P_m G) from M time samples of v. Throws SmallnessError
// naming the first offending sample.
Forcings nonlinear_rhs_harmonics(const Grid& g, const Operators& op, const Cutoff& c, const PeriodicState& v, int M);

}  // namespace mfsi
