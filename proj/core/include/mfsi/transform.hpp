#pragma once
#include <array>
#include <optional>
#include <vector>

#include "mfsi/grid.hpp"

namespace mfsi {

// psi = 1 on |z| <= alpha/2, 0 on |z| >= alpha, quintic smoothstep between.
class Cutoff {
public:
  explicit Cutoff(double alpha);
  double alpha() const { return alpha_; }
  // psi, psi', psi'', psi'''
  std::array<double, 4> eval(double z) const;
  // sup |psi'| = 15 / (8 (alpha/2))
  double max_abs_derivative() const { return maxd_; }
  double delta0() const { return 1.0 / (2.0 * maxd_); }

private:
  double alpha_, maxd_;
};

struct SmallnessCheck {
  bool ok;
  double max_abs;
  double delta0;
};
SmallnessCheck check_smallness(const Vec& eta1, double delta0);

// Everything F and G need at one reference point y, evaluated at x = X(y).
// Index 0 is horizontal, 1 vertical. a(x) = Cof(grad Y)^T, so a(X(y)) =
// grad X / det grad X; b = Cof(grad X)^T.
struct TransformPoint {
  double X[2];
  double J;
  double gradX[2][2];
  double b[2][2];
  double a[2][2];
  double da[2][2][2];  // da[j][i][k] = d a_ik / d x_j
  double lapa[2][2];   // sum_j d2 a_ik / dx_j^2
  double gY[2][2];     // gY[l][j] = d Y_l / d x_j
  double lapY[2];      // sum_j d2 Y_l / dx_j^2
  double dta[2][2];    // (d_t a)(X)
  double dtY[2];       // (d_t Y)(X)
  double dtX[2];
  double eta[4];  // eta and its first three s-derivatives at y1
};

// eta = (eta, eta', eta'', eta''') and eta_t = (d_t eta, d_t eta') at y1.
TransformPoint transform_at(const Cutoff& c, double y1, double y3, const std::array<double, 4>& eta,
                            const std::array<double, 2>& eta_t);

// Plate node field (interior unknowns, clamped ends) evaluated with
// derivatives 0..3 anywhere on [0, L] by 6-point one-sided-capable stencils.
class PlateInterp {
public:
  PlateInterp(const Grid& g, const Vec& interior);
  std::array<double, 4> eval(double s) const;

private:
  std::vector<double> nodes_, vals_;
};

// Vertical component of Y for x = (x1, x3): solves x3 = y3 + psi(y3) eta.
// Safeguarded Newton with bisection; tol 1e-13.
double inverse_y3(const Cutoff& c, double x3, double eta, double tol = 1e-13);

struct DiffeoFields {
  std::vector<TransformPoint> faces;      // interior velocity faces, Grid::u order
  std::vector<TransformPoint> interface;  // interface faces (xc_i, 0)
  std::vector<TransformPoint> nodes;      // interface nodes s_i, i = 1..nh-1
};

// Throws SmallnessError if max|eta1| > delta0.
DiffeoFields build_diffeo(const Grid& g, const Cutoff& c, const Vec& eta1, const Vec& eta2, int sample = 0);

}  // namespace mfsi
