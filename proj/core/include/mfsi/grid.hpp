#pragma once
#include <complex>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "mfsi/config.hpp"

namespace mfsi {

using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;
using cplx = std::complex<double>;

// Flat strip reference geometry: fluid in (0,L)x(-H_f,0), solid in
// (0,L)x(0,H_s), interface at z = 0.
//
// Fluid: MAC grid. u1 on vertical faces (x_i, zc_j), u3 on horizontal faces
// (xc_i, z_j), pressure at cell centres. Unknown velocities are the interior
// faces; the interface faces u3(i, n_zf) carry the plate velocity.
// Plate: vertex grid s_i = i h, unknowns at i = 1..n_h-1.
// Solid: Q1 nodes (x_i, zs_j), unknowns at interior nodes, the interface row
// is slaved to the plate.
class Grid {
public:
  explicit Grid(const GeometryConfig& g);

  int dim = 2;
  double L, Hf, Hs, alpha;
  int nh, nzf, nzs;
  double hx, hzf, hzs;

  int n_u1() const { return (nh - 1) * nzf; }
  int n_u3() const { return nh * (nzf - 1); }
  int n_u() const { return n_u1() + n_u3(); }
  int n_b() const { return nh; }
  int n_p() const { return nh * nzf; }
  int n_w() const { return nh - 1; }
  int n_d() const { return 2 * (nh - 1) * (nzs - 1); }
  int n_total_dofs() const { return n_u() + n_p() + 2 * n_w() + 2 * n_d(); }

  // i = 1..nh-1, j = 0..nzf-1
  int u1(int i, int j) const { return j * (nh - 1) + (i - 1); }
  // i = 0..nh-1, j = 1..nzf-1
  int u3(int i, int j) const { return n_u1() + (j - 1) * nh + i; }
  int p(int i, int j) const { return j * nh + i; }
  // i = 1..nh-1
  int w(int i) const { return i - 1; }
  // c = 0 horizontal, 1 vertical; i = 1..nh-1, j = 1..nzs-1
  int d(int c, int i, int j) const { return 2 * ((j - 1) * (nh - 1) + (i - 1)) + c; }

  double x(int i) const { return i * hx; }
  double xc(int i) const { return (i + 0.5) * hx; }
  double zf(int j) const { return -Hf + j * hzf; }
  double zfc(int j) const { return -Hf + (j + 0.5) * hzf; }
  double zs(int j) const { return j * hzs; }

  // Position of interior velocity unknown k and its component (0 or 1).
  std::pair<double, double> u_pos(int k) const;
  int u_comp(int k) const { return k < n_u1() ? 0 : 1; }
  std::pair<double, double> p_pos(int k) const { return {xc(k % nh), zfc(k / nh)}; }
  std::pair<double, double> d_pos(int k) const;
};

// Sparse operators shared by every module. Weighted (mass-scaled) forms are
// stored so that the discrete problem stays symmetric where the continuum is.
struct Operators {
  Operators(const Grid& g, double mu_s, double lambda_s);

  const Grid& g;
  double mu_s, lambda_s;

  // quadrature weights
  Vec Mu;     // interior face masses h*hz
  double Mb;  // interface face mass h*hz/2
  double Wp;  // cell volume
  double Ww;  // plate node weight h
  double Md;  // interior solid node mass
  double Me;  // interface solid node mass (half cell)

  // viscous stress form: a(u,u) = 2 sum |D_h u|^2, split interior/interface
  SpMat Auu, Aub, Abu, Abb;
  // cell divergence split into interior and interface face columns
  SpMat Du, Db;
  // plate node values -> interface face values (midpoint average)
  SpMat I;
  // plate: B = W Lap^2 (clamped), C = -W Lap (Dirichlet), LapD = Dirichlet Lap
  SpMat Bpl, Cpl, LapD, Bilap;
  // solid Q1 stiffness blocks: d interior, e interface vertical, x interface horizontal
  SpMat Kdd, Kde, Ked, Kee, Kdx;
  SpMat Kfull;  // on all solid nodes, 2 dofs per node

  // discrete gradient on cells -> interior faces, Grad = -Mu^{-1} Du^T Wp
  SpMat Grad;
  // vector Laplacian Lap_h = -Mu^{-1} Auu
  SpMat LapU;
  // Strain operators on the full face vector (for the energy and tests)
  SpMat S11, S33, S13;
  Vec wcell, wcorner;

  int full_u1(int i, int j) const { return j * (g.nh + 1) + i; }
  int full_u3(int i, int j) const { return (g.nh + 1) * g.nzf + j * g.nh + i; }
  int n_full() const { return (g.nh + 1) * g.nzf + g.nh * (g.nzf + 1); }
  // assemble the full face vector from interior and interface parts
  Vec full_faces(const Vec& u, const Vec& ub) const;
  int solid_node(int i, int j) const { return j * (g.nh + 1) + i; }
  // full solid vector from interior d and interface vertical values e
  Vec full_solid(const Vec& d, const Vec& e, const Vec* ex = nullptr) const;

  // Fluid energy 2||D(u)||^2 on the full field.
  double viscous_energy(const Vec& u, const Vec& ub) const;
  // Solid energy 2 mu ||D d||^2 + lambda ||div d||^2 (Gauss quadrature).
  double solid_energy(const Vec& d, const Vec& e) const;
};

// Trapezoid mean removal for a node field on omega (size nh+1).
Vec mean_project(const Grid& g, const Vec& f);
// Volume mean removal for a cell field on the fluid box.
Vec mean_project_cells(const Grid& g, const Vec& f);
// Mean removal on plate unknowns (interior nodes, clamped fields).
Vec plate_mean_project(const Vec& f);
CVec plate_mean_project(const CVec& f);
// Cell field -> interface node values (second-order extrapolation), size nh+1.
Vec trace_interface(const Grid& g, const Vec& cell_field);
Vec gamma_m(const Grid& g, const Vec& cell_field);

}  // namespace mfsi
