#pragma once
#include <memory>
#include <utility>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "mfsi/grid.hpp"

namespace mfsi {

// Factorised stationary solvers. All pressure-like outputs have zero cell
// mean; all plate-space outputs have zero node mean.
class Liftings {
public:
  Liftings(const Grid& g, const Operators& op, double delta);

  const Grid& g;
  const Operators& op;
  double delta;

  // Stationary Stokes with u3 = I b on the interface, u = 0 elsewhere.
  // Returns (D_fl b, D_pr b). b must be mean-zero.
  std::pair<Vec, Vec> stokes_lift(const Vec& b) const;

  // Mean-zero phi with Lap_N phi = r (Lap_N = Du Grad); r is projected onto
  // the compatible (zero-sum) subspace.
  Vec neumann_cells(const Vec& r) const;
  // Neumann problem with outward boundary flux c: layout bottom (nh), top
  // (nh), left (nzf), right (nzf). Throws if the flux integral is not zero.
  Vec neumann_solve(const Vec& c) const;
  // N1 c: Neumann potential with flux c on the interface only.
  Vec N1(const Vec& c) const;
  // N2 f: weak Neumann problem Lap phi = div f, d_nu phi = f.nu.
  Vec N2(const Vec& f) const;
  // Helmholtz projection f - Grad N2 f.
  Vec helmholtz(const Vec& f) const;
  // Pressure from the discrete Laplacian: Lap_N^+ Du Lap_h v.
  Vec Npr(const Vec& v) const;

  // Interior Lame displacement with interface data (bz vertical, bx horizontal).
  Vec lame_lift(const Vec& bz, const Vec* bx = nullptr) const;
  // K_dd^{-1} r
  Vec lame_solve(const Vec& r) const;

  // Interface pressure force Gamma_p p = I^T Db^T Wp p.
  Vec pressure_force(const Vec& p) const;

  // Added mass: M_s = P_m W^{-1} (M_pl + Gamma_p N1) on mean-zero fields.
  // M_pl = W + I^T Mb I + Me includes the fluid and solid half cells.
  Vec added_mass_apply(const Vec& f) const;
  Vec added_mass_solve(const Vec& r) const;
  CVec added_mass_solve(const CVec& r) const;
  const Mat& added_mass_matrix() const { return Ms_; }
  double added_mass_condition() const { return ms_cond_; }

  // Stress trace maps used by the coupled operator (reaction forces of the
  // Q1 stiffness per unit length, mean removed).
  Vec K_int(const Vec& d) const;
  Vec K_gamma(const Vec& eta) const;
  // Stand-alone trace with one-sided 3-point normal differences on the full
  // solid node vector; returns interior-node values with the mean removed.
  Vec stress_trace_K(const Vec& full) const;

private:
  Eigen::SparseLU<SpMat> stokes_, neumann_;
  Eigen::SimplicialLDLT<SpMat> lame_;
  Mat Ms_, Msfull_;
  Eigen::PartialPivLU<Mat> ms_lu_;
  double ms_cond_ = 0;
};

}  // namespace mfsi
