#pragma once
#include <map>
#include <string>

#include "mfsi/liftings.hpp"

namespace mfsi {

// A state of the ground space: solenoidal velocity, mean-zero plate pair,
// interior solid displacement and velocity (the interface row of the solid
// is the plate).
struct X0State {
  Vec v, e1, e2, d1, d2;
};

struct AmfsOptions {
  bool coupling = true;  // false drops every solid <-> plate stiffness term
  bool lame_lifting = true;  // false sets D_s = 0 in the thick-layer row
};

// Pieces of the plate row that the explicit block formulas need.
struct PlateRowParts {
  Mat Phi_u;   // action on Pu (stream coordinates) incl. M_s^{-1}
  Mat Theta2;  // action on eta1 without solid terms
  Mat Theta3;  // action on eta2 without solid terms
  Mat Kint;    // M_s^{-1} K_int
  Mat KDs;     // M_s^{-1} (K_int D_s + K_gamma)
};

class MfsOperator {
public:
  MfsOperator(const Grid& g, const Operators& op, const Liftings& L, AmfsOptions opt = {});

  const Grid& g;
  const Operators& op;
  const Liftings& L;
  AmfsOptions opt;

  X0State apply(const X0State& s) const;
  X0State zero() const;

  // raw coordinates: stream function (fluid), e_i - e_last (plate), identity (solid)
  int n_stream() const { return (g.nh - 1) * (g.nzf - 1); }
  int n_plate() const { return g.n_w() - 1; }
  int dim() const { return n_stream() + 2 * n_plate() + 2 * g.n_d(); }
  int off_e1() const { return n_stream(); }
  int off_e2() const { return n_stream() + n_plate(); }
  int off_d1() const { return n_stream() + 2 * n_plate(); }
  int off_d2() const { return off_d1() + g.n_d(); }

  Vec to_raw(const X0State& s) const;
  X0State from_raw(const Vec& x) const;
  const SpMat& stream_basis() const { return C_; }
  Vec plate_from_raw(const Vec& x) const;

  // Velocity of the full monolithic field: Pu + (I - P) D_fl eta2 (interior faces).
  Vec full_velocity(const X0State& s) const;

  // Dense A in raw coordinates (columns = apply on raw basis vectors).
  Mat assemble_raw() const;
  // Energy Gram matrix in raw coordinates (block diagonal up to the eta1-d1 coupling).
  Mat energy_gram() const;

  // sub-operators used by the explicit decoupling formulas (raw coordinates)
  PlateRowParts plate_row_parts() const;
  Mat lame_lifting_raw() const;  // D_s acting on raw plate coordinates (n_d x n_plate)
  Mat L0_dense() const;

private:
  SpMat C_;
  Eigen::LLT<Mat> ctc_;
};

// E-orthonormal form of A: A_E = R A_raw R^{-1}, E = R^T R.
struct EnergyForm {
  Mat A_E;
  Mat R;  // upper triangular
  Mat A_raw;
  Vec raw_from_E(const Vec& y) const;
};
EnergyForm energy_form(const MfsOperator& A, int max_dofs = 4000);

struct DecouplingReport {
  std::map<std::string, double> residuals;  // top-left, top-right, bottom-left, bottom-right
  double S_inverse_error = 0;
  double max_residual() const;
};
DecouplingReport verify_decoupling(const MfsOperator& A, const Mat& A_raw);

}  // namespace mfsi
