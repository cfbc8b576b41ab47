#pragma once
#include <vector>

#include "mfsi/mfs_operator.hpp"

namespace mfsi {

struct ResolventRow {
  int k;
  double norm;
  double k_times_norm;
};

struct SpectralReport {
  CVec eigenvalues;  // descending real part
  CMat eigenvectors;  // columns match eigenvalues (empty when not requested)
  double spectral_bound = 0;
  double min_abs = 0;
  std::vector<double> residual;         // ||A v - lambda v|| / ||v||
  std::vector<double> energy_residual;  // NaN where not evaluated
  std::vector<bool> sign_consistent;
  std::vector<ResolventRow> scan;
  int nh = 0, nzf = 0, nzs = 0;
  int n_unstable() const;
};

SpectralReport compute_spectrum(const Mat& A, bool vectors = true);

// Complex field triple recovered from a raw eigenvector.
struct ComplexFields {
  CVec u, ub, e1, e2, d1, d2;
};
ComplexFields fields_from_raw(const MfsOperator& A, const CVec& raw);

// Energy identity of an eigenpair, |sum of terms| / sum |terms|.
// sign_ok reports whether Re(lambda) has the sign forced by the real part.
double energy_identity_residual(const MfsOperator& A, cplx lambda, const CVec& raw, bool* sign_ok = nullptr);

// One Hessenberg reduction A = Q H Q^T, then O(n^2) LU of (s - H) per shift.
class ShiftedHessenberg {
public:
  explicit ShiftedHessenberg(const Mat& A);
  int size() const { return static_cast<int>(H_.rows()); }

  class Factor {
  public:
    CVec solve(const CVec& b) const;          // (s - H)^{-1} b
    CVec solve_adjoint(const CVec& b) const;  // (s - H)^{-H} b
    double min_pivot() const;

  private:
    friend class ShiftedHessenberg;
    CMat U;
    CVec l;
    std::vector<char> swap;
  };
  Factor factor(cplx s) const;
  // (s - A)^{-1} b
  CVec solve(const Factor& f, const CVec& b) const;
  // ||(s - A)^{-1}||_2 by Lanczos on R^H R
  double resolvent_norm(const Factor& f, double rtol = 1e-12, int maxit = 300) const;

private:
  Mat H_, Q_;
};

// ||(i k w0 - A)^{-1}||_2 for k = -K..K; throws SingularSystem with the offending k.
std::vector<ResolventRow> resolvent_scan(const Mat& A, double omega0, int K);

// Eigenvalues of [[0, I], [L0, delta L0]] predicted from the eigenvalues of L0.
CVec thick_layer_prediction(const Mat& L0, double delta);
CVec thick_layer_direct(const Mat& L0, double delta);

}  // namespace mfsi
