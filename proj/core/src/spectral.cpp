#include "mfsi/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "mfsi/errors.hpp"
#include "mfsi/parallel.hpp"

namespace mfsi {

int SpectralReport::n_unstable() const {
  int n = 0;
  for (int i = 0; i < eigenvalues.size(); ++i) n += eigenvalues(i).real() >= 0;
  return n;
}

namespace {

std::vector<int> order_by_real(const CVec& ev) {
  std::vector<int> idx(ev.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (ev(a).real() != ev(b).real()) return ev(a).real() > ev(b).real();
    return ev(a).imag() > ev(b).imag();
  });
  return idx;
}

}  // namespace

SpectralReport compute_spectrum(const Mat& A, bool vectors) {
  Eigen::EigenSolver<Mat> es(A, vectors);
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::Numerical, "dense eigensolver failed to converge on a " + std::to_string(A.rows()) + "x" +
                                          std::to_string(A.cols()) + " matrix (max |a_ij| = " +
                                          std::to_string(A.cwiseAbs().maxCoeff()) + ")");
  CVec ev = es.eigenvalues();
  auto idx = order_by_real(ev);
  SpectralReport r;
  const int n = static_cast<int>(ev.size());
  r.eigenvalues.resize(n);
  for (int i = 0; i < n; ++i) r.eigenvalues(i) = ev(idx[i]);
  r.spectral_bound = n ? r.eigenvalues(0).real() : 0;
  r.min_abs = n ? r.eigenvalues.cwiseAbs().minCoeff() : 0;
  r.energy_residual.assign(n, std::numeric_limits<double>::quiet_NaN());
  r.sign_consistent.assign(n, true);
  if (vectors) {
    CMat V = es.eigenvectors();
    r.eigenvectors.resize(n, n);
    for (int i = 0; i < n; ++i) r.eigenvectors.col(i) = V.col(idx[i]);
    CMat AV = A.cast<cplx>() * r.eigenvectors;
    r.residual.resize(n);
    for (int i = 0; i < n; ++i)
      r.residual[i] = (AV.col(i) - r.eigenvalues(i) * r.eigenvectors.col(i)).norm() / r.eigenvectors.col(i).norm();
  }
  return r;
}

ComplexFields fields_from_raw(const MfsOperator& A, const CVec& raw) {
  X0State re = A.from_raw(raw.real()), im = A.from_raw(raw.imag());
  const cplx I(0, 1);
  ComplexFields f;
  Vec ur = A.full_velocity(re), ui = A.full_velocity(im);
  f.u = ur.cast<cplx>() + I * ui.cast<cplx>();
  f.e1 = re.e1.cast<cplx>() + I * im.e1.cast<cplx>();
  f.e2 = re.e2.cast<cplx>() + I * im.e2.cast<cplx>();
  f.d1 = re.d1.cast<cplx>() + I * im.d1.cast<cplx>();
  f.d2 = re.d2.cast<cplx>() + I * im.d2.cast<cplx>();
  f.ub = A.op.I.cast<cplx>() * f.e2;
  return f;
}

double energy_identity_residual(const MfsOperator& A, cplx lambda, const CVec& raw, bool* sign_ok) {
  if (raw.size() != A.dim()) throw std::invalid_argument("energy identity: vector has wrong size");
  if (raw.cwiseAbs().maxCoeff() == 0) throw std::invalid_argument("energy identity: zero vector is not an eigenvector");
  const Operators& op = A.op;
  ComplexFields f = fields_from_raw(A, raw);
  auto quad = [](const SpMat& M, const CVec& x, const CVec& y) { return y.dot(M.cast<cplx>() * x); };
  double kin = (op.Mu.cast<cplx>().asDiagonal() * f.u).dot(f.u).real() + op.Mb * f.ub.squaredNorm() +
               (op.Ww + op.Me) * f.e2.squaredNorm() + op.Md * f.d2.squaredNorm();
  double visc = (quad(op.Auu, f.u, f.u) + quad(op.Aub, f.ub, f.u) + quad(op.Abu, f.u, f.ub) + quad(op.Abb, f.ub, f.ub)).real();
  double bend = quad(op.Bpl, f.e1, f.e1).real();
  double damp = quad(op.Cpl, f.e2, f.e2).real();
  auto Es = [&](const CVec& d, const CVec& e) {
    return (quad(op.Kdd, d, d) + quad(op.Kde, e, d) + quad(op.Ked, d, e) + quad(op.Kee, e, e)).real();
  };
  double es1 = A.opt.coupling ? Es(f.d1, f.e1) : quad(op.Kdd, f.d1, f.d1).real();
  double es2 = A.opt.coupling ? Es(f.d2, f.e2) : quad(op.Kdd, f.d2, f.d2).real();
  const double delta = A.L.delta;
  cplx terms[] = {lambda * kin, visc, std::conj(lambda) * bend, damp, std::conj(lambda) * es1, delta * es2};
  cplx sum = 0;
  double mag = 0;
  for (auto t : terms) {
    sum += t;
    mag += std::abs(t);
  }
  if (sign_ok) {
    // Re: Re(lambda) (kin + bend + es1) = -(visc + damp + delta es2) <= 0
    double diss = visc + damp + delta * es2, stored = kin + bend + es1;
    *sign_ok = diss >= -1e-12 * mag && stored > 0 && lambda.real() <= 1e-12 * std::abs(lambda);
  }
  return mag == 0 ? 0.0 : std::abs(sum) / mag;
}

ShiftedHessenberg::ShiftedHessenberg(const Mat& A) {
  Eigen::HessenbergDecomposition<Mat> hd(A);
  H_ = hd.matrixH();
  Q_ = hd.matrixQ();
}

ShiftedHessenberg::Factor ShiftedHessenberg::factor(cplx s) const {
  const int n = size();
  Factor f;
  f.U = -H_.cast<cplx>();
  f.U.diagonal().array() += s;
  f.l = CVec::Zero(std::max(n - 1, 0));
  f.swap.assign(std::max(n - 1, 0), 0);
  for (int j = 0; j + 1 < n; ++j) {
    if (std::abs(f.U(j + 1, j)) > std::abs(f.U(j, j))) {
      for (int c = j; c < n; ++c) std::swap(f.U(j, c), f.U(j + 1, c));
      f.swap[j] = 1;
    }
    if (f.U(j, j) == cplx(0)) continue;
    cplx m = f.U(j + 1, j) / f.U(j, j);
    f.l(j) = m;
    f.U(j + 1, j) = 0;
    for (int c = j + 1; c < n; ++c) f.U(j + 1, c) -= m * f.U(j, c);
  }
  return f;
}

double ShiftedHessenberg::Factor::min_pivot() const { return U.diagonal().cwiseAbs().minCoeff(); }

CVec ShiftedHessenberg::Factor::solve(const CVec& b) const {
  const int n = static_cast<int>(U.rows());
  CVec y = b;
  for (int j = 0; j + 1 < n; ++j) {
    if (swap[j]) std::swap(y(j), y(j + 1));
    y(j + 1) -= l(j) * y(j);
  }
  for (int j = n - 1; j >= 0; --j) {
    y(j) /= U(j, j);
    if (j > 0) y.head(j) -= y(j) * U.col(j).head(j);
  }
  return y;
}

CVec ShiftedHessenberg::Factor::solve_adjoint(const CVec& b) const {
  const int n = static_cast<int>(U.rows());
  CVec y(n);
  for (int j = 0; j < n; ++j) {
    cplx acc = b(j) - (j > 0 ? U.col(j).head(j).dot(y.head(j)) : cplx(0));
    y(j) = acc / std::conj(U(j, j));
  }
  for (int j = n - 2; j >= 0; --j) {
    y(j) -= std::conj(l(j)) * y(j + 1);
    if (swap[j]) std::swap(y(j), y(j + 1));
  }
  return y;
}

CVec ShiftedHessenberg::solve(const Factor& f, const CVec& b) const {
  CVec y = Q_.transpose().cast<cplx>() * b;
  return Q_.cast<cplx>() * f.solve(y);
}

double ShiftedHessenberg::resolvent_norm(const Factor& f, double rtol, int maxit) const {
  // Lanczos with full reorthogonalisation on R^H R, R = (s - H)^{-1}
  const int n = size();
  maxit = std::min(maxit, n);
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> N;
  CMat V(n, maxit + 1);
  for (int i = 0; i < n; ++i) V(i, 0) = cplx(N(rng), N(rng));
  V.col(0).normalize();
  std::vector<double> alpha, beta;
  double prev = 0;
  for (int j = 0; j < maxit; ++j) {
    CVec y = f.solve(V.col(j));
    if (!std::isfinite(y.norm())) return std::numeric_limits<double>::infinity();
    CVec w = f.solve_adjoint(y);
    alpha.push_back(V.col(j).dot(w).real());
    for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * w);
    double b = w.norm();
    const int m = j + 1;
    Mat T = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i) T(i, i) = alpha[i];
    for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = beta[i];
    double top = Eigen::SelfAdjointEigenSolver<Mat>(T, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    if ((j > 2 && std::abs(top - prev) <= rtol * top) || b <= 1e-14 * top) return std::sqrt(top);
    prev = top;
    beta.push_back(b);
    V.col(j + 1) = w / b;
  }
  return std::sqrt(prev);
}

std::vector<ResolventRow> resolvent_scan(const Mat& A, double omega0, int K) {
  ShiftedHessenberg sh(A);
  std::vector<double> norm(K + 1);
  std::vector<double> pivot(K + 1);
  parallel_for(K + 1, [&](std::size_t k) {
    auto f = sh.factor(cplx(0, omega0 * static_cast<double>(k)));
    pivot[k] = f.min_pivot();
    norm[k] = pivot[k] == 0 ? std::numeric_limits<double>::infinity() : sh.resolvent_norm(f);
  });
  for (int k = 0; k <= K; ++k)
    if (!std::isfinite(norm[k]) || norm[k] > 1e14)
      throw Error(ErrorKind::SingularSystem,
                  "shift i*k*omega0 is (numerically) in the spectrum at k = " + std::to_string(k) +
                      " (smallest pivot " + std::to_string(pivot[k]) + ")");
  std::vector<ResolventRow> rows;
  // real A: ||R(-i w)|| = ||R(i w)||
  for (int k = -K; k <= K; ++k) {
    double r = norm[std::abs(k)];
    rows.push_back({k, r, std::abs(k) * r});
  }
  return rows;
}

CVec thick_layer_prediction(const Mat& L0, double delta) {
  Eigen::SelfAdjointEigenSolver<Mat> es(L0, Eigen::EigenvaluesOnly);
  const int n = static_cast<int>(L0.rows());
  CVec out(2 * n);
  for (int i = 0; i < n; ++i) {
    // lambda^2 - delta mu lambda - mu = 0
    double mu = es.eigenvalues()(i);
    cplx disc = std::sqrt(cplx(delta * delta * mu * mu + 4 * mu, 0));
    out(2 * i) = 0.5 * (delta * mu + disc);
    out(2 * i + 1) = 0.5 * (delta * mu - disc);
  }
  return out;
}

CVec thick_layer_direct(const Mat& L0, double delta) {
  const int n = static_cast<int>(L0.rows());
  Mat B = Mat::Zero(2 * n, 2 * n);
  B.topRightCorner(n, n).setIdentity();
  B.bottomLeftCorner(n, n) = L0;
  B.bottomRightCorner(n, n) = delta * L0;
  return Eigen::EigenSolver<Mat>(B, false).eigenvalues();
}

}  // namespace mfsi
