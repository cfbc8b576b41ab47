#include "mfsi/liftings.hpp"

#include <cmath>
#include <iostream>

#include "mfsi/errors.hpp"

namespace mfsi {

namespace {
void check(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::SingularSystem, std::string("factorization failed: ") + what);
}
}  // namespace

Liftings::Liftings(const Grid& grid, const Operators& o, double d) : g(grid), op(o), delta(d) {
  const int nu = g.n_u(), np = g.n_p();
  {
    // [Auu, -Du^T Wp, 0; -Wp Du, 0, Wp 1; 0, Wp 1^T, 0]
    Triplets t;
    for (int k = 0; k < op.Auu.outerSize(); ++k)
      for (SpMat::InnerIterator it(op.Auu, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < op.Du.outerSize(); ++k)
      for (SpMat::InnerIterator it(op.Du, k); it; ++it) {
        t.emplace_back(it.col(), nu + it.row(), -op.Wp * it.value());
        t.emplace_back(nu + it.row(), it.col(), -op.Wp * it.value());
      }
    for (int c = 0; c < np; ++c) {
      t.emplace_back(nu + c, nu + np, op.Wp);
      t.emplace_back(nu + np, nu + c, op.Wp);
    }
    SpMat A(nu + np + 1, nu + np + 1);
    A.setFromTriplets(t.begin(), t.end());
    stokes_.compute(A);
    check(stokes_.info() == Eigen::Success, "Stokes");
  }
  {
    // [Du Du^T, 1; 1^T, 0] (Mu = Wp, so Lap_N = -Du Du^T)
    SpMat S = op.Du * SpMat(op.Du.transpose());
    Triplets t;
    for (int k = 0; k < S.outerSize(); ++k)
      for (SpMat::InnerIterator it(S, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    double sc = 1.0 / (g.hx * g.hx);
    for (int c = 0; c < np; ++c) {
      t.emplace_back(c, np, sc);
      t.emplace_back(np, c, sc);
    }
    SpMat A(np + 1, np + 1);
    A.setFromTriplets(t.begin(), t.end());
    neumann_.compute(A);
    check(neumann_.info() == Eigen::Success, "Neumann");
  }
  lame_.compute(op.Kdd);
  check(lame_.info() == Eigen::Success, "Lame");

  const int nw = g.n_w();
  Msfull_.resize(nw, nw);
  Mat IbI = Mat(SpMat(op.I.transpose()) * op.I) * op.Mb;
  for (int j = 0; j < nw; ++j) {
    Vec e = Vec::Zero(nw);
    e(j) = 1;
    Vec col = (op.Ww + op.Me) * e + IbI * e + pressure_force(N1(e));
    Msfull_.col(j) = col / op.Ww;
  }
  // N1 needs a mean-zero argument; the constant mode of Msfull_ is never used
  // because the bordered solve below restricts to mean-zero fields.
  Ms_ = Msfull_.rowwise() - Msfull_.colwise().mean();
  Mat B = Mat::Zero(nw + 1, nw + 1);
  B.topLeftCorner(nw, nw) = Msfull_;
  B.block(0, nw, nw, 1).setOnes();
  B.block(nw, 0, 1, nw).setOnes();
  ms_lu_.compute(B);
  ms_cond_ = ms_lu_.rcond() > 0 ? 1.0 / ms_lu_.rcond() : INFINITY;
  if (ms_cond_ > 1e8) std::cerr << "warning: added mass operator condition estimate " << ms_cond_ << "\n";
}

std::pair<Vec, Vec> Liftings::stokes_lift(const Vec& b) const {
  const int nu = g.n_u(), np = g.n_p();
  if (b.size() != g.n_w()) throw std::invalid_argument("stokes_lift: size");
  if (std::abs(b.sum()) > 1e-10 * (1 + b.cwiseAbs().sum()))
    throw std::invalid_argument("stokes_lift: interface data must be mean-zero");
  Vec ib = op.I * b;
  Vec rhs = Vec::Zero(nu + np + 1);
  rhs.head(nu) = -(op.Aub * ib);
  rhs.segment(nu, np) = op.Wp * (op.Db * ib);
  Vec x = stokes_.solve(rhs);
  return {x.head(nu), x.segment(nu, np)};
}

Vec Liftings::neumann_cells(const Vec& r) const {
  const int np = g.n_p();
  Vec rhs(np + 1);
  rhs.head(np) = -(r.array() - r.mean()).matrix();
  rhs(np) = 0;
  return neumann_.solve(rhs).head(np);
}

Vec Liftings::neumann_solve(const Vec& c) const {
  const int nh = g.nh, nz = g.nzf;
  if (c.size() != 2 * nh + 2 * nz) throw std::invalid_argument("neumann_solve: flux layout size");
  double total = c.head(2 * nh).sum() * g.hx + c.tail(2 * nz).sum() * g.hzf;
  double scale = c.cwiseAbs().sum() * std::max(g.hx, g.hzf);
  if (std::abs(total) > 1e-10 * (1 + scale))
    throw std::invalid_argument("neumann_solve: boundary flux integral " + std::to_string(total) + " is not zero");
  // Lap_N phi + (boundary flux divergence) = 0
  Vec r = Vec::Zero(g.n_p());
  for (int i = 0; i < nh; ++i) {
    r(g.p(i, 0)) -= c(i) / g.hzf;
    r(g.p(i, nz - 1)) -= c(nh + i) / g.hzf;
  }
  for (int j = 0; j < nz; ++j) {
    r(g.p(0, j)) -= c(2 * nh + j) / g.hx;
    r(g.p(nh - 1, j)) -= c(2 * nh + nz + j) / g.hx;
  }
  return neumann_cells(r);
}

Vec Liftings::N1(const Vec& c) const { return neumann_cells(-(op.Db * (op.I * c))); }

Vec Liftings::N2(const Vec& f) const { return neumann_cells(op.Du * f); }

Vec Liftings::helmholtz(const Vec& f) const { return f - op.Grad * N2(f); }

Vec Liftings::Npr(const Vec& v) const { return neumann_cells(op.Du * (op.LapU * v)); }

Vec Liftings::lame_lift(const Vec& bz, const Vec* bx) const {
  Vec r = -(op.Kde * bz);
  if (bx) r -= op.Kdx * (*bx);
  return lame_.solve(r);
}

Vec Liftings::lame_solve(const Vec& r) const { return lame_.solve(r); }

Vec Liftings::pressure_force(const Vec& p) const {
  return SpMat(op.I.transpose()) * (SpMat(op.Db.transpose()) * (op.Wp * p));
}

Vec Liftings::added_mass_apply(const Vec& f) const { return Ms_ * f; }

Vec Liftings::added_mass_solve(const Vec& r) const {
  const int nw = g.n_w();
  Vec rhs = Vec::Zero(nw + 1);
  rhs.head(nw) = plate_mean_project(r);
  return ms_lu_.solve(rhs).head(nw);
}

CVec Liftings::added_mass_solve(const CVec& r) const {
  CVec out(r.size());
  out.real() = added_mass_solve(Vec(r.real()));
  out.imag() = added_mass_solve(Vec(r.imag()));
  return out;
}

Vec Liftings::K_int(const Vec& d) const { return plate_mean_project(Vec(-(op.Ked * d) / op.Ww)); }

Vec Liftings::K_gamma(const Vec& eta) const { return plate_mean_project(Vec(-(op.Kee * eta) / op.Ww)); }

Vec Liftings::stress_trace_K(const Vec& f) const {
  const int nh = g.nh;
  if (f.size() != 2 * (nh + 1) * (g.nzs + 1)) throw std::invalid_argument("stress_trace_K: full solid vector expected");
  auto val = [&](int c, int i, int j) { return f(2 * op.solid_node(i, j) + c); };
  const double mu = op.mu_s, lam = op.lambda_s, hs = g.hzs, h = g.hx;
  Vec out(g.n_w());
  for (int i = 1; i < nh; ++i) {
    double dz = (-3 * val(1, i, 0) + 4 * val(1, i, 1) - val(1, i, 2)) / (2 * hs);
    double dx = (val(0, i + 1, 0) - val(0, i - 1, 0)) / (2 * h);
    out(g.w(i)) = (2 * mu + lam) * dz + lam * dx;
  }
  return plate_mean_project(out);
}

}  // namespace mfsi
