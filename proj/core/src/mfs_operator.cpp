#include "mfsi/mfs_operator.hpp"

#include <algorithm>

#include "mfsi/errors.hpp"
#include "mfsi/parallel.hpp"

namespace mfsi {

MfsOperator::MfsOperator(const Grid& grid, const Operators& o, const Liftings& l, AmfsOptions options)
    : g(grid), op(o), L(l), opt(options) {
  // discrete stream function at interior corners: u1 = d3 psi, u3 = -d1 psi
  Triplets t;
  for (int j = 1; j < g.nzf; ++j)
    for (int i = 1; i < g.nh; ++i) {
      int m = (j - 1) * (g.nh - 1) + (i - 1);
      t.emplace_back(g.u1(i, j - 1), m, 1 / g.hzf);
      t.emplace_back(g.u1(i, j), m, -1 / g.hzf);
      t.emplace_back(g.u3(i - 1, j), m, -1 / g.hx);
      t.emplace_back(g.u3(i, j), m, 1 / g.hx);
    }
  C_.resize(g.n_u(), n_stream());
  C_.setFromTriplets(t.begin(), t.end());
  Mat ctc = Mat(SpMat(C_.transpose()) * C_) * op.Mu(0);
  ctc_.compute(ctc);
}

X0State MfsOperator::zero() const {
  return {Vec::Zero(g.n_u()), Vec::Zero(g.n_w()), Vec::Zero(g.n_w()), Vec::Zero(g.n_d()), Vec::Zero(g.n_d())};
}

Vec MfsOperator::plate_from_raw(const Vec& x) const {
  Vec e(g.n_w());
  e.head(n_plate()) = x;
  e(n_plate()) = -x.sum();
  return e;
}

Vec MfsOperator::to_raw(const X0State& s) const {
  Vec x(dim());
  x.head(n_stream()) = ctc_.solve(SpMat(C_.transpose()) * (op.Mu(0) * s.v));
  x.segment(off_e1(), n_plate()) = s.e1.head(n_plate());
  x.segment(off_e2(), n_plate()) = s.e2.head(n_plate());
  x.segment(off_d1(), g.n_d()) = s.d1;
  x.segment(off_d2(), g.n_d()) = s.d2;
  return x;
}

X0State MfsOperator::from_raw(const Vec& x) const {
  X0State s;
  s.v = C_ * x.head(n_stream());
  s.e1 = plate_from_raw(x.segment(off_e1(), n_plate()));
  s.e2 = plate_from_raw(x.segment(off_e2(), n_plate()));
  s.d1 = x.segment(off_d1(), g.n_d());
  s.d2 = x.segment(off_d2(), g.n_d());
  return s;
}

Vec MfsOperator::full_velocity(const X0State& s) const {
  if (s.e2.isZero(0)) return s.v;
  auto [w, q] = L.stokes_lift(s.e2);
  return s.v + w - L.helmholtz(w);
}

X0State MfsOperator::apply(const X0State& s) const {
  X0State out;
  Vec w = Vec::Zero(g.n_u()), q = Vec::Zero(g.n_p()), Pw = Vec::Zero(g.n_u());
  Vec Qe = Vec::Zero(g.n_p());
  if (!s.e2.isZero(0)) {
    std::tie(w, q) = L.stokes_lift(s.e2);
    Pw = L.helmholtz(w);
    Qe = q - L.Npr(Pw);
  }
  out.v = L.helmholtz(op.LapU * (s.v - Pw));
  out.e1 = s.e2;
  Vec ub = op.I * s.e2;
  Vec u = s.v + w - Pw;
  Vec force = -(op.Bpl * s.e1) - op.Cpl * s.e2 - SpMat(op.I.transpose()) * (op.Abu * u + op.Abb * ub) +
              L.pressure_force(L.Npr(s.v) + Qe);
  Vec D = s.d1 + L.delta * s.d2, E = s.e1 + L.delta * s.e2;
  if (opt.coupling) force -= op.Ked * D + op.Kee * E;
  out.e2 = L.added_mass_solve(Vec(force / op.Ww));
  out.d1 = s.d2;
  Vec r = op.Kdd * D;
  if (opt.coupling && opt.lame_lifting) r += op.Kde * E;
  out.d2 = -r / op.Md;
  return out;
}

Mat MfsOperator::assemble_raw() const {
  const int n = dim();
  Mat A(n, n);
  parallel_for(n, [&](std::size_t j) {
    Vec x = Vec::Zero(n);
    x(j) = 1;
    A.col(j) = to_raw(apply(from_raw(x)));
  });
  return A;
}

Mat MfsOperator::energy_gram() const {
  const int n = dim(), ns = n_stream(), npl = n_plate(), nd = g.n_d(), nw = g.n_w();
  Mat G = Mat::Zero(n, n);
  G.topLeftCorner(ns, ns) = Mat(SpMat(C_.transpose()) * C_) * op.Mu(0);
  Mat Phi = Mat::Zero(nw, npl);
  for (int j = 0; j < npl; ++j) {
    Phi(j, j) = 1;
    Phi(nw - 1, j) = -1;
  }
  Mat Kee = Mat(op.Kee), Ked = Mat(op.Ked);
  G.block(off_e1(), off_e1(), npl, npl) = Phi.transpose() * (Mat(op.Bpl) + Kee) * Phi;
  G.block(off_e1(), off_d1(), npl, nd) = Phi.transpose() * Ked;
  G.block(off_d1(), off_e1(), nd, npl) = (Phi.transpose() * Ked).transpose();
  G.block(off_d1(), off_d1(), nd, nd) = Mat(op.Kdd);
  Mat T(g.n_u(), npl);
  for (int j = 0; j < npl; ++j) {
    auto [w, q] = L.stokes_lift(Vec(Phi.col(j)));
    T.col(j) = w - L.helmholtz(w);
  }
  Mat M2 = Mat::Identity(nw, nw) * (op.Ww + op.Me) + Mat(SpMat(op.I.transpose()) * op.I) * op.Mb;
  G.block(off_e2(), off_e2(), npl, npl) = Phi.transpose() * M2 * Phi + T.transpose() * T * op.Mu(0);
  G.block(off_d2(), off_d2(), nd, nd) = Mat::Identity(nd, nd) * op.Md;
  return G;
}

PlateRowParts MfsOperator::plate_row_parts() const {
  const int ns = n_stream(), npl = n_plate(), nd = g.n_d();
  PlateRowParts P;
  auto raw = [&](const Vec& force) -> Vec { return L.added_mass_solve(Vec(force / op.Ww)).head(npl); };
  SpMat It = op.I.transpose();
  P.Phi_u.resize(npl, ns);
  parallel_for(ns, [&](std::size_t j) {
    Vec v = C_.col(j);
    P.Phi_u.col(j) = raw(-(It * (op.Abu * v)) + L.pressure_force(L.Npr(v)));
  });
  P.Theta2.resize(npl, npl);
  P.Theta3.resize(npl, npl);
  P.KDs.resize(npl, npl);
  for (int j = 0; j < npl; ++j) {
    Vec x = Vec::Zero(npl);
    x(j) = 1;
    Vec e = plate_from_raw(x);
    P.Theta2.col(j) = raw(-(op.Bpl * e));
    auto [w, q] = L.stokes_lift(e);
    Vec Pw = L.helmholtz(w);
    P.Theta3.col(j) = raw(-(op.Cpl * e) - It * (op.Abu * (w - Pw) + op.Abb * (op.I * e)) +
                          L.pressure_force(q - L.Npr(Pw)));
    if (opt.coupling) {
      Vec Ds = opt.lame_lifting ? L.lame_lift(e) : Vec::Zero(nd);
      // full trace reaction of the lifted field
      P.KDs.col(j) = raw(-(op.Ked * Ds + op.Kee * e));
    } else {
      P.KDs.col(j).setZero();
    }
  }
  P.Kint = Mat::Zero(npl, nd);
  if (opt.coupling) {
    Mat Ked = Mat(op.Ked);
    for (int j = 0; j < nd; ++j) P.Kint.col(j) = raw(Vec(-Ked.col(j)));
  }
  return P;
}

Mat MfsOperator::lame_lifting_raw() const {
  const int npl = n_plate(), nd = g.n_d();
  Mat D = Mat::Zero(nd, npl);
  if (!opt.coupling || !opt.lame_lifting) return D;
  for (int j = 0; j < npl; ++j) {
    Vec x = Vec::Zero(npl);
    x(j) = 1;
    D.col(j) = L.lame_lift(plate_from_raw(x));
  }
  return D;
}

Mat MfsOperator::L0_dense() const { return Mat(op.Kdd) * (-1 / op.Md); }

Vec EnergyForm::raw_from_E(const Vec& y) const { return R.triangularView<Eigen::Upper>().solve(y); }

EnergyForm energy_form(const MfsOperator& A, int max_dofs) {
  if (A.dim() > max_dofs)
    throw Error(ErrorKind::DofBudget, "dense operator with " + std::to_string(A.dim()) + " dofs exceeds the budget of " +
                                          std::to_string(max_dofs) + "; coarsen the grid");
  EnergyForm f;
  f.A_raw = A.assemble_raw();
  Mat G = A.energy_gram();
  Eigen::LLT<Mat> llt(G);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::Numerical, "energy Gram matrix is not positive definite");
  f.R = llt.matrixU();
  Mat RA = f.R.triangularView<Eigen::Upper>() * f.A_raw;
  // A_E = RA R^{-1}  <=>  R^T A_E^T = RA^T
  f.A_E = f.R.transpose().triangularView<Eigen::Lower>().solve(RA.transpose()).transpose();
  return f;
}

double DecouplingReport::max_residual() const {
  double m = 0;
  for (auto& [k, v] : residuals) m = std::max(m, v);
  return m;
}

DecouplingReport verify_decoupling(const MfsOperator& A, const Mat& Araw) {
  const int ns = A.n_stream(), npl = A.n_plate(), nd = A.g.n_d();
  const int n1 = ns + 2 * npl, n2 = 2 * nd;
  const double delta = A.L.delta;
  Mat Ds = A.lame_lifting_raw();
  // S = [I 0; T I], T maps (Pu, eta1, eta2) -> (-D_s eta1, -D_s eta2)
  Mat T = Mat::Zero(n2, n1);
  T.block(0, ns, nd, npl) = -Ds;
  T.block(nd, ns + npl, nd, npl) = -Ds;
  Mat A11 = Araw.topLeftCorner(n1, n1), A12 = Araw.topRightCorner(n1, n2);
  Mat A21 = Araw.bottomLeftCorner(n2, n1), A22 = Araw.bottomRightCorner(n2, n2);
  Mat tl = A11 - A12 * T, tr = A12;
  Mat TA12 = T * A12;
  Mat br = TA12 + A22;
  Mat bl = T * A11 + A21 - br * T;

  // explicit formulas assembled from independent sub-operators
  PlateRowParts P = A.plate_row_parts();
  Mat L0 = A.L0_dense();
  Mat ftl = Mat::Zero(n1, n1);
  ftl.topRows(ns + npl) = Araw.topLeftCorner(ns + npl, n1);  // A_0 and identity rows carry no solid terms
  ftl.block(ns + npl, 0, npl, ns) = P.Phi_u;
  ftl.block(ns + npl, ns, npl, npl) = P.Theta2 + P.KDs;
  ftl.block(ns + npl, ns + npl, npl, npl) = P.Theta3 + delta * P.KDs;
  Mat ftr = Mat::Zero(n1, n2);
  ftr.block(ns + npl, 0, npl, nd) = P.Kint;
  ftr.block(ns + npl, nd, npl, nd) = delta * P.Kint;
  Mat fbl = Mat::Zero(n2, n1);
  fbl.bottomRows(nd) = -Ds * ftl.bottomRows(npl);
  Mat fbr = Mat::Zero(n2, n2);
  fbr.block(0, nd, nd, nd).setIdentity();
  Mat Ls = L0 - Ds * P.Kint;
  fbr.block(nd, 0, nd, nd) = Ls;
  fbr.block(nd, nd, nd, nd) = delta * Ls;

  auto rel = [](const Mat& a, const Mat& b) {
    double s = std::max(b.cwiseAbs().maxCoeff(), a.cwiseAbs().maxCoeff());
    return s == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff() / s;
  };
  DecouplingReport r;
  r.residuals["top-left"] = rel(tl, ftl);
  r.residuals["top-right"] = rel(tr, ftr);
  r.residuals["bottom-left"] = rel(bl, fbl);
  r.residuals["bottom-right"] = rel(br, fbr);
  // S S^{-1} = I checked on a deterministic probe vector
  Vec x = Vec::LinSpaced(n1 + n2, -1, 1);
  Vec y = x;
  y.tail(n2) -= T * x.head(n1);  // S^{-1}
  y.tail(n2) += T * y.head(n1);  // S
  r.S_inverse_error = (y - x).cwiseAbs().maxCoeff();
  return r;
}

}  // namespace mfsi
