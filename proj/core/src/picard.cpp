#include "mfsi/picard.hpp"

#include <chrono>
#include <cmath>

namespace mfsi {

namespace {

double pieces(const PicardContext& c, const HarmonicFields& h) {
  const Operators& op = c.op;
  const double dl = c.L.delta;
  auto m = [](const SpMat& A, const CVec& x) -> CVec { return A.cast<cplx>() * x; };
  auto mu = [&](const CVec& x) { return (op.Mu.cast<cplx>().cwiseProduct(x)).dot(x).real(); };
  CVec D = h.d1 + dl * h.d2;
  double s = 0;
  s += mu(h.u) + mu(m(op.LapU, h.u));
  s += op.Wp * h.p.squaredNorm() + mu(m(op.Grad, h.p));
  s += op.Ww * (h.e1.squaredNorm() + m(op.Bilap, h.e1).squaredNorm());
  s += op.Ww * (h.e2.squaredNorm() + m(op.LapD, h.e2).squaredNorm());
  s += op.Md * (h.d1.squaredNorm() + h.d2.squaredNorm());
  s += h.d1.dot(m(op.Kdd, h.d1)).real() + D.dot(m(op.Kdd, D)).real();
  s += m(op.Kdd, D).squaredNorm() / op.Md;
  return s;
}

double l2_pieces(const PicardContext& c, const HarmonicFields& h) {
  const Operators& op = c.op;
  double s = (op.Mu.cast<cplx>().cwiseProduct(h.u)).dot(h.u).real();
  s += op.Wp * h.p.squaredNorm() + op.Ww * (h.e1.squaredNorm() + h.e2.squaredNorm());
  s += op.Md * (h.d1.squaredNorm() + h.d2.squaredNorm());
  return s;
}

}  // namespace

double l2_norm(const PicardContext& c, const PeriodicState& v) {
  double s = 0;
  for (int k = 0; k <= v.K; ++k) s += (k == 0 ? 1.0 : 2.0) * l2_pieces(c, v.h[k]);
  return std::sqrt(s);
}

double picard_norm(const PicardContext& c, const PeriodicState& v) {
  double s = 0;
  for (int k = 0; k <= v.K; ++k) s += (k == 0 ? 1.0 : 2.0) * pieces(c, v.h[k]);
  return std::sqrt(s);
}

PeriodicState difference(const PeriodicState& a, const PeriodicState& b) {
  PeriodicState d = a;
  for (int k = 0; k <= a.K; ++k) {
    d.h[k].u -= b.h[k].u;
    d.h[k].p -= b.h[k].p;
    d.h[k].e1 -= b.h[k].e1;
    d.h[k].e2 -= b.h[k].e2;
    d.h[k].d1 -= b.h[k].d1;
    d.h[k].d2 -= b.h[k].d2;
    d.h[k].c -= b.h[k].c;
  }
  return d;
}

PeriodicState phi_map(const PicardContext& c, const PeriodicState& v, const Forcings& f) {
  Forcings rhs = nonlinear_rhs_harmonics(c.g, c.op, c.cutoff, v, c.M);
  for (int k = 0; k <= v.K; ++k) rhs[k] += f[k];
  return c.S.solve_periodic_linear(rhs);
}

double nonlinear_residual(const PicardContext& c, const PeriodicState& v, const Forcings& f) {
  PeriodicState w = phi_map(c, v, f);
  double n = l2_norm(c, w), d = l2_norm(c, difference(v, w));
  return n > 0 ? d / n : d;
}

double smallness_margin(const PicardContext& c, const PeriodicState& v) {
  double m = 0;
  for (int j = 0; j < c.M; ++j) {
    TimeSample s = sample_at(v, v.T * j / c.M);
    if (s.e1.size()) m = std::max(m, s.e1.cwiseAbs().maxCoeff());
  }
  return m / c.cutoff.delta0();
}

nlohmann::json SolveReport::to_json() const {
  return {{"iterates", iterates},       {"update_norms", updates},     {"contraction_ratios", ratios},
          {"final_residual", final_residual}, {"smallness_margin", smallness_margin}, {"wall_time_s", wall_time},
          {"converged", converged},     {"status", status}};
}

FixedPoint solve_fixed_point(const PicardContext& c, const Forcings& f, double tol, double tol_res, int maxit) {
  auto t0 = std::chrono::steady_clock::now();
  SolveReport r;
  auto stamp = [&] { r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  auto fail = [&](ErrorKind k, const std::string& status, const std::string& msg) {
    r.status = status;
    stamp();
    throw PicardFailure(k, msg, r);
  };
  PeriodicState v = PeriodicState::zero(c.g, c.S.T, c.S.K);
  int growing = 0;
  for (int n = 1; n <= maxit; ++n) {
    PeriodicState w;
    try {
      w = phi_map(c, v, f);
    } catch (const SmallnessError& e) {
      fail(ErrorKind::SmallnessViolation, "smallness-violation",
           "iterate " + std::to_string(n - 1) + " violates max|eta1| <= delta0 at time sample " +
               std::to_string(e.sample) + " (max|eta1| = " + std::to_string(e.max_abs) +
               ", delta0 = " + std::to_string(e.delta0) + ")");
    }
    r.iterates = n;
    r.smallness_margin = std::max(r.smallness_margin, smallness_margin(c, w));
    double upd = picard_norm(c, difference(w, v));
    double nw = picard_norm(c, w);
    r.updates.push_back(upd);
    if (r.updates.size() > 1) {
      double prev = r.updates[r.updates.size() - 2];
      double ratio = prev > 0 ? upd / prev : 0.0;
      r.ratios.push_back(ratio);
      growing = ratio > 1 ? growing + 1 : 0;
    }
    v = std::move(w);
    if (!std::isfinite(upd) || growing >= 3)
      fail(ErrorKind::PicardDivergence, "picard-divergence",
           "update norms grew for 3 consecutive iterates (last ratio " +
               std::to_string(r.ratios.empty() ? 0.0 : r.ratios.back()) + ")");
    if (upd <= tol * nw || nw == 0) {
      r.final_residual = nonlinear_residual(c, v, f);
      if (r.final_residual > tol_res)
        fail(ErrorKind::Numerical, "residual-above-tolerance",
             "updates converged but the nonlinear residual " + std::to_string(r.final_residual) +
                 " exceeds tol_res = " + std::to_string(tol_res));
      r.converged = true;
      r.status = "converged";
      stamp();
      return {std::move(v), r};
    }
  }
  fail(ErrorKind::MaxitExceeded, "maxit-exceeded",
       "no convergence within " + std::to_string(maxit) + " iterates (last update " +
           std::to_string(r.updates.empty() ? 0.0 : r.updates.back()) + ")");
  return {};
}

}  // namespace mfsi
