#include "mfsi/transform.hpp"

#include <cmath>

#include "mfsi/errors.hpp"
#include "mfsi/fd.hpp"

namespace mfsi {

Cutoff::Cutoff(double alpha) : alpha_(alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("Cutoff: alpha must be positive");
  // smoothstep S(t) = 10t^3 - 15t^4 + 6t^5 has max S' = 15/8 at t = 1/2
  maxd_ = (15.0 / 8.0) / (alpha / 2);
}

std::array<double, 4> Cutoff::eval(double z) const {
  const double w = alpha_ / 2, az = std::abs(z);
  if (az <= w) return {1, 0, 0, 0};
  if (az >= alpha_) return {0, 0, 0, 0};
  const double t = (az - w) / w, sg = z < 0 ? -1.0 : 1.0;
  const double S = t * t * t * (10 - 15 * t + 6 * t * t);
  const double S1 = 30 * t * t * (1 - t) * (1 - t);
  const double S2 = 60 * t * (1 - t) * (1 - 2 * t);
  const double S3 = 60 * (1 - 6 * t + 6 * t * t);
  // psi(z) = 1 - S((|z| - w)/w)
  return {1 - S, -sg * S1 / w, -S2 / (w * w), -sg * S3 / (w * w * w)};
}

SmallnessCheck check_smallness(const Vec& eta1, double delta0) {
  double m = eta1.size() ? eta1.cwiseAbs().maxCoeff() : 0.0;
  return {m <= delta0, m, delta0};
}

namespace {

// second-order jet in (y1, y3)
struct Jet {
  double v = 0, d1 = 0, d3 = 0, d11 = 0, d13 = 0, d33 = 0;
  double d(int l) const { return l == 0 ? d1 : d3; }
  double dd(int l, int m) const { return l == 0 ? (m == 0 ? d11 : d13) : (m == 0 ? d13 : d33); }
};

Jet operator-(const Jet& a) { return {-a.v, -a.d1, -a.d3, -a.d11, -a.d13, -a.d33}; }
Jet operator+(double c, const Jet& a) {
  Jet r = a;
  r.v += c;
  return r;
}
Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v,
          a.d1 * b.v + a.v * b.d1,
          a.d3 * b.v + a.v * b.d3,
          a.d11 * b.v + 2 * a.d1 * b.d1 + a.v * b.d11,
          a.d13 * b.v + a.d1 * b.d3 + a.d3 * b.d1 + a.v * b.d13,
          a.d33 * b.v + 2 * a.d3 * b.d3 + a.v * b.d33};
}
Jet recip(const Jet& g) {
  const double r = 1 / g.v, r2 = r * r, r3 = r2 * r;
  return {r,
          -g.d1 * r2,
          -g.d3 * r2,
          -g.d11 * r2 + 2 * g.d1 * g.d1 * r3,
          -g.d13 * r2 + 2 * g.d1 * g.d3 * r3,
          -g.d33 * r2 + 2 * g.d3 * g.d3 * r3};
}

}  // namespace

TransformPoint transform_at(const Cutoff& c, double y1, double y3, const std::array<double, 4>& e,
                            const std::array<double, 2>& et) {
  const auto ps = c.eval(y3);
  const Jet eta{e[0], e[1], 0, e[2], 0, 0};
  const Jet etap{e[1], e[2], 0, e[3], 0, 0};
  const Jet psi{ps[0], 0, ps[1], 0, 0, ps[2]};
  const Jet psip{ps[1], 0, ps[2], 0, 0, ps[3]};
  const Jet J = 1.0 + psip * eta;
  const Jet iJ = recip(J);
  const Jet sh = psi * etap;  // psi eta'

  Jet A[2][2];  // a(X(y))
  A[0][0] = iJ;
  A[1][0] = sh * iJ;
  A[1][1] = Jet{1, 0, 0, 0, 0, 0};
  Jet G[2][2];  // grad Y at X(y)
  G[0][0] = Jet{1, 0, 0, 0, 0, 0};
  G[1][0] = -(sh * iJ);
  G[1][1] = iJ;

  TransformPoint t{};
  for (int i = 0; i < 4; ++i) t.eta[i] = e[i];
  t.X[0] = y1;
  t.X[1] = y3 + ps[0] * e[0];
  t.J = J.v;
  t.gradX[0][0] = 1;
  t.gradX[1][0] = sh.v;
  t.gradX[1][1] = J.v;
  t.b[0][0] = J.v;
  t.b[1][0] = -sh.v;
  t.b[1][1] = 1;
  double g[2][2];
  for (int l = 0; l < 2; ++l)
    for (int j = 0; j < 2; ++j) g[l][j] = G[l][j].v;
  for (int l = 0; l < 2; ++l)
    for (int j = 0; j < 2; ++j) t.gY[l][j] = g[l][j];
  // d2 Y_l / dx_j^2 = sum_m (d_m g_lj) g_mj
  for (int l = 0; l < 2; ++l) {
    double s = 0;
    for (int j = 0; j < 2; ++j)
      for (int m = 0; m < 2; ++m) s += G[l][j].d(m) * g[m][j];
    t.lapY[l] = s;
  }
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      const Jet& a = A[i][k];
      t.a[i][k] = a.v;
      double lap = 0;
      for (int j = 0; j < 2; ++j) {
        double dj = 0;
        for (int l = 0; l < 2; ++l) dj += a.d(l) * g[l][j];
        t.da[j][i][k] = dj;
        for (int l = 0; l < 2; ++l)
          for (int m = 0; m < 2; ++m) lap += g[l][j] * g[m][j] * a.dd(l, m);
      }
      for (int l = 0; l < 2; ++l) lap += t.lapY[l] * a.d(l);
      t.lapa[i][k] = lap;
    }
  // time derivatives: d_t X = (0, psi eta_t), d_t Y = -grad Y d_t X
  t.dtX[0] = 0;
  t.dtX[1] = ps[0] * et[0];
  for (int l = 0; l < 2; ++l) t.dtY[l] = -g[l][1] * t.dtX[1];
  const double dtJ = ps[1] * et[0];
  double dtA[2][2] = {{-dtJ / (J.v * J.v), 0}, {ps[0] * et[1] / J.v - sh.v * dtJ / (J.v * J.v), 0}};
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      double s = dtA[i][k];
      for (int l = 0; l < 2; ++l) s += A[i][k].d(l) * t.dtY[l];
      t.dta[i][k] = s;
    }
  return t;
}

PlateInterp::PlateInterp(const Grid& g, const Vec& interior) : nodes_(g.nh + 1), vals_(g.nh + 1, 0.0) {
  for (int i = 0; i <= g.nh; ++i) nodes_[i] = g.x(i);
  for (int i = 1; i < g.nh; ++i) vals_[i] = interior(g.w(i));
}

std::array<double, 4> PlateInterp::eval(double s) const {
  Stencil st = nearest_stencil(nodes_, s, 6, 3);
  std::array<double, 4> r{};
  for (int j = 0; j < st.npts; ++j)
    for (int k = 0; k < 4; ++k) r[k] += st.weight(j, k) * vals_[st.start + j];
  return r;
}

double inverse_y3(const Cutoff& c, double x3, double eta, double tol) {
  auto f = [&](double y) { return y + c.eval(y)[0] * eta - x3; };
  double lo = x3 - std::abs(eta) - tol, hi = x3 + std::abs(eta) + tol;
  double y = x3 - (std::abs(x3) <= c.alpha() / 2 ? eta : 0.0);
  for (int it = 0; it < 200; ++it) {
    double fy = f(y);
    if (std::abs(fy) <= tol) return y;
    if (fy > 0)
      hi = y;
    else
      lo = y;
    double dfy = 1 + c.eval(y)[1] * eta;
    double yn = y - fy / dfy;
    if (!(yn > lo && yn < hi) || dfy <= 0) yn = 0.5 * (lo + hi);
    if (hi - lo < tol) return yn;
    y = yn;
  }
  throw Error(ErrorKind::Numerical, "inverse_y3: no convergence (det grad X <= 0?)");
}

DiffeoFields build_diffeo(const Grid& g, const Cutoff& c, const Vec& eta1, const Vec& eta2, int sample) {
  auto sm = check_smallness(eta1, c.delta0());
  if (!sm.ok) throw SmallnessError(sm.max_abs, sm.delta0, sample);
  PlateInterp p1(g, eta1), p2(g, eta2);
  auto at = [&](double y1, double y3) {
    auto e = p1.eval(y1);
    auto et = p2.eval(y1);
    return transform_at(c, y1, y3, e, {et[0], et[1]});
  };
  DiffeoFields d;
  d.faces.reserve(g.n_u());
  for (int k = 0; k < g.n_u(); ++k) {
    auto [x, z] = g.u_pos(k);
    d.faces.push_back(at(x, z));
  }
  for (int i = 0; i < g.nh; ++i) d.interface.push_back(at(g.xc(i), 0.0));
  for (int i = 1; i < g.nh; ++i) d.nodes.push_back(at(g.x(i), 0.0));
  return d;
}

}  // namespace mfsi
