#include "mfsi/nonlinear.hpp"

#include "mfsi/parallel.hpp"

namespace mfsi {

FlowField::FlowField(const Grid& g, const Operators&, const Vec& u, const Vec& e2, const Vec& p) {
  const int nh = g.nh, nz = g.nzf;
  std::vector<double> x1(nh + 1), z1(nz + 2), x3(nh + 2), z3(nz + 1), xp(nh), zp(nz);
  for (int i = 0; i <= nh; ++i) x1[i] = g.x(i);
  z1[0] = -g.Hf;
  for (int j = 0; j < nz; ++j) z1[j + 1] = g.zfc(j);
  z1[nz + 1] = 0;
  x3[0] = 0;
  for (int i = 0; i < nh; ++i) x3[i + 1] = g.xc(i);
  x3[nh + 1] = g.L;
  for (int j = 0; j <= nz; ++j) z3[j] = g.zf(j);
  for (int i = 0; i < nh; ++i) xp[i] = g.xc(i);
  for (int j = 0; j < nz; ++j) zp[j] = g.zfc(j);
  u1_ = TensorField(x1, z1);
  u3_ = TensorField(x3, z3);
  p_ = TensorField(xp, zp);
  for (int j = 0; j < nz; ++j)
    for (int i = 1; i < nh; ++i) u1_.at(i, j + 1) = u(g.u1(i, j));
  for (int j = 1; j < nz; ++j)
    for (int i = 0; i < nh; ++i) u3_.at(i + 1, j) = u(g.u3(i, j));
  // interface row: cubic interpolation of the plate velocity (zero at the clamped ends)
  std::vector<double> sn(nh + 1), sv(nh + 1, 0.0);
  for (int i = 0; i <= nh; ++i) sn[i] = g.x(i);
  for (int i = 1; i < nh; ++i) sv[i] = e2(g.w(i));
  for (int i = 0; i < nh; ++i) {
    Stencil st = nearest_stencil(sn, g.xc(i), 4, 0);
    double v = 0;
    for (int a = 0; a < 4; ++a) v += st.weight(a, 0) * sv[st.start + a];
    u3_.at(i + 1, nz) = v;
  }
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nh; ++i) p_.at(i, j) = p(g.p(i, j));
}

FlowJet FlowField::at(double x, double z) const {
  FlowJet j{};
  const TensorField* f[2] = {&u1_, &u3_};
  for (int k = 0; k < 2; ++k) {
    auto d = f[k]->derivs(x, z);
    j.u[k] = d[0];
    j.du[k][0] = d[1];
    j.du[k][1] = d[2];
    j.ddu[k][0][0] = d[3];
    j.ddu[k][0][1] = j.ddu[k][1][0] = d[4];
    j.ddu[k][1][1] = d[5];
  }
  auto dp = p_.derivs(x, z);
  j.dp[0] = dp[1];
  j.dp[1] = dp[2];
  return j;
}

double convection_point(int a, const FlowJet& j) { return j.u[0] * j.du[a][0] + j.u[1] * j.du[a][1]; }

double F_point(int a, const TransformPoint& t, const FlowJet& j) {
  double F = 0;
  for (int i = 0; i < 2; ++i) {
    const double b = t.b[a][i];
    if (b == 0) continue;
    for (int k = 0; k < 2; ++k) {
      F += b * t.lapa[i][k] * j.u[k];
      F -= b * t.dta[i][k] * j.u[k];
      for (int jj = 0; jj < 2; ++jj) {
        const double da = t.da[jj][i][k];
        for (int l = 0; l < 2; ++l) F += 2 * b * da * j.du[k][l] * t.gY[l][jj];
        for (int m = 0; m < 2; ++m) F -= b * da * t.a[jj][m] * j.u[k] * j.u[m];
      }
    }
  }
  for (int l = 0; l < 2; ++l) {
    for (int m = 0; m < 2; ++m) {
      double defect = t.gY[l][0] * t.gY[m][0] + t.gY[l][1] * t.gY[m][1] - (l == m);
      F += j.ddu[a][l][m] * defect;
    }
    F += j.du[a][l] * t.lapY[l];
    F -= j.du[a][l] * t.dtY[l];
  }
  for (int k = 0; k < 2; ++k) {
    // b grad(pi o Y) - grad pi; equals J (gY gY^T - I) grad pi wherever J = 1
    double defect = t.J * (t.gY[a][0] * t.gY[k][0] + t.gY[a][1] * t.gY[k][1]) - (a == k);
    F -= j.dp[k] * defect;
  }
  F -= convection_point(a, j) / t.J;
  return F;
}

double G_point(const TransformPoint& t, const FlowJet& j) {
  const double ep = t.eta[1];
  double G = 0;
  for (int k = 0; k < 2; ++k) {
    G += (ep * (t.da[1][0][k] + t.da[0][1][k]) - 2 * t.da[1][1][k]) * j.u[k];
    for (int l = 0; l < 2; ++l) {
      double c = ep * (t.a[0][k] * t.gY[l][1] + t.a[1][k] * t.gY[l][0]) -
                 2 * (t.a[1][k] * t.gY[l][1] - (k == 1 && l == 1));
      G += c * j.du[k][l];
    }
  }
  return G;
}

FValues eval_F(const Grid& g, const DiffeoFields& d, const FlowField& f) {
  FValues r{Vec(g.n_u()), Vec(g.nh)};
  for (int k = 0; k < g.n_u(); ++k) {
    auto [x, z] = g.u_pos(k);
    r.interior(k) = F_point(g.u_comp(k), d.faces[k], f.at(x, z));
  }
  for (int i = 0; i < g.nh; ++i) r.interface(i) = F_point(1, d.interface[i], f.at(g.xc(i), 0.0));
  return r;
}

Vec eval_G(const Grid& g, const DiffeoFields& d, const FlowField& f) {
  Vec G(g.n_w());
  for (int i = 1; i < g.nh; ++i) G(g.w(i)) = G_point(d.nodes[g.w(i)], f.at(g.x(i), 0.0));
  return G;
}

Forcings nonlinear_rhs_harmonics(const Grid& g, const Operators& op, const Cutoff& c, const PeriodicState& v,
                                 int M) {
  std::vector<Vec> fu(M), fb(M), gg(M);
  parallel_for(M, [&](std::size_t m) {
    double t = v.T * static_cast<double>(m) / M;
    TimeSample s = sample_at(v, t);
    DiffeoFields d = build_diffeo(g, c, s.e1, s.e2, static_cast<int>(m));
    FlowField ff(g, op, s.u, s.e2, s.p);
    FValues F = eval_F(g, d, ff);
    fu[m] = F.interior;
    fb[m] = F.interface;
    gg[m] = plate_mean_project(eval_G(g, d, ff));
  });
  auto cu = dft_coefficients(fu, v.K), cb = dft_coefficients(fb, v.K), cg = dft_coefficients(gg, v.K);
  Forcings out(v.K + 1, HarmonicForcing::zero(g));
  for (int k = 0; k <= v.K; ++k) {
    out[k].f_u = cu[k];
    out[k].f_b = cb[k];
    out[k].g = cg[k];
  }
  out[0].f_u = out[0].f_u.real().cast<cplx>();
  out[0].f_b = out[0].f_b.real().cast<cplx>();
  out[0].g = out[0].g.real().cast<cplx>();
  return out;
}

}  // namespace mfsi
