#include "mfsi/grid.hpp"

#include <cmath>

#include "mfsi/errors.hpp"

namespace mfsi {

Grid::Grid(const GeometryConfig& c)
    : dim(c.dim), L(c.L), Hf(c.H_f), Hs(c.H_s), alpha(c.alpha), nh(c.n_h), nzf(c.n_zf), nzs(c.n_zs) {
  std::vector<std::string> e;
  if (dim != 2) e.push_back("only dim = 2 is supported");
  if (!(L > 0) || !(Hf > 0) || !(Hs > 0)) e.push_back("extents must be positive");
  if (!(alpha > 0)) e.push_back("alpha must be positive");
  if (alpha >= std::min(Hf, Hs)) e.push_back("cutoff exceeds domain (alpha >= min(H_f, H_s))");
  if (nh < 6 || nzf < 6 || nzs < 6) e.push_back("cell counts below stencil minimum (6 per direction)");
  if (!e.empty()) throw ConfigError(e);
  hx = L / nh;
  hzf = Hf / nzf;
  hzs = Hs / nzs;
}

std::pair<double, double> Grid::u_pos(int k) const {
  if (k < n_u1()) return {x(k % (nh - 1) + 1), zfc(k / (nh - 1))};
  k -= n_u1();
  return {xc(k % nh), zf(k / nh + 1)};
}

std::pair<double, double> Grid::d_pos(int k) const {
  int q = k / 2;
  return {x(q % (nh - 1) + 1), zs(q / (nh - 1) + 1)};
}

namespace {

SpMat from_triplets(int r, int c, const Triplets& t) {
  SpMat m(r, c);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Q1 element stiffness for isotropic Lame on an h x k rectangle, 2x2 Gauss.
Eigen::Matrix<double, 8, 8> q1_stiffness(double h, double k, double mu, double lam) {
  Eigen::Matrix<double, 8, 8> Ke = Eigen::Matrix<double, 8, 8>::Zero();
  Eigen::Matrix3d D;
  D << lam + 2 * mu, lam, 0, lam, lam + 2 * mu, 0, 0, 0, mu;
  const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  const double xs[4] = {0, 1, 1, 0}, zs[4] = {0, 0, 1, 1};
  for (double xi : gp)
    for (double ze : gp) {
      Eigen::Matrix<double, 3, 8> B = Eigen::Matrix<double, 3, 8>::Zero();
      for (int a = 0; a < 4; ++a) {
        double sx = xs[a] ? 1 : -1, sz = zs[a] ? 1 : -1;
        double fx = xs[a] ? xi : 1 - xi, fz = zs[a] ? ze : 1 - ze;
        double dx = sx * fz / h, dz = sz * fx / k;
        B(0, 2 * a) = dx;
        B(1, 2 * a + 1) = dz;
        B(2, 2 * a) = dz;
        B(2, 2 * a + 1) = dx;
      }
      Ke += B.transpose() * D * B * (h * k / 4);
    }
  return Ke;
}

}  // namespace

Operators::Operators(const Grid& grid, double mu, double lam) : g(grid), mu_s(mu), lambda_s(lam) {
  const int nh = g.nh, nz = g.nzf;
  const double hx = g.hx, hz = g.hzf;
  Mu = Vec::Constant(g.n_u(), hx * hz);
  Mb = hx * hz / 2;
  Wp = hx * hz;
  Ww = hx;
  Md = hx * g.hzs;
  Me = hx * g.hzs / 2;

  // category of each full face: >= 0 interior index, -2-k interface k, -1 zero
  const int nf = n_full();
  std::vector<int> cat(nf, -1);
  for (int j = 0; j < nz; ++j)
    for (int i = 1; i < nh; ++i) cat[full_u1(i, j)] = g.u1(i, j);
  for (int j = 1; j < nz; ++j)
    for (int i = 0; i < nh; ++i) cat[full_u3(i, j)] = g.u3(i, j);
  for (int i = 0; i < nh; ++i) cat[full_u3(i, nz)] = -2 - i;

  Triplets t11, t33, t13;
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nh; ++i) {
      int c = g.p(i, j);
      t11.emplace_back(c, full_u1(i + 1, j), 1 / hx);
      t11.emplace_back(c, full_u1(i, j), -1 / hx);
      t33.emplace_back(c, full_u3(i, j + 1), 1 / hz);
      t33.emplace_back(c, full_u3(i, j), -1 / hz);
    }
  wcorner.resize((nh + 1) * (nz + 1));
  for (int j = 0; j <= nz; ++j)
    for (int i = 0; i <= nh; ++i) {
      int r = j * (nh + 1) + i;
      wcorner(r) = hx * hz * ((i == 0 || i == nh) ? 0.5 : 1.0) * ((j == 0 || j == nz) ? 0.5 : 1.0);
      // d u1 / dz with odd reflection across the bottom wall and the interface
      if (i > 0 && i < nh) {
        if (j == 0)
          t13.emplace_back(r, full_u1(i, 0), 2 / hz);
        else if (j == nz)
          t13.emplace_back(r, full_u1(i, nz - 1), -2 / hz);
        else {
          t13.emplace_back(r, full_u1(i, j), 1 / hz);
          t13.emplace_back(r, full_u1(i, j - 1), -1 / hz);
        }
      }
      // d u3 / dx with odd reflection across the lateral walls
      if (i == 0)
        t13.emplace_back(r, full_u3(0, j), 2 / hx);
      else if (i == nh)
        t13.emplace_back(r, full_u3(nh - 1, j), -2 / hx);
      else {
        t13.emplace_back(r, full_u3(i, j), 1 / hx);
        t13.emplace_back(r, full_u3(i - 1, j), -1 / hx);
      }
    }
  S11 = from_triplets(g.n_p(), nf, t11);
  S33 = from_triplets(g.n_p(), nf, t33);
  S13 = from_triplets((nh + 1) * (nz + 1), nf, t13);
  wcell = Vec::Constant(g.n_p(), Wp);

  SpMat Wc(wcorner.size(), wcorner.size());
  Wc.reserve(Eigen::VectorXi::Constant(wcorner.size(), 1));
  for (int r = 0; r < wcorner.size(); ++r) Wc.insert(r, r) = wcorner(r);
  SpMat Afull = SpMat(S11.transpose() * S11) * (2 * Wp) + SpMat(S33.transpose() * S33) * (2 * Wp) +
                SpMat(S13.transpose() * Wc * S13);
  SpMat divfull = S11 + S33;

  Triplets tuu, tub, tbu, tbb, tdu, tdb;
  for (int k = 0; k < Afull.outerSize(); ++k)
    for (SpMat::InnerIterator it(Afull, k); it; ++it) {
      int r = cat[it.row()], c = cat[it.col()];
      if (r == -1 || c == -1) continue;
      if (r >= 0 && c >= 0) tuu.emplace_back(r, c, it.value());
      if (r >= 0 && c <= -2) tub.emplace_back(r, -2 - c, it.value());
      if (r <= -2 && c >= 0) tbu.emplace_back(-2 - r, c, it.value());
      if (r <= -2 && c <= -2) tbb.emplace_back(-2 - r, -2 - c, it.value());
    }
  for (int k = 0; k < divfull.outerSize(); ++k)
    for (SpMat::InnerIterator it(divfull, k); it; ++it) {
      int c = cat[it.col()];
      if (c >= 0) tdu.emplace_back(it.row(), c, it.value());
      if (c <= -2) tdb.emplace_back(it.row(), -2 - c, it.value());
    }
  Auu = from_triplets(g.n_u(), g.n_u(), tuu);
  Aub = from_triplets(g.n_u(), nh, tub);
  Abu = from_triplets(nh, g.n_u(), tbu);
  Abb = from_triplets(nh, nh, tbb);
  Du = from_triplets(g.n_p(), g.n_u(), tdu);
  Db = from_triplets(g.n_p(), nh, tdb);

  Grad = SpMat(Du.transpose()) * (-Wp / (hx * hz));
  LapU = Auu * (-1 / (hx * hz));

  const int nw = g.n_w();
  Triplets ti;
  for (int i = 0; i < nh; ++i) {
    if (i >= 1) ti.emplace_back(i, g.w(i), 0.5);
    if (i + 1 <= nh - 1) ti.emplace_back(i, g.w(i + 1), 0.5);
  }
  I = from_triplets(nh, nw, ti);

  Triplets tl, tlf;
  for (int i = 1; i < nh; ++i) {
    tl.emplace_back(g.w(i), g.w(i), -2 / (hx * hx));
    if (i > 1) tl.emplace_back(g.w(i), g.w(i - 1), 1 / (hx * hx));
    if (i < nh - 1) tl.emplace_back(g.w(i), g.w(i + 1), 1 / (hx * hx));
  }
  LapD = from_triplets(nw, nw, tl);
  Cpl = LapD * (-Ww);
  // clamped Laplacian on nodes 0..nh with ghost eta_{-1} = eta_1
  for (int i = 0; i <= nh; ++i) {
    auto add = [&](int node, double v) {
      if (node >= 1 && node <= nh - 1) tlf.emplace_back(i, g.w(node), v);
    };
    if (i == 0)
      add(1, 2 / (hx * hx));
    else if (i == nh)
      add(nh - 1, 2 / (hx * hx));
    else {
      add(i - 1, 1 / (hx * hx));
      add(i, -2 / (hx * hx));
      add(i + 1, 1 / (hx * hx));
    }
  }
  SpMat Lf = from_triplets(nh + 1, nw, tlf);
  SpMat Wn(nh + 1, nh + 1);
  for (int i = 0; i <= nh; ++i) Wn.insert(i, i) = (i == 0 || i == nh) ? hx / 2 : hx;
  Bpl = SpMat(Lf.transpose() * Wn * Lf);
  Bilap = Bpl * (1 / Ww);

  // solid
  const int ns = g.nzs, nnode = (nh + 1) * (ns + 1);
  Triplets tk;
  auto Ke = q1_stiffness(hx, g.hzs, mu, lam);
  for (int j = 0; j < ns; ++j)
    for (int i = 0; i < nh; ++i) {
      int nodes[4] = {solid_node(i, j), solid_node(i + 1, j), solid_node(i + 1, j + 1), solid_node(i, j + 1)};
      for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b) tk.emplace_back(2 * nodes[a / 2] + a % 2, 2 * nodes[b / 2] + b % 2, Ke(a, b));
    }
  Kfull = from_triplets(2 * nnode, 2 * nnode, tk);
  // 0: interior, 1: interface vertical, 2: interface horizontal, -1 zero
  std::vector<int> kind(2 * nnode, -1), idx(2 * nnode, -1);
  for (int j = 0; j <= ns; ++j)
    for (int i = 0; i <= nh; ++i)
      for (int c = 0; c < 2; ++c) {
        int q = 2 * solid_node(i, j) + c;
        if (i == 0 || i == nh || j == ns) continue;
        if (j == 0) {
          kind[q] = c == 1 ? 1 : 2;
          idx[q] = g.w(i);
        } else {
          kind[q] = 0;
          idx[q] = g.d(c, i, j);
        }
      }
  Triplets tdd, tde, ted, tee, tdx;
  for (int k = 0; k < Kfull.outerSize(); ++k)
    for (SpMat::InnerIterator it(Kfull, k); it; ++it) {
      int r = it.row(), c = it.col();
      int kr = kind[r], kc = kind[c];
      double v = it.value();
      if (kr == 0 && kc == 0) tdd.emplace_back(idx[r], idx[c], v);
      if (kr == 0 && kc == 1) tde.emplace_back(idx[r], idx[c], v);
      if (kr == 0 && kc == 2) tdx.emplace_back(idx[r], idx[c], v);
      if (kr == 1 && kc == 0) ted.emplace_back(idx[r], idx[c], v);
      if (kr == 1 && kc == 1) tee.emplace_back(idx[r], idx[c], v);
    }
  const int nd = g.n_d();
  Kdd = from_triplets(nd, nd, tdd);
  Kde = from_triplets(nd, nw, tde);
  Kdx = from_triplets(nd, nw, tdx);
  Ked = from_triplets(nw, nd, ted);
  Kee = from_triplets(nw, nw, tee);
}

Vec Operators::full_faces(const Vec& u, const Vec& ub) const {
  Vec f = Vec::Zero(n_full());
  for (int j = 0; j < g.nzf; ++j)
    for (int i = 1; i < g.nh; ++i) f(full_u1(i, j)) = u(g.u1(i, j));
  for (int j = 1; j < g.nzf; ++j)
    for (int i = 0; i < g.nh; ++i) f(full_u3(i, j)) = u(g.u3(i, j));
  for (int i = 0; i < g.nh; ++i) f(full_u3(i, g.nzf)) = ub(i);
  return f;
}

Vec Operators::full_solid(const Vec& d, const Vec& e, const Vec* ex) const {
  Vec f = Vec::Zero(2 * (g.nh + 1) * (g.nzs + 1));
  for (int j = 1; j < g.nzs; ++j)
    for (int i = 1; i < g.nh; ++i)
      for (int c = 0; c < 2; ++c) f(2 * solid_node(i, j) + c) = d(g.d(c, i, j));
  for (int i = 1; i < g.nh; ++i) {
    f(2 * solid_node(i, 0) + 1) = e(g.w(i));
    if (ex) f(2 * solid_node(i, 0)) = (*ex)(g.w(i));
  }
  return f;
}

double Operators::viscous_energy(const Vec& u, const Vec& ub) const {
  Vec f = full_faces(u, ub);
  Vec a = S11 * f, b = S33 * f, c = S13 * f;
  return 2 * Wp * (a.squaredNorm() + b.squaredNorm()) + c.cwiseAbs2().dot(wcorner);
}

double Operators::solid_energy(const Vec& d, const Vec& e) const {
  Vec f = full_solid(d, e);
  return f.dot(Kfull * f);
}

Vec mean_project(const Grid& g, const Vec& f) {
  if (f.size() != g.nh + 1) throw std::invalid_argument("mean_project: expected nh+1 node values");
  double s = 0;
  for (int i = 0; i <= g.nh; ++i) s += f(i) * ((i == 0 || i == g.nh) ? 0.5 : 1.0);
  return f.array() - s * g.hx / g.L;
}

Vec mean_project_cells(const Grid& g, const Vec& f) {
  if (f.size() != g.n_p()) throw std::invalid_argument("mean_project_cells: expected cell values");
  return f.array() - f.mean();
}

Vec plate_mean_project(const Vec& f) { return f.array() - f.mean(); }
CVec plate_mean_project(const CVec& f) { return f.array() - f.mean(); }

Vec trace_interface(const Grid& g, const Vec& p) {
  if (p.size() != g.n_p()) throw std::invalid_argument("trace_interface: expected cell values");
  Vec col(g.nh), out(g.nh + 1);
  for (int i = 0; i < g.nh; ++i) col(i) = 1.5 * p(g.p(i, g.nzf - 1)) - 0.5 * p(g.p(i, g.nzf - 2));
  out(0) = 1.5 * col(0) - 0.5 * col(1);
  out(g.nh) = 1.5 * col(g.nh - 1) - 0.5 * col(g.nh - 2);
  for (int i = 1; i < g.nh; ++i) out(i) = 0.5 * (col(i - 1) + col(i));
  return out;
}

Vec gamma_m(const Grid& g, const Vec& p) { return mean_project(g, trace_interface(g, p)); }

}  // namespace mfsi
