#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mfsi/mfs_operator.hpp"

using namespace mfsi;
using std::numbers::pi;

namespace {
GeometryConfig geo(int nh, int nzf, int nzs) {
  GeometryConfig g;
  g.n_h = nh;
  g.n_zf = nzf;
  g.n_zs = nzs;
  return g;
}

struct Setup {
  Grid g;
  Operators op;
  Liftings L;
  explicit Setup(int n, double mu = 1, double lam = 1) : g(geo(n, n, n / 2 < 6 ? 6 : n / 2)), op(g, mu, lam), L(g, op, 0.5) {}
};

double bump(double s) { return std::sin(2 * pi * s) * std::sin(pi * s) * std::sin(pi * s); }
}  // namespace

TEST_CASE("stokes lift") {
  Setup S(12);
  auto [w0, p0] = S.L.stokes_lift(Vec::Zero(S.g.n_w()));
  CHECK(w0.norm() == 0.0);
  CHECK(p0.norm() == 0.0);

  double prev = 0;
  for (int n : {12, 24, 48}) {
    Setup T(n);
    Vec b(T.g.n_w());
    for (int i = 1; i < n; ++i) b(T.g.w(i)) = bump(T.g.x(i));
    b = plate_mean_project(b);
    auto [w, p] = T.L.stokes_lift(b);
    Vec ib = T.op.I * b;
    Vec div = T.op.Du * w + T.op.Db * ib;
    CHECK(div.cwiseAbs().maxCoeff() <= 1e-10 * w.cwiseAbs().maxCoeff() / T.g.hx);
    CHECK(std::abs(p.mean()) < 1e-12);
    // interface row against the data at face midpoints
    double mean = 0;
    for (int i = 1; i < n; ++i) mean += bump(T.g.x(i)) / (n - 1);
    double err = 0;
    for (int i = 0; i < n; ++i) err = std::max(err, std::abs(ib(i) - (bump(T.g.xc(i)) - mean)));
    if (prev > 0) CHECK(std::log2(prev / err) > 1.7);
    prev = err;
  }
  CHECK_THROWS_AS(S.L.stokes_lift(Vec::Ones(S.g.n_w())), std::invalid_argument);
}

TEST_CASE("neumann solves") {
  Setup S(12);
  CHECK(S.L.neumann_solve(Vec::Zero(2 * S.g.nh + 2 * S.g.nzf)).norm() == 0.0);
  Vec bad = Vec::Zero(2 * S.g.nh + 2 * S.g.nzf);
  bad(0) = 1;
  CHECK_THROWS_AS(S.L.neumann_solve(bad), std::invalid_argument);

  // manufactured potential with zero normal derivative on the box
  auto phi = [](double x, double z) { return std::cos(pi * x) * std::cos(pi * z); };
  double prev = 0;
  for (int n : {12, 24, 48}) {
    Setup T(n);
    Vec f(T.g.n_u()), ex(T.g.n_p());
    for (int k = 0; k < T.g.n_u(); ++k) {
      auto [x, z] = T.g.u_pos(k);
      f(k) = T.g.u_comp(k) == 0 ? -pi * std::sin(pi * x) * std::cos(pi * z) : -pi * std::cos(pi * x) * std::sin(pi * z);
    }
    for (int k = 0; k < T.g.n_p(); ++k) {
      auto [x, z] = T.g.p_pos(k);
      ex(k) = phi(x, z);
    }
    ex.array() -= ex.mean();
    double err = (T.L.N2(f) - ex).cwiseAbs().maxCoeff();
    if (prev > 0) CHECK(std::log2(prev / err) > 1.7);
    prev = err;
  }

  // discretely solenoidal field with zero normal trace lies in the kernel
  MfsOperator A(S.g, S.op, S.L);
  Vec psi = Vec::LinSpaced(A.n_stream(), -1, 1).array().sin();
  Vec f = A.stream_basis() * psi;
  CHECK(S.L.N2(f).cwiseAbs().maxCoeff() < 1e-10 * f.cwiseAbs().maxCoeff());
  CHECK((S.L.helmholtz(f) - f).cwiseAbs().maxCoeff() < 1e-10 * f.cwiseAbs().maxCoeff());
}

TEST_CASE("lame lift") {
  Setup S(12);
  Vec z = Vec::Zero(S.g.n_w());
  CHECK(S.L.lame_lift(z).norm() == 0.0);

  double prev = 0;
  for (int n : {12, 24, 48}) {
    Setup T(n);
    Vec b(T.g.n_w());
    for (int i = 1; i < n; ++i) b(T.g.w(i)) = bump(T.g.x(i));
    Vec d = T.L.lame_lift(b);
    Vec r = T.op.Kdd * d + T.op.Kde * b;
    CHECK(r.norm() <= 1e-10 * (T.op.Kdd * d).norm());
    // linear extrapolation of the first two rows back to the interface
    double err = 0;
    for (int i = 1; i < n; ++i) {
      double tr = 2 * d(T.g.d(1, i, 1)) - d(T.g.d(1, i, 2));
      err = std::max(err, std::abs(tr - b(T.g.w(i))));
    }
    if (prev > 0) CHECK(std::log2(prev / err) > 1.7);
    prev = err;
  }
}

TEST_CASE("added mass operator") {
  Setup S(24);
  const int nw = S.g.n_w();
  Vec lo(nw), hi(nw);
  for (int i = 1; i < S.g.nh; ++i) {
    lo(S.g.w(i)) = std::sin(2 * pi * S.g.x(i));
    hi(S.g.w(i)) = std::sin(2 * pi * (S.g.nh / 2 - 1) * S.g.x(i));
  }
  lo = plate_mean_project(lo);
  hi = plate_mean_project(hi);
  for (const Vec* f : {&lo, &hi}) {
    Vec m = S.L.added_mass_apply(*f);
    CHECK(std::abs(m.sum()) < 1e-12 * m.norm() * nw);
    CHECK((S.L.added_mass_solve(m) - *f).norm() <= 1e-12 * f->norm());
  }
  double rlo = (S.L.added_mass_apply(lo) - lo).norm() / lo.norm();
  double rhi = (S.L.added_mass_apply(hi) - hi).norm() / hi.norm();
  CHECK(rhi < rlo);
  CHECK(S.L.added_mass_condition() < 1e8);
}

TEST_CASE("stress trace") {
  const double mu = 1.3, lam = 0.7;
  Setup S(12, mu, lam);
  const int nfull = 2 * (S.g.nh + 1) * (S.g.nzs + 1);
  CHECK(S.L.stress_trace_K(Vec::Zero(nfull)).norm() == 0.0);
  Vec f = Vec::Zero(nfull);
  for (int j = 0; j <= S.g.nzs; ++j)
    for (int i = 0; i <= S.g.nh; ++i) f(2 * S.op.solid_node(i, j) + 1) = S.g.zs(j);
  CHECK(S.L.stress_trace_K(f).cwiseAbs().maxCoeff() < 1e-12);

  double prev = 0;
  for (int n : {12, 24, 48}) {
    Setup T(n, mu, lam);
    const int nf = 2 * (T.g.nh + 1) * (T.g.nzs + 1);
    Vec v = Vec::Zero(nf);
    for (int j = 0; j <= T.g.nzs; ++j)
      for (int i = 0; i <= T.g.nh; ++i) {
        double x = T.g.x(i), z = T.g.zs(j);
        v(2 * T.op.solid_node(i, j)) = std::cos(2 * pi * x) * (1 + z);
        v(2 * T.op.solid_node(i, j) + 1) = (z + 4 * z * z * z) * std::sin(2 * pi * x);
      }
    Vec K = T.L.stress_trace_K(v);
    Vec ex(T.g.n_w());
    for (int i = 1; i < n; ++i) ex(T.g.w(i)) = (2 * mu + lam - 2 * pi * lam) * std::sin(2 * pi * T.g.x(i));
    double err = (K - plate_mean_project(ex)).cwiseAbs().maxCoeff();
    if (prev > 0) CHECK(std::log2(prev / err) > 1.7);
    prev = err;
  }
}
