#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mfsi/errors.hpp"
#include "mfsi/transform.hpp"

using namespace mfsi;
using std::numbers::pi;

TEST_CASE("cutoff values") {
  Cutoff c(0.4);
  auto a = c.eval(0.0);
  CHECK(a[0] == 1.0);
  CHECK(a[1] == 0.0);
  auto b = c.eval(0.4);
  CHECK(b[0] == 0.0);
  CHECK(b[1] == 0.0);
  CHECK(c.eval(-0.19)[0] == 1.0);
  CHECK(c.eval(0.41)[0] == 0.0);

  // dense sampling oracle for sup |psi'|, derivative by central differences of psi
  const int n = 1000000;
  const double h = 1e-7;
  double m = 0, lo = 1, hi = 0;
  for (int i = 0; i <= n; ++i) {
    double z = -0.5 + 1.0 * i / n;
    double d = (c.eval(z + h)[0] - c.eval(z - h)[0]) / (2 * h);
    m = std::max(m, std::abs(d));
    lo = std::min(lo, c.eval(z)[0]);
    hi = std::max(hi, c.eval(z)[0]);
  }
  CHECK(c.max_abs_derivative() == doctest::Approx(m).epsilon(1e-6));
  CHECK(c.delta0() == doctest::Approx(1 / (2 * m)).epsilon(1e-6));
  CHECK(lo >= 0.0);
  CHECK(hi <= 1.0);
}

TEST_CASE("cutoff is C2 with analytic derivatives") {
  Cutoff c(0.4);
  for (double z : {0.2, 0.4, -0.2, -0.4}) {
    auto l = c.eval(z - 1e-12), r = c.eval(z + 1e-12);
    CHECK(std::abs(l[1] - r[1]) < 1e-8);
    CHECK(std::abs(l[2] - r[2]) < 1e-6);
  }
  const double h = 1e-5;
  for (double z : {0.23, 0.31, -0.27, -0.36}) {
    auto e = c.eval(z);
    CHECK(e[1] == doctest::Approx((c.eval(z + h)[0] - c.eval(z - h)[0]) / (2 * h)).epsilon(1e-7));
    CHECK(e[2] == doctest::Approx((c.eval(z + h)[1] - c.eval(z - h)[1]) / (2 * h)).epsilon(1e-6));
    CHECK(e[3] == doctest::Approx((c.eval(z + h)[2] - c.eval(z - h)[2]) / (2 * h)).epsilon(1e-5));
  }
}

TEST_CASE("smallness threshold is closed") {
  Cutoff c(0.4);
  const double d0 = c.delta0();
  Vec z = Vec::Zero(7);
  CHECK(check_smallness(z, d0).ok);
  Vec e = Vec::Zero(7);
  e(3) = d0;
  CHECK(check_smallness(e, d0).ok);
  e(3) = -1.01 * d0;
  auto r = check_smallness(e, d0);
  CHECK_FALSE(r.ok);
  CHECK(r.max_abs == doctest::Approx(1.01 * d0));
}

namespace {
GeometryConfig geo(int n) {
  GeometryConfig g;
  g.n_h = n;
  g.n_zf = n;
  g.n_zs = n / 2;
  return g;
}
}  // namespace

TEST_CASE("identity transform") {
  Grid g(geo(12));
  Cutoff c(g.alpha);
  Vec zero = Vec::Zero(g.n_w());
  auto d = build_diffeo(g, c, zero, zero);
  for (const auto* set : {&d.faces, &d.interface, &d.nodes})
    for (const auto& t : *set) {
      CHECK(t.J == 1.0);
      for (int i = 0; i < 2; ++i) {
        CHECK(t.dtX[i] == 0.0);
        CHECK(t.dtY[i] == 0.0);
        CHECK(t.lapY[i] == 0.0);
        for (int k = 0; k < 2; ++k) {
          CHECK(t.a[i][k] == (i == k ? 1.0 : 0.0));
          CHECK(t.b[i][k] == (i == k ? 1.0 : 0.0));
          CHECK(t.dta[i][k] == 0.0);
          CHECK(t.lapa[i][k] == 0.0);
          for (int j = 0; j < 2; ++j) CHECK(t.da[j][i][k] == 0.0);
        }
      }
    }
}

TEST_CASE("strip identities and inverse map") {
  Grid g(geo(16));
  Cutoff c(g.alpha);
  const double d0 = c.delta0();
  for (int sample = 0; sample < 5; ++sample) {
    Vec e1(g.n_w()), e2(g.n_w());
    for (int i = 1; i < g.nh; ++i) {
      double s = g.x(i);
      e1(g.w(i)) = 0.5 * d0 * std::sin(2 * pi * (sample + 1) * s) * (sample % 2 ? 1.0 : std::cos(pi * s));
      e2(g.w(i)) = 0.3 * std::cos(2 * pi * s);
    }
    auto d = build_diffeo(g, c, e1, e2);
    for (const auto* set : {&d.faces, &d.interface, &d.nodes})
      for (const auto& t : *set) {
        double detX = t.gradX[0][0] * t.gradX[1][1] - t.gradX[0][1] * t.gradX[1][0];
        CHECK(std::abs(detX - t.J) < 1e-14);
        CHECK(t.J > 0.5);
        // Y is the inverse of X
        for (int i = 0; i < 2; ++i)
          for (int k = 0; k < 2; ++k) {
            double s = 0;
            for (int j = 0; j < 2; ++j) s += t.gY[i][j] * t.gradX[j][k];
            CHECK(std::abs(s - (i == k)) < 1e-13);
          }
      }
    for (int k = 0; k < g.n_u(); ++k) {
      auto [y1, y3] = g.u_pos(k);
      if (std::abs(y3) >= g.alpha / 2) continue;
      const auto& t = d.faces[k];
      CHECK(std::abs(t.J - 1.0) <= 1e-13);
      // cofactor in the strip: diagonal ones, a single -eta' off the diagonal
      CHECK(t.b[0][0] == doctest::Approx(1.0));
      CHECK(t.b[1][1] == doctest::Approx(1.0));
      double off = t.b[0][1] + t.b[1][0];
      CHECK(std::abs(off + t.eta[1]) < 1e-14);
      CHECK(std::min(std::abs(t.b[0][1]), std::abs(t.b[1][0])) == 0.0);
    }
    double worst = 0;
    for (int k = 0; k < g.n_u(); ++k) {
      double x3 = g.u_pos(k).second, eta = d.faces[k].eta[0];
      double y3 = inverse_y3(c, x3, eta);
      worst = std::max(worst, std::abs(y3 + c.eval(y3)[0] * eta - x3));
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("smallness violation is reported with the sample index") {
  Grid g(geo(12));
  Cutoff c(g.alpha);
  Vec e1 = Vec::Constant(g.n_w(), 1.1 * c.delta0()), e2 = Vec::Zero(g.n_w());
  try {
    build_diffeo(g, c, e1, e2, 7);
    FAIL("expected SmallnessError");
  } catch (const SmallnessError& e) {
    CHECK(e.sample == 7);
    CHECK(e.kind() == ErrorKind::SmallnessViolation);
  }
}

TEST_CASE("plate interpolation converges at high order") {
  auto f = [](double s) { return std::sin(pi * s) * std::sin(pi * s) * std::sin(2 * pi * s); };
  auto df = [](double s) {
    return 2 * pi * std::sin(pi * s) * std::cos(pi * s) * std::sin(2 * pi * s) +
           2 * pi * std::sin(pi * s) * std::sin(pi * s) * std::cos(2 * pi * s);
  };
  double prev0 = 0, prev1 = 0;
  for (int n : {16, 32, 64}) {
    Grid g(geo(n));
    Vec e(g.n_w());
    for (int i = 1; i < g.nh; ++i) e(g.w(i)) = f(g.x(i));
    PlateInterp p(g, e);
    double e0 = 0, e1 = 0;
    for (double s : {0.013, 0.27, 0.5, 0.91}) {
      auto v = p.eval(s);
      e0 = std::max(e0, std::abs(v[0] - f(s)));
      e1 = std::max(e1, std::abs(v[1] - df(s)));
    }
    if (prev0 > 0) {
      CHECK(std::log2(prev0 / e0) > 3);
      CHECK(std::log2(prev1 / e1) > 3);
    }
    prev0 = e0;
    prev1 = e1;
  }
}
