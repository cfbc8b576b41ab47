#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "mfsi/errors.hpp"
#include "mfsi/mms.hpp"
#include "mfsi/run.hpp"
#include "mfsi/transform.hpp"

using namespace mfsi;

namespace {
GeometryConfig geo(int n) {
  GeometryConfig c;
  c.n_h = n;
  c.n_zf = n;
  c.n_zs = std::max(6, 2 * n / 3);
  return c;
}

double forcing_norm(const Forcings& f) {
  double n = 0;
  for (const auto& h : f) n += h.f_u.norm() + h.f_b.norm() + h.g.norm() + h.h_d.norm() + h.h_e.norm();
  return n;
}
}  // namespace

TEST_CASE("separable functions and their derivatives") {
  constexpr double P = std::numbers::pi;
  Fn f = Fn::sin(2.0, P);
  f += Fn::poly({1, 0, -3});
  f += Fn::cos(0.5, 3 * P);
  auto exact = [&](double x) { return 2 * std::sin(P * x) + 1 - 3 * x * x + 0.5 * std::cos(3 * P * x); };
  const double h = 1e-4;
  for (double x : {0.0, 0.3, 0.71}) {
    CHECK(f(x) == doctest::Approx(exact(x)).epsilon(1e-14));
    CHECK(f(x, 1) == doctest::Approx((exact(x + h) - exact(x - h)) / (2 * h)).epsilon(1e-5));
    CHECK(f(x, 2) == doctest::Approx((f(x + h, 1) - f(x - h, 1)) / (2 * h)).epsilon(1e-5));
    CHECK(f(x, 4) == doctest::Approx((f(x + h, 3) - f(x - h, 3)) / (2 * h)).epsilon(1e-5));
  }
  Sep s(Fn::sin(1, P), Fn::poly({0, 1, 1}));
  s += Sep(Fn::cos(2, P), Fn::cos(1, 2 * P));
  for (double x : {0.2, 0.6})
    for (double z : {-0.4, 0.5}) {
      CHECK(s(x, z, 1, 1) == doctest::Approx((s(x, z + h, 1, 0) - s(x, z - h, 1, 0)) / (2 * h)).epsilon(1e-5));
      CHECK(s(x, z, 0, 2) == doctest::Approx((s(x, z + h, 0, 1) - s(x, z - h, 0, 1)) / (2 * h)).epsilon(1e-5));
    }
}

TEST_CASE("rest recipe has zero data") {
  Grid g(geo(8));
  PhysicsConfig ph;
  auto mc = mms_generate(g, ph, 2, "rest");
  CHECK(forcing_norm(mc.forcing) == 0.0);
  for (const auto& h : mc.exact.h) CHECK(h.u.norm() + h.e1.norm() + h.d1.norm() + h.d2.norm() == 0.0);
  CHECK(mms_peak_eta("rest", 1, 1) == 0.0);
}

TEST_CASE("recipe errors") {
  Grid g(geo(8));
  PhysicsConfig ph;
  CHECK_THROWS_AS(mms_generate(g, ph, 2, "no-such-recipe"), Error);
  CHECK_THROWS_AS(mms_generate(g, ph, 1, "two-tone"), Error);
}

TEST_CASE("smallness threshold on the manufactured amplitude") {
  Grid g(geo(8));
  PhysicsConfig ph;
  const double d0 = Cutoff(g.alpha).delta0();
  for (const auto& r : {std::string("standing-wave"), std::string("two-tone")}) {
    double peak = mms_peak_eta(r, g.L, ph.T);
    REQUIRE(peak > 0);
    CHECK_NOTHROW(mms_generate(g, ph, 2, r, 0.9 * d0 / peak, 0.0, d0));
    CHECK_THROWS_AS(mms_generate(g, ph, 2, r, 1.1 * d0 / peak, 0.0, d0), SmallnessError);
  }
}

TEST_CASE("forcing is linear in the amplitude") {
  Grid g(geo(8));
  PhysicsConfig ph;
  auto a = mms_generate(g, ph, 2, "two-tone", 1.0), b = mms_generate(g, ph, 2, "two-tone", 3.0);
  for (int k = 0; k <= 2; ++k) {
    CHECK((b.forcing[k].f_u - 3.0 * a.forcing[k].f_u).norm() <= 1e-12 * (1 + b.forcing[k].f_u.norm()));
    CHECK((b.forcing[k].g - 3.0 * a.forcing[k].g).norm() <= 1e-12 * (1 + b.forcing[k].g.norm()));
    CHECK((b.exact.h[k].e1 - 3.0 * a.exact.h[k].e1).norm() <= 1e-12 * (1 + b.exact.h[k].e1.norm()));
  }
  // steady harmonic is real
  CHECK(a.forcing[0].f_u.imag().norm() == 0.0);
}

TEST_CASE("catalogue forcing switches") {
  Config c;
  c.geometry = geo(8);
  c.discretization.K = 2;
  c.forcing.amplitude = 1.0;
  Grid g(c.geometry);
  Forcings all = catalogue_forcing(g, c);
  CHECK(forcing_norm(all) > 0);
  c.forcing.f = c.forcing.g = c.forcing.h = false;
  CHECK(forcing_norm(catalogue_forcing(g, c)) == 0.0);
  c.forcing.f = c.forcing.g = c.forcing.h = true;
  c.forcing.amplitude = 2.0;
  Forcings twice = catalogue_forcing(g, c);
  for (int k = 0; k <= 2; ++k) CHECK((twice[k].f_u - 2.0 * all[k].f_u).norm() <= 1e-13 * (1 + all[k].f_u.norm()));
}

TEST_CASE("linear solver converges to the manufactured solution") {
  Config c;
  c.geometry = geo(8);
  auto rows = mms_convergence(c, {"standing-wave", "two-tone"}, {1.0, 2.0, 4.0});
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    if (std::isnan(r.observed_order)) continue;
    CHECK(r.observed_order >= 1.7);
  }
  CHECK(rows[2].error_u < rows[0].error_u);

  auto path = std::filesystem::temp_directory_path() / "mfsi_mms_test.csv";
  write_mms_csv(path.string(), rows);
  std::ifstream in(path);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header.rfind("h,error_u,error_eta1,error_d,observed_order", 0) == 0);
  CHECK(first.find("standing-wave") != std::string::npos);
  std::filesystem::remove(path);
}
