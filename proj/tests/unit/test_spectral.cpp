#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/SVD>

#include "mfsi/spectral.hpp"

using namespace mfsi;

namespace {
struct Setup {
  Grid g;
  Operators op;
  Liftings L;
  MfsOperator A;
  static GeometryConfig geo(int n, int nzs) {
    GeometryConfig c;
    c.n_h = n;
    c.n_zf = n;
    c.n_zs = nzs;
    return c;
  }
  Setup(int n, int nzs, AmfsOptions o = {}) : g(geo(n, nzs)), op(g, 1, 1), L(g, op, 0.5), A(g, op, L, o) {}
};

double match_sets(CVec a, CVec b) {
  // greedy nearest matching; both sets are small
  double worst = 0;
  std::vector<char> used(b.size(), 0);
  for (int i = 0; i < a.size(); ++i) {
    int best = -1;
    double d = INFINITY;
    for (int j = 0; j < b.size(); ++j)
      if (!used[j] && std::abs(a(i) - b(j)) < d) {
        d = std::abs(a(i) - b(j));
        best = j;
      }
    used[best] = 1;
    worst = std::max(worst, d / (1 + std::abs(a(i))));
  }
  return worst;
}
}  // namespace

TEST_CASE("spectrum of the coupled operator") {
  Setup S(8, 6);
  EnergyForm E = energy_form(S.A);
  SpectralReport r = compute_spectrum(E.A_E);
  const int n = static_cast<int>(r.eigenvalues.size());
  REQUIRE(n == S.A.dim());
  for (int i = 1; i < n; ++i) CHECK(r.eigenvalues(i - 1).real() >= r.eigenvalues(i).real());
  CHECK(*std::max_element(r.residual.begin(), r.residual.end()) <= 1e-8);
  CHECK(r.spectral_bound < 0);
  CHECK(r.n_unstable() == 0);
  CHECK(r.min_abs > 0);

  const CMat Rc = E.R.cast<cplx>();
  for (int i = 0; i < n; ++i) {
    CVec raw = Rc.triangularView<Eigen::Upper>().solve(r.eigenvectors.col(i));
    bool ok = false;
    double res = energy_identity_residual(S.A, r.eigenvalues(i), raw, &ok);
    CHECK(ok);
    if (i < 10) CHECK(res <= 1e-6);
  }
  CHECK_THROWS_AS(energy_identity_residual(S.A, r.eigenvalues(0), CVec::Zero(n)), std::invalid_argument);
}

TEST_CASE("decoupled diagnostic bound is the larger block bound") {
  Setup S(8, 6, {false, true});
  Mat M = S.A.assemble_raw();
  const int n1 = S.A.off_d1(), n2 = S.A.dim() - n1;
  double full = compute_spectrum(M, false).spectral_bound;
  double fs = compute_spectrum(Mat(M.topLeftCorner(n1, n1)), false).spectral_bound;
  double sd = compute_spectrum(Mat(M.bottomRightCorner(n2, n2)), false).spectral_bound;
  CHECK(full == doctest::Approx(std::max(fs, sd)).epsilon(1e-9));
}

TEST_CASE("thick layer quadratic relation") {
  Setup S(8, 6);
  Mat L0 = S.A.L0_dense();
  CVec pred = thick_layer_prediction(L0, 0.5), direct = thick_layer_direct(L0, 0.5);
  REQUIRE(pred.size() == direct.size());
  CHECK(match_sets(direct, pred) < 1e-8);
  for (int i = 0; i < pred.size(); ++i) {
    cplx l = pred(i);
    CHECK(l.real() < 0);
  }
}

TEST_CASE("shifted Hessenberg solves and resolvent norm") {
  Setup S(8, 6);
  EnergyForm E = energy_form(S.A);
  const int n = static_cast<int>(E.A_E.rows());
  ShiftedHessenberg H(E.A_E);
  CVec b = CVec::LinSpaced(n, cplx(-1, 0.5), cplx(1, -0.2));
  for (int k : {0, 3, 17}) {
    cplx s(0, 2 * std::numbers::pi * k);
    CMat M = s * CMat::Identity(n, n) - E.A_E.cast<cplx>();
    auto f = H.factor(s);
    CVec x = H.solve(f, b);
    CHECK((M * x - b).norm() <= 1e-10 * b.norm());
    double svd = Eigen::JacobiSVD<CMat>(M.inverse()).singularValues()(0);
    CHECK(H.resolvent_norm(f) == doctest::Approx(svd).epsilon(1e-8));
  }
}

TEST_CASE("resolvent scan") {
  Setup S(8, 6);
  EnergyForm E = energy_form(S.A);
  const double w0 = 2 * std::numbers::pi;
  auto rows = resolvent_scan(E.A_E, w0, 20);
  REQUIRE(rows.size() == 41);
  SpectralReport sp = compute_spectrum(E.A_E, false);

  // k = 0 is the norm of A^{-1}
  double inv = Eigen::JacobiSVD<Mat>(E.A_E.inverse()).singularValues()(0);
  for (const auto& r : rows) {
    if (r.k == 0) CHECK(r.norm == doctest::Approx(inv).epsilon(1e-8));
    // lower bound 1 / dist(i k w0, spectrum)
    double dist = INFINITY;
    for (int i = 0; i < sp.eigenvalues.size(); ++i)
      dist = std::min(dist, std::abs(cplx(0, r.k * w0) - sp.eigenvalues(i)));
    CHECK(r.norm >= (1 - 1e-9) / dist);
    CHECK(r.k_times_norm == doctest::Approx(std::abs(r.k) * r.norm));
  }
  // conjugate symmetry of the scan
  for (const auto& r : rows)
    for (const auto& q : rows)
      if (q.k == -r.k) CHECK(q.norm == r.norm);
  // decay well beyond the spectral scale
  double prev = INFINITY;
  for (const auto& r : rows)
    if (r.k >= 12) {
      CHECK(r.norm < prev);
      prev = r.norm;
    }
}
