#include <doctest.h>

#include <algorithm>
#include <random>

#include <Eigen/Eigenvalues>

#include "mfsi/errors.hpp"
#include "mfsi/mfs_operator.hpp"

using namespace mfsi;

namespace {
GeometryConfig geo(int n, int nzs) {
  GeometryConfig g;
  g.n_h = n;
  g.n_zf = n;
  g.n_zs = nzs;
  return g;
}

struct Setup {
  Grid g;
  Operators op;
  Liftings L;
  explicit Setup(int n = 8, int nzs = 6) : g(geo(n, nzs)), op(g, 1, 1), L(g, op, 0.5) {}
};

Vec random_vec(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

std::vector<double> sorted_keys(const Eigen::VectorXcd& ev) {
  std::vector<double> k;
  for (int i = 0; i < ev.size(); ++i) k.push_back(ev(i).real() * 1e3 + ev(i).imag());
  std::sort(k.begin(), k.end());
  return k;
}
}  // namespace

TEST_CASE("zero state maps to zero") {
  Setup S;
  MfsOperator A(S.g, S.op, S.L);
  X0State z = A.zero();
  X0State r = A.apply(z);
  CHECK(A.to_raw(r).norm() == 0.0);
}

TEST_CASE("raw coordinates round trip") {
  Setup S;
  MfsOperator A(S.g, S.op, S.L);
  std::mt19937_64 rng(3);
  Vec x = random_vec(A.dim(), rng);
  CHECK((A.to_raw(A.from_raw(x)) - x).norm() < 1e-12 * x.norm());
  X0State s = A.from_raw(x);
  CHECK(std::abs(s.e1.sum()) < 1e-12);
  CHECK((S.op.Du * s.v).norm() < 1e-12 * s.v.norm() / S.g.hx);
}

TEST_CASE("solid-only state") {
  Setup S;
  std::mt19937_64 rng(5);
  for (bool coupling : {false, true}) {
    MfsOperator A(S.g, S.op, S.L, {coupling, true});
    X0State s = A.zero();
    s.d1 = random_vec(S.g.n_d(), rng);
    X0State r = A.apply(s);
    CHECK(r.v.norm() <= 1e-12 * s.d1.norm());
    CHECK(r.e1.norm() == 0.0);
    CHECK(r.d1.norm() == 0.0);
    Vec L0d = A.L0_dense() * s.d1;
    CHECK((r.d2 - L0d).norm() <= 1e-12 * L0d.norm());
    if (!coupling) {
      CHECK(r.e2.norm() == 0.0);
    } else {
      // plate reacts to the solid stress through M_s^{-1} K_int
      Vec k = A.plate_row_parts().Kint * s.d1;
      CHECK((A.plate_from_raw(k) - r.e2).norm() <= 1e-10 * (1 + k.norm()));
    }
  }
}

TEST_CASE("dense assembly matches apply") {
  Setup S;
  MfsOperator A(S.g, S.op, S.L);
  Mat M = A.assemble_raw();
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    Vec x = random_vec(A.dim(), rng);
    Vec y = A.to_raw(A.apply(A.from_raw(x)));
    CHECK((M * x - y).norm() <= 1e-12 * (1 + y.norm()));
  }
  // identity sub-blocks of the first-order form
  const int np = A.n_plate(), nd = S.g.n_d();
  Mat e1rows = M.middleRows(A.off_e1(), np);
  Mat expect = Mat::Zero(np, A.dim());
  expect.block(0, A.off_e2(), np, np).setIdentity();
  CHECK((e1rows - expect).cwiseAbs().maxCoeff() == 0.0);
  Mat d1rows = M.middleRows(A.off_d1(), nd);
  Mat expect2 = Mat::Zero(nd, A.dim());
  expect2.block(0, A.off_d2(), nd, nd).setIdentity();
  CHECK((d1rows - expect2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coupling switched off splits the spectrum") {
  Setup S(8, 6);
  MfsOperator A(S.g, S.op, S.L, {false, true});
  Mat M = A.assemble_raw();
  const int n1 = A.off_d1(), n2 = A.dim() - n1;
  CHECK(M.topRightCorner(n1, n2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(M.bottomLeftCorner(n2, n1).cwiseAbs().maxCoeff() == 0.0);
  Eigen::VectorXcd all = Eigen::EigenSolver<Mat>(M, false).eigenvalues();
  Eigen::VectorXcd fs = Eigen::EigenSolver<Mat>(Mat(M.topLeftCorner(n1, n1)), false).eigenvalues();
  Eigen::VectorXcd sd = Eigen::EigenSolver<Mat>(Mat(M.bottomRightCorner(n2, n2)), false).eigenvalues();
  Eigen::VectorXcd uni(all.size());
  uni << fs, sd;
  auto a = sorted_keys(all), b = sorted_keys(uni);
  REQUIRE(a.size() == b.size());
  double err = 0;
  for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i] - b[i]) / (1 + std::abs(b[i])));
  CHECK(err < 1e-8);
}

TEST_CASE("decoupling identity") {
  Setup S(8, 6);
  MfsOperator A(S.g, S.op, S.L);
  Mat M = A.assemble_raw();
  auto r = verify_decoupling(A, M);
  REQUIRE(r.residuals.size() == 4);
  for (const auto& [k, v] : r.residuals) {
    INFO(k);
    CHECK(v <= 1e-10);
  }
  CHECK(r.S_inverse_error <= 1e-12);

  // bottom-right block on test vectors: L0 - D_s M_s^{-1} K
  Mat Ds = A.lame_lifting_raw();
  Mat Kint = A.plate_row_parts().Kint;
  Mat L0 = A.L0_dense();
  const int nd = S.g.n_d(), npl = A.n_plate();
  std::mt19937_64 rng(2);
  for (int t = 0; t < 3; ++t) {
    Vec d = random_vec(nd, rng);
    // transformed row = T A12 + A22 on (d, 0), T = -D_s on the plate rows
    Vec a12 = M.block(A.off_e2(), A.off_d1(), npl, nd) * d;
    Vec a22 = M.block(A.off_d2(), A.off_d1(), nd, nd) * d;
    Vec lhs = a22 - Ds * a12;
    Vec rhs = L0 * d - Ds * (Kint * d);
    CHECK((lhs - rhs).norm() <= 1e-10 * rhs.norm());
  }
}

TEST_CASE("degenerate transform without the Lame lifting") {
  Setup S(8, 6);
  MfsOperator A(S.g, S.op, S.L, {true, false});
  CHECK(A.lame_lifting_raw().norm() == 0.0);
  auto r = verify_decoupling(A, A.assemble_raw());
  for (const auto& [k, v] : r.residuals) CHECK(v <= 1e-10);
  CHECK(r.S_inverse_error == 0.0);
}

TEST_CASE("energy form is dissipative") {
  Setup S(8, 6);
  MfsOperator A(S.g, S.op, S.L);
  EnergyForm E = energy_form(A);
  Mat sym = E.A_E + E.A_E.transpose();
  double top = Eigen::SelfAdjointEigenSolver<Mat>(sym).eigenvalues().maxCoeff();
  CHECK(top <= 1e-10 * E.A_E.norm());
  CHECK_THROWS_AS(energy_form(A, 10), Error);
}
