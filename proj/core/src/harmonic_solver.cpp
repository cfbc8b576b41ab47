#include "mfsi/harmonic_solver.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "mfsi/errors.hpp"
#include "mfsi/parallel.hpp"
#include "mfsi/spectral.hpp"

namespace mfsi {

using CSp = Eigen::SparseMatrix<cplx>;
using CTriplets = std::vector<Eigen::Triplet<cplx>>;

namespace {

void add_block(CTriplets& t, const SpMat& M, int r0, int c0, cplx a) {
  for (int k = 0; k < M.outerSize(); ++k)
    for (SpMat::InnerIterator it(M, k); it; ++it) t.emplace_back(r0 + it.row(), c0 + it.col(), a * it.value());
}

void add_diag(CTriplets& t, int n, int r0, int c0, cplx a) {
  for (int i = 0; i < n; ++i) t.emplace_back(r0 + i, c0 + i, a);
}

template <class F>
CVec cmap(F f, const CVec& x) {
  Vec re = f(Vec(x.real())), im = f(Vec(x.imag()));
  CVec out(re.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

struct Layout {
  int u, p, e1, e2, d1, d2, cp, ce, n;
  explicit Layout(const Grid& g) {
    u = 0;
    p = g.n_u();
    e1 = p + g.n_p();
    e2 = e1 + g.n_w();
    d1 = e2 + g.n_w();
    d2 = d1 + g.n_d();
    cp = d2 + g.n_d();
    ce = cp + 1;
    n = ce + 1;
  }
};

}  // namespace

HarmonicForcing HarmonicForcing::zero(const Grid& g) {
  return {CVec::Zero(g.n_u()), CVec::Zero(g.n_b()), CVec::Zero(g.n_w()), CVec::Zero(g.n_d()), CVec::Zero(g.n_w())};
}

HarmonicForcing& HarmonicForcing::operator+=(const HarmonicForcing& o) {
  f_u += o.f_u;
  f_b += o.f_b;
  g += o.g;
  h_d += o.h_d;
  h_e += o.h_e;
  return *this;
}

HarmonicForcing HarmonicForcing::operator*(cplx a) const { return {a * f_u, a * f_b, a * g, a * h_d, a * h_e}; }

HarmonicFields HarmonicFields::zero(const Grid& g) {
  return {CVec::Zero(g.n_u()), CVec::Zero(g.n_p()), CVec::Zero(g.n_w()),
          CVec::Zero(g.n_w()), CVec::Zero(g.n_d()), CVec::Zero(g.n_d()), 0};
}

HarmonicFields PeriodicState::coefficient(int k) const {
  if (std::abs(k) > K) throw std::out_of_range("harmonic index beyond K");
  if (k >= 0) return h[k];
  const HarmonicFields& a = h[-k];
  return {a.u.conjugate(), a.p.conjugate(), a.e1.conjugate(), a.e2.conjugate(),
          a.d1.conjugate(), a.d2.conjugate(), std::conj(a.c)};
}

PeriodicState PeriodicState::zero(const Grid& g, double T, int K) {
  PeriodicState s;
  s.T = T;
  s.K = K;
  s.h.assign(K + 1, HarmonicFields::zero(g));
  return s;
}

Vec synthesize(const std::vector<CVec>& c, double omega0, double t) {
  Vec out = c[0].real();
  for (std::size_t k = 1; k < c.size(); ++k)
    out += 2 * (c[k] * std::exp(cplx(0, omega0 * static_cast<double>(k) * t))).real();
  return out;
}

std::vector<CVec> dft_coefficients(const std::vector<Vec>& samples, int K) {
  const int M = static_cast<int>(samples.size());
  if (M < 2 * K + 1) throw std::invalid_argument("dft_coefficients: need at least 2K+1 samples");
  std::vector<CVec> c(K + 1, CVec::Zero(samples[0].size()));
  for (int k = 0; k <= K; ++k)
    for (int m = 0; m < M; ++m)
      c[k] += std::exp(cplx(0, -2 * std::numbers::pi * k * m / M)) / static_cast<double>(M) * samples[m].cast<cplx>();
  return c;
}

TimeSample sample_at(const PeriodicState& s, double t) {
  const double w = 2 * std::numbers::pi / s.T;
  auto field = [&](auto get) {
    std::vector<CVec> c;
    for (auto& h : s.h) c.push_back(get(h));
    return synthesize(c, w, t);
  };
  TimeSample r;
  r.u = field([](const HarmonicFields& h) { return h.u; });
  r.p = field([](const HarmonicFields& h) { return h.p; });
  r.e1 = field([](const HarmonicFields& h) { return h.e1; });
  r.e2 = field([](const HarmonicFields& h) { return h.e2; });
  r.d1 = field([](const HarmonicFields& h) { return h.d1; });
  r.d2 = field([](const HarmonicFields& h) { return h.d2; });
  r.c = field([](const HarmonicFields& h) { return CVec::Constant(1, h.c); })(0);
  return r;
}

HarmonicSolver::HarmonicSolver(const Grid& grid, const Operators& o, const Liftings& l, double period, int kmax)
    : g(grid), op(o), L(l), T(period), omega0(2 * std::numbers::pi / period), K(kmax), slots_(kmax + 1),
      residuals_(kmax + 1, 0.0) {}

int HarmonicSolver::size() const { return Layout(g).n; }

void HarmonicSolver::build(int k) const {
  Slot& slot = slots_.at(k);
  if (slot.lu) return;
  const Layout o(g);
  const int nu = g.n_u(), np = g.n_p(), nw = g.n_w(), nd = g.n_d();
  const cplx s(0, omega0 * k);
  const double dl = L.delta;
  SpMat It = op.I.transpose();
  CTriplets t;
  // momentum
  for (int i = 0; i < nu; ++i) t.emplace_back(o.u + i, o.u + i, s * op.Mu(i));
  add_block(t, op.Auu, o.u, o.u, 1);
  add_block(t, SpMat(op.Aub * op.I), o.u, o.e2, 1);
  add_block(t, SpMat(op.Du.transpose()), o.u, o.p, -op.Wp);
  // continuity and pressure gauge
  add_block(t, op.Du, o.p, o.u, -op.Wp);
  add_block(t, SpMat(op.Db * op.I), o.p, o.e2, -op.Wp);
  for (int i = 0; i < np; ++i) {
    t.emplace_back(o.p + i, o.cp, op.Wp);
    t.emplace_back(o.cp, o.p + i, op.Wp);
  }
  // plate kinematics
  add_diag(t, nw, o.e1, o.e1, s);
  add_diag(t, nw, o.e1, o.e2, -1);
  // plate dynamics
  SpMat Mpl = SpMat(It * op.I) * op.Mb;
  add_block(t, Mpl, o.e2, o.e2, s);
  add_diag(t, nw, o.e2, o.e2, s * (op.Ww + op.Me));
  add_block(t, op.Bpl, o.e2, o.e1, 1);
  add_block(t, op.Cpl, o.e2, o.e2, 1);
  add_block(t, SpMat(It * op.Abu), o.e2, o.u, 1);
  add_block(t, SpMat(It * op.Abb * op.I), o.e2, o.e2, 1);
  add_block(t, SpMat(It * SpMat(op.Db.transpose())), o.e2, o.p, -op.Wp);
  add_block(t, op.Ked, o.e2, o.d1, 1);
  add_block(t, op.Ked, o.e2, o.d2, dl);
  add_block(t, op.Kee, o.e2, o.e1, 1);
  add_block(t, op.Kee, o.e2, o.e2, dl);
  for (int i = 0; i < nw; ++i) {
    t.emplace_back(o.e2 + i, o.ce, -op.Ww);
    t.emplace_back(o.ce, o.e1 + i, op.Ww);
  }
  // solid
  add_diag(t, nd, o.d1, o.d1, s);
  add_diag(t, nd, o.d1, o.d2, -1);
  add_diag(t, nd, o.d2, o.d2, s * op.Md);
  add_block(t, op.Kdd, o.d2, o.d1, 1);
  add_block(t, op.Kdd, o.d2, o.d2, dl);
  add_block(t, op.Kde, o.d2, o.e1, 1);
  add_block(t, op.Kde, o.d2, o.e2, dl);

  slot.A.resize(o.n, o.n);
  slot.A.setFromTriplets(t.begin(), t.end());
  slot.A.makeCompressed();
  auto lu = std::make_unique<Eigen::SparseLU<CSp>>();
  lu->analyzePattern(slot.A);
  lu->factorize(slot.A);
  if (lu->info() != Eigen::Success)
    throw Error(ErrorKind::SingularSystem, "harmonic system is singular at k = " + std::to_string(k) + ": " +
                                               lu->lastErrorMessage() +
                                               " (i k omega0 is at or near an eigenvalue of the coupled operator)");
  slot.lu = std::move(lu);
}

void HarmonicSolver::factor_all() const {
  parallel_for(K + 1, [&](std::size_t k) { build(static_cast<int>(k)); });
}

const CSp& HarmonicSolver::matrix(int k) const {
  build(k);
  return slots_[k].A;
}

CVec HarmonicSolver::rhs(const HarmonicForcing& f) const {
  const Layout o(g);
  CVec b = CVec::Zero(o.n);
  b.segment(o.u, g.n_u()) = op.Mu.cast<cplx>().cwiseProduct(f.f_u);
  b.segment(o.e2, g.n_w()) =
      op.Ww * f.g + op.Mb * (op.I.transpose().cast<cplx>() * f.f_b) + op.Me * f.h_e;
  b.segment(o.d2, g.n_d()) = op.Md * f.h_d;
  return b;
}

HarmonicFields HarmonicSolver::unpack(const CVec& x) const {
  const Layout o(g);
  HarmonicFields h;
  h.u = x.segment(o.u, g.n_u());
  h.p = x.segment(o.p, g.n_p());
  h.e1 = x.segment(o.e1, g.n_w());
  h.e2 = x.segment(o.e2, g.n_w());
  h.d1 = x.segment(o.d1, g.n_d());
  h.d2 = x.segment(o.d2, g.n_d());
  h.c = x(o.ce);
  return h;
}

CVec HarmonicSolver::pack(const HarmonicFields& h) const {
  const Layout o(g);
  CVec x = CVec::Zero(o.n);
  x.segment(o.u, g.n_u()) = h.u;
  x.segment(o.p, g.n_p()) = h.p;
  x.segment(o.e1, g.n_w()) = h.e1;
  x.segment(o.e2, g.n_w()) = h.e2;
  x.segment(o.d1, g.n_d()) = h.d1;
  x.segment(o.d2, g.n_d()) = h.d2;
  x(o.ce) = h.c;
  return x;
}

HarmonicFields HarmonicSolver::solve_harmonic(int k, const HarmonicForcing& f, double* residual) const {
  if (k < 0 || k > K) throw std::out_of_range("solve_harmonic: k outside 0..K");
  build(k);
  CVec b = rhs(f);
  CVec x = slots_[k].lu->solve(b);
  if (!x.allFinite()) throw Error(ErrorKind::SingularSystem, "harmonic solve produced non-finite values at k = " + std::to_string(k));
  if (residual) {
    double bn = b.cwiseAbs().maxCoeff();
    double rn = (slots_[k].A * x - b).cwiseAbs().maxCoeff();
    *residual = bn > 0 ? rn / bn : rn;
  }
  return unpack(x);
}

PeriodicState HarmonicSolver::solve_periodic_linear(const Forcings& f) const {
  if (static_cast<int>(f.size()) != K + 1) throw std::invalid_argument("solve_periodic_linear: need K+1 forcing harmonics");
  auto imag0 = [](const CVec& v) { return v.size() ? v.imag().cwiseAbs().maxCoeff() : 0.0; };
  const auto& f0 = f[0];
  double im = std::max({imag0(f0.f_u), imag0(f0.f_b), imag0(f0.g), imag0(f0.h_d), imag0(f0.h_e)});
  if (im > 1e-12 * (1 + f0.f_u.cwiseAbs().maxCoeff() + f0.g.cwiseAbs().maxCoeff() + f0.h_d.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("solve_periodic_linear: the k = 0 forcing harmonic must be real");
  PeriodicState s = PeriodicState::zero(g, T, K);
  factor_all();
  parallel_for(K + 1, [&](std::size_t k) {
    s.h[k] = solve_harmonic(static_cast<int>(k), f[k], &residuals_[k]);
  });
  for (auto& v : {&s.h[0].u, &s.h[0].p, &s.h[0].e1, &s.h[0].e2, &s.h[0].d1, &s.h[0].d2}) *v = v->real().cast<cplx>();
  s.h[0].c = s.h[0].c.real();
  return s;
}

cplx recover_pressure_constant(const HarmonicSolver& S, int k, const HarmonicFields& h, const HarmonicForcing& f) {
  const Operators& op = S.op;
  const cplx s(0, S.omega0 * k);
  const double dl = S.L.delta;
  auto m = [](const SpMat& A, const CVec& x) -> CVec { return A.cast<cplx>() * x; };
  SpMat It = op.I.transpose();
  CVec ub = m(op.I, h.e2);
  CVec r = s * ((op.Ww + op.Me) * h.e2 + op.Mb * m(It, ub)) + m(op.Bpl, h.e1) + m(op.Cpl, h.e2) +
           m(It, m(op.Abu, h.u) + m(op.Abb, ub)) - op.Wp * m(It, m(SpMat(op.Db.transpose()), h.p)) +
           m(op.Ked, h.d1 + dl * h.d2) + m(op.Kee, h.e1 + dl * h.e2);
  r -= op.Ww * f.g + op.Mb * m(It, f.f_b) + op.Me * f.h_e;
  return r.sum() / (op.Ww * static_cast<double>(r.size()));
}

double recover_pressure_constant(const HarmonicSolver& S, const PeriodicState& s, const Forcings& f, double t) {
  std::vector<CVec> c;
  for (int k = 0; k <= s.K; ++k) c.push_back(CVec::Constant(1, recover_pressure_constant(S, k, s.h[k], f[k])));
  return synthesize(c, 2 * std::numbers::pi / s.T, t)(0);
}

CrosscheckReport crosscheck_operator_form(const HarmonicSolver& S, const MfsOperator& A, const Mat& A_raw,
                                          const Forcings& f, const PeriodicState& state) {
  const Operators& op = S.op;
  const Liftings& L = S.L;
  const cplx I(0, 1);
  ShiftedHessenberg sh(A_raw);
  struct Diff {
    double num = 0, den = 0;
    void add(const CVec& a, const CVec& b) {
      if (a.size() == 0) return;
      num = std::max(num, (a - b).cwiseAbs().maxCoeff());
      den = std::max(den, b.cwiseAbs().maxCoeff());
    }
    double rel() const { return den > 0 ? num / den : num; }
  } du, dp, de1, de2, dd1, dd2, dsplit;
  SpMat It = op.I.transpose();
  for (int k = 0; k <= state.K; ++k) {
    const cplx s(0, S.omega0 * k);
    const HarmonicForcing& fk = f[k];
    auto rhs_state = [&](const Vec& fu, const Vec& fb, const Vec& gg, const Vec& hd, const Vec& he) {
      X0State x = A.zero();
      x.v = L.helmholtz(fu);
      Vec load = op.Ww * gg + op.Mb * (It * fb) + op.Me * he + L.pressure_force(L.N2(fu));
      x.e2 = L.added_mass_solve(Vec(load / op.Ww));
      x.d2 = hd;
      return A.to_raw(x);
    };
    Vec br = rhs_state(fk.f_u.real(), fk.f_b.real(), fk.g.real(), fk.h_d.real(), fk.h_e.real());
    Vec bi = rhs_state(fk.f_u.imag(), fk.f_b.imag(), fk.g.imag(), fk.h_d.imag(), fk.h_e.imag());
    CVec b = br.cast<cplx>() + I * bi.cast<cplx>();
    auto fac = sh.factor(s);
    CVec x = sh.solve(fac, b);
    X0State xr = A.from_raw(x.real()), xi = A.from_raw(x.imag());
    auto cx = [&](const Vec& a, const Vec& c) -> CVec { return a.cast<cplx>() + I * c.cast<cplx>(); };
    CVec u = cx(A.full_velocity(xr), A.full_velocity(xi));
    auto pressure = [&](const X0State& z, const Vec& fu) {
      Vec p = L.Npr(z.v) + L.N2(fu);
      if (!z.e2.isZero(0)) {
        auto [w, q] = L.stokes_lift(z.e2);
        p += q - L.Npr(L.helmholtz(w));
      }
      return p;
    };
    CVec p = cx(pressure(xr, fk.f_u.real()), pressure(xi, fk.f_u.imag()));
    CVec e2 = cx(xr.e2, xi.e2);
    p -= s * cmap([&](const Vec& e) { return L.N1(e); }, e2);
    const HarmonicFields& h = state.h[k];
    du.add(u, h.u);
    dp.add(p, h.p);
    de1.add(cx(xr.e1, xi.e1), h.e1);
    de2.add(e2, h.e2);
    dd1.add(cx(xr.d1, xi.d1), h.d1);
    dd2.add(cx(xr.d2, xi.d2), h.d2);
    // velocity split of the saddle-point solution itself
    CVec Pu = cmap([&](const Vec& v) { return L.helmholtz(v); }, h.u);
    CVec split = Pu + cmap([&](const Vec& e) {
                   if (e.isZero(0)) return Vec(Vec::Zero(S.g.n_u()));
                   auto [w, q] = L.stokes_lift(e);
                   return Vec(w - L.helmholtz(w));
                 }, h.e2);
    dsplit.add(split, h.u);
  }
  CrosscheckReport r;
  r.u = du.rel();
  r.p = dp.rel();
  r.e1 = de1.rel();
  r.e2 = de2.rel();
  r.d1 = dd1.rel();
  r.d2 = dd2.rel();
  r.velocity_split = dsplit.rel();
  r.max_rel = std::max({r.u, r.p, r.e1, r.e2, r.d1, r.d2});
  return r;
}

void write_fields_csv(const std::string& path, const Grid& g, const PeriodicState& s) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Numerical, "cannot write " + path);
  out.precision(17);
  out << "k,field,index,x,z,re,im\n";
  auto put = [&](int k, const char* name, int i, double x, double z, cplx v) {
    out << k << ',' << name << ',' << i << ',' << x << ',' << z << ',' << v.real() << ',' << v.imag() << '\n';
  };
  for (int k = 0; k <= s.K; ++k) {
    const HarmonicFields& h = s.h[k];
    for (int i = 0; i < h.u.size(); ++i) {
      auto [x, z] = g.u_pos(i);
      put(k, g.u_comp(i) ? "u3" : "u1", i, x, z, h.u(i));
    }
    for (int i = 0; i < h.p.size(); ++i) {
      auto [x, z] = g.p_pos(i);
      put(k, "p", i, x, z, h.p(i) + h.c);
    }
    for (int i = 0; i < h.e1.size(); ++i) put(k, "eta1", i, g.x(i + 1), 0, h.e1(i));
    for (int i = 0; i < h.e2.size(); ++i) put(k, "eta2", i, g.x(i + 1), 0, h.e2(i));
    for (int i = 0; i < h.d1.size(); ++i) {
      auto [x, z] = g.d_pos(i);
      put(k, i % 2 ? "d1z" : "d1x", i, x, z, h.d1(i));
      put(k, i % 2 ? "d2z" : "d2x", i, x, z, h.d2(i));
    }
  }
}

}  // namespace mfsi
