#include "mfsi/mms.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mfsi/errors.hpp"

namespace mfsi {

namespace {
constexpr double pi = std::numbers::pi;
}

Fn Fn::sin(double c, double k) {
  Fn f;
  f.trig_.push_back({c, k, true});
  return f;
}

Fn Fn::cos(double c, double k) {
  Fn f;
  f.trig_.push_back({c, k, false});
  return f;
}

Fn Fn::poly(std::vector<double> c) {
  Fn f;
  f.poly_ = std::move(c);
  return f;
}

Fn& Fn::operator+=(const Fn& o) {
  trig_.insert(trig_.end(), o.trig_.begin(), o.trig_.end());
  if (poly_.size() < o.poly_.size()) poly_.resize(o.poly_.size(), 0.0);
  for (std::size_t i = 0; i < o.poly_.size(); ++i) poly_[i] += o.poly_[i];
  return *this;
}

double Fn::operator()(double x, int n) const {
  double s = 0;
  for (const auto& t : trig_) {
    double ph = t.k * x + n * pi / 2;
    s += t.c * std::pow(t.k, n) * (t.is_sin ? std::sin(ph) : std::cos(ph));
  }
  // n-th derivative of the polynomial by Horner on the shifted coefficients
  double p = 0;
  for (int i = static_cast<int>(poly_.size()) - 1; i >= n; --i) {
    double f = 1;
    for (int j = 0; j < n; ++j) f *= i - j;
    p = p * x + f * poly_[i];
  }
  return s + p;
}

Sep& Sep::operator+=(const Sep& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  return *this;
}

double Sep::operator()(double x, double z, int nx, int nz) const {
  double s = 0;
  for (const auto& t : terms_) s += t.f(x, nx) * t.g(z, nz);
  return s;
}

const std::vector<std::string>& mms_recipes() {
  static const std::vector<std::string> r{"rest", "standing-wave", "two-tone"};
  return r;
}

namespace {

// clamped mean-zero plate shape sum c_j sin(k_j x) and its antiderivative E, E(0) = 0
struct PlateShape {
  Fn chi, E;
};

PlateShape plate_shape(double L, int base) {
  const double k1 = 2 * pi * base / L, k2 = 4 * pi * base / L;
  PlateShape p;
  p.chi = Fn::sin(0.5, k1);
  p.chi += Fn::sin(-0.25, k2);
  p.E = Fn::cos(-0.5 / k1, k1);
  p.E += Fn::cos(0.25 / k2, k2);
  p.E += Fn::poly({0.5 / k1 - 0.25 / k2});
  return p;
}

struct Harmonic {
  int k;
  cplx a;  // plate displacement amplitude
  cplx b;  // pressure amplitude
  cplx c;  // solid bubble amplitude
  int base;
};

std::vector<Harmonic> recipe_harmonics(const std::string& id, double A) {
  const cplx I(0, 1);
  if (id == "rest") return {};
  if (id == "standing-wave") return {{1, -0.5 * I * A, 0.5 * A, -0.25 * I * A, 1}};
  if (id == "two-tone") return {{0, 0.5 * A, 0.3 * A, 0.4 * A, 2}, {2, (0.25 - 0.25 * I) * A, -0.2 * I * A, 0.1 * A, 2}};
  throw Error(ErrorKind::InvalidConfig, "unknown manufactured-solution recipe '" + id + "'");
}

}  // namespace

double mms_peak_eta(const std::string& recipe, double L, double T) {
  auto hs = recipe_harmonics(recipe, 1.0);
  const double w = 2 * pi / T;
  double m = 0;
  const int N = 400;
  for (int it = 0; it < N; ++it)
    for (int is = 0; is <= N; ++is) {
      double t = T * it / N, x = L * is / N, v = 0;
      for (auto& h : hs) {
        double chi = plate_shape(L, h.base).chi(x);
        v += (h.k == 0 ? 1.0 : 2.0) * (h.a * std::exp(cplx(0, w * h.k * t))).real() * chi;
      }
      m = std::max(m, std::abs(v));
    }
  return m;
}

MmsCase mms_generate(const Grid& g, const PhysicsConfig& ph, int K, const std::string& recipe, double amplitude,
                     double pressure_offset, double delta0) {
  auto hs = recipe_harmonics(recipe, amplitude);
  for (auto& h : hs)
    if (h.k > K) throw Error(ErrorKind::InvalidConfig, "recipe '" + recipe + "' needs K >= " + std::to_string(h.k));
  if (delta0 > 0) {
    double peak = amplitude * mms_peak_eta(recipe, g.L, ph.T);
    if (peak > delta0) throw SmallnessError(peak, delta0, -1);
  }
  const double w = 2 * pi / ph.T, mu = ph.mu_s, lam = ph.lambda_s, dl = ph.delta;
  const double Hf = g.Hf, Hs = g.Hs, L = g.L;
  MmsCase mc;
  mc.exact = PeriodicState::zero(g, ph.T, K);
  mc.forcing.assign(K + 1, HarmonicForcing::zero(g));

  const Fn phi = Fn::poly({1, 0, -3 / (Hf * Hf), -2 / (Hf * Hf * Hf)});
  const Fn q = Fn::poly({1, -2 / Hs, 1 / (Hs * Hs)});
  const Sep press(Fn::cos(1, pi / L), Fn::cos(1, pi / Hf));
  const Sep bubble(Fn::sin(1, 2 * pi / L), Fn::sin(1, pi / Hs));

  for (const auto& h : hs) {
    const cplx s(0, w * h.k);
    PlateShape P = plate_shape(L, h.base);
    // velocity from the stream function -E(x) phi(z), scaled by the plate velocity s a
    Sep U1(P.E, phi), U3(P.chi, phi);
    const Sep Dz(P.chi, q);
    auto u1 = [&](double x, double z, int nx, int nz) { return -U1(x, z, nx, nz + 1); };
    auto u3 = [&](double x, double z, int nx, int nz) { return U3(x, z, nx, nz); };
    // solid displacement d1 = a (0, chi q) + c (bubble, bubble)
    auto dx = [&](double x, double z, int nx, int nz) { return h.c * bubble(x, z, nx, nz); };
    auto dz = [&](double x, double z, int nx, int nz) { return h.a * Dz(x, z, nx, nz) + h.c * bubble(x, z, nx, nz); };

    HarmonicFields& ex = mc.exact.h[h.k];
    HarmonicForcing& fo = mc.forcing[h.k];
    const cplx va = s * h.a;
    for (int k = 0; k < g.n_u(); ++k) {
      auto [x, z] = g.u_pos(k);
      if (g.u_comp(k) == 0) {
        double lap = u1(x, z, 2, 0) + u1(x, z, 0, 2);
        ex.u(k) = va * u1(x, z, 0, 0);
        fo.f_u(k) = s * ex.u(k) - va * lap + h.b * press(x, z, 1, 0);
      } else {
        double lap = u3(x, z, 2, 0) + u3(x, z, 0, 2);
        ex.u(k) = va * u3(x, z, 0, 0);
        fo.f_u(k) = s * ex.u(k) - va * lap + h.b * press(x, z, 0, 1);
      }
    }
    for (int i = 0; i < g.nh; ++i) {
      double x = g.xc(i);
      fo.f_b(i) = s * va * u3(x, 0, 0, 0) - va * (u3(x, 0, 2, 0) + u3(x, 0, 0, 2)) + h.b * press(x, 0, 0, 1);
    }
    for (int k = 0; k < g.n_p(); ++k) {
      auto [x, z] = g.p_pos(k);
      ex.p(k) = h.b * press(x, z);
    }
    ex.p.array() -= ex.p.mean();
    const cplx sD = 1.0 + dl * s;
    for (int i = 1; i < g.nh; ++i) {
      const double x = g.x(i);
      const int w_i = g.w(i);
      ex.e1(w_i) = h.a * P.chi(x);
      ex.e2(w_i) = s * ex.e1(w_i);
      cplx sf33 = -h.b * press(x, 0) + 2.0 * va * u3(x, 0, 0, 1);
      cplx ss33 = sD * ((2 * mu + lam) * dz(x, 0, 0, 1) + lam * dx(x, 0, 1, 0));
      fo.g(w_i) = s * ex.e2(w_i) + h.a * P.chi(x, 4) - s * h.a * P.chi(x, 2) + sf33 - ss33;
      // vertical solid load at the interface row
      cplx divz = dx(x, 0, 1, 1) + dz(x, 0, 0, 2);
      cplx lapz = dz(x, 0, 2, 0) + dz(x, 0, 0, 2);
      fo.h_e(w_i) = s * s * dz(x, 0, 0, 0) - sD * (mu * lapz + (mu + lam) * divz);
    }
    for (int k = 0; k < g.n_d(); ++k) {
      auto [x, z] = g.d_pos(k);
      const bool vert = k % 2;
      cplx val = vert ? dz(x, z, 0, 0) : dx(x, z, 0, 0);
      cplx lap = vert ? dz(x, z, 2, 0) + dz(x, z, 0, 2) : dx(x, z, 2, 0) + dx(x, z, 0, 2);
      cplx grad_div = vert ? dx(x, z, 1, 1) + dz(x, z, 0, 2) : dx(x, z, 2, 0) + dz(x, z, 1, 1);
      ex.d1(k) = val;
      ex.d2(k) = s * val;
      fo.h_d(k) = s * s * val - sD * (mu * lap + (mu + lam) * grad_div);
    }
  }
  if (pressure_offset != 0) {
    if (K < 1) throw Error(ErrorKind::InvalidConfig, "pressure offset needs K >= 1");
    // c*(t) = offset cos(w t): harmonic 1 carries offset / 2
    mc.exact.h[1].c += 0.5 * pressure_offset;
    mc.forcing[1].g.array() -= 0.5 * pressure_offset;
  }
  return mc;
}

MmsError mms_error(const PeriodicState& num, const PeriodicState& exact, double delta) {
  MmsError e;
  for (int k = 0; k <= exact.K; ++k) {
    const auto &a = num.h[k], &b = exact.h[k];
    double f = k == 0 ? 1.0 : 2.0;  // amplitude of the real signal
    e.u = std::max(e.u, f * (a.u - b.u).cwiseAbs().maxCoeff());
    e.eta1 = std::max(e.eta1, f * (a.e1 - b.e1).cwiseAbs().maxCoeff());
    e.d = std::max(e.d, f * ((a.d1 + delta * a.d2) - (b.d1 + delta * b.d2)).cwiseAbs().maxCoeff());
  }
  return e;
}

Forcings catalogue_forcing(const Grid& g, const Config& c) {
  const int K = c.discretization.K;
  const double A = c.forcing.amplitude;
  const auto& id = c.forcing.id;
  Forcings f;
  if (id != "mixed") {
    f = mms_generate(g, c.physics, K, id, A).forcing;
  } else {
    f.assign(K + 1, HarmonicForcing::zero(g));
    const cplx I(0, 1);
    const double L = g.L, Hf = g.Hf, Hs = g.Hs;
    // divergence-free swirl from psi = sin^2(pi x / L) sin^2(pi z / Hf), carried by sin(w t)
    Fn S = Fn::poly({0.5});
    S += Fn::cos(-0.5, 2 * pi / L);
    Fn Z = Fn::poly({0.5});
    Z += Fn::cos(-0.5, 2 * pi / Hf);
    Sep psi(S, Z);
    HarmonicForcing& h = f[1];
    if (c.forcing.f) {
      for (int k = 0; k < g.n_u(); ++k) {
        auto [x, z] = g.u_pos(k);
        h.f_u(k) = -0.5 * I * A * (g.u_comp(k) == 0 ? psi(x, z, 0, 1) : -psi(x, z, 1, 0));
      }
      for (int i = 0; i < g.nh; ++i) h.f_b(i) = -0.5 * I * A * -psi(g.xc(i), 0, 1, 0);
    }
    if (c.forcing.g) {
      Fn chi = plate_shape(L, 1).chi;
      for (int i = 1; i < g.nh; ++i) h.g(g.w(i)) = 0.5 * A * chi(g.x(i));
    }
    if (c.forcing.h) {
      for (int k = 0; k < g.n_d(); ++k) {
        auto [x, z] = g.d_pos(k);
        double v = k % 2 ? std::sin(2 * pi * x / L) * std::sin(pi * z / Hs) : std::sin(pi * x / L) * std::sin(pi * z / Hs);
        h.h_d(k) = -0.5 * I * A * v;
      }
    }
  }
  return f;
}

}  // namespace mfsi
