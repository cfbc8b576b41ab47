#pragma once
// Independent evaluation of the transformed momentum and coupling defects by
// high-order finite differences of the physical (moving-domain) fields.
#include <cmath>
#include <functional>

namespace oracle {

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

struct Fields {
  Fn2 u1, u3, pi;  // reference fields (time independent)
  Fn1 eta, eta_s;      // plate displacement at t = 0 and its slope
  Fn1 eta_t, eta_ts;   // plate velocity and its slope
};

// quintic smoothstep cutoff, written out again on purpose
inline double psi(double alpha, double z) {
  double w = alpha / 2, a = std::abs(z);
  if (a <= w) return 1;
  if (a >= alpha) return 0;
  double t = (a - w) / w;
  return 1 - t * t * t * (10 - 15 * t + 6 * t * t);
}
inline double psi_prime(double alpha, double z) {
  double w = alpha / 2, a = std::abs(z);
  if (a <= w || a >= alpha) return 0;
  double t = (a - w) / w;
  return -(z < 0 ? -1.0 : 1.0) * 30 * t * t * (1 - t) * (1 - t) / w;
}

// 7-point central weights, sixth order
inline double d1(const Fn1& f, double x, double h) {
  return (-f(x - 3 * h) + 9 * f(x - 2 * h) - 45 * f(x - h) + 45 * f(x + h) - 9 * f(x + 2 * h) + f(x + 3 * h)) /
         (60 * h);
}
inline double d2(const Fn1& f, double x, double h) {
  return (2 * f(x - 3 * h) - 27 * f(x - 2 * h) + 270 * f(x - h) - 490 * f(x) + 270 * f(x + h) - 27 * f(x + 2 * h) +
          2 * f(x + 3 * h)) /
         (180 * h * h);
}

class Transformed {
public:
  Transformed(Fields f, double alpha, double hd = 5e-4) : F_(std::move(f)), alpha_(alpha), hd_(hd) {}

  double eta(double t, double s) const { return F_.eta(s) + t * F_.eta_t(s); }
  double deta(double t, double s) const { return F_.eta_s(s) + t * F_.eta_ts(s); }
  double dpsi(double z) const { return psi_prime(alpha_, z); }
  // Y_3 by Newton on x3 = y3 + psi(y3) eta
  double Y3(double t, double x1, double x3) const {
    double e = eta(t, x1), y = x3 - e * psi(alpha_, x3);
    for (int i = 0; i < 100; ++i) {
      double r = y + psi(alpha_, y) * e - x3;
      if (std::abs(r) < 1e-15) break;
      double dr = 1 + dpsi(y) * e;
      y -= r / dr;
    }
    return y;
  }
  // physical velocity component c at (t, x)
  double uF(int c, double t, double x1, double x3) const {
    double y3 = Y3(t, x1, x3);
    double J = 1 + dpsi(y3) * eta(t, x1);
    double sh = psi(alpha_, y3) * deta(t, x1);
    double u1 = F_.u1(x1, y3), u3 = F_.u3(x1, y3);
    // a(x) = grad X(Y) / det
    return c == 0 ? u1 / J : (sh * u1 + J * u3) / J;
  }
  double piF(double t, double x1, double x3) const { return F_.pi(x1, Y3(t, x1, x3)); }

  // F_alpha at the reference point y
  double F(int a, double y1, double y3) const {
    auto comp = [&](int c, double q1, double q3) { return c == 0 ? F_.u1(q1, q3) : F_.u3(q1, q3); };
    double lap_ref = d2([&](double q) { return comp(a, q, y3); }, y1, hd_) +
                     d2([&](double q) { return comp(a, y1, q); }, y3, hd_);
    double dpi_ref = a == 0 ? d1([&](double q) { return F_.pi(q, y3); }, y1, hd_)
                            : d1([&](double q) { return F_.pi(y1, q); }, y3, hd_);
    const double x1 = y1, x3 = y3 + psi(alpha_, y3) * eta(0, y1);
    double ns[2];
    for (int c = 0; c < 2; ++c) {
      double dt = d1([&](double t) { return uF(c, t, x1, x3); }, 0.0, hd_);
      double dx = d1([&](double q) { return uF(c, 0, q, x3); }, x1, hd_);
      double dz = d1([&](double q) { return uF(c, 0, x1, q); }, x3, hd_);
      double lap = d2([&](double q) { return uF(c, 0, q, x3); }, x1, hd_) +
                   d2([&](double q) { return uF(c, 0, x1, q); }, x3, hd_);
      double gp = c == 0 ? d1([&](double q) { return piF(0, q, x3); }, x1, hd_)
                         : d1([&](double q) { return piF(0, x1, q); }, x3, hd_);
      ns[c] = dt + uF(0, 0, x1, x3) * dx + uF(1, 0, x1, x3) * dz - lap + gp;
    }
    double J = 1 + dpsi(y3) * eta(0, y1), sh = psi(alpha_, y3) * deta(0, y1);
    // b = Cof(grad X)^T = [[J, 0], [-sh, 1]]
    double bns = a == 0 ? J * ns[0] : -sh * ns[0] + ns[1];
    return -lap_ref + dpi_ref - bns;
  }

  // G at the plate point s
  double G(double s) const {
    const double x3 = eta(0, s), ep = deta(0, s);
    double du3_ref = d1([&](double q) { return F_.u3(s, q); }, 0.0, hd_);
    double d3u3 = d1([&](double q) { return uF(1, 0, s, q); }, x3, hd_);
    double d1u3 = d1([&](double q) { return uF(1, 0, q, x3); }, s, hd_);
    double d3u1 = d1([&](double q) { return uF(0, 0, s, q); }, x3, hd_);
    return 2 * du3_ref - 2 * d3u3 + ep * (d1u3 + d3u1);
  }

private:
  Fields F_;
  double alpha_, hd_;
};

}  // namespace oracle
