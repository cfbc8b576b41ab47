#pragma once
#include <string>
#include <vector>

#include "mfsi/harmonic_solver.hpp"

namespace mfsi {

// 1D function given as a sum of c sin(kx), c cos(kx) and a polynomial, with
// exact derivatives of any order.
class Fn {
public:
  static Fn sin(double c, double k);
  static Fn cos(double c, double k);
  static Fn poly(std::vector<double> coeffs);  // sum c_i x^i
  Fn& operator+=(const Fn& o);
  double operator()(double x, int n = 0) const;

private:
  struct Trig {
    double c, k;
    bool is_sin;
  };
  std::vector<Trig> trig_;
  std::vector<double> poly_;
};

// Sum of separable products f(x) g(z).
class Sep {
public:
  Sep() = default;
  Sep(Fn f, Fn g) { terms_.push_back({std::move(f), std::move(g)}); }
  Sep& operator+=(const Sep& o);
  double operator()(double x, double z, int nx = 0, int nz = 0) const;

private:
  struct Term {
    Fn f, g;
  };
  std::vector<Term> terms_;
};

const std::vector<std::string>& mms_recipes();

struct MmsCase {
  PeriodicState exact;
  Forcings forcing;
};

// Manufactured periodic solution and its linear forcing. pressure_offset adds
// a spatially constant pressure c*(t) = offset cos(w0 t) carried by the
// plate load. delta0 > 0 rejects amplitudes with max|eta1| > delta0.
MmsCase mms_generate(const Grid& g, const PhysicsConfig& ph, int K, const std::string& recipe, double amplitude = 1,
                     double pressure_offset = 0, double delta0 = 0);
// max over time and space of |eta1| for unit amplitude.
double mms_peak_eta(const std::string& recipe, double L, double T);

struct MmsError {
  double u = 0, eta1 = 0, d = 0;
};
// Max-norm errors over all harmonics for u, eta1 and d1 + delta d2.
MmsError mms_error(const PeriodicState& num, const PeriodicState& exact, double delta);

// Forcing catalogue used by the solve mode.
Forcings catalogue_forcing(const Grid& g, const Config& c);

}  // namespace mfsi
