#pragma once
#include <memory>
#include <string>
#include <vector>

#include <Eigen/SparseLU>

#include "mfsi/mfs_operator.hpp"

namespace mfsi {

// Harmonic k of the data. f_u on interior faces, f_b on interface faces
// (vertical), g plate load, h_d interior solid load, h_e vertical solid load
// on the interface row.
struct HarmonicForcing {
  CVec f_u, f_b, g, h_d, h_e;
  static HarmonicForcing zero(const Grid& g);
  HarmonicForcing& operator+=(const HarmonicForcing& o);
  HarmonicForcing operator*(cplx a) const;
};
using Forcings = std::vector<HarmonicForcing>;  // k = 0..K

struct HarmonicFields {
  CVec u, p, e1, e2, d1, d2;
  cplx c = 0;  // pressure constant, full pressure = p + c
  static HarmonicFields zero(const Grid& g);
};

// Coefficients for k = 0..K; k < 0 follows from conjugation.
struct PeriodicState {
  double T = 1;
  int K = 0;
  std::vector<HarmonicFields> h;
  HarmonicFields coefficient(int k) const;
  static PeriodicState zero(const Grid& g, double T, int K);
};

// Real field samples at time t.
struct TimeSample {
  Vec u, p, e1, e2, d1, d2;
  double c = 0;
};
TimeSample sample_at(const PeriodicState& s, double t);
// Direct DFT of M equispaced real samples over one period, coefficients 0..K.
std::vector<CVec> dft_coefficients(const std::vector<Vec>& samples, int K);
Vec synthesize(const std::vector<CVec>& coeffs, double omega0, double t);

class HarmonicSolver {
public:
  HarmonicSolver(const Grid& g, const Operators& op, const Liftings& L, double T, int K);

  const Grid& g;
  const Operators& op;
  const Liftings& L;
  double T, omega0;
  int K;

  int size() const;
  // Monolithic system at s = i k omega0 (built on demand, cached with its factorization).
  const Eigen::SparseMatrix<cplx>& matrix(int k) const;
  CVec rhs(const HarmonicForcing& f) const;
  HarmonicFields unpack(const CVec& x) const;
  CVec pack(const HarmonicFields& h) const;

  HarmonicFields solve_harmonic(int k, const HarmonicForcing& f, double* residual = nullptr) const;
  // Throws SingularSystem naming k; per-harmonic relative residual in last_residuals().
  PeriodicState solve_periodic_linear(const Forcings& f) const;
  const std::vector<double>& last_residuals() const { return residuals_; }
  // Factor every harmonic (parallel over k).
  void factor_all() const;

private:
  struct Slot {
    Eigen::SparseMatrix<cplx> A;
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<cplx>>> lu;
  };
  void build(int k) const;
  mutable std::vector<Slot> slots_;
  mutable std::vector<double> residuals_;
};

// Constant of the full pressure from the averaged plate equation at harmonic k.
cplx recover_pressure_constant(const HarmonicSolver& S, int k, const HarmonicFields& h, const HarmonicForcing& f);
// Same in the time domain at time t.
double recover_pressure_constant(const HarmonicSolver& S, const PeriodicState& s, const Forcings& f, double t);

struct CrosscheckReport {
  double max_rel = 0;  // over all fields and harmonics
  double u = 0, p = 0, e1 = 0, e2 = 0, d1 = 0, d2 = 0;
  double velocity_split = 0;  // P u + (I - P) D_fl eta2 against the saddle-point u
};
// Re-solves every harmonic through (i k w0 - A) v = F in raw coordinates and
// reconstructs velocity and pressure.
CrosscheckReport crosscheck_operator_form(const HarmonicSolver& S, const MfsOperator& A, const Mat& A_raw,
                                          const Forcings& f, const PeriodicState& state);

void write_fields_csv(const std::string& path, const Grid& g, const PeriodicState& s);

}  // namespace mfsi
