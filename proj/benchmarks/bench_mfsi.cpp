#include <benchmark/benchmark.h>

#include "mfsi/mms.hpp"
#include "mfsi/nonlinear.hpp"
#include "mfsi/picard.hpp"
#include "mfsi/spectral.hpp"

using namespace mfsi;

namespace {
Config mesh(int n) {
  Config c;
  c.geometry.n_h = n;
  c.geometry.n_zf = n;
  c.geometry.n_zs = std::max(6, 2 * n / 3);
  return c;
}

struct Problem {
  Config c;
  Grid g;
  Operators op;
  Liftings L;
  explicit Problem(int n) : c(mesh(n)), g(c.geometry), op(g, 1, 1), L(g, op, c.physics.delta) {}
};
}  // namespace

static void BM_Liftings(benchmark::State& st) {
  Config c = mesh(static_cast<int>(st.range(0)));
  Grid g(c.geometry);
  Operators op(g, 1, 1);
  for (auto _ : st) benchmark::DoNotOptimize(Liftings(g, op, c.physics.delta));
}
BENCHMARK(BM_Liftings)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

static void BM_FactorHarmonic(benchmark::State& st) {
  Problem p(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    HarmonicSolver S(p.g, p.op, p.L, 1.0, 1);
    S.factor_all();
  }
}
BENCHMARK(BM_FactorHarmonic)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

static void BM_SolvePeriodicLinear(benchmark::State& st) {
  Problem p(static_cast<int>(st.range(0)));
  HarmonicSolver S(p.g, p.op, p.L, 1.0, p.c.discretization.K);
  S.factor_all();
  Forcings f = catalogue_forcing(p.g, p.c);
  for (auto _ : st) benchmark::DoNotOptimize(S.solve_periodic_linear(f));
}
BENCHMARK(BM_SolvePeriodicLinear)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

static void BM_NonlinearHarmonics(benchmark::State& st) {
  Problem p(static_cast<int>(st.range(0)));
  HarmonicSolver S(p.g, p.op, p.L, 1.0, p.c.discretization.K);
  PeriodicState v = S.solve_periodic_linear(catalogue_forcing(p.g, p.c));
  Cutoff cut(p.g.alpha);
  for (auto _ : st) benchmark::DoNotOptimize(nonlinear_rhs_harmonics(p.g, p.op, cut, v, p.c.discretization.samples()));
}
BENCHMARK(BM_NonlinearHarmonics)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

static void BM_PicardStep(benchmark::State& st) {
  Problem p(static_cast<int>(st.range(0)));
  HarmonicSolver S(p.g, p.op, p.L, 1.0, p.c.discretization.K);
  S.factor_all();
  PicardContext ctx{p.g, p.op, p.L, S, Cutoff(p.g.alpha), p.c.discretization.samples()};
  Forcings f = catalogue_forcing(p.g, p.c);
  PeriodicState v = S.solve_periodic_linear(f);
  for (auto _ : st) benchmark::DoNotOptimize(phi_map(ctx, v, f));
}
BENCHMARK(BM_PicardStep)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

static void BM_ResolventShift(benchmark::State& st) {
  Problem p(static_cast<int>(st.range(0)));
  MfsOperator A(p.g, p.op, p.L);
  EnergyForm E = energy_form(A);
  ShiftedHessenberg H(E.A_E);
  int k = 0;
  for (auto _ : st) {
    auto f = H.factor(cplx(0, 2 * M_PI * (k++ % 9)));
    benchmark::DoNotOptimize(H.resolvent_norm(f));
  }
}
BENCHMARK(BM_ResolventShift)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

static void BM_DenseSpectrum(benchmark::State& st) {
  Problem p(static_cast<int>(st.range(0)));
  MfsOperator A(p.g, p.op, p.L);
  EnergyForm E = energy_form(A);
  for (auto _ : st) benchmark::DoNotOptimize(compute_spectrum(E.A_E, false));
}
BENCHMARK(BM_DenseSpectrum)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
