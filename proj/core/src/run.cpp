#include "mfsi/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

#include "mfsi/errors.hpp"
#include "mfsi/mms.hpp"
#include "mfsi/parallel.hpp"
#include "mfsi/picard.hpp"
#include "mfsi/spectral.hpp"

#ifndef MFSI_VERSION
#define MFSI_VERSION "0.0.0"
#endif
#ifndef MFSI_GIT_DESCRIBE
#define MFSI_GIT_DESCRIBE MFSI_VERSION
#endif

namespace mfsi {

using json = nlohmann::json;
namespace fs = std::filesystem;

const char* version_string() { return MFSI_GIT_DESCRIBE; }

Config load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"config: cannot read '" + path + "'"});
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({"config: " + path + ": " + e.what()});
  }
  std::vector<std::string> errs;
  for (const auto& o : overrides) {
    try {
      apply_override(j, o);
    } catch (const ConfigError& e) {
      errs.insert(errs.end(), e.violations().begin(), e.violations().end());
    }
  }
  if (!errs.empty()) throw ConfigError(errs);
  Config c = config_from_json(j);
  require_valid(c);
  return c;
}

namespace {

class Phases {
public:
  explicit Phases(json& out) : out_(out) {}
  template <class F>
  auto operator()(const std::string& name, F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    struct Stamp {
      json& out;
      std::string name;
      std::chrono::steady_clock::time_point t0;
      ~Stamp() { out[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
    } stamp{out_, name, t0};
    return f();
  }

private:
  json& out_;
};

std::ofstream open_csv(const Config& c, const std::string& name) {
  std::ofstream f(fs::path(c.out_dir) / name);
  if (!f) throw Error(ErrorKind::Numerical, "cannot write " + (fs::path(c.out_dir) / name).string());
  f << std::setprecision(17);
  return f;
}

double mesh_h(const Grid& g) { return std::max({g.hx, g.hzf, g.hzs}); }

void log_summary(const Config& c, const Grid& g, std::ostream& log) {
  log << "mfsi " << version_string() << "  mode " << c.mode << "\n"
      << "  mesh n_h=" << g.nh << " n_zf=" << g.nzf << " n_zs=" << g.nzs << "  dofs=" << g.n_total_dofs() << "\n"
      << "  physics mu_s=" << c.physics.mu_s << " lambda_s=" << c.physics.lambda_s << " delta=" << c.physics.delta
      << " T=" << c.physics.T << "  K=" << c.discretization.K << "\n";
}

json nullable(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

void run_solve(const Config& c, json& report, std::ostream& log) {
  Phases phase(report["timings"]);
  Grid g(c.geometry);
  log_summary(c, g, log);
  Operators op = phase("assemble", [&] { return Operators(g, c.physics.mu_s, c.physics.lambda_s); });
  Liftings L = phase("liftings", [&] { return Liftings(g, op, c.physics.delta); });
  HarmonicSolver S(g, op, L, c.physics.T, c.discretization.K);
  phase("factorize", [&] { S.factor_all(); });
  Forcings f = catalogue_forcing(g, c);
  PicardContext ctx{g, op, L, S, Cutoff(c.geometry.alpha), c.discretization.samples()};
  double h = mesh_h(g);
  double tol_res = c.solver.tol_res > 0 ? c.solver.tol_res : 10 * h * h;
  report["tol_res"] = tol_res;
  report["delta0"] = ctx.cutoff.delta0();
  FixedPoint fp;
  try {
    fp = phase("picard", [&] { return solve_fixed_point(ctx, f, c.solver.tol, tol_res, c.solver.maxit); });
  } catch (const PicardFailure& e) {
    report["picard"] = e.report.to_json();
    throw;
  }
  report["picard"] = fp.report.to_json();
  const auto& r = fp.report;
  double rho = r.ratios.empty() ? 0.0 : *std::max_element(r.ratios.begin(), r.ratios.end());
  report["max_contraction_ratio"] = rho;
  json cstar = json::array();
  for (int m = 0; m < 8; ++m) {
    double t = c.physics.T * m / 8.0;
    cstar.push_back({{"t", t}, {"c", recover_pressure_constant(S, fp.state, f, t)}});
  }
  report["pressure_constant"] = cstar;
  phase("write", [&] { write_fields_csv((fs::path(c.out_dir) / "fields_k.csv").string(), g, fp.state); });
  log << "  picard: " << r.iterates << " iterates, contraction ratio " << rho << ", residual " << r.final_residual
      << ", smallness margin " << r.smallness_margin << "\n";
}

void run_spectrum(const Config& c, json& report, std::ostream& log) {
  Phases phase(report["timings"]);
  Grid g(c.geometry);
  log_summary(c, g, log);
  Operators op(g, c.physics.mu_s, c.physics.lambda_s);
  Liftings L = phase("liftings", [&] { return Liftings(g, op, c.physics.delta); });
  MfsOperator A(g, op, L);
  EnergyForm E = phase("assemble", [&] { return energy_form(A); });
  SpectralReport sp = phase("eigensolve", [&] { return compute_spectrum(E.A_E, true); });
  const int n = static_cast<int>(sp.eigenvalues.size());
  std::vector<double> er(n);
  std::vector<char> sign(n);
  phase("energy-identity", [&] {
    Eigen::MatrixXcd Rc = E.R.cast<cplx>();
    parallel_for(n, [&](std::size_t i) {
      CVec raw = Rc.triangularView<Eigen::Upper>().solve(sp.eigenvectors.col(i));
      bool ok = false;
      er[i] = energy_identity_residual(A, sp.eigenvalues[i], raw, &ok);
      sign[i] = ok;
    });
  });
  phase("write", [&] {
    auto f = open_csv(c, "spectrum.csv");
    f << "re,im,residual,energy_residual\n";
    for (int i = 0; i < n; ++i)
      f << sp.eigenvalues[i].real() << "," << sp.eigenvalues[i].imag() << "," << sp.residual[i] << "," << er[i] << "\n";
  });
  int top = std::min(10, n);
  double er_top = 0, res_max = 0;
  bool sign_top = true;
  for (int i = 0; i < top; ++i) {
    er_top = std::max(er_top, er[i]);
    sign_top = sign_top && sign[i];
  }
  for (double r : sp.residual) res_max = std::max(res_max, r);
  report["dim"] = n;
  report["spectral_bound"] = sp.spectral_bound;
  report["min_abs_eigenvalue"] = sp.min_abs;
  report["n_unstable"] = sp.n_unstable();
  report["max_eigen_residual"] = res_max;
  report["max_energy_residual_top10"] = er_top;
  report["energy_sign_consistent_top10"] = sign_top;
  json rightmost = json::array();
  for (int i = 0; i < top; ++i) rightmost.push_back({sp.eigenvalues[i].real(), sp.eigenvalues[i].imag()});
  report["rightmost"] = rightmost;
  log << "  spectral bound " << sp.spectral_bound << ", min |lambda| " << sp.min_abs << ", unstable "
      << sp.n_unstable() << ", max eigen residual " << res_max << ", energy residual (top 10) " << er_top << "\n";
  if (sp.n_unstable() > 0)
    throw Error(ErrorKind::Numerical, std::to_string(sp.n_unstable()) + " eigenvalues with Re >= 0");
}

void run_resolvent(const Config& c, json& report, std::ostream& log) {
  Phases phase(report["timings"]);
  Grid g(c.geometry);
  log_summary(c, g, log);
  Operators op(g, c.physics.mu_s, c.physics.lambda_s);
  Liftings L = phase("liftings", [&] { return Liftings(g, op, c.physics.delta); });
  MfsOperator A(g, op, L);
  EnergyForm E = phase("assemble", [&] { return energy_form(A); });
  double omega0 = 2 * M_PI / c.physics.T;
  auto rows = phase("scan", [&] { return resolvent_scan(E.A_E, omega0, c.solver.kmax_scan); });
  phase("write", [&] {
    auto f = open_csv(c, "resolvent.csv");
    f << "k,norm,k_times_norm\n";
    for (const auto& r : rows) f << r.k << "," << r.norm << "," << r.k_times_norm << "\n";
  });
  const ResolventRow* best = &rows.front();
  for (const auto& r : rows)
    if (r.norm > best->norm) best = &r;
  bool monotone = true;
  double sup_k_norm = 0;
  for (const auto& r : rows) {
    sup_k_norm = std::max(sup_k_norm, r.k_times_norm);
    if (r.k < 8) continue;
    for (const auto& q : rows)
      if (q.k == r.k + 1 && q.norm > r.norm) monotone = false;
  }
  report["sup_norm"] = best->norm;
  report["argmax_k"] = std::abs(best->k);
  report["sup_k_times_norm"] = sup_k_norm;
  report["monotone_for_k_ge_8"] = monotone;
  report["kmax"] = c.solver.kmax_scan;
  log << "  sup ||R(ik w0)|| = " << best->norm << " at |k| = " << std::abs(best->k) << ", sup |k| ||R|| = " << sup_k_norm
      << ", monotone for |k| >= 8: " << (monotone ? "yes" : "no") << "\n";
}

std::vector<MmsRow> mms_convergence(const Config& base, const std::vector<std::string>& recipes,
                                    const std::vector<double>& refinements) {
  std::vector<MmsRow> rows;
  const int K = std::max(base.discretization.K, 2);
  for (const auto& rec : recipes) {
    MmsRow prev;
    bool first = true;
    for (double r : refinements) {
      GeometryConfig gc = base.geometry;
      gc.n_h = static_cast<int>(std::lround(gc.n_h * r));
      gc.n_zf = static_cast<int>(std::lround(gc.n_zf * r));
      gc.n_zs = static_cast<int>(std::lround(gc.n_zs * r));
      Grid g(gc);
      Operators op(g, base.physics.mu_s, base.physics.lambda_s);
      Liftings L(g, op, base.physics.delta);
      HarmonicSolver S(g, op, L, base.physics.T, K);
      auto mc = mms_generate(g, base.physics, K, rec, 1.0, 0.3);
      auto st = S.solve_periodic_linear(mc.forcing);
      auto e = mms_error(st, mc.exact, base.physics.delta);
      MmsRow row{rec, mesh_h(g), e.u, e.eta1, e.d, std::numeric_limits<double>::quiet_NaN()};
      if (!first) {
        double q = std::log(prev.h / row.h);
        row.observed_order = std::min({std::log(prev.error_u / row.error_u) / q,
                                       std::log(prev.error_eta1 / row.error_eta1) / q,
                                       std::log(prev.error_d / row.error_d) / q});
      }
      rows.push_back(row);
      prev = row;
      first = false;
    }
  }
  return rows;
}

void write_mms_csv(const std::string& path, const std::vector<MmsRow>& rows) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::Numerical, "cannot write " + path);
  f << std::setprecision(17) << "h,error_u,error_eta1,error_d,observed_order,recipe\n";
  for (const auto& r : rows) {
    f << r.h << "," << r.error_u << "," << r.error_eta1 << "," << r.error_d << ",";
    if (std::isfinite(r.observed_order)) f << r.observed_order;
    f << "," << r.recipe << "\n";
  }
}

void run_mms_verify(const Config& c, json& report, std::ostream& log) {
  Phases phase(report["timings"]);
  Grid g(c.geometry);
  log_summary(c, g, log);
  std::vector<std::string> recipes{"standing-wave", "two-tone"};
  auto rows = phase("solve", [&] { return mms_convergence(c, recipes, {0.5, 1.0, 2.0}); });
  write_mms_csv((fs::path(c.out_dir) / "mms_convergence.csv").string(), rows);
  json out = json::array();
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    out.push_back({{"recipe", r.recipe}, {"h", r.h}, {"error_u", r.error_u}, {"error_eta1", r.error_eta1},
                   {"error_d", r.error_d}, {"observed_order", nullable(r.observed_order)}});
    if (std::isfinite(r.observed_order)) worst = std::min(worst, r.observed_order);
    log << "  " << r.recipe << " h=" << r.h << " err u " << r.error_u << " eta1 " << r.error_eta1 << " d "
        << r.error_d;
    if (std::isfinite(r.observed_order)) log << " order " << r.observed_order;
    log << "\n";
  }
  report["rows"] = out;
  report["min_observed_order"] = worst;
}

void run_decouple_check(const Config& c, json& report, std::ostream& log) {
  Phases phase(report["timings"]);
  Grid g(c.geometry);
  log_summary(c, g, log);
  Operators op(g, c.physics.mu_s, c.physics.lambda_s);
  Liftings L = phase("liftings", [&] { return Liftings(g, op, c.physics.delta); });
  MfsOperator A(g, op, L);
  if (A.dim() > 4000)
    throw Error(ErrorKind::DofBudget, "operator dimension " + std::to_string(A.dim()) + " exceeds 4000");
  Mat Ar = phase("assemble", [&] { return A.assemble_raw(); });
  DecouplingReport d = phase("decouple", [&] { return verify_decoupling(A, Ar); });
  json res;
  for (const auto& [k, v] : d.residuals) res[k] = v;
  report["residuals"] = res;
  report["S_inverse_error"] = d.S_inverse_error;
  report["max_residual"] = d.max_residual();
  log << "  decoupling residuals:";
  for (const auto& [k, v] : d.residuals) log << " " << k << "=" << v;
  log << "  S^-1 error " << d.S_inverse_error << "\n";
}

RunResult run(const Config& c, std::ostream& log) {
  RunResult out;
  json& rep = out.report;
  rep["version"] = version_string();
  rep["mode"] = c.mode;
  rep["config"] = to_json(c);
  rep["timings"] = json::object();
  auto t0 = std::chrono::steady_clock::now();
  set_worker_count(c.workers);
  rep["workers"] = worker_count();
  try {
    std::error_code ec;
    fs::create_directories(c.out_dir, ec);
    if (ec) throw Error(ErrorKind::InvalidConfig, "cannot create output directory " + c.out_dir + ": " + ec.message());
    {
      std::ofstream cf(fs::path(c.out_dir) / "config.json");
      cf << std::setw(2) << to_json(c) << "\n";
    }
    if (c.mode == "solve") run_solve(c, rep, log);
    else if (c.mode == "spectrum") run_spectrum(c, rep, log);
    else if (c.mode == "resolvent") run_resolvent(c, rep, log);
    else if (c.mode == "mms-verify") run_mms_verify(c, rep, log);
    else if (c.mode == "decouple-check") run_decouple_check(c, rep, log);
    else throw ConfigError({"mode: unknown mode '" + c.mode + "'"});
    rep["status"] = "ok";
  } catch (const Error& e) {
    rep["status"] = "error";
    rep["reason"] = e.reason();
    rep["message"] = e.what();
    out.exit_code = exit_code(e.kind());
    log << "error [" << e.reason() << "]: " << e.what() << "\n";
  } catch (const std::exception& e) {
    rep["status"] = "error";
    rep["reason"] = "internal-error";
    rep["message"] = e.what();
    out.exit_code = 1;
    log << "error [internal-error]: " << e.what() << "\n";
  }
  rep["timings"]["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ofstream rf(fs::path(c.out_dir) / "report.json");
  if (rf) rf << std::setw(2) << rep << "\n";
  return out;
}

}  // namespace mfsi
