// Acceptance suite: one PASS/FAIL line per criterion, exit status = number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nonquadratic.hpp"
#include "verifier.hpp"

namespace {

using namespace hd;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;  // <= 0: none stated
  std::function<Outcome()> run;
};

Matrix M2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

DensityState gaussian2(double m0, double m1, double s = 1.0) {
  GaussianMixture g(2);
  Vector m(2);
  m << m0, m1;
  g.add(1.0, m, Matrix::Identity(2, 2) * s);
  return DensityState::from_mixture(g);
}

DensityState mixture2() {
  GaussianMixture g(2);
  Vector m(2);
  m << 0.8, -0.4;
  g.add(0.6, m, M2(0.7, 0.15, 0.15, 1.2));
  g.add(0.4, -0.5 * m, Matrix::Identity(2, 2) * 1.3);
  return DensityState::from_mixture(g);
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Sys {
  const char* name;
  Matrix D, C;
};

const Sys kSysA{"SYS-A", Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
const Sys kSysB{"SYS-B", Matrix::Identity(2, 2), M2(1, 1, 0, 1)};
const Sys kSysC{"SYS-C", Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 4.0)};
const Sys kSysDiag{"diag(1,2)", Matrix::Identity(2, 2), M2(1, 0, 0, 2)};

Matrix normalized(const Sys& s) { return normalize_system(make_system(s.D, s.C)).C_tilde; }

// Certified P: nu = 0 where R_mu is semisimple, nu = 0.1 mu otherwise.
Certificate certify(const Matrix& C_tilde) {
  const SpectralData sd = analyze_drift_spectrum(C_tilde);
  return build_certificate(C_tilde, sd.n > 0 ? 0.1 * sd.mu : 0.0);
}

int count_failures(const std::vector<CheckRow>& rows, double* worst = nullptr) {
  int n = 0;
  double w = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    n += r.pass ? 0 : 1;
    w = std::min(w, r.margin);
  }
  if (worst) *worst = w;
  return n;
}

// 1 ------------------------------------------------------------------------
Outcome lyapunov_normalization() {
  Outcome o;
  std::ostringstream os;
  for (const Sys& s : {kSysA, kSysB, kSysC}) {
    const FPSystem sys = make_system(s.D, s.C);
    const NormalizedSystem ns = normalize_system(sys);
    const int d = sys.d();
    const double res = lyapunov_residual(s.D, s.C, ns.K);
    const double off = (ns.D_tilde - Matrix(ns.D_tilde.diagonal().asDiagonal())).norm();
    const double sym = (0.5 * (ns.C_tilde + ns.C_tilde.transpose()) - ns.D_tilde).norm();
    const double kid =
        (ns.T_inv * ns.K * ns.T_inv.transpose() - Matrix::Identity(d, d)).norm();
    // spectrum compared through the characteristic polynomial, which stays well
    // conditioned on defective clusters
    const double spec = std::max(std::abs(ns.C_tilde.trace() - s.C.trace()),
                                 std::abs(ns.C_tilde.determinant() - s.C.determinant()));
    const bool ok = res <= 1e-10 && off <= 1e-8 && sym <= 1e-8 && kid <= 1e-8 && spec <= 1e-8;
    o.pass = o.pass && ok;
    os << s.name << ": res=" << g17(res) << " inv=" << g17(std::max({off, sym, kid, spec}))
       << "; ";
  }
  o.detail = os.str();
  return o;
}

// 2 ------------------------------------------------------------------------
Outcome oracle_equivalence() {
  Outcome o;
  double worst = 0;
  for (int d : {1, 2}) {
    const QuadratureGrid grid = make_grid(d, default_grid_degree(d));
    const Matrix I = Matrix::Identity(d, d);
    for (double r : {0.25, 0.5, 1.0}) {
      GaussianMixture g(d);
      g.add(1.0, Vector::Constant(d, r / std::sqrt(double(d))), I);
      const DensityState f = DensityState::from_mixture(g);
      const double m2 = r * r;
      const double rel[] = {
          std::abs(entropy_p(f, 2.0, grid) / ((std::exp(m2) - 1) / 2) - 1),
          std::abs(fisher_p(f, 2.0, I, grid) / (m2 * std::exp(m2)) - 1),
          std::abs(fisher_p(f, 1.0, I, grid) / m2 - 1)};
      for (double e : rel) worst = std::max(worst, e);
    }
  }
  o.pass = worst <= 1e-6;
  o.detail = "max relative error " + g17(worst) + " (tol 1e-6)";
  return o;
}

// 3 ------------------------------------------------------------------------
Outcome spectral_consistency() {
  Outcome o;
  std::ostringstream os;
  for (const Sys& s : {kSysA, kSysB, kSysDiag}) {
    const Matrix C = normalized(s);
    const GeneratorMatrix gen = build_generator_matrix(C, 3);
    const VmSpectrumReport rep = check_Vm_spectrum(C, gen, 3, 1e-8);
    double dev = 0;
    for (const auto& b : rep.blocks) dev = std::max(dev, b.cluster_deviation);
    const double block1 = (gen.block(1) + C).cwiseAbs().maxCoeff();
    const bool ok = rep.ok && dev <= 1e-8 && block1 == 0.0;
    o.pass = o.pass && ok;
    os << s.name << ": dev=" << g17(dev) << " |G1+C|=" << g17(block1) << "; ";
  }
  o.detail = os.str();
  return o;
}

// 4 ------------------------------------------------------------------------
Outcome fisher_decay() {
  Outcome o;
  std::vector<double> times;
  for (int i = 0; i < 50; ++i) times.push_back(0.02 + 8.0 * i / 49.0);
  int rows = 0, fails = 0;
  double worst_rel = std::numeric_limits<double>::infinity();
  for (const Sys& s : {kSysA, kSysB}) {
    const Matrix C = normalized(s);
    const Certificate cert = certify(C);
    HermiteExpansion h(2, 2);
    h.set({0, 0}, 1.0);
    h.set({1, 1}, 0.4);
    h.set({2, 0}, -0.3);
    const std::vector<std::pair<DensityState, DensityState>> pairs = {
        {gaussian2(0.5, 0), gaussian2(0.5, 0)},
        {mixture2(), gaussian2(-0.3, 0.6, 0.7)},
        {gaussian2(0.2, -0.7, 1.4), DensityState::from_hermite(h)}};
    for (const auto& [f0, g0] : pairs) {
      const Experiment ex(C, f0, g0, 40);
      for (double p : {1.0, 1.5, 2.0}) {
        auto diff = check_fisher_differential(ex, times, p, cert.P, cert.lambda);
        std::vector<double> vals(times.size());
        for (size_t i = 0; i < times.size(); ++i)
          vals[i] = gen_fisher_at(ex, times[i], p, cert.P);
        const auto integ = check_fisher_integrated(times, vals, cert.lambda, "integrated");
        rows += static_cast<int>(diff.size() + integ.size());
        fails += count_failures(diff) + count_failures(integ);
        for (const auto& r : diff)
          if (r.rhs != 0) worst_rel = std::min(worst_rel, r.margin / std::abs(r.rhs));
      }
    }
  }
  o.pass = fails == 0;
  o.detail = std::to_string(rows) + " rows, " + std::to_string(fails) +
             " failures, min relative margin " + g17(worst_rel);
  return o;
}

// 5 ------------------------------------------------------------------------
Outcome improved_decay() {
  Outcome o;
  HermiteExpansion h(2, 2);
  h.set({2, 0}, std::sqrt(2.0));  // (x1^2 - 1) f_inf
  const Experiment ex(Matrix::Identity(2, 2), gaussian2(0, 0), DensityState::from_hermite(h),
                      40);
  std::vector<double> times;
  for (int i = 0; i <= 60; ++i) times.push_back(0.05 * i);
  double slope = 0;
  const auto rows = check_improved_decay(ex, times, Matrix::Identity(2, 2), 1.0, &slope);
  const int fails = count_failures(rows);
  o.pass = fails == 0 && std::abs(slope + 4.0) <= 0.02;
  o.detail = "fitted slope " + g17(slope) + " on [0.5, 3] (target -4 +- 0.02), bound-row failures " +
             std::to_string(fails);
  return o;
}

// States shared by the interpolation and log-Sobolev criteria.
struct AcceptanceExperiment {
  std::string name;
  Matrix C, P;
  double lambda;
  DensityState f0, g0;
};

std::vector<AcceptanceExperiment> acceptance_experiments() {
  std::vector<AcceptanceExperiment> out;
  for (const Sys& s : {kSysA, kSysB, kSysDiag}) {
    const Matrix C = normalized(s);
    const Certificate cert = certify(C);
    out.push_back({std::string(s.name) + "/shifted", C, cert.P, cert.lambda, gaussian2(0.5, 0),
                   gaussian2(0.5, 0)});
    out.push_back({std::string(s.name) + "/mixture", C, cert.P, cert.lambda, mixture2(),
                   gaussian2(-0.3, 0.6, 0.7)});
    out.push_back({std::string(s.name) + "/narrow", C, cert.P, cert.lambda,
                   gaussian2(1.0, 0, 0.5), gaussian2(1.0, 0, 0.5)});
  }
  return out;
}

// 6 ------------------------------------------------------------------------
Outcome interpolation() {
  Outcome o;
  const std::vector<double> times = {0.0, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0};
  int rows = 0, fails = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& ae : acceptance_experiments()) {
    const Experiment ex(ae.C, ae.f0, ae.g0, 40);
    for (double p : {1.1, 1.5, 1.9}) {
      const auto r = check_interpolation(ex, times, p, ae.P);
      double w = 0;
      fails += count_failures(r, &w);
      worst = std::min(worst, w);
      rows += static_cast<int>(r.size());
    }
  }
  const bool exact = interpolation_constant(1.5) == 2.0;
  o.pass = fails == 0 && exact;
  o.detail = std::to_string(rows) + " rows, " + std::to_string(fails) +
             " failures (slack 1e-8), K(1.5) == 2: " + (exact ? "yes" : "no");
  return o;
}

// 7 ------------------------------------------------------------------------
Outcome contractivity() {
  Outcome o;
  std::ostringstream os;
  const double A2 = const_A(2, 2.0);
  const bool a_ok = std::abs(A2 - 3072.0 / 9.0) <= 1e-12 * A2;
  os << "A(2)|d=2 = " << g17(A2) << "; ";
  for (double p2 : {1.5, 2.0})
    for (const DensityState& g0 : {gaussian2(0.5, 0), gaussian2(-0.3, 0.2, 0.8)}) {
      const Experiment ex(Matrix::Identity(2, 2), gaussian2(0.5, 0), g0, 40);
      const auto res = check_contractivity(ex, p2, p2, 0.5, Matrix::Identity(2, 2), 1.0, 10);
      const int fails = count_failures(res.rows);
      const bool flagged = !res.sensitivity.empty();
      o.pass = o.pass && fails == 0 && flagged && res.rows.size() >= 30;
      os << "p2=" << p2 << ": t1=" << g17(res.bundle.t1_contract) << " rows=" << res.rows.size()
         << " fail=" << fails << "; ";
    }
  o.pass = o.pass && a_ok;
  o.detail = os.str();
  return o;
}

// 8 ------------------------------------------------------------------------
Outcome lower_bound() {
  Outcome o;
  std::ostringstream os;
  const std::vector<std::pair<const char*, DensityState>> cases = {
      {"f_inf", gaussian2(0, 0)}, {"N((1,0),0.5I)", gaussian2(1, 0, 0.5)}};
  for (const auto& [name, f0] : cases) {
    const Experiment ex(Matrix::Identity(2, 2), f0, DensityState{}, 40);
    const auto r = check_lower_bound(ex, 0.5, 0.25, {}, 65);
    double worst = 0;
    const int fails = count_failures(r.rows, &worst);
    o.pass = o.pass && fails == 0 && r.rows.size() == 5;
    os << name << ": C=" << g17(r.C_eta_f0) << " t_hat1=" << g17(r.t_hat1)
       << " min f/bound-1=" << g17(worst) << "; ";
  }
  o.detail = os.str();
  return o;
}

// 9 + 10 share trajectories -----------------------------------------------
struct TrajectoryRun {
  std::string name;
  TrajectoryReport rep;
  std::vector<CheckRow> main_rows;
};

std::vector<TrajectoryRun>& trajectory_runs() {
  static std::vector<TrajectoryRun> runs;
  return runs;
}

Outcome main_sharpness() {
  Outcome o;
  std::ostringstream os;
  auto& runs = trajectory_runs();
  runs.clear();
  for (const Sys& s : {kSysA, kSysB}) {
    const Matrix C = normalized(s);
    const Certificate cert = certify(C);
    const Experiment ex(C, gaussian2(0.5, 0), DensityState{}, 0);
    const SpectralData& sd = ex.spectrum();
    const auto times = default_time_grid(sd.mu, 200, 15.0 / sd.mu);
    TrajectoryRun run{s.name, run_trajectory(ex, 1.5, cert.P, cert.lambda, times), {}};
    run.main_rows = check_main_theorems(run.rep, sd.mu, sd.n);
    const FitResult& fr = *run.rep.fit;
    bool ok = count_failures(run.main_rows) == 0 && std::isfinite(run.rep.envelope_sup);
    if (sd.n > 0) {
      ok = ok && fr.poly_order_fit >= 1.6 && fr.poly_order_fit <= 2.4;
      os << s.name << ": order=" << g17(fr.poly_order_fit) << " (target 2)";
    } else {
      ok = ok && std::abs(fr.rate_fit - 2 * sd.mu) <= 0.02 * 2 * sd.mu;
      os << s.name << ": rate=" << g17(fr.rate_fit) << " (2mu=" << g17(2 * sd.mu) << ")";
    }
    os << " envelope sup=" << g17(run.rep.envelope_sup) << "; ";
    o.pass = o.pass && ok;
    runs.push_back(std::move(run));
  }
  o.detail = os.str();
  return o;
}

Outcome log_sobolev() {
  Outcome o;
  std::ostringstream os;
  int rows = 0, fails = 0;
  // along the trajectories of criterion 9 (recomputed if that one did not run)
  if (trajectory_runs().empty()) main_sharpness();
  for (const auto& run : trajectory_runs()) {
    const auto r = check_log_sobolev(run.rep);
    rows += static_cast<int>(r.size());
    fails += count_failures(r);
  }
  // and the remaining acceptance states, at p in {1, 1.5, 2}
  for (const auto& ae : acceptance_experiments()) {
    const Experiment ex(ae.C, ae.f0, ae.g0, 40);
    for (double t : {0.0, 0.5, 2.0, 6.0})
      for (double p : {1.0, 1.5, 2.0}) {
        const double ratio = log_sobolev_ratio(ex.f_at(t), p, ex.grid());
        ++rows;
        if (!(ratio <= kLogSobolevConstant * (1 + 1e-6))) ++fails;
      }
  }
  // equality family: N(m, I), kept shifted-Gaussian by the flow with C = I
  double eq_dev = 0;
  for (int d : {1, 2}) {
    for (double r : {0.25, 0.5, 1.0}) {
      GaussianMixture g(d);
      g.add(1.0, Vector::Constant(d, r / std::sqrt(double(d))), Matrix::Identity(d, d));
      const Experiment ex(Matrix::Identity(d, d), DensityState::from_mixture(g), DensityState{},
                          0);
      for (double t : {0.0, 0.5, 1.5})
        eq_dev = std::max(eq_dev, std::abs(log_sobolev_ratio(ex.f_at(t), 1.0, ex.grid()) -
                                           kLogSobolevConstant));
    }
  }
  o.pass = fails == 0 && eq_dev <= 1e-6;
  os << rows << " inequality rows, " << fails << " failures; equality deviation "
     << g17(eq_dev) << " (tol 1e-6)";
  o.detail = os.str();
  return o;
}

// 11 -----------------------------------------------------------------------
Outcome appendix() {
  Outcome o;
  std::ostringstream os;
  const double l_gauss =
      check_condition_A1(ScalarDiffusionProblem::make("x^2/2", "1")).lambda1;
  const bool exact = l_gauss == 1.0;
  os << "lambda1(gauss)=" << g17(l_gauss) << "; ";

  const auto ou = ScalarDiffusionProblem::make("x^2/2", "1", 1, 8.0, 2048);
  const FP1DGrid grid = make_fp1d_grid(ou);
  const Vector f0 = cells_from_ratio(grid, Expression::parse("exp(0.5*x - 0.125)"), true);
  const std::vector<double> ts = {0.0, 0.5, 1.0, 2.0};
  const FP1DResult res = solve_fp_1d(ou, f0, ts, 1e-5);
  double l1 = 0;
  for (size_t k = 0; k < ts.size(); ++k) {
    const double m = 0.5 * std::exp(-ts[k]);
    double e = 0;
    for (int i = 0; i < grid.cells; ++i) {
      const double x = grid.x(i) - m;
      e += grid.h * std::abs(res.f[k](i) - std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI));
    }
    l1 = std::max(l1, e);
  }
  os << "OU L1 error=" << g17(l1) << "; ";

  const auto pert = ScalarDiffusionProblem::make("x^2/2 + 0.1*x^4", "1 + 0.2/(1 + x^2)");
  const A1Report a1 = check_condition_A1(pert);
  const double fine = check_condition_A1(pert, 10 * (a1.points_per_axis - 1) + 1).lambda1;
  const bool refined = std::abs(fine - a1.lambda1) <= 1e-4 && fine <= a1.lambda1;
  const FP1DGrid pg = make_fp1d_grid(pert);
  const Vector pf0 = cells_from_ratio(pg, Expression::parse("1 + 0.5*sin(x)"), true);
  const Vector pg0 = cells_from_ratio(pg, Expression::parse("x"), false);
  std::vector<double> tg;
  for (int i = 0; i <= 50; ++i) tg.push_back(0.1 * i);
  const DecayVerification dv =
      verify_generalized_fisher_decay_1d(pert, a1.lambda1, pf0, pg0, 1.5, tg);
  int fails = 0;
  for (const auto& r : dv.rows) fails += r.pass ? 0 : 1;
  os << "perturbed lambda1=" << g17(a1.lambda1) << " (10x grid " << g17(fine)
     << "), decay rows=" << dv.rows.size() << " fail=" << fails;
  o.pass = exact && l1 <= 1e-4 && refined && dv.pass && fails == 0 && a1.lambda1 > 0;
  o.detail = os.str();
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Lyapunov/normalization", 1.0, lyapunov_normalization},
      {2, "Oracle equivalence", 10.0, oracle_equivalence},
      {3, "Spectral consistency", 0, spectral_consistency},
      {4, "Fisher decay", 120.0, fisher_decay},
      {5, "Improved decay", 0, improved_decay},
      {6, "Interpolation", 0, interpolation},
      {7, "Contractivity", 0, contractivity},
      {8, "Lower bound", 0, lower_bound},
      {9, "Main sharpness", 300.0, main_sharpness},
      {10, "Log-Sobolev", 0, log_sobolev},
      {11, "Nonquadratic rate and solver", 120.0, appendix},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string limit;
    if (c.time_limit_s > 0) {
      limit = " limit " + g17(c.time_limit_s) + " s";
      if (secs >= c.time_limit_s) {
        o.pass = false;
        o.detail += " [runtime limit exceeded]";
      }
    }
    std::printf("%s [%2d] %-30s %8.2f s%-14s %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                secs, limit.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed;
}
