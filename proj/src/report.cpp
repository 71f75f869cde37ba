// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hd {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
    case ErrorCode::kIo:
    case ErrorCode::kDimension:
    case ErrorCode::kInvalidInput:
    case ErrorCode::kParameter:
      return static_cast<int>(ExitCode::kConfig);
    case ErrorCode::kUnderResolved:
      return static_cast<int>(ExitCode::kResolution);
    default:
      return static_cast<int>(ExitCode::kCheckFail);
  }
}

namespace {

struct Prepared {
  FPSystem sys;
  NormalizedSystem ns;
  SpectralData sd;
  Certificate cert;
  DensityState f0, g0;
  int grid_degree = 0;
};

bool defective_slowest(const SpectralData& sd) {
  for (const auto& c : sd.R_mu)
    if (c.max_block > 1) return true;
  return false;
}

Prepared prepare(const ScenarioConfig& cfg, const CommandOptions& opt, bool need_certificate) {
  if (!cfg.has_system()) fail(ErrorCode::kParse, "config has no system block (D, C)");
  Prepared pr;
  pr.sys = make_system(cfg.D, cfg.C, cfg.tolerance);
  if (!pr.sys.report.accepted) {
    std::string why;
    for (const auto& m : pr.sys.report.messages) why += "\n  " + m;
    fail(ErrorCode::kPrecondition, "system rejected:" + why);
  }
  pr.ns = normalize_system(pr.sys);
  pr.sd = analyze_drift_spectrum(pr.ns.C_tilde, cfg.tolerance);
  const int d = cfg.d();
  if (need_certificate) {
    if (cfg.P_identity && !opt.has_nu) {
      pr.cert.P = Matrix::Identity(d, d);
      pr.cert.lambda = min_sym_eigenvalue(0.5 * (pr.ns.C_tilde + pr.ns.C_tilde.transpose()));
      pr.cert.p_min = pr.cert.p_max = 1.0;
      pr.cert.lmi_residual = 0.0;
    } else {
      double nu = cfg.nu;
      if (opt.has_nu) nu = opt.nu;
      else if (cfg.nu_auto) nu = defective_slowest(pr.sd) ? 0.1 * pr.sd.mu : 0.0;
      pr.cert = build_certificate(pr.ns.C_tilde, nu, cfg.tolerance);
    }
  }
  const Matrix* Tinv = cfg.original_frame ? &pr.ns.T_inv : nullptr;
  pr.f0 = build_state(cfg.f0, d, Tinv);
  pr.g0 = cfg.g0.set ? build_state(cfg.g0, d, Tinv) : pr.f0;
  pr.grid_degree = opt.grid_degree > 0 ? opt.grid_degree
                   : cfg.grid_degree > 0 ? cfg.grid_degree
                                         : default_grid_degree(d);
  return pr;
}

std::string out_dir_of(const ScenarioConfig& cfg, const CommandOptions& opt) {
  return opt.out_dir.empty() ? cfg.out_dir : opt.out_dir;
}

void write_file(CommandResult& res, const std::string& dir, const std::string& name,
                const std::string& content) {
  fs::create_directories(dir);
  const std::string path = (fs::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  out << content;
  res.files.push_back(path);
}

std::string spectrum_text(const SpectralData& sd) {
  std::ostringstream os;
  os << "mu=" << sd.mu << ", defect n=" << sd.n << "\n";
  os << "eigenvalues:";
  for (const auto& c : sd.eigenvalues)
    os << " " << format_complex(c.value) << " (alg " << c.algebraic << ", geo " << c.geometric
       << ", block " << c.max_block << ")";
  os << "\nR_mu:";
  for (const auto& c : sd.R_mu) os << " " << format_complex(c.value);
  os << "\nc_tilde (estimate) = " << fmt17(sd.c_tilde) << "\n";
  os << "c_hat (estimate) = " << fmt17(sd.c_hat) << "\n";
  return os.str();
}

std::string certificate_text(const Certificate& c) {
  std::ostringstream os;
  os << "P =\n" << format_matrix(c.P) << "\n";
  os << "lambda = " << fmt17(c.lambda) << "\n";
  os << "nu = " << fmt17(c.nu) << "\n";
  os << "p_min = " << fmt17(c.p_min) << "\n";
  os << "p_max = " << fmt17(c.p_max) << "\n";
  os << "lmi_residual = " << fmt17(c.lmi_residual) << "\n";
  return os.str();
}

std::string manifest(const ScenarioConfig& cfg, const Prepared* pr, const std::string& command,
                     int grid_degree) {
  std::ostringstream os;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a64(cfg.source_text)));
  os << "tool = hypodecay " << kVersion << "\n";
  os << "command = " << command << "\n";
  os << "scenario = " << cfg.name << "\n";
  os << "config_hash_fnv1a64 = " << hash << "\n";
  os << "tolerance = " << fmt17(cfg.tolerance) << "\n";
  if (pr) {
    os << "grid_degree = " << grid_degree << "\n";
    os << "d = " << pr->ns.d() << "\n";
    os << "mu = " << fmt17(pr->sd.mu) << "\n";
    os << "n = " << pr->sd.n << "\n";
    os << "c_tilde_estimate = " << fmt17(pr->sd.c_tilde) << "\n";
    os << "c_hat_estimate = " << fmt17(pr->sd.c_hat) << "\n";
    os << "lambda = " << fmt17(pr->cert.lambda) << "\n";
    os << "nu = " << fmt17(pr->cert.nu) << "\n";
    os << "p_max = " << fmt17(pr->cert.p_max) << "\n";
  }
  os << "p = " << fmt17(cfg.p) << "\n";
  os << "samples = " << cfg.samples << "\n";
  os << "checks = ";
  for (size_t i = 0; i < cfg.checks.size(); ++i) os << (i ? "," : "") << cfg.checks[i];
  os << "\n";
  return os.str();
}

std::vector<PlotSeries> trajectory_plots(const TrajectoryReport& rep, bool fisher) {
  PlotSeries a, b;
  for (const auto& pt : rep.points) {
    if (fisher) {
      a.x.push_back(pt.t);
      a.y.push_back(pt.genI_p);
      b.x.push_back(pt.t);
      b.y.push_back(pt.bound_fisher);
    } else {
      a.x.push_back(pt.t);
      a.y.push_back(pt.e_p);
      b.x.push_back(pt.t);
      b.y.push_back(pt.envelope * rep.envelope_sup);
    }
  }
  a.name = fisher ? "I_p^P(f,g)" : "e_p(f)";
  b.name = fisher ? "I(0) exp(-2 lambda t)" : "sup-scaled envelope";
  return {a, b};
}

void summarize(CommandResult& res, const TrajectoryReport& rep, std::ostringstream& os) {
  for (const auto& s : rep.summaries) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-4s %-28s rows=%-5d failures=%-4d worst_margin=%s",
                  s.pass ? "PASS" : "FAIL", s.check.c_str(), s.rows, s.failures,
                  fmt17(s.worst_margin).c_str());
    os << buf;
    if (!s.note.empty()) os << "  [" << s.note << "]";
    os << "\n";
    res.checks_total++;
    if (!s.pass) res.checks_failed++;
  }
  for (const auto& r : rep.checks)
    if (!r.pass)
      os << "  violation " << r.check << " t=" << fmt17(r.t) << " lhs=" << fmt17(r.lhs)
         << " rhs=" << fmt17(r.rhs) << " slack=" << fmt17(r.margin) << "\n";
  for (const auto& w : rep.warnings) os << "warning: " << w << "\n";
}

// Evenly spread subset of `times` with t >= t_min.
std::vector<double> subset(const std::vector<double>& times, int count, double t_min) {
  std::vector<double> pool;
  for (double t : times)
    if (t >= t_min) pool.push_back(t);
  if (static_cast<int>(pool.size()) <= count) return pool;
  std::vector<double> out;
  for (int k = 0; k < count; ++k)
    out.push_back(pool[static_cast<size_t>(std::llround(double(k) * (pool.size() - 1) / (count - 1)))]);
  return out;
}

}  // namespace

std::string trajectory_csv(const TrajectoryReport& rep) {
  std::ostringstream os;
  os << "t,e_p,e_1,e_2,I_p_P,I_p_I,genI_1,genI_p,I2_g,genI_p_f1,genI_p_f2,I2_f2,norm_f1,"
        "norm_f2_minus_finf,l2_norm_sq_g,mass_f,expmoment,bound_expmoment,envelope,"
        "bound_fisher,bound_v1\n";
  for (const auto& p : rep.points) {
    const double v[] = {p.t,         p.e_p,       p.e_1,          p.e_2,
                        p.I_p_P,     p.I_p_I,     p.genI_1,       p.genI_p,
                        p.I2_g,      p.genI_p_f1, p.genI_p_f2,    p.I2_f2,
                        p.norm_f1,   p.norm_f2_minus_finf,        p.l2_norm_sq_g,
                        p.mass_f,    p.expmoment, p.bound_expmoment, p.envelope,
                        p.bound_fisher, p.bound_v1};
    for (size_t i = 0; i < sizeof v / sizeof v[0]; ++i) os << (i ? "," : "") << fmt17(v[i]);
    os << "\n";
  }
  return os.str();
}

std::string checks_csv(const std::vector<CheckRow>& rows) {
  std::ostringstream os;
  os << "check,t,lhs,rhs,margin,pass\n";
  for (const auto& r : rows)
    os << r.check << "," << fmt17(r.t) << "," << fmt17(r.lhs) << "," << fmt17(r.rhs) << ","
       << fmt17(r.margin) << "," << (r.pass ? 1 : 0) << "\n";
  return os.str();
}

std::string svg_plot(const std::string& title, const std::string& xlabel,
                     const std::vector<PlotSeries>& series, bool log_y) {
  const double W = 720, H = 440, ml = 80, mr = 20, mt = 40, mb = 60;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  auto ty = [&](double y) { return log_y ? std::log10(y) : y; };
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (log_y && !(s.y[i] > 0))) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (x0 > x1) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (ty(y) - y0) / (y1 - y0) * (H - mt - mb); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "font-family=\"sans-serif\" font-size=\"12\">\n",
                W, H);
  os << buf;
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"24\" font-size=\"15\">", ml);
  os << buf << title << "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                "stroke=\"black\"/>\n",
                ml, mt, W - ml - mr, H - mt - mb);
  os << buf;
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.3g</text>\n",
                  px(xv), H - mb + 18, xv);
    os << buf;
    const double ypix = H - mb - (yv - y0) / (y1 - y0) * (H - mt - mb);
    if (log_y)
      std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">1e%.1f</text>\n",
                    ml - 6, ypix + 4, yv);
    else
      std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.3g</text>\n",
                    ml - 6, ypix + 4, yv);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">", (ml + W - mr) / 2,
                H - 18);
  os << buf << xlabel << "</text>\n";
  for (size_t s = 0; s < series.size(); ++s) {
    os << "<polyline fill=\"none\" stroke=\"" << colors[s % 4] << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (size_t i = 0; i < series[s].x.size(); ++i) {
      const double y = series[s].y[i];
      if (!std::isfinite(y) || (log_y && !(y > 0))) continue;
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", first ? "" : " ", px(series[s].x[i]), py(y));
      os << buf;
      first = false;
    }
    os << "\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" fill=\"%s\">", W - mr - 200,
                  mt + 16 + 16.0 * s, colors[s % 4]);
    os << buf << series[s].name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

// ------------------------------------------------------------------ commands

CommandResult cmd_validate(const ScenarioConfig& cfg, const CommandOptions&) {
  if (!cfg.has_system()) fail(ErrorCode::kParse, "config has no system block (D, C)");
  CommandResult res;
  std::ostringstream os;
  const FPSystem sys = make_system(cfg.D, cfg.C, cfg.tolerance);
  os << sys.report.to_key_value();
  if (!sys.report.accepted) {
    os << "system rejected\n";
    res.exit_code = static_cast<int>(ExitCode::kCheckFail);
    res.text = os.str();
    return res;
  }
  const Matrix K = solve_lyapunov(sys.D, sys.C);
  os << "K =\n" << format_matrix(K) << "\n";
  os << "lyapunov_residual = " << fmt17(lyapunov_residual(sys.D, sys.C, K)) << "\n";
  const NormalizedSystem ns = normalize_system(sys);
  os << "T =\n" << format_matrix(ns.T) << "\n";
  os << "D_tilde =\n" << format_matrix(ns.D_tilde) << "\n";
  os << "C_tilde =\n" << format_matrix(ns.C_tilde) << "\n";
  os << "cond(T) = " << fmt17(ns.condition_T) << "\n";
  os << spectrum_text(analyze_drift_spectrum(ns.C_tilde, cfg.tolerance));
  res.text = os.str();
  return res;
}

CommandResult cmd_certify(const ScenarioConfig& cfg, const CommandOptions& opt) {
  CommandResult res;
  const Prepared pr = prepare(cfg, opt, true);
  std::ostringstream os;
  os << "certificate in the normalized frame\n" << certificate_text(pr.cert);
  const bool ok = pr.cert.lmi_residual >= -cfg.tolerance * pr.cert.p_max;
  os << (ok ? "LMI satisfied\n" : "LMI residual outside tolerance\n");
  res.exit_code = ok ? 0 : static_cast<int>(ExitCode::kCheckFail);
  res.text = os.str();
  return res;
}

CommandResult cmd_simulate(const ScenarioConfig& cfg, const CommandOptions& opt) {
  CommandResult res;
  const Prepared pr = prepare(cfg, opt, true);
  const Experiment ex(pr.ns.C_tilde, pr.f0, pr.g0, pr.grid_degree);
  const auto times = default_time_grid(pr.sd.mu, cfg.samples, cfg.t_max);
  const TrajectoryReport rep = run_trajectory(ex, cfg.p, pr.cert.P, pr.cert.lambda, times);
  std::ostringstream os;
  os << "simulated " << rep.points.size() << " times on [0, " << fmt17(times.back()) << "]\n";
  if (opt.write_files) {
    const std::string dir = out_dir_of(cfg, opt);
    write_file(res, dir, "trajectory.csv", trajectory_csv(rep));
    write_file(res, dir, "entropy.svg",
               svg_plot("entropy e_p along the flow", "t", trajectory_plots(rep, false), true));
    write_file(res, dir, "manifest.txt", manifest(cfg, &pr, "simulate", pr.grid_degree));
  }
  res.text = os.str();
  return res;
}

CommandResult cmd_verify(const ScenarioConfig& cfg, const CommandOptions& opt) {
  CommandResult res;
  const Prepared pr = prepare(cfg, opt, true);
  const int d = cfg.d();
  const Experiment ex(pr.ns.C_tilde, pr.f0, pr.g0, pr.grid_degree);
  const auto times = default_time_grid(pr.sd.mu, cfg.samples, cfg.t_max);
  TrajectoryReport rep = run_trajectory(ex, cfg.p, pr.cert.P, pr.cert.lambda, times);
  std::ostringstream extra;

  auto guarded = [&](const std::string& name, auto&& body) {
    try {
      body();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kPrecondition) throw;
      CheckRow r;
      r.check = name;
      r.pass = false;
      r.lhs = r.rhs = r.margin = std::nan("");
      rep.add(name, {r}, std::string("precondition: ") + e.what());
    }
  };

  if (cfg.check_enabled("spectrum")) {
    guarded("spectrum", [&] {
      const int deg = 3;
      const GeneratorMatrix gen = build_generator_matrix(pr.ns.C_tilde, deg);
      const VmSpectrumReport vr = check_Vm_spectrum(pr.ns.C_tilde, gen, deg);
      std::vector<CheckRow> rows;
      for (const auto& b : vr.blocks) {
        CheckRow r;
        r.check = "spectrum_V" + std::to_string(b.m);
        r.lhs = std::max(b.cluster_deviation, b.power_sum_deviation);
        r.rhs = 1e-8;
        r.margin = r.rhs - r.lhs;
        r.pass = b.ok;
        rows.push_back(r);
      }
      rep.add("spectrum", rows);
      extra << "V_m spectrum:\n" << vr.summary();
    });
  }
  if (cfg.check_enabled("fisher_differential")) {
    guarded("fisher_differential", [&] {
      const auto ts = subset(times, cfg.fd_samples, 2 * cfg.fd_step);
      rep.add("fisher_differential",
              check_fisher_differential(ex, ts, cfg.p, pr.cert.P, pr.cert.lambda, cfg.fd_step),
              "Richardson-extrapolated centred difference");
    });
  }
  if (cfg.check_enabled("interpolation")) {
    guarded("interpolation_sweep", [&] {
      const auto ts = subset(times, 20, 0.0);
      std::vector<CheckRow> rows;
      for (double p : {1.1, 1.5, 1.9}) {
        auto r = check_interpolation(ex, ts, p, pr.cert.P);
        rows.insert(rows.end(), r.begin(), r.end());
      }
      rep.add("interpolation_sweep", rows);
    });
  }
  if (cfg.check_enabled("improved_decay")) {
    guarded("improved_decay", [&] {
      double slope = 0;
      auto rows = check_improved_decay(ex, times, pr.cert.P, pr.cert.lambda, &slope, cfg.fit_lo,
                                       cfg.fit_hi);
      extra << "improved decay: fitted log-slope of I_2^P(g) on [" << cfg.fit_lo << ", "
            << cfg.fit_hi << "] = " << fmt17(slope) << " (bound rate "
            << fmt17(-2 * (pr.cert.lambda + ex.d_min())) << ")\n";
      rep.add("improved_decay", rows);
    });
  }
  if (cfg.check_enabled("lower_bound")) {
    guarded("lower_bound", [&] {
      const LowerBoundResult lb = check_lower_bound(ex, cfg.eta, cfg.eps, {}, cfg.box_points);
      extra << "lower bound: C_eta_f0 = " << fmt17(lb.C_eta_f0)
            << ", t_hat1 = " << fmt17(lb.t_hat1) << ", moment = " << fmt17(lb.moment) << "\n";
      rep.add("lower_bound", lb.rows, "margin is f/bound - 1 at the worst grid node");
    });
  }
  if (cfg.check_enabled("contractivity")) {
    guarded("contractivity", [&] {
      const double p2 = cfg.p2, p1 = cfg.p1 > 0 ? cfg.p1 : cfg.p2;
      const ContractivityResult cr =
          check_contractivity(ex, p1, p2, cfg.eta, pr.cert.P, pr.cert.p_max);
      extra << "explicit constants and times:\n" << cr.bundle.to_text() << cr.sensitivity;
      rep.add("contractivity", cr.rows, "times use c_tilde/c_hat estimates");
    });
  }
  if (cfg.check_enabled("main_theorems")) {
    guarded("main_theorems", [&] {
      rep.add("main_theorems", check_main_theorems(rep, pr.sd.mu, pr.sd.n));
      if (rep.fit)
        extra << "fit on [" << fmt17(rep.fit->t_lo) << ", " << fmt17(rep.fit->t_hi)
              << "]: rate=" << fmt17(rep.fit->rate_fit)
              << " order=" << fmt17(rep.fit->poly_order_fit)
              << " residual=" << fmt17(rep.fit->residual) << "\n";
      extra << "envelope sup e_p/((1+t^2n)e^{-2 mu t}) = " << fmt17(rep.envelope_sup) << "\n";
    });
  }

  std::ostringstream os;
  os << "scenario " << cfg.name << " (d=" << d << ")\n";
  os << spectrum_text(pr.sd);
  os << "certificate: lambda=" << fmt17(pr.cert.lambda) << " nu=" << fmt17(pr.cert.nu)
     << " p_max=" << fmt17(pr.cert.p_max) << "\n";
  summarize(res, rep, os);
  os << extra.str();
  res.exit_code = rep.all_pass() ? 0 : static_cast<int>(ExitCode::kCheckFail);
  os << (res.exit_code == 0 ? "ALL CHECKS PASSED\n" : "CHECK FAILURES\n");
  res.text = os.str();

  if (opt.write_files) {
    const std::string dir = out_dir_of(cfg, opt);
    write_file(res, dir, "trajectory.csv", trajectory_csv(rep));
    write_file(res, dir, "checks.csv", checks_csv(rep.checks));
    write_file(res, dir, "report.txt", res.text);
    write_file(res, dir, "entropy.svg",
               svg_plot("entropy e_p and scaled envelope", "t", trajectory_plots(rep, false), true));
    write_file(res, dir, "fisher.svg",
               svg_plot("generalized Fisher information and decay bound", "t",
                        trajectory_plots(rep, true), true));
    write_file(res, dir, "manifest.txt", manifest(cfg, &pr, "verify", pr.grid_degree));
  }
  return res;
}

CommandResult cmd_appendix_a(const ScenarioConfig& cfg, const CommandOptions& opt) {
  if (cfg.phi.empty()) fail(ErrorCode::kParse, "appendix-a needs 'phi'");
  CommandResult res;
  const ScalarDiffusionProblem prob =
      ScalarDiffusionProblem::make(cfg.phi, cfg.diffusion, 1, cfg.half_width, cfg.cells);
  const A1Report a1 = check_condition_A1(prob, cfg.a1_points);
  std::ostringstream os;
  os << "phi = " << cfg.phi << "\ndiffusion = " << cfg.diffusion << "\n" << a1.to_text();
  const std::string dir = out_dir_of(cfg, opt);
  if (opt.write_files) write_file(res, dir, "a1_report.txt", os.str());
  if (!(a1.lambda1 > 0)) {
    os << "rate condition not certified: decay estimate not applicable\n";
    res.exit_code = static_cast<int>(ExitCode::kCheckFail);
    res.text = os.str();
    return res;
  }
  const FP1DGrid grid = make_fp1d_grid(prob);
  const Vector f0 = cells_from_ratio(grid, Expression::parse(cfg.f0_ratio), true);
  const Vector g0 = cells_from_ratio(grid, Expression::parse(cfg.g0_ratio), false);
  std::vector<double> ts;
  const int n = std::max(2, cfg.decay_samples);
  for (int k = 0; k < n; ++k) ts.push_back(cfg.t_end * k / (n - 1));
  const DecayVerification dv =
      verify_generalized_fisher_decay_1d(prob, a1.lambda1, f0, g0, cfg.psi_p, ts, cfg.dt);
  int failures = 0;
  double worst = 1e300;
  std::ostringstream csv;
  csv << "t,fisher,bound,margin,pass\n";
  PlotSeries a{"discrete I_psi(f,g)", {}, {}}, b{"I(0) exp(-2 lambda1 t)", {}, {}};
  for (const auto& r : dv.rows) {
    csv << fmt17(r.t) << "," << fmt17(r.fisher) << "," << fmt17(r.bound) << ","
        << fmt17(r.margin) << "," << (r.pass ? 1 : 0) << "\n";
    failures += !r.pass;
    worst = std::min(worst, r.margin);
    a.x.push_back(r.t);
    a.y.push_back(r.fisher);
    b.x.push_back(r.t);
    b.y.push_back(r.bound);
  }
  os << "decay check (psi_p, p=" << cfg.psi_p << "): " << (dv.pass ? "PASS" : "FAIL")
     << " rows=" << dv.rows.size() << " failures=" << failures
     << " worst_margin=" << fmt17(worst) << "\n";
  for (const auto& w : dv.warnings) os << "warning: " << w << "\n";
  if (grid.tail_mass > 1e-10)
    os << "warning: equilibrium tail mass beyond the domain " << fmt17(grid.tail_mass) << "\n";
  if (grid.max_peclet > 1.0) os << "warning: grid Peclet number " << fmt17(grid.max_peclet) << "\n";
  res.checks_total = 1;
  res.checks_failed = dv.pass ? 0 : 1;
  res.exit_code = dv.pass ? 0 : static_cast<int>(ExitCode::kCheckFail);
  res.text = os.str();
  if (opt.write_files) {
    write_file(res, dir, "decay.csv", csv.str());
    write_file(res, dir, "decay.svg", svg_plot("generalized Fisher decay", "t", {a, b}, true));
    write_file(res, dir, "report.txt", res.text);
    write_file(res, dir, "manifest.txt", manifest(cfg, nullptr, "appendix-a", 0));
  }
  return res;
}

}  // namespace hd
