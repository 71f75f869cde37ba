// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
#include "scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "expression.hpp"

namespace hd {

namespace {

struct LineError {
  int line;
};

[[noreturn]] void line_fail(int line, const std::string& msg) {
  fail(ErrorCode::kParse, "line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

double number(const std::string& s, int line) {
  if (s.empty()) line_fail(line, "missing number");
  try {
    const Expression e = Expression::parse(s);
    if (e.max_variable() >= 0) line_fail(line, "expected a constant, got '" + s + "'");
    const double v = e.eval(nullptr);
    if (!std::isfinite(v)) line_fail(line, "non-finite number '" + s + "'");
    return v;
  } catch (const Error& err) {
    if (std::string(err.what()).rfind("line ", 0) == 0) throw;
    line_fail(line, "bad number '" + s + "': " + err.what());
  }
}

int integer(const std::string& s, int line) {
  const double v = number(s, line);
  if (v != std::floor(v) || std::abs(v) > 1e9) line_fail(line, "expected an integer, got '" + s + "'");
  return static_cast<int>(v);
}

Matrix matrix(const std::string& s, int line) {
  const auto rows = split(s, ';');
  std::vector<std::vector<double>> vals;
  for (const auto& r : rows) {
    if (r.empty()) line_fail(line, "empty matrix row");
    std::vector<double> row;
    for (const auto& e : split(r, ',')) row.push_back(number(e, line));
    vals.push_back(row);
  }
  const size_t n = vals.size();
  for (size_t i = 0; i < n; ++i)
    if (vals[i].size() != n)
      line_fail(line, "matrix row " + std::to_string(i + 1) + " has " +
                          std::to_string(vals[i].size()) + " entries, expected " +
                          std::to_string(n));
  if (n == 0 || n > 3) line_fail(line, "matrices must be 1x1 to 3x3");
  Matrix M(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) M(i, j) = vals[i][j];
  return M;
}

InitialTerm initial_term(const std::string& value, int d, int line) {
  InitialTerm t;
  if (value == "equilibrium") return t;
  const auto colon = value.find(':');
  if (colon == std::string::npos)
    line_fail(line, "initial data must be 'equilibrium', 'mixture: ...' or 'hermite: ...'");
  const std::string kind = trim(value.substr(0, colon));
  const std::string body = trim(value.substr(colon + 1));
  if (kind == "mixture") {
    t.kind = InitialTerm::kMixture;
    const int per = 1 + d + d * (d + 1) / 2;
    for (const auto& comp : split(body, ';')) {
      const auto f = split(comp, ',');
      if (static_cast<int>(f.size()) != per)
        line_fail(line, "mixture component needs " + std::to_string(per) +
                            " numbers (weight, mean, covariance upper triangle) for d = " +
                            std::to_string(d));
      t.weight.push_back(number(f[0], line));
      Vector m(d);
      for (int i = 0; i < d; ++i) m(i) = number(f[1 + i], line);
      Matrix S(d, d);
      int k = 1 + d;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) S(i, j) = S(j, i) = number(f[k++], line);
      t.mean.push_back(m);
      t.cov.push_back(S);
    }
  } else if (kind == "hermite") {
    t.kind = InitialTerm::kHermite;
    for (const auto& entry : split(body, ';')) {
      std::istringstream is(entry);
      std::vector<std::string> tok;
      std::string w;
      while (is >> w) tok.push_back(w);
      if (static_cast<int>(tok.size()) != d + 1)
        line_fail(line, "hermite entry needs " + std::to_string(d) +
                            " indices and a coefficient");
      std::vector<int> a(d);
      for (int i = 0; i < d; ++i) {
        a[i] = integer(tok[i], line);
        if (a[i] < 0) line_fail(line, "negative Hermite index");
      }
      t.index.push_back(a);
      t.coeff.push_back(number(tok[d], line));
    }
  } else {
    line_fail(line, "unknown initial-data kind '" + kind + "'");
  }
  return t;
}

struct Pending {
  int line;
  std::string value;
  bool append;
};

}  // namespace

bool ScenarioConfig::check_enabled(const std::string& name) const {
  return std::find(checks.begin(), checks.end(), name) != checks.end();
}

std::vector<std::string> known_checks() {
  return {"fisher_differential", "improved_decay", "interpolation", "lower_bound",
          "contractivity",       "main_theorems",  "spectrum"};
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& path) {
  ScenarioConfig cfg;
  cfg.source_text = text;
  cfg.source_path = path;
  cfg.checks = {"fisher_differential", "interpolation", "main_theorems", "spectrum"};
  std::vector<Pending> f0_lines, g0_lines;
  std::map<std::string, int> seen;

  std::istringstream is(text);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) line_fail(line, "expected 'key = value'");
    bool append = false;
    std::string key = trim(s.substr(0, eq));
    if (!key.empty() && key.back() == '+') {
      append = true;
      key = trim(key.substr(0, key.size() - 1));
    }
    const std::string v = trim(s.substr(eq + 1));
    if (v.empty()) line_fail(line, "empty value for '" + key + "'");
    if (append && key != "f0" && key != "g0") line_fail(line, "'+=' only applies to f0 and g0");
    if (!append && seen.count(key))
      line_fail(line, "duplicate key '" + key + "' (first on line " +
                          std::to_string(seen[key]) + ")");
    seen[key] = line;

    if (key == "name") cfg.name = v;
    else if (key == "D") cfg.D = matrix(v, line);
    else if (key == "C") cfg.C = matrix(v, line);
    else if (key == "tolerance") cfg.tolerance = number(v, line);
    else if (key == "frame") {
      if (v == "normalized") cfg.original_frame = false;
      else if (v == "original") cfg.original_frame = true;
      else line_fail(line, "frame must be 'normalized' or 'original'");
    } else if (key == "f0") f0_lines.push_back({line, v, append});
    else if (key == "g0") g0_lines.push_back({line, v, append});
    else if (key == "p") cfg.p = number(v, line);
    else if (key == "P") {
      if (v == "identity") cfg.P_identity = true;
      else if (v.rfind("certificate(", 0) == 0 && v.back() == ')') {
        const std::string arg = trim(v.substr(12, v.size() - 13));
        cfg.P_identity = false;
        cfg.nu_auto = arg == "auto";
        if (!cfg.nu_auto) cfg.nu = number(arg, line);
      } else line_fail(line, "P must be 'identity' or 'certificate(nu|auto)'");
    } else if (key == "t_max") cfg.t_max = number(v, line);
    else if (key == "samples") cfg.samples = integer(v, line);
    else if (key == "grid_degree") cfg.grid_degree = integer(v, line);
    else if (key == "checks") {
      cfg.checks.clear();
      if (v != "none")
        for (const auto& c : split(v, ',')) {
          if (c == "all") {
            cfg.checks = known_checks();
            continue;
          }
          const auto kc = known_checks();
          if (std::find(kc.begin(), kc.end(), c) == kc.end())
            line_fail(line, "unknown check '" + c + "'");
          if (!cfg.check_enabled(c)) cfg.checks.push_back(c);
        }
    } else if (key == "eta") cfg.eta = number(v, line);
    else if (key == "eps") cfg.eps = number(v, line);
    else if (key == "p1") cfg.p1 = number(v, line);
    else if (key == "p2") cfg.p2 = number(v, line);
    else if (key == "fd_step") cfg.fd_step = number(v, line);
    else if (key == "fd_samples") cfg.fd_samples = integer(v, line);
    else if (key == "box_points") cfg.box_points = integer(v, line);
    else if (key == "fit_lo") cfg.fit_lo = number(v, line);
    else if (key == "fit_hi") cfg.fit_hi = number(v, line);
    else if (key == "out") cfg.out_dir = v;
    else if (key == "phi") cfg.phi = v;
    else if (key == "diffusion") cfg.diffusion = v;
    else if (key == "f0_ratio") cfg.f0_ratio = v;
    else if (key == "g0_ratio") cfg.g0_ratio = v;
    else if (key == "half_width") cfg.half_width = number(v, line);
    else if (key == "cells") cfg.cells = integer(v, line);
    else if (key == "a1_points") cfg.a1_points = integer(v, line);
    else if (key == "t_end") cfg.t_end = number(v, line);
    else if (key == "decay_samples") cfg.decay_samples = integer(v, line);
    else if (key == "psi_p") cfg.psi_p = number(v, line);
    else if (key == "dt") cfg.dt = number(v, line);
    else line_fail(line, "unknown key '" + key + "'");

    // expressions are validated where they are read
    if (key == "phi" || key == "diffusion" || key == "f0_ratio" || key == "g0_ratio") {
      try {
        (void)Expression::parse(v);
      } catch (const Error& e) {
        line_fail(line, e.what());
      }
    }
  }

  if (cfg.D.size() > 0 || cfg.C.size() > 0) {
    if (cfg.D.size() == 0 || cfg.C.size() == 0)
      line_fail(seen.count("D") ? seen["D"] : seen["C"], "both D and C are required");
    if (cfg.D.rows() != cfg.C.rows())
      line_fail(seen["C"], "D and C have different sizes");
  }
  const int d = cfg.d();
  auto resolve = [&](const std::vector<Pending>& lines, InitialSpec& spec) {
    for (const auto& pl : lines) {
      if (d == 0) line_fail(pl.line, "initial data needs the system block (C, D)");
      if (!pl.append) spec.terms.clear();
      spec.terms.push_back(initial_term(pl.value, d, pl.line));
      spec.set = true;
      if (cfg.original_frame && spec.terms.back().kind == InitialTerm::kHermite)
        line_fail(pl.line, "Hermite data is only accepted in the normalized frame");
    }
  };
  resolve(f0_lines, cfg.f0);
  resolve(g0_lines, cfg.g0);
  if (cfg.out_dir.empty()) cfg.out_dir = "out/" + cfg.name;
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

DensityState build_state(const InitialSpec& spec, int d, const Matrix* T_inv) {
  GaussianMixture mix(d);
  HermiteExpansion herm;
  bool any_hermite = false;
  int max_deg = 0;
  for (const auto& t : spec.terms)
    if (t.kind == InitialTerm::kHermite)
      for (const auto& a : t.index) {
        any_hermite = true;
        int deg = 0;
        for (int v : a) deg += v;
        max_deg = std::max(max_deg, deg);
      }
  if (any_hermite) herm = HermiteExpansion(d, max_deg);
  const std::vector<InitialTerm> fallback{InitialTerm{}};
  const auto& terms = spec.terms.empty() ? fallback : spec.terms;
  for (const auto& t : terms) {
    switch (t.kind) {
      case InitialTerm::kEquilibrium:
        mix.add(1.0, Vector::Zero(d), Matrix::Identity(d, d));
        break;
      case InitialTerm::kMixture:
        for (size_t k = 0; k < t.weight.size(); ++k) {
          Vector m = t.mean[k];
          Matrix S = t.cov[k];
          if (T_inv) {
            m = *T_inv * m;
            S = *T_inv * S * T_inv->transpose();
            S = 0.5 * (S + S.transpose());
          }
          mix.add(t.weight[k], m, S);
        }
        break;
      case InitialTerm::kHermite:
        for (size_t k = 0; k < t.index.size(); ++k)
          herm.set(t.index[k], herm.coefficient(t.index[k]) + t.coeff[k]);
        break;
    }
  }
  DensityState s;
  s.d = d;
  s.mixture = std::move(mix);
  s.hermite = std::move(herm);
  return s;
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string scenario_help() {
  return R"(Scenario keys (defaults in brackets):
  name            scenario name [scenario]
  D, C            system matrices, rows ';' entries ','  (required except appendix-a)
  tolerance       rank/symmetry tolerance [1e-9]
  frame           normalized | original: frame of f0/g0 [normalized]
  f0, g0          equilibrium | mixture: w, mean.., cov upper triangle; ...
                  | hermite: i1 .. id coeff; ...   ('+=' adds a term) [f0 = equilibrium, g0 = f0]
  p               entropy exponent in [1,2] [1.5]
  P               identity | certificate(nu) | certificate(auto) [certificate(auto):
                  nu = 0 unless the slowest eigenvalues are defective, then 0.1 mu]
  t_max, samples  time grid [15/mu, 200]
  grid_degree     Gauss-Hermite nodes per axis [60 for d<=2, 30 for d=3]
  checks          comma list of fisher_differential, improved_decay, interpolation,
                  lower_bound, contractivity, main_theorems, spectrum | all | none
                  [fisher_differential, interpolation, main_theorems, spectrum]
  eta, eps        lower-bound / contractivity parameters [0.5, 0.25]
  p1, p2          contractivity exponents [p1 = p2, p2 = 1.5]
  fd_step         finite-difference step [1e-3]
  fd_samples      Fisher-decay sample times [50]
  box_points      lower-bound grid points per axis [65]
  fit_lo, fit_hi  improved-decay fit window [0.5, 3]
  out             output directory [out/<name>]
 appendix-a:
  phi, diffusion  potential and scalar diffusion in x (y, z) [diffusion = 1]
  f0_ratio        f0 / f_inf before normalization [1]
  g0_ratio        g0 / f_inf [x]
  half_width      domain [-L, L] [8]
  cells           finite-volume cells [2048]
  a1_points       rate-condition grid points per axis [4097 (d=1)]
  t_end           decay horizon [5]
  decay_samples   sampled times in [0, t_end] [51]
  psi_p           entropy exponent of the decay check [1.5]
  dt              time step [1e-4]
)";
}

}  // namespace hd
