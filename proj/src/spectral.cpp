// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace hd {

V1Coefficients project_V1(const DensityState& f) {
  V1Coefficients out;
  out.a = Vector::Zero(f.d);
  for (const auto& c : f.mixture.components()) out.a += c.weight * c.mean;
  if (!f.hermite.empty() && f.hermite.max_degree >= 1)
    out.a += f.hermite.coeffs.segment(1, f.d);
  return out;
}

Decomposition decompose(const DensityState& f) {
  Decomposition dec;
  const V1Coefficients a = project_V1(f);
  dec.f1 = HermiteExpansion(f.d, 1);
  dec.f1.coeffs.segment(1, f.d) = a.a;
  dec.f2.d = f.d;
  dec.f2.mixture = f.mixture;
  dec.f2.hermite = f.hermite - dec.f1;
  return dec;
}

V1Coefficients evolve_V1(const V1Coefficients& a0, const Matrix& C_tilde, double t) {
  if (!(t >= 0.0)) fail(ErrorCode::kParameter, "time must be non-negative");
  return V1Coefficients{matrix_exponential(-C_tilde, t) * a0.a};
}

namespace {

struct Cluster {
  cplx mean;
  int count = 0;
};

std::vector<Cluster> clusters_of(const std::vector<cplx>& v, double radius) {
  const int n = static_cast<int>(v.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(v[i] - v[j]) <= radius) parent[find(i)] = find(j);
  std::vector<Cluster> out;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(out.size());
      out.push_back({0.0, 0});
    }
    out[slot[r]].mean += v[i];
    out[slot[r]].count++;
  }
  for (auto& c : out) c.mean /= double(c.count);
  return out;
}

}  // namespace

VmSpectrumReport check_Vm_spectrum(const Matrix& C_tilde, const GeneratorMatrix& gen,
                                   int max_degree, double tolerance) {
  const int d = static_cast<int>(C_tilde.rows());
  if (max_degree > gen.max_degree)
    fail(ErrorCode::kParameter, "generator matrix does not cover the requested degree");
  const SpectralData sd = analyze_drift_spectrum(C_tilde);
  std::vector<cplx> lambda;
  int n_max = 0;
  for (const auto& cl : sd.eigenvalues) {
    for (int k = 0; k < cl.algebraic; ++k) lambda.push_back(cl.value);
    n_max = std::max(n_max, cl.max_block - 1);
  }
  double lam_scale = 1.0;
  for (auto z : lambda) lam_scale = std::max(lam_scale, std::abs(z));

  VmSpectrumReport rep;
  rep.mu = sd.mu;
  rep.ok = true;
  const double eps = std::numeric_limits<double>::epsilon();
  const auto& idx = cached_multi_indices(d, max_degree);
  for (int m = 0; m <= max_degree; ++m) {
    VmBlockReport br;
    br.m = m;
    const int off = degree_offset(d, m), nb = multi_index_count(d, m) - off;
    for (int k = off; k < off + nb; ++k) {
      cplx s = 0.0;
      for (int i = 0; i < d; ++i) s -= double(idx[k][i]) * lambda[i];
      br.predicted.push_back(s);
    }
    const Matrix& B = gen.block(m);
    Eigen::EigenSolver<Matrix> es(B, false);
    for (int k = 0; k < nb; ++k) br.computed.push_back(es.eigenvalues()[k]);

    const double scale = std::max(1.0, m * lam_scale);
    const int jordan = m * n_max + 1;
    const double radius = std::max(1e-6, 10.0 * std::pow(eps, 1.0 / jordan)) * scale;
    auto pc = clusters_of(br.predicted, radius);
    auto cc = clusters_of(br.computed, radius);
    std::ostringstream det;
    bool ok = pc.size() == cc.size();
    if (!ok) det << "cluster count " << cc.size() << " vs predicted " << pc.size() << "; ";
    br.cluster_deviation = 0.0;
    std::vector<bool> used(pc.size(), false);
    for (const auto& c : cc) {
      int best = -1;
      double bd = std::numeric_limits<double>::infinity();
      for (size_t j = 0; j < pc.size(); ++j) {
        if (used[j] || pc[j].count != c.count) continue;
        const double dist = std::abs(pc[j].mean - c.mean);
        if (dist < bd) {
          bd = dist;
          best = static_cast<int>(j);
        }
      }
      if (best < 0) {
        ok = false;
        det << "unmatched eigenvalue " << format_complex(c.mean) << " (x" << c.count << "); ";
        continue;
      }
      used[best] = true;
      br.cluster_deviation = std::max(br.cluster_deviation, bd);
      if (bd > tolerance * scale) {
        ok = false;
        det << "eigenvalue " << format_complex(c.mean) << " vs predicted "
            << format_complex(pc[best].mean) << "; ";
      }
    }
    // power sums tr(B^k) = sum lambda^k
    Matrix Bk = Matrix::Identity(nb, nb);
    for (int k = 1; k <= nb; ++k) {
      Bk = Bk * B;
      cplx s = 0.0;
      double mag = 0.0;
      for (auto z : br.predicted) {
        s += std::pow(z, k);
        mag += std::pow(std::abs(z), k);
      }
      const double dev = std::abs(Bk.trace() - s) / std::max(1.0, mag);
      br.power_sum_deviation = std::max(br.power_sum_deviation, dev);
    }
    if (br.power_sum_deviation > tolerance) {
      ok = false;
      det << "power-sum deviation " << br.power_sum_deviation << "; ";
    }
    br.min_decay = std::numeric_limits<double>::infinity();
    for (const auto& c : cc) br.min_decay = std::min(br.min_decay, -c.mean.real());
    if (m >= 1 && std::abs(br.min_decay - m * sd.mu) > tolerance * scale) {
      ok = false;
      det << "min decay " << br.min_decay << " != m*mu = " << m * sd.mu << "; ";
    }
    br.ok = ok;
    br.detail = det.str();
    rep.ok = rep.ok && ok;
    rep.blocks.push_back(std::move(br));
  }
  return rep;
}

std::string VmSpectrumReport::summary() const {
  std::ostringstream os;
  for (const auto& b : blocks) {
    os << "V_" << b.m << ": " << (b.ok ? "ok" : "MISMATCH")
       << " cluster_dev=" << b.cluster_deviation
       << " power_dev=" << b.power_sum_deviation << " min_decay=" << b.min_decay;
    if (!b.detail.empty()) os << " [" << b.detail << "]";
    os << "\n";
  }
  return os.str();
}

}  // namespace hd
