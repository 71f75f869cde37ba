// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
#include "hermite.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>

namespace hd {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// He_k in monomials, exact integer coefficients.
const std::vector<std::vector<double>>& he_table(int K) {
  static thread_local std::vector<std::vector<double>> table{{1.0}, {0.0, 1.0}};
  while (static_cast<int>(table.size()) <= K) {
    const int k = static_cast<int>(table.size()) - 1;
    std::vector<double> next(k + 2, 0.0);
    for (int j = 0; j <= k; ++j) next[j + 1] += table[k][j];
    for (int j = 0; j < static_cast<int>(table[k - 1].size()); ++j)
      next[j] -= k * table[k - 1][j];
    table.push_back(std::move(next));
  }
  return table;
}

}  // namespace

int multi_index_degree(const MultiIndex& a) {
  return std::accumulate(a.begin(), a.end(), 0);
}

int multi_index_count(int d, int max_degree) {
  if (max_degree < 0) return 0;
  return static_cast<int>(binomial(max_degree + d, d));
}

int degree_offset(int d, int degree) { return multi_index_count(d, degree - 1); }

int multi_index_position(const MultiIndex& a) {
  const int d = static_cast<int>(a.size());
  const int m = multi_index_degree(a);
  int rank = 0, rem = m;
  for (int i = 0; i + 1 < d; ++i) {
    const int parts = d - i - 1;
    for (int v = rem; v > a[i]; --v)
      rank += static_cast<int>(binomial(rem - v + parts - 1, parts - 1));
    rem -= a[i];
  }
  return degree_offset(d, m) + rank;
}

std::vector<MultiIndex> enumerate_multi_indices(int d, int max_degree) {
  std::vector<MultiIndex> out;
  out.reserve(multi_index_count(d, max_degree));
  MultiIndex cur(d, 0);
  // recursive fill, lexicographically descending within each degree
  auto fill = [&](auto&& self, int i, int rem) -> void {
    if (i == d - 1) {
      cur[i] = rem;
      out.push_back(cur);
      return;
    }
    for (int v = rem; v >= 0; --v) {
      cur[i] = v;
      self(self, i + 1, rem - v);
    }
  };
  for (int m = 0; m <= max_degree; ++m) fill(fill, 0, m);
  return out;
}

const std::vector<MultiIndex>& cached_multi_indices(int d, int max_degree) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<std::vector<MultiIndex>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{d, max_degree}];
  if (!slot)
    slot = std::make_unique<std::vector<MultiIndex>>(enumerate_multi_indices(d, max_degree));
  return *slot;
}

void hermite_functions_1d(double x, int K, double* out) {
  out[0] = 1.0;
  if (K >= 1) out[1] = x;
  for (int k = 1; k < K; ++k)
    out[k + 1] = (x * out[k] - std::sqrt(double(k)) * out[k - 1]) / std::sqrt(k + 1.0);
}

Polynomial hermite_polynomial(const MultiIndex& a) {
  const int d = static_cast<int>(a.size());
  const auto& he = he_table(*std::max_element(a.begin(), a.end()));
  Polynomial q;
  q[MultiIndex(d, 0)] = 1.0;
  for (int i = 0; i < d; ++i) {
    Polynomial next;
    const auto& coeffs = he[a[i]];
    for (const auto& [beta, c] : q) {
      for (int j = 0; j < static_cast<int>(coeffs.size()); ++j) {
        if (coeffs[j] == 0.0) continue;
        MultiIndex b = beta;
        b[i] += j;
        next[b] += c * coeffs[j];
      }
    }
    q.swap(next);
  }
  double norm = 1.0;
  for (int ai : a) norm *= factorial(ai);
  norm = 1.0 / std::sqrt(norm);
  for (auto& [beta, c] : q) c *= norm;
  return q;
}

Polynomial derivative(const Polynomial& q, int i) {
  Polynomial out;
  for (const auto& [beta, c] : q) {
    if (beta[i] == 0) continue;
    MultiIndex b = beta;
    b[i] -= 1;
    out[b] += c * beta[i];
  }
  return out;
}

void axpy(double s, const Polynomial& x, Polynomial& y) {
  if (s == 0.0) return;
  for (const auto& [beta, c] : x) y[beta] += s * c;
}

Polynomial multiply_by_coordinate(const Polynomial& q, int i) {
  Polynomial out;
  for (const auto& [beta, c] : q) {
    MultiIndex b = beta;
    b[i] += 1;
    out[b] += c;
  }
  return out;
}

Vector to_hermite_coefficients(const Polynomial& q, int d, int max_degree) {
  Vector out = Vector::Zero(multi_index_count(d, max_degree));
  // x^n = sum_k n!/(2^k k! (n-2k)!) He_{n-2k} = sum_k ... sqrt((n-2k)!) h_{n-2k}
  for (const auto& [beta, c] : q) {
    if (c == 0.0) continue;
    if (multi_index_degree(beta) > max_degree)
      fail(ErrorCode::kCapacity, "polynomial degree exceeds Hermite truncation");
    std::vector<std::pair<MultiIndex, double>> terms{{MultiIndex(d, 0), c}};
    for (int i = 0; i < d; ++i) {
      const int n = beta[i];
      std::vector<std::pair<MultiIndex, double>> next;
      for (const auto& [alpha, v] : terms) {
        for (int k = 0; 2 * k <= n; ++k) {
          const int j = n - 2 * k;
          const double w = factorial(n) / (std::pow(2.0, k) * factorial(k) * factorial(j)) *
                           std::sqrt(factorial(j));
          MultiIndex a = alpha;
          a[i] = j;
          next.emplace_back(a, v * w);
        }
      }
      terms.swap(next);
    }
    for (const auto& [alpha, v] : terms) out[multi_index_position(alpha)] += v;
  }
  return out;
}

}  // namespace hd
