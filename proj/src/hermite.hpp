// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
//
// Multi-indices, orthonormal probabilists' Hermite functions and a small exact
// monomial algebra used to build the generator on span{q f_inf : deg q <= M}.
#pragma once

#include <map>
#include <vector>

#include "matrix_core.hpp"

namespace hd {

using MultiIndex = std::vector<int>;

int multi_index_degree(const MultiIndex& a);

// Graded order; inside a degree, lexicographically descending, so the degree-1
// block is e_1, ..., e_d.
std::vector<MultiIndex> enumerate_multi_indices(int d, int max_degree);
// Shared, immutable enumeration (cached per (d, M); thread-safe).
const std::vector<MultiIndex>& cached_multi_indices(int d, int max_degree);
int multi_index_position(const MultiIndex& a);
int multi_index_count(int d, int max_degree);  // = C(M + d, d)
int degree_offset(int d, int degree);          // first position of that degree

// h_k(x) = He_k(x)/sqrt(k!), k = 0..K (orthonormal w.r.t. N(0,1)).
void hermite_functions_1d(double x, int K, double* out);

// Sparse polynomial in monomials x^beta.
using Polynomial = std::map<MultiIndex, double>;

Polynomial hermite_polynomial(const MultiIndex& a);  // h_a(x) = prod_i h_{a_i}(x_i)
Polynomial derivative(const Polynomial& q, int i);
void axpy(double s, const Polynomial& x, Polynomial& y);
Polynomial multiply_by_coordinate(const Polynomial& q, int i);

// Coefficients of q in the orthonormal basis {h_a}, over all |a| <= max_degree.
Vector to_hermite_coefficients(const Polynomial& q, int d, int max_degree);

}  // namespace hd
