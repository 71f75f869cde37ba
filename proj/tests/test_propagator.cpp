#include <cmath>

#include <gtest/gtest.h>

#include "functionals.hpp"
#include "propagator.hpp"
#include "spectral.hpp"

namespace hd {
namespace {

Matrix M2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Vector V2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

TEST(MultiIndex, CountsAndOrder) {
  EXPECT_EQ(multi_index_count(2, 3), 10);
  EXPECT_EQ(multi_index_count(3, 4), 35);
  const auto& idx = cached_multi_indices(2, 2);
  ASSERT_EQ(idx.size(), 6u);
  EXPECT_EQ(idx[1], (MultiIndex{1, 0}));
  EXPECT_EQ(idx[2], (MultiIndex{0, 1}));
  for (size_t i = 0; i < idx.size(); ++i)
    EXPECT_EQ(multi_index_position(idx[i]), static_cast<int>(i));
  EXPECT_EQ(degree_offset(2, 2), 3);
}

TEST(Hermite, OrthonormalUnderQuadrature) {
  const int K = 8;
  Vector x, w;
  gauss_hermite_1d(20, x, w);
  EXPECT_NEAR(w.sum(), 1.0, 1e-14);
  std::vector<double> h(K + 1);
  Matrix G = Matrix::Zero(K + 1, K + 1);
  for (int q = 0; q < x.size(); ++q) {
    hermite_functions_1d(x(q), K, h.data());
    for (int a = 0; a <= K; ++a)
      for (int b = 0; b <= K; ++b) G(a, b) += w(q) * h[a] * h[b];
  }
  EXPECT_LE((G - Matrix::Identity(K + 1, K + 1)).norm(), 1e-12);
}

TEST(Hermite, PolynomialAlgebraRoundTrip) {
  // x1 * h_{(1,0)} = x1^2 = sqrt(2) h_{(2,0)} + h_0
  const Polynomial q = multiply_by_coordinate(hermite_polynomial({1, 0}), 0);
  const Vector c = to_hermite_coefficients(q, 2, 2);
  EXPECT_NEAR(c(multi_index_position({0, 0})), 1.0, 1e-14);
  EXPECT_NEAR(c(multi_index_position({2, 0})), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(c.norm(), std::sqrt(3.0), 1e-14);
}

TEST(Mixture, EvolutionMeanAndCovariance) {
  const Matrix C = M2(1, 1, -1, 1);
  GaussianMixture g(2);
  g.add(1.0, V2(0.5, -0.2), M2(0.7, 0.1, 0.1, 1.3));
  const double t = 0.8;
  const GaussianMixture e = evolve_mixture(g, C, t);
  const Matrix E = matrix_exponential(-C, t);
  ASSERT_EQ(e.components().size(), 1u);
  const auto& c = e.components()[0];
  EXPECT_LE((c.mean - E * V2(0.5, -0.2)).norm(), 1e-13);
  EXPECT_LE((c.cov - (E * M2(0.7, 0.1, 0.1, 1.3) * E.transpose() + covariance_W(C, t))).norm(),
            1e-13);
  EXPECT_NEAR(e.mass(), 1.0, 1e-15);
}

TEST(Mixture, EquilibriumIsStationary) {
  const Matrix C = M2(1, 1, -1, 1);  // normalized: C_s = I
  const GaussianMixture e = evolve_mixture(GaussianMixture::standard(2), C, 3.0);
  EXPECT_LE((e.components()[0].cov - Matrix::Identity(2, 2)).norm(), 1e-13);
  EXPECT_LE(e.components()[0].mean.norm(), 1e-15);
}

TEST(Mixture, RejectsBadCovariance) {
  GaussianMixture g(2);
  try {
    g.add(1.0, V2(0, 0), M2(1, 0, 0, -1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidInput);
  }
}

// A shifted Gaussian evolved in the Hermite basis agrees with the exact mixture.
TEST(Generator, HermiteEvolutionMatchesMixture) {
  const Matrix C = M2(1, 1, -1, 1);
  const Vector m = V2(0.4, -0.3);
  const int M = 16;
  const GeneratorMatrix gen = build_generator_matrix(C, M);
  const HermiteExpansion h0 = HermiteExpansion::shifted_gaussian(m, M);
  GaussianMixture g(2);
  g.add(1.0, m, Matrix::Identity(2, 2));
  for (double t : {0.0, 0.3, 1.0, 2.5}) {
    const DensityState a = DensityState::from_hermite(evolve_hermite(h0, gen, t));
    const DensityState b = DensityState::from_mixture(evolve_mixture(g, C, t));
    for (double x : {-2.0, -0.5, 0.0, 0.7, 1.9})
      for (double y : {-1.3, 0.0, 1.1}) {
        const Vector p = V2(x, y);
        EXPECT_NEAR(evaluate_density(a, p), evaluate_density(b, p), 1e-10)
            << "t=" << t << " x=" << x << " y=" << y;
      }
  }
}

TEST(Generator, ConservesMass) {
  const GeneratorMatrix gen = build_generator_matrix(M2(1, 2, -2, 1), 4);
  // first row of G: d/dt of the mass coefficient
  EXPECT_LE(gen.G.row(0).norm(), 1e-14);
}

TEST(Generator, CapacityLimit) {
  try {
    build_generator_matrix(Matrix::Identity(3, 3), 40);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCapacity);
  }
}

TEST(Evaluation, GradientMatchesFiniteDifference) {
  GaussianMixture g(2);
  g.add(0.6, V2(0.5, 0.0), M2(0.8, 0.2, 0.2, 1.1));
  g.add(0.4, V2(-0.7, 0.3), Matrix::Identity(2, 2) * 1.4);
  const DensityState s = DensityState::from_mixture(g);
  const Vector x = V2(0.3, -0.4);
  const Vector grad = evaluate_ratio_gradient(s, x);
  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    const double fd = (evaluate_node(s, xp).ratio - evaluate_node(s, xm).ratio) / (2 * h);
    EXPECT_NEAR(grad(i), fd, 1e-8);
  }
  const NodeValue nv = evaluate_node(s, x);
  EXPECT_NEAR(nv.ratio - 1.0, nv.ratio_minus_one, 1e-15);
  EXPECT_NEAR(std::exp(nv.log_ratio), nv.ratio, 1e-14);
}

TEST(V1, ProjectionOfShiftedGaussianIsMean) {
  GaussianMixture g(2);
  g.add(1.0, V2(0.3, -0.8), M2(1.2, 0.3, 0.3, 0.9));
  const auto a = project_V1(DensityState::from_mixture(g));
  EXPECT_LE((a.a - V2(0.3, -0.8)).norm(), 1e-14);
}

TEST(V1, EvolutionMatchesProjection) {
  const Matrix C = M2(1, 1, -1, 1);
  GaussianMixture g(2);
  g.add(1.0, V2(0.3, -0.8), Matrix::Identity(2, 2));
  const auto a0 = project_V1(DensityState::from_mixture(g));
  for (double t : {0.5, 2.0}) {
    const auto at = evolve_V1(a0, C, t);
    const auto direct = project_V1(DensityState::from_mixture(evolve_mixture(g, C, t)));
    EXPECT_LE((at.a - direct.a).norm(), 1e-13);
  }
}

}  // namespace
}  // namespace hd
