#include <cmath>

#include <gtest/gtest.h>

#include "verifier.hpp"

namespace hd {
namespace {

Matrix M2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

DensityState gaussian(double m0, double m1, double s = 1.0) {
  GaussianMixture g(2);
  Vector m(2);
  m << m0, m1;
  g.add(1.0, m, Matrix::Identity(2, 2) * s);
  return DensityState::from_mixture(g);
}

DensityState none() { return DensityState{}; }

int failures(const std::vector<CheckRow>& rows) {
  int n = 0;
  for (const auto& r : rows) n += r.pass ? 0 : 1;
  return n;
}

TEST(TimeGrid, Shape) {
  const auto t = default_time_grid(0.5);
  ASSERT_EQ(t.size(), 200u);
  EXPECT_EQ(t.front(), 0.0);
  EXPECT_NEAR(t.back(), 30.0, 1e-12);
  EXPECT_TRUE(std::is_sorted(t.begin(), t.end()));
  EXPECT_NEAR(t[1], 2e-3, 1e-15);
}

TEST(Experiment, InitialStateAndMass) {
  const Experiment ex(Matrix::Identity(2, 2), gaussian(0.5, 0), none(), 40);
  EXPECT_EQ(ex.d(), 2);
  EXPECT_NEAR(ex.d_min(), 1.0, 1e-15);
  EXPECT_NEAR(ex.f_at(0).mass(), 1.0, 1e-15);
  EXPECT_NEAR(ex.f_at(3.0).mass(), 1.0, 1e-14);
  // g0 defaults to f0
  const GridValues a = sample(ex.f_at(1.0), ex.grid()), b = sample(ex.g_at(1.0), ex.grid());
  EXPECT_NEAR(entropy_p(a, 2.0), entropy_p(b, 2.0), 1e-15);
}

TEST(Experiment, EntropyOfShiftedGaussianAlongFlow) {
  // For C = I the mean decays as e^{-t}: e_2(t) = (exp(|m|^2 e^{-2t}) - 1) / 2.
  const Experiment ex(Matrix::Identity(2, 2), gaussian(0.5, 0), none(), 60);
  for (double t : {0.0, 0.5, 2.0, 6.0}) {
    const double m2 = 0.25 * std::exp(-2 * t);
    EXPECT_NEAR(entropy_p(ex.f_at(t), 2.0, ex.grid()) / (std::expm1(m2) / 2), 1.0, 1e-10);
  }
}

TEST(Resolution, CoarseGridIsFlagged) {
  const Experiment coarse(Matrix::Identity(2, 2), gaussian(1.5, 0, 0.5), none(), 4);
  try {
    check_resolution(coarse, 1.5, Matrix::Identity(2, 2), {0.0, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnderResolved);
  }
  const Experiment fine(Matrix::Identity(2, 2), gaussian(1.5, 0, 0.5), none(), 60);
  EXPECT_NO_THROW(check_resolution(fine, 1.5, Matrix::Identity(2, 2), {0.0, 1.0}));
}

TEST(FisherDecay, DifferentialFormOnDefectiveSystem) {
  const Matrix C = normalize_system(make_system(Matrix::Identity(2, 2), M2(1, 1, 0, 1))).C_tilde;
  const Certificate cert = build_certificate(C, 0.1);
  const Experiment ex(C, gaussian(0.6, -0.3, 0.7), gaussian(-0.2, 0.4, 1.3), 40);
  const auto rows = check_fisher_differential(ex, {0.05, 0.5, 1.5, 4.0}, 1.5, cert.P,
                                              cert.lambda);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(failures(rows), 0);
}

TEST(FisherDecay, TooLargeRateFails) {
  const Matrix C = M2(1, 1, -1, 1);
  const Experiment ex(C, gaussian(0.6, -0.3, 0.7), none(), 40);
  // lambda above the spectral gap cannot hold near equilibrium
  const auto rows = check_fisher_differential(ex, {6.0}, 2.0, Matrix::Identity(2, 2), 1.5);
  EXPECT_EQ(failures(rows), 1);
}

TEST(FisherDecay, IntegratedFormSynthetic) {
  std::vector<double> t, v;
  for (int i = 0; i <= 20; ++i) {
    t.push_back(0.25 * i);
    v.push_back(3.0 * std::exp(-2.0 * 0.25 * i));
  }
  EXPECT_EQ(failures(check_fisher_integrated(t, v, 1.0, "x")), 0);
  v[10] *= 1.01;
  EXPECT_GT(failures(check_fisher_integrated(t, v, 1.0, "x")), 0);
}

TEST(Interpolation, RowsAndConstant) {
  // equality case for the sharp constant: I_p = 2 sqrt(I_1 I_2) at p = 1.5
  auto rows = interpolation_rows(0.0, 1.5, 2.0 * std::sqrt(3.0 * 5.0), 3.0, 5.0);
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(failures(rows), 0);
  rows = interpolation_rows(0.0, 1.5, 2.0 * std::sqrt(15.0) * 1.001, 3.0, 5.0);
  EXPECT_GT(failures(rows), 0);
}

TEST(Interpolation, HoldsOnMixtures) {
  GaussianMixture g(2);
  Vector m(2);
  m << 0.9, 0.2;
  g.add(0.3, m, M2(0.5, 0.1, 0.1, 0.8));
  g.add(0.7, -0.5 * m, Matrix::Identity(2, 2) * 1.2);
  const Experiment ex(M2(1, 1, -1, 1), DensityState::from_mixture(g), gaussian(0.1, 0.3),
                      40);
  for (double p : {1.1, 1.5, 1.9})
    EXPECT_EQ(failures(check_interpolation(ex, {0.0, 0.3, 2.0}, p, Matrix::Identity(2, 2))),
              0);
}

TEST(ImprovedDecay, PreconditionV1) {
  HermiteExpansion h(2, 2);
  h.set({1, 0}, 0.3);
  h.set({2, 0}, std::sqrt(2.0));
  const Experiment ex(Matrix::Identity(2, 2), gaussian(0, 0),
                      DensityState::from_hermite(h), 40);
  try {
    check_improved_decay(ex, {0.5, 1.0}, Matrix::Identity(2, 2), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrecondition);
  }
}

TEST(ImprovedDecay, RateForSecondHermiteMode) {
  HermiteExpansion h(2, 2);
  h.set({2, 0}, std::sqrt(2.0));  // (x1^2 - 1) f_inf
  const Experiment ex(Matrix::Identity(2, 2), gaussian(0, 0),
                      DensityState::from_hermite(h), 40);
  std::vector<double> times;
  for (int i = 0; i <= 30; ++i) times.push_back(0.1 * i);
  double slope = 0;
  const auto rows = check_improved_decay(ex, times, Matrix::Identity(2, 2), 1.0, &slope);
  EXPECT_EQ(failures(rows), 0);
  EXPECT_NEAR(slope, -4.0, 1e-6);
}

TEST(LowerBound, EquilibriumAndShifted) {
  for (const DensityState& f0 : {gaussian(0, 0), gaussian(1, 0, 0.5)}) {
    const Experiment ex(Matrix::Identity(2, 2), f0, none(), 40);
    const auto r = check_lower_bound(ex, 0.5, 0.25, {}, 33);
    EXPECT_EQ(r.rows.size(), 5u);
    EXPECT_EQ(failures(r.rows), 0);
    EXPECT_GT(r.C_eta_f0, 0.0);
  }
}

TEST(Fit, SyntheticEnvelopes) {
  std::vector<TrajectoryPoint> pts;
  for (int i = 0; i <= 200; ++i) {
    TrajectoryPoint p;
    p.t = 15.0 * i / 200;
    p.e_2 = 0.3 * std::exp(-2.0 * p.t);
    pts.push_back(p);
  }
  auto fr = fit_decay(pts, 1.0, 0, 8, 15);
  EXPECT_NEAR(fr.rate_fit, 2.0, 1e-12);
  EXPECT_FALSE(fr.inconclusive);
  for (auto& p : pts) p.e_2 = 0.3 * (1 + p.t * p.t) * std::exp(-2.0 * p.t);
  fr = fit_decay(pts, 1.0, 1, 8, 15);
  EXPECT_NEAR(fr.poly_order_fit, 2.0, 1e-10);
  fr = fit_decay(pts, 1.0, 1, 100, 200);
  EXPECT_TRUE(fr.inconclusive);
  EXPECT_EQ(fr.samples, 0);
}

TEST(Trajectory, IdentitySystemPassesAllSummaries) {
  const Experiment ex(Matrix::Identity(2, 2), gaussian(0.5, 0), none(), 40);
  const auto times = default_time_grid(1.0, 40);
  const TrajectoryReport rep = run_trajectory(ex, 1.5, Matrix::Identity(2, 2), 1.0, times);
  EXPECT_EQ(rep.points.size(), times.size());
  for (const auto& s : rep.summaries) EXPECT_TRUE(s.pass) << s.check << " " << s.note;
  EXPECT_TRUE(rep.all_pass());
  for (const auto& pt : rep.points) EXPECT_NEAR(pt.mass_f, 1.0, 1e-10);
}

TEST(Trajectory, RejectsSignedInitialData) {
  HermiteExpansion h(2, 1);
  h.set({0, 0}, 1.0);
  h.set({1, 0}, 0.5);
  const Experiment ex(Matrix::Identity(2, 2), DensityState::from_hermite(h), none(), 40);
  try {
    run_trajectory(ex, 1.5, Matrix::Identity(2, 2), 1.0, {0.0, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrecondition);
  }
}

}  // namespace
}  // namespace hd
