#include "adaframe/numerics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

namespace adaframe {
namespace {

TEST(Softmax, UniformForEqualInputs) {
  const Vector s = softmax(Vector::Zero(3));
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(s(i), 1.0 / 3.0);
}

TEST(Softmax, ShiftInvariant) {
  const Vector base = (Vector(3) << 0.0, 0.7, 1.4).finished();
  const Vector reference = softmax(base);
  for (double shift : {-500.0, -3.0, 2.5, 650.0}) {
    const Vector shifted = softmax((base.array() + shift).matrix());
    EXPECT_LT((shifted - reference).cwiseAbs().maxCoeff(), 1e-12) << shift;
  }
}

TEST(Softmax, MatchesDirectFormula) {
  const double denom = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
  const Vector s = softmax((Vector(3) << 1.0, 2.0, 3.0).finished());
  EXPECT_NEAR(s(0), std::exp(1.0) / denom, 1e-15);
  EXPECT_NEAR(s(1), std::exp(2.0) / denom, 1e-15);
  EXPECT_NEAR(s(2), std::exp(3.0) / denom, 1e-15);
}

TEST(Softmax, EmptyInputThrows) { EXPECT_THROW(softmax(Vector(0)), std::invalid_argument); }

TEST(Softmax, SumsToOneOverWideRange) {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const Vector x = uniform_vector(1 + static_cast<Eigen::Index>(rng.index(20)), -700.0, 700.0, rng);
    const Vector s = softmax(x);
    EXPECT_NEAR(s.sum(), 1.0, 1e-12);
    EXPECT_GT(s.minCoeff(), -1e-300);
    EXPECT_LE(s.maxCoeff(), 1.0);
  }
}

TEST(Sigmoid, KnownValuesAndSymmetry) {
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  EXPECT_DOUBLE_EQ(std::tanh(0.0), 0.0);
  EXPECT_NEAR(sigmoid(100.0), 1.0, 1e-12);
  EXPECT_GE(sigmoid(-800.0), 0.0);
  for (double x : {-30.0, -2.0, -0.1, 0.3, 4.0, 25.0}) {
    EXPECT_NEAR(sigmoid(-x), 1.0 - sigmoid(x), 1e-15);
    EXPECT_LT(sigmoid(x), sigmoid(x + 0.01));
  }
}

TEST(GaussianSample, DegenerateReturnsMean) {
  Rng rng(1);
  EXPECT_EQ(gaussian_sample(0.37, 0.0, rng), 0.37);
  EXPECT_THROW(gaussian_sample(0.0, -1.0, rng), std::invalid_argument);
}

TEST(GaussianSample, MomentsWithinThreeSigmaBounds) {
  Rng rng(2024);
  constexpr int n = 100000;
  std::vector<double> xs(n);
  for (double& x : xs) x = gaussian_sample(0.5, 0.1, rng);
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / (n - 1));
  EXPECT_NEAR(mean, 0.5, 0.003);
  EXPECT_NEAR(sd, 0.1, 0.005);
}

TEST(GaussianSample, SameSeedSameStream) {
  Rng a(77);
  Rng b(77);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(gaussian_sample(0.2, 0.3, a), gaussian_sample(0.2, 0.3, b));
}

TEST(Rng, SplitStreamsAreDeterministicAndDistinct) {
  const Rng root(5);
  Rng a = root.split(1);
  Rng a2 = root.split(1);
  Rng b = root.split(2);
  const double x = a.normal();
  EXPECT_EQ(x, a2.normal());
  EXPECT_NE(x, b.normal());
}

TEST(FiniteDiff, QuadraticIsExact) {
  const Vector g = finite_diff_grad([](const Vector& t) { return t.dot(t); }, Vector::Constant(1, 3.0), 1e-5);
  EXPECT_NEAR(g(0), 6.0, 1e-8);
}

TEST(FiniteDiff, ConstantGivesZero) {
  const Vector g = finite_diff_grad([](const Vector&) { return 4.2; }, Vector::Ones(5), 1e-5);
  EXPECT_EQ(g, Vector::Zero(5));
}

TEST(FiniteDiff, SigmoidDerivativeAtZero) {
  const Vector g = finite_diff_grad([](const Vector& t) { return sigmoid(t(0)); }, Vector::Zero(1), 1e-5);
  EXPECT_NEAR(g(0), 0.25, 1e-8);
}

TEST(FiniteDiff, FivePointStencil) {
  // Exact for polynomials up to degree four.
  const auto quartic = [](const Vector& t) { return std::pow(t(0), 4) - 2.0 * t(0) * t(1); };
  const Vector g = finite_diff_grad(quartic, (Vector(2) << 1.5, -0.5).finished(), 1e-2, Stencil::five_point);
  EXPECT_NEAR(g(0), 4.0 * std::pow(1.5, 3) + 1.0, 1e-10);
  EXPECT_NEAR(g(1), -3.0, 1e-12);
  const auto s = [](const Vector& t) { return std::sin(t(0)); };
  const double coarse = finite_diff_grad(s, Vector::Constant(1, 0.7), 1e-2)(0);
  const double fine = finite_diff_grad(s, Vector::Constant(1, 0.7), 1e-2, Stencil::five_point)(0);
  EXPECT_LT(std::abs(fine - std::cos(0.7)), 1e-3 * std::abs(coarse - std::cos(0.7)));
}

TEST(RelativeError, UsesFloorForTinyValues) {
  const Vector a = (Vector(2) << 1.0, 1e-12).finished();
  const Vector b = (Vector(2) << 1.0, 2e-12).finished();
  EXPECT_NEAR(max_relative_error(a, b), 1e-12 / 1e-8, 1e-18);
  EXPECT_THROW(max_relative_error(a, Vector(3)), ShapeError);
}

TEST(Shapes, MismatchIsAnError) {
  EXPECT_THROW(require_shape("m", Matrix::Zero(2, 3), 3, 2), ShapeError);
  EXPECT_NO_THROW(require_shape("m", Matrix::Zero(2, 3), 2, 3));
}

}  // namespace
}  // namespace adaframe
