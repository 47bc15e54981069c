#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace adaframe {

using Vector = Eigen::VectorXd;
// Row-major so that serialized blocks follow the natural (row, col) order.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void require_size(const std::string& what, Eigen::Index actual, Eigen::Index expected);
void require_shape(const std::string& what, const Matrix& m, Eigen::Index rows, Eigen::Index cols);

template <std::floating_point Scalar>
Scalar sigmoid(Scalar x) {
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> sigmoid(const Eigen::MatrixBase<Derived>& x) {
  return x.unaryExpr([](typename Derived::Scalar v) { return sigmoid(v); });
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> tanh(const Eigen::MatrixBase<Derived>& x) {
  return x.array().tanh().matrix();
}

/// Numerically stable softmax (max-subtraction).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> softmax(const Eigen::MatrixBase<Derived>& x) {
  if (x.size() == 0) throw std::invalid_argument("softmax: empty input");
  const auto shifted = (x.array() - x.maxCoeff()).exp().eval();
  return (shifted / shifted.sum()).matrix();
}

/// Shannon entropy in nats; 0·log 0 is taken as 0.
template <typename Derived>
typename Derived::Scalar entropy(const Eigen::MatrixBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  Scalar h = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > Scalar(0)) h -= p(i) * std::log(p(i));
  }
  return h;
}

/// Seeded pseudo-random source. Every stochastic operation takes one of these
/// explicitly; there is no global generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  double uniform(double lo, double hi);
  double normal();
  std::size_t index(std::size_t n);
  std::mt19937_64& engine() { return engine_; }

  /// Deterministically derived child stream.
  Rng split(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t seed);

double gaussian_sample(double mean, double stddev, Rng& rng);

Vector uniform_vector(Eigen::Index n, double lo, double hi, Rng& rng);
Vector normal_vector(Eigen::Index n, double stddev, Rng& rng);

using ScalarFunction = std::function<double(const Vector&)>;

enum class Stencil {
  three_point,  // (f(θ+h) − f(θ−h)) / 2h
  five_point,   // (−f(θ+2h) + 8f(θ+h) − 8f(θ−h) + f(θ−2h)) / 12h
};

/// Central-difference gradient, one coordinate at a time.
Vector finite_diff_grad(const ScalarFunction& f, const Vector& theta, double h,
                        Stencil stencil = Stencil::three_point);

/// max_i |a_i − b_i| / max(floor, |a_i| + |b_i|)
double max_relative_error(const Vector& a, const Vector& b, double floor = 1e-8);

bool all_finite(const Vector& v);
bool all_finite(const Matrix& m);

}  // namespace adaframe
