#include "adaframe/numerics.hpp"

#include <algorithm>

namespace adaframe {

void require_size(const std::string& what, Eigen::Index actual, Eigen::Index expected) {
  if (actual != expected) {
    throw ShapeError(what + ": expected size " + std::to_string(expected) + ", got " +
                     std::to_string(actual));
  }
}

void require_shape(const std::string& what, const Matrix& m, Eigen::Index rows, Eigen::Index cols) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ShapeError(what + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                     ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

std::uint64_t mix_seed(std::uint64_t seed) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed)) {}

double Rng::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::index: empty range");
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

Rng Rng::split(std::uint64_t stream) const { return Rng(mix_seed(seed_) ^ mix_seed(~stream)); }

double gaussian_sample(double mean, double stddev, Rng& rng) {
  if (!(stddev >= 0.0)) throw std::invalid_argument("gaussian_sample: negative stddev");
  if (stddev == 0.0) return mean;
  return mean + stddev * rng.normal();
}

Vector uniform_vector(Eigen::Index n, double lo, double hi, Rng& rng) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

Vector normal_vector(Eigen::Index n, double stddev, Rng& rng) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = gaussian_sample(0.0, stddev, rng);
  return v;
}

Vector finite_diff_grad(const ScalarFunction& f, const Vector& theta, double h, Stencil stencil) {
  Vector grad(theta.size());
  Vector probe = theta;
  auto at = [&](Eigen::Index i, double offset) {
    probe(i) = theta(i) + offset;
    const double v = f(probe);
    probe(i) = theta(i);
    return v;
  };
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (stencil == Stencil::three_point) {
      grad(i) = (at(i, h) - at(i, -h)) / (2.0 * h);
    } else {
      grad(i) = (-at(i, 2 * h) + 8.0 * at(i, h) - 8.0 * at(i, -h) + at(i, -2 * h)) / (12.0 * h);
    }
  }
  return grad;
}

double max_relative_error(const Vector& a, const Vector& b, double floor) {
  require_size("max_relative_error", b.size(), a.size());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double denom = std::max(floor, std::abs(a(i)) + std::abs(b(i)));
    worst = std::max(worst, std::abs(a(i) - b(i)) / denom);
  }
  return worst;
}

bool all_finite(const Vector& v) { return v.allFinite(); }
bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace adaframe
