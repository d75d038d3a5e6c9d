#pragma once

// Reference implementations used only by the tests. They share no code with
// the library: plain Gaussian elimination in long double, direct monomial
// derivatives, and brute-force ring re-summation.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Row = std::array<long double, 7>;

/// Solves the 6x6 system held in the first six columns of `aug` with the
/// right-hand side in the seventh. Partial pivoting.
inline std::array<double, 6> gauss_solve(std::array<Row, 6> aug) {
  for (std::size_t col = 0; col < 6; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < 6; ++r) {
      if (std::fabs(aug[r][col]) > std::fabs(aug[pivot][col])) pivot = r;
    }
    std::swap(aug[col], aug[pivot]);
    for (std::size_t r = col + 1; r < 6; ++r) {
      const long double f = aug[r][col] / aug[col][col];
      for (std::size_t c = col; c < 7; ++c) aug[r][c] -= f * aug[col][c];
    }
  }
  std::array<long double, 6> x{};
  for (std::size_t i = 6; i-- > 0;) {
    long double s = aug[i][6];
    for (std::size_t c = i + 1; c < 6; ++c) s -= aug[i][c] * x[c];
    x[i] = s / aug[i][i];
  }
  std::array<double, 6> out{};
  for (std::size_t i = 0; i < 6; ++i) out[i] = static_cast<double>(x[i]);
  return out;
}

/// d^order/dt^order of sum c_i t^i, evaluated term by term.
inline long double poly_derivative(const std::array<double, 6>& c, long double t, int order) {
  long double s = 0.0L;
  for (int i = order; i < 6; ++i) {
    long double falling = 1.0L;
    for (int k = 0; k < order; ++k) falling *= static_cast<long double>(i - k);
    s += falling * c[static_cast<std::size_t>(i)] * std::pow(t, static_cast<long double>(i - order));
  }
  return s;
}

/// Boundary rows (value, first, second derivative at t_s, then at t_t)
/// built from the derivative definition, not from a closed-form table.
inline std::array<Row, 6> quintic_system(long double t_s, long double t_t,
                                         const std::array<double, 3>& start,
                                         const std::array<double, 3>& target) {
  std::array<Row, 6> aug{};
  for (int e = 0; e < 2; ++e) {
    const long double t = e == 0 ? t_s : t_t;
    for (int order = 0; order < 3; ++order) {
      Row& row = aug[static_cast<std::size_t>(3 * e + order)];
      for (std::size_t i = 0; i < 6; ++i) {
        std::array<double, 6> unit{};
        unit[i] = 1.0;
        row[i] = poly_derivative(unit, t, order);
      }
      row[6] = (e == 0 ? start : target)[static_cast<std::size_t>(order)];
    }
  }
  return aug;
}

/// Mean of the last `n` values pushed into a zero-initialized window,
/// recomputed from the full history.
inline double window_mean(const std::vector<double>& history, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k < history.size()) s += history[history.size() - 1 - k];
  }
  return s / static_cast<double>(n);
}

/// Small generator helpers over a seeded engine.
struct Gen {
  std::mt19937_64 engine;

  explicit Gen(std::uint64_t seed) : engine(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine);
  }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine);
  }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  /// Point inside the disc of radius r.
  std::pair<double, double> in_disc(double r) {
    const double rho = r * std::sqrt(uniform(0.0, 1.0));
    const double th = uniform(-M_PI, M_PI);
    return {rho * std::cos(th), rho * std::sin(th)};
  }
};

}  // namespace oracle
