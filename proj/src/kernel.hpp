#pragma once

// Inner loops shared by the solver, the pool, and rounding.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "riskcard/binarize.hpp"

namespace riskcard::detail {

inline double softplus(double x) noexcept {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// Rows touched by one coordinate: a split column, or every row for the
// intercept.
struct RowSet {
  std::span<const std::uint32_t> rows;
  bool all = false;
  std::size_t n = 0;

  static RowSet column(const BinarizedDataset& d, std::size_t j) { return {d.column(j), false, 0}; }
  static RowSet everything(const BinarizedDataset& d) { return {{}, true, d.num_rows()}; }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    if (all) {
      for (std::size_t i = 0; i < n; ++i) fn(i);
    } else {
      for (std::uint32_t i : rows) fn(i);
    }
  }
};

// z = X w + w0 over the nonzero entries of w.
inline std::vector<double> margins(const BinarizedDataset& d, std::span<const double> w, double w0) {
  std::vector<double> z(d.num_rows(), w0);
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] == 0.0) continue;
    for (std::uint32_t i : d.column(j)) z[i] += w[j];
  }
  return z;
}

// Sum of softplus(-y_i z_i / m).
inline double loss_from_margins(std::span<const double> z, std::span<const double> y, double m) {
  const double inv_m = 1.0 / m;
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) sum += softplus(-y[i] * z[i] * inv_m);
  return sum;
}

// Sum over `rows` of softplus(-y_i (z_i + t) / m).
inline double partial_loss(const RowSet& rows, std::span<const double> z, std::span<const double> y,
                           double t, double m) {
  const double inv_m = 1.0 / m;
  double sum = 0.0;
  rows.for_each([&](std::size_t i) { sum += softplus(-y[i] * (z[i] + t) * inv_m); });
  return sum;
}

// Per-row d/dz of softplus(-y z): -y * sigmoid(-y z).
inline std::vector<double> residuals(std::span<const double> z, std::span<const double> y) {
  std::vector<double> r(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) r[i] = -y[i] / (1.0 + std::exp(y[i] * z[i]));
  return r;
}

// Margins z_i = w.x_i + w0 together with u_i = exp(y_i z_i). Adding t to a
// binary column multiplies u_i by exp(y_i t) on its rows, so each Newton
// iteration of a line search costs a single exp.
class MarginCache {
 public:
  MarginCache(const BinarizedDataset& d, std::span<const double> w, double w0)
      : z_(margins(d, w, w0)), u_(z_.size()), y_(d.signed_labels()), pos_(z_.size()) {
    for (std::size_t i = 0; i < z_.size(); ++i) pos_[i] = y_[i] > 0.0 ? 1 : 0;
    resync();
  }

  const std::vector<double>& z() const noexcept { return z_; }

  // Recomputes u from z, removing drift from repeated rescaling.
  void resync() {
    for (std::size_t i = 0; i < z_.size(); ++i) u_[i] = std::exp(clamp_exponent(y_[i] * z_[i]));
  }

  // Sum of softplus(-y_i z_i); exact after resync().
  double loss() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < z_.size(); ++i) {
      const double t = y_[i] * z_[i];
      sum += t > 0.0 ? std::log1p(1.0 / u_[i]) : std::log1p(u_[i]) - t;
    }
    return sum;
  }

  void shift(const RowSet& rows, double delta) {
    const double a = std::exp(clamp_exponent(delta));
    const double factor[2] = {1.0 / a, a};
    rows.for_each([&](std::size_t i) {
      z_[i] += delta;
      u_[i] *= factor[pos_[i]];
    });
  }

  // Minimizer over t in [lo, hi] (lo <= 0 <= hi) of
  // sum_{i in rows} softplus(-y_i (z_i + t)): safeguarded Newton on the
  // monotone derivative, falling back to bisection or a box end whenever the
  // Newton step leaves the current bracket.
  double line_minimize(const RowSet& rows, double lo, double hi) const {
    struct Derivs {
      double g = 0.0;
      double h = 0.0;
    };
    auto derivs = [&](double t) {
      const double a = std::exp(clamp_exponent(t));
      const double factor[2] = {1.0 / a, a};
      Derivs d;
      rows.for_each([&](std::size_t i) {
        const double s = 1.0 / (1.0 + u_[i] * factor[pos_[i]]);
        d.g -= y_[i] * s;
        d.h += s * (1.0 - s);
      });
      return d;
    };
    if (lo == hi) return lo;
    double a = lo, b = hi;
    bool a_known = false, b_known = false;
    double t = 0.0;
    Derivs d = derivs(t);
    for (int it = 0; it < 100; ++it) {
      if (d.g == 0.0) return t;
      if (d.g > 0.0) {
        b = t;
        b_known = true;
      } else {
        a = t;
        a_known = true;
      }
      if (b - a <= 1e-13 * (1.0 + std::abs(t))) break;
      double s = d.h > 0.0 ? t - d.g / d.h : std::numeric_limits<double>::quiet_NaN();
      if (!(s > a && s < b)) {
        if (d.g < 0.0 && !b_known) {
          s = b;
        } else if (d.g > 0.0 && !a_known) {
          s = a;
        } else {
          s = 0.5 * (a + b);
        }
      }
      const bool small_step = std::abs(s - t) <= 1e-12 * (1.0 + std::abs(t));
      t = s;
      if (small_step) break;
      d = derivs(t);
      if (t == hi && d.g <= 0.0) return hi;
      if (t == lo && d.g >= 0.0) return lo;
    }
    return t;
  }

 private:
  // exp stays finite and nonzero, and products of two such values never
  // form inf * 0.
  static double clamp_exponent(double x) noexcept { return std::clamp(x, -700.0, 700.0); }

  std::vector<double> z_;
  std::vector<double> u_;
  std::span<const double> y_;
  std::vector<std::uint8_t> pos_;
};

}  // namespace riskcard::detail
