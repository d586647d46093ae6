#pragma once

#include <span>
#include <vector>

#include "riskcard/binarize.hpp"

namespace riskcard {

// Sum over samples of log(1 + exp(-y_i (w.x_i + w0) / m)).
double logistic_loss(std::span<const double> w, double w0,
                     const BinarizedDataset& data, double m = 1.0);

struct LossGradient {
  std::vector<double> w;
  double w0 = 0.0;
};

// Analytic gradient of logistic_loss with respect to (w, w0).
LossGradient logistic_gradient(std::span<const double> w, double w0,
                               const BinarizedDataset& data, double m = 1.0);

// log(1 + exp(x)) without overflow.
double softplus(double x) noexcept;
// 1 / (1 + exp(-x)).
double sigmoid(double x) noexcept;

}  // namespace riskcard
