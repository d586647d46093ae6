#include "riskcard/logistic.hpp"

#include <cmath>

#include "kernel.hpp"
#include "riskcard/error.hpp"

namespace riskcard {

namespace {

void check_inputs(std::span<const double> w, const BinarizedDataset& data, double m) {
  if (!(m > 0.0)) throw ConfigError("multiplier must be positive");
  if (w.size() != data.num_columns()) {
    throw DataError("coefficient vector has " + std::to_string(w.size()) + " entries, data has " +
                    std::to_string(data.num_columns()) + " columns");
  }
  if (data.labels().empty()) throw DataError("logistic loss needs labelled data");
}

}  // namespace

double softplus(double x) noexcept { return detail::softplus(x); }

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logistic_loss(std::span<const double> w, double w0, const BinarizedDataset& data, double m) {
  check_inputs(w, data, m);
  const auto z = detail::margins(data, w, w0);
  return detail::loss_from_margins(z, data.signed_labels(), m);
}

LossGradient logistic_gradient(std::span<const double> w, double w0, const BinarizedDataset& data,
                               double m) {
  check_inputs(w, data, m);
  auto z = detail::margins(data, w, w0);
  for (double& v : z) v /= m;
  const auto r = detail::residuals(z, data.signed_labels());
  LossGradient g;
  g.w.assign(w.size(), 0.0);
  for (std::size_t j = 0; j < w.size(); ++j) {
    double s = 0.0;
    for (std::uint32_t i : data.column(j)) s += r[i];
    g.w[j] = s / m;
  }
  double s0 = 0.0;
  for (double v : r) s0 += v;
  g.w0 = s0 / m;
  return g;
}

}  // namespace riskcard
