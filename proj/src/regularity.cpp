#include "nlsq/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlsq {

void ConditionInput::validate() const {
  if (beta.size() != gamma.size() || beta.size() == 0)
    throw std::invalid_argument("conditions: beta/gamma size mismatch");
  if ((beta.array() <= 0.0).any() || (gamma.array() <= 0.0).any())
    throw std::invalid_argument("conditions: weights must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("conditions: alpha must be in (0, 1]");
  if (threshold_m0 <= 0.0)
    throw std::invalid_argument("conditions: M0 must be positive");
  if (!tail_probability)
    throw std::invalid_argument("conditions: tail provider missing");
}

std::function<double(int, double)> gaussian_tail_provider(
    const FreeFieldModel& model) {
  Vector sd = model.covariance.diagonal().cwiseSqrt();
  return [sd](int i, double t) {
    // P(|X_i| > t) for a centered gaussian
    return std::erfc(t / (sd[i] * std::numbers::sqrt2));
  };
}

std::function<double(int, double)> empirical_tail_provider(
    const Matrix& samples) {
  Matrix abs_samples = samples.cwiseAbs();
  return [abs_samples](int i, double t) {
    const Eigen::Index n = abs_samples.cols();
    Eigen::Index hits = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (abs_samples(i, j) > t) ++hits;
    return static_cast<double>(hits) / n;
  };
}

ConditionInput preset_example0(const EigenSystem& es, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("preset_example0: alpha must be in (0, 1]");
  ConditionInput ci;
  ci.alpha = alpha;
  const Vector& lam = es.lambdas;
  const int exponent = alpha == 1.0 ? 4 : 6;
  ci.beta = lam.array().pow(exponent);
  ci.gamma = lam.array().pow(-2);
  return ci;
}

SummabilityReport check_condition_1_11(const ConditionInput& ci) {
  ci.validate();
  const Eigen::Index k = ci.beta.size();
  SummabilityReport rep;
  rep.partial_sums.resize(k);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double bg = ci.beta[i] * ci.gamma[i];
    const double threshold =
        ci.threshold_m0 / std::sqrt(ci.beta[i] * ci.gamma[i]);
    const double p = ci.tail_probability(static_cast<int>(i), threshold);
    acc += std::pow(bg, 0.5 * (1.0 + ci.alpha)) * p;
    rep.partial_sums[i] = acc;
  }
  const double total = rep.partial_sums[k - 1];
  const Eigen::Index decade = std::max<Eigen::Index>(1, k / 10);
  const double increment = total - rep.partial_sums[k - 1 - decade];
  rep.last_decade_ratio = total > 0.0 ? increment / total : 0.0;
  rep.converged = total == 0.0 || increment < 1e-6 * total;
  return rep;
}

EnvelopeReport check_condition_1_12(const ConditionInput& ci,
                                    const Matrix& samples,
                                    const std::vector<double>& m_list) {
  ci.validate();
  const Eigen::Index k = std::min<Eigen::Index>(ci.beta.size(), samples.rows());
  const Eigen::Index n = samples.cols();
  const Vector envelope_scale =
      (ci.beta.cwiseProduct(ci.gamma)).cwiseSqrt().cwiseInverse();

  std::vector<double> sorted_m = m_list;
  std::sort(sorted_m.begin(), sorted_m.end());

  // largest |X_i| / envelope_i per sample; fraction at M is then a rank query
  Vector worst(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double w = 0.0;
    for (Eigen::Index i = 0; i < k; ++i)
      w = std::max(w, std::abs(samples(i, j)) / envelope_scale[i]);
    worst[j] = w;
  }

  EnvelopeReport rep;
  for (double m : sorted_m) {
    Eigen::Index inside = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (worst[j] <= m) ++inside;
    EnvelopeRow row;
    row.m = m;
    row.fraction = static_cast<double>(inside) / n;
    if (row.fraction == 1.0 && rep.smallest_full_m == 0.0)
      rep.smallest_full_m = m;
    rep.scan.push_back(row);
  }
  rep.pass = rep.smallest_full_m > 0.0;
  return rep;
}

}  // namespace nlsq
