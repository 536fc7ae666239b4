#pragma once

#include <functional>
#include <vector>

#include "nlsq/free_field.hpp"

namespace nlsq {

// inputs of the summability conditions: weights beta_i, gamma_i with
// sum gamma_i^{-1} finite at truncation, and a per-index tail probability
// P(|X_i| > t)
struct ConditionInput {
  Vector beta;
  Vector gamma;
  double threshold_m0 = 1.0;
  double alpha = 1.0;
  std::function<double(int, double)> tail_probability;

  void validate() const;
};

// exact gaussian tail provider from the model covariance diagonal
std::function<double(int, double)> gaussian_tail_provider(
    const FreeFieldModel& model);

// empirical tail provider over coordinate samples (columns)
std::function<double(int, double)> empirical_tail_provider(
    const Matrix& samples);

// Example-0 weights from the spectrum: alpha = 1 -> beta = lambda^4,
// alpha < 1 -> beta = lambda^6; gamma = lambda^{-2} in both cases
ConditionInput preset_example0(const EigenSystem& es, double alpha);

struct SummabilityReport {
  Vector partial_sums;        // S_1 .. S_K, nondecreasing
  double last_decade_ratio = 0.0;  // increment of the last tenth over S_K
  bool converged = false;     // last-decade increment < 1e-6 * S_K
};

// partial sums of (beta_i gamma_i)^{(1+alpha)/2} P(beta_i^{1/2} |X_i| >
// M0 gamma_i^{-1/2}); decay diagnostic, not a proof of convergence
SummabilityReport check_condition_1_11(const ConditionInput& ci);

struct EnvelopeRow {
  double m = 0.0;
  double fraction = 0.0;
};

struct EnvelopeReport {
  std::vector<EnvelopeRow> scan;  // fraction nondecreasing in M
  double smallest_full_m = 0.0;   // smallest M with fraction 1 (0 if none)
  bool pass = false;              // some M reaches fraction 1
};

// empirical probability of the envelope event
// { |X_i| <= M beta_i^{-1/2} gamma_i^{-1/2} for all i } per M
EnvelopeReport check_condition_1_12(const ConditionInput& ci,
                                    const Matrix& samples,
                                    const std::vector<double>& m_list);

}  // namespace nlsq
