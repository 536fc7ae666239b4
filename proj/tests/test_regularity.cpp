#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "nlsq/regularity.hpp"
#include "nlsq/rng.hpp"

using namespace nlsq;

namespace {

EigenSystem small_system(int n = 32, int k = 8) {
  GridSpec g{1, 10.0, n};
  OperatorSpec op{OperatorKind::H, 1, 1.0};
  return eigendecompose(build_operator_matrix(g, op), g, op, k);
}

EigenSystem toy_spectrum(const Vector& lambdas) {
  EigenSystem es;
  es.lambdas = lambdas;
  es.raw_scale = 1.0;
  return es;
}

}  // namespace

TEST_CASE("preset arithmetic at alpha = 1") {
  Vector lam(2);
  lam << 1.0, 0.5;
  const ConditionInput ci = preset_example0(toy_spectrum(lam), 1.0);
  CHECK(ci.beta[0] == doctest::Approx(1.0));
  CHECK(ci.beta[1] == doctest::Approx(1.0 / 16.0));
  CHECK(ci.gamma[0] == doctest::Approx(1.0));
  CHECK(ci.gamma[1] == doctest::Approx(4.0));
  // summability identity: sum beta gamma = sum lambda^2
  CHECK(ci.beta.dot(ci.gamma) ==
        doctest::Approx(lam.squaredNorm()).epsilon(1e-15));
}

TEST_CASE("preset arithmetic below alpha = 1") {
  Vector lam(3);
  lam << 1.0, 0.5, 0.25;
  const double alpha = 0.5;
  const ConditionInput ci = preset_example0(toy_spectrum(lam), alpha);
  for (int i = 0; i < 3; ++i) {
    // (beta gamma)^{(1+alpha)/2} = lambda^{2(1+alpha)}; at alpha = 1/2 the
    // exponent test reads (beta gamma)^{3/4} = lambda^3
    CHECK(std::pow(ci.beta[i] * ci.gamma[i], 0.75) ==
          doctest::Approx(std::pow(lam[i], 3.0)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(preset_example0(toy_spectrum(lam), 1.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(preset_example0(toy_spectrum(lam), 0.0),
                  std::invalid_argument);
}

TEST_CASE("summability identity on a computed spectrum") {
  const EigenSystem es = small_system(32, 16);
  const ConditionInput ci = preset_example0(es, 1.0);
  CHECK(std::abs(ci.beta.dot(ci.gamma) - es.lambdas.squaredNorm()) < 1e-12);
  // gamma^{-1} increments decay
  CHECK(1.0 / ci.gamma[15] < 1.0 / ci.gamma[0]);
}

TEST_CASE("geometric series diagnostic") {
  // beta gamma = 4^{-i}, i = 1..K, tails identically one: S_inf = 1/3
  const int k = 20;
  ConditionInput ci;
  ci.beta.resize(k);
  ci.gamma.resize(k);
  for (int i = 0; i < k; ++i) {
    ci.beta[i] = std::pow(4.0, -(i + 1));
    ci.gamma[i] = 1.0;
  }
  ci.alpha = 1.0;
  ci.tail_probability = [](int, double) { return 1.0; };
  const SummabilityReport rep = check_condition_1_11(ci);
  CHECK(std::abs(rep.partial_sums[9] - 1.0 / 3.0) < 1e-5);
  CHECK(std::abs(rep.partial_sums[k - 1] - 1.0 / 3.0) < 1e-12);
  CHECK(rep.converged);
  for (int i = 1; i < k; ++i)
    CHECK(rep.partial_sums[i] >= rep.partial_sums[i - 1]);
}

TEST_CASE("tails bounded by one reproduce the domination step") {
  const EigenSystem es = small_system(32, 16);
  const FreeFieldModel model = build_covariance(es, 1.0);
  ConditionInput ci = preset_example0(es, 1.0);
  ci.tail_probability = [](int, double) { return 1.0; };
  const SummabilityReport rep = check_condition_1_11(ci);
  // partial sums reduce to sum (beta gamma)^{(1+alpha)/2} = sum lambda^2
  CHECK(rep.partial_sums[15] ==
        doctest::Approx(es.lambdas.squaredNorm()).epsilon(1e-12));

  // exact tails can only shrink every term
  ci.tail_probability = gaussian_tail_provider(model);
  const SummabilityReport exact = check_condition_1_11(ci);
  for (int i = 0; i < 16; ++i)
    CHECK(exact.partial_sums[i] <= rep.partial_sums[i] + 1e-15);
}

TEST_CASE("gaussian tails match empirical tails") {
  const EigenSystem es = small_system(32, 8);
  const FreeFieldModel model = build_covariance(es, 1.0);
  const Matrix samples = sample_field(model, 100000, 41);
  auto exact = gaussian_tail_provider(model);
  auto empirical = empirical_tail_provider(samples);
  Rng rng(8, 0);
  for (int t = 0; t < 10; ++t) {
    const int i = static_cast<int>(rng.next_u64() % 8);
    const double sd = std::sqrt(model.covariance(i, i));
    const double threshold = sd * (0.2 + 2.0 * rng.uniform());
    const double p = exact(i, threshold);
    const double p_hat = empirical(i, threshold);
    const double se = std::sqrt(p * (1.0 - p) / samples.cols());
    CHECK(std::abs(p_hat - p) <= 5.0 * se + 1e-9);
  }
}

TEST_CASE("free-field preset converges at the default truncation") {
  const EigenSystem es = small_system(96, 64);
  const FreeFieldModel model = build_covariance(es, 1.0);
  ConditionInput ci = preset_example0(es, 1.0);
  ci.threshold_m0 = 1.0;
  ci.tail_probability = gaussian_tail_provider(model);
  const SummabilityReport rep = check_condition_1_11(ci);
  CHECK(rep.converged);
  CHECK(rep.last_decade_ratio < 1e-6);
}

TEST_CASE("envelope scan") {
  const EigenSystem es = small_system(32, 8);
  const FreeFieldModel model = build_covariance(es, 1.0);
  ConditionInput ci = preset_example0(es, 1.0);
  ci.tail_probability = gaussian_tail_provider(model);
  const Matrix samples = sample_field(model, 2000, 23);

  // a huge M captures every finite sample
  const EnvelopeReport all = check_condition_1_12(ci, samples, {1e9});
  CHECK(all.scan[0].fraction == 1.0);
  CHECK(all.pass);

  const EnvelopeReport scan =
      check_condition_1_12(ci, samples, {0.5, 1.0, 3.0, 10.0, 100.0, 1e6});
  for (size_t i = 1; i < scan.scan.size(); ++i)
    CHECK(scan.scan[i].fraction >= scan.scan[i - 1].fraction);
  CHECK(scan.pass);
}

TEST_CASE("validation rejects malformed inputs") {
  ConditionInput ci;
  ci.beta = Vector::Ones(3);
  ci.gamma = Vector::Ones(2);
  ci.tail_probability = [](int, double) { return 1.0; };
  CHECK_THROWS_AS(check_condition_1_11(ci), std::invalid_argument);
  ci.gamma = Vector::Ones(3);
  ci.alpha = 2.0;
  CHECK_THROWS_AS(check_condition_1_11(ci), std::invalid_argument);
  ci.alpha = 1.0;
  ci.beta[1] = -1.0;
  CHECK_THROWS_AS(check_condition_1_11(ci), std::invalid_argument);
}
