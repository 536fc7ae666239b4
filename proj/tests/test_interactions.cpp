#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nlsq/interactions.hpp"
#include "nlsq/rng.hpp"

using namespace nlsq;

namespace {

EigenSystem small_system(int n = 32, int k = 8) {
  GridSpec g{1, 10.0, n};
  OperatorSpec op{OperatorKind::H, 1, 1.0};
  return eigendecompose(build_operator_matrix(g, op), g, op, k);
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// truncated Wick series at one point: sum_m coef(m) c^{m/2} He_m(phi/sqrt(c))
double wick_series(double phi, double c,
                   const std::function<double(int)>& coef, int terms) {
  double acc = 0.0;
  const double s = std::sqrt(c);
  for (int m = 0; m < terms; ++m)
    acc += coef(m) * std::pow(s, m) * hermite_he(m, phi / s);
  return acc;
}

}  // namespace

TEST_CASE("cutoff is a nonnegative bump of unit mass") {
  GridSpec g{1, 10.0, 64};
  const Vector cut = default_cutoff(g);
  CHECK((cut.array() >= 0.0).all());
  CHECK(g.spacing() * cut.sum() == doctest::Approx(1.0).epsilon(1e-12));
  // supported on the central half
  for (int i = 0; i < g.total_points(); ++i)
    if (std::abs(g.axis_coord(i)) >= 0.5 * g.half_width) CHECK(cut[i] == 0.0);
}

TEST_CASE("probabilists' Hermite closed forms") {
  for (double x : {-1.3, 0.0, 0.4, 2.0}) {
    CHECK(hermite_he(0, x) == doctest::Approx(1.0));
    CHECK(hermite_he(1, x) == doctest::Approx(x));
    CHECK(hermite_he(2, x) == doctest::Approx(x * x - 1.0));
    CHECK(hermite_he(3, x) == doctest::Approx(x * x * x - 3.0 * x));
    CHECK(hermite_he(4, x) ==
          doctest::Approx(x * x * x * x - 6.0 * x * x + 3.0));
  }
}

TEST_CASE("Hermite orthogonality under the gaussian, Monte Carlo") {
  const int n = 200000;
  Rng rng(2024, 0);
  double g01 = 0.0, g22 = 0.0, g13 = 0.0, g33 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double z = rng.normal();
    g01 += hermite_he(0, z) * hermite_he(1, z);
    g22 += hermite_he(2, z) * hermite_he(2, z);
    g13 += hermite_he(1, z) * hermite_he(3, z);
    g33 += hermite_he(3, z) * hermite_he(3, z);
  }
  CHECK(std::abs(g01 / n) < 0.05);
  CHECK(std::abs(g22 / n - 2.0) < 0.1);       // 2!
  CHECK(std::abs(g13 / n) < 0.3);
  CHECK(std::abs(g33 / n - 6.0) < 0.8);       // 3!
}

TEST_CASE("pointwise variance is positive and matches the basis sum") {
  const EigenSystem es = small_system();
  const FreeFieldModel model = build_covariance(es, 1.0);
  const WickContext ctx = pointwise_variance(model);
  CHECK(ctx.variance.size() == es.grid.total_points());
  CHECK((ctx.variance.array() > 0.0).all());
  // direct double sum at one grid node
  const int x = 10;
  double direct = 0.0;
  for (int i = 0; i < es.count(); ++i)
    for (int j = 0; j < es.count(); ++j)
      direct += model.covariance(i, j) * es.basis(x, i) * es.basis(x, j);
  CHECK(ctx.variance[x] == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("closed-form potentials match their truncated Wick series") {
  const EigenSystem es = small_system();
  const FreeFieldModel model = build_covariance(es, 1.0);
  const WickContext ctx = pointwise_variance(model);
  const Matrix sample = sample_field(model, 1, 3);
  const Vector field = es.basis * sample.col(0);
  const double a0 = 0.8;
  const int terms = 25;

  for (int x : {8, 16, 24}) {
    const double phi = field[x];
    const double c = ctx.variance[x];
    // exponential: sum a0^m/m! :phi^m: = e^{a0 phi - a0^2 c/2}
    const double exp_series = wick_series(
        phi, c, [a0](int m) { return std::pow(a0, m) / factorial(m); }, terms);
    CHECK(exp_series ==
          doctest::Approx(std::exp(a0 * phi - 0.5 * a0 * a0 * c))
              .epsilon(1e-8));
    // sine: sum (-1)^k a0^{2k+1}/(2k+1)! :phi^{2k+1}: = e^{a0^2 c/2} sin(a0 phi)
    const double sin_series = wick_series(
        phi, c,
        [a0](int m) {
          if (m % 2 == 0) return 0.0;
          const int k = (m - 1) / 2;
          return (k % 2 ? -1.0 : 1.0) * std::pow(a0, m) / factorial(m);
        },
        terms);
    CHECK(sin_series ==
          doctest::Approx(std::exp(0.5 * a0 * a0 * c) * std::sin(a0 * phi))
              .epsilon(1e-8));
    // cosine analogue
    const double cos_series = wick_series(
        phi, c,
        [a0](int m) {
          if (m % 2 == 1) return 0.0;
          const int k = m / 2;
          return (k % 2 ? -1.0 : 1.0) * std::pow(a0, m) / factorial(m);
        },
        terms);
    CHECK(cos_series ==
          doctest::Approx(std::exp(0.5 * a0 * a0 * c) * std::cos(a0 * phi))
              .epsilon(1e-8));
  }
}

TEST_CASE("potential validation") {
  const EigenSystem es = small_system();
  PotentialSpec spec;
  spec.kind = PotentialKind::Exp;
  spec.charge = 4.0;  // >= sqrt(4 pi) ~ 3.545
  spec.cutoff = default_cutoff(es.grid);
  CHECK_THROWS_AS(spec.validate(es.grid), std::invalid_argument);
  spec.allow_large_charge = true;
  CHECK_NOTHROW(spec.validate(es.grid));
  spec.allow_large_charge = false;
  spec.charge = 1.0;
  CHECK_NOTHROW(spec.validate(es.grid));

  PotentialSpec poly;
  poly.kind = PotentialKind::Poly;
  poly.degree = 5;
  poly.coupling = 0.1;
  poly.cutoff = default_cutoff(es.grid);
  CHECK_THROWS_AS(poly.validate(es.grid), std::invalid_argument);
  poly.degree = 2;
  CHECK_NOTHROW(poly.validate(es.grid));
}

TEST_CASE("exponential interaction gives densities in (0, 1]") {
  const EigenSystem es = small_system();
  const FreeFieldModel model = build_covariance(es, 1.0);
  PotentialSpec spec;
  spec.kind = PotentialKind::Exp;
  spec.charge = 1.0;
  spec.cutoff = default_cutoff(es.grid);
  const WickContext ctx = pointwise_variance(model);
  const Matrix samples = sample_field(model, 2000, 13);
  const Vector v = potential_values(spec, model, ctx, samples);
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    CHECK(v[j] >= 0.0);
    const double density = std::exp(-v[j]);
    CHECK(density > 0.0);
    CHECK(density <= 1.0);
  }
}

TEST_CASE("Z estimates: free normalization and seed stability") {
  const EigenSystem es = small_system();
  const FreeFieldModel model = build_covariance(es, 1.0);
  PotentialSpec free_spec;
  const GibbsModel gm0 = build_gibbs_model(model, free_spec, 500, 1);
  CHECK(gm0.z.value == doctest::Approx(1.0));
  CHECK(gm0.z.stderr_ == 0.0);

  PotentialSpec spec;
  spec.kind = PotentialKind::Exp;
  spec.charge = 0.8;
  spec.cutoff = default_cutoff(es.grid);
  const GibbsModel a = build_gibbs_model(model, spec, 4000, 21);
  const GibbsModel b = build_gibbs_model(model, spec, 4000, 22);
  CHECK(a.z.value > 0.0);
  CHECK(a.z.value <= 1.0);
  // independent seeds agree within combined 5 sigma
  CHECK(std::abs(a.z.value - b.z.value) <=
        5.0 * std::sqrt(a.z.stderr_ * a.z.stderr_ +
                        b.z.stderr_ * b.z.stderr_));
}

TEST_CASE("Z is continuous in the coupling charge") {
  const EigenSystem es = small_system();
  const FreeFieldModel model = build_covariance(es, 1.0);
  PotentialSpec spec;
  spec.kind = PotentialKind::Exp;
  spec.charge = 0.5;
  spec.cutoff = default_cutoff(es.grid);
  const GibbsModel a = build_gibbs_model(model, spec, 2000, 5);
  spec.charge = 0.5001;
  const GibbsModel b = build_gibbs_model(model, spec, 2000, 5);
  CHECK(std::abs(a.z.value - b.z.value) < 1e-3);
}

TEST_CASE("reweighting with zero coupling is the plain mean") {
  const EigenSystem es = small_system();
  const FreeFieldModel model = build_covariance(es, 1.0);
  PotentialSpec spec;
  spec.kind = PotentialKind::Cos;
  spec.charge = 1.0;
  spec.coupling = 0.0;
  spec.cutoff = default_cutoff(es.grid);
  const GibbsModel gm = build_gibbs_model(model, spec, 500, 1);
  const Matrix samples = sample_field(model, 500, 9);
  Vector obs(500);
  for (int j = 0; j < 500; ++j) obs[j] = samples(0, j) * samples(0, j);
  const ReweightedValue rv = reweighted_expectation(gm, obs, samples);
  CHECK(rv.value == doctest::Approx(obs.mean()).epsilon(1e-12));
}

TEST_CASE("perturbative Z for a weakly coupled Wick polynomial") {
  // E[:phi^{2n}:] = 0, so Z = 1 - lambda E[<g, :phi^{2n}:>] + O(lambda^2)
  //               = 1 + O(lambda^2)
  const EigenSystem es = small_system();
  const FreeFieldModel model = build_covariance(es, 1.0);
  PotentialSpec spec;
  spec.kind = PotentialKind::Poly;
  spec.degree = 2;
  spec.coupling = 1e-3;
  spec.cutoff = default_cutoff(es.grid);
  const GibbsModel gm = build_gibbs_model(model, spec, 20000, 77);
  CHECK(std::abs(gm.z.value - 1.0) <= 5.0 * gm.z.stderr_ + 1e-4);
}

TEST_CASE("Hoelder chain inequality across orders and radii") {
  for (int k = 1; k <= 12; ++k)
    for (double r : {0.5, 1.0, 2.0}) {
      const BoundCheck chk = holder_chain_inequality(k, r);
      CHECK(chk.pass);
      CHECK(chk.lhs <= chk.rhs);
    }
}

TEST_CASE("continuity bounds hold at a moderate radius") {
  const EigenSystem es = small_system();
  const FreeFieldModel model = build_covariance(es, 1.0);
  const Matrix samples = sample_field(model, 20000, 31);

  PotentialSpec exp_spec;
  exp_spec.kind = PotentialKind::Exp;
  exp_spec.charge = 1.0;
  exp_spec.cutoff = default_cutoff(es.grid);
  const GibbsModel gm = build_gibbs_model(model, exp_spec, 20000, 31);

  TestFunction phi = TestFunction::Zero(es.count());
  phi[0] = 0.5 / std::sqrt(model.covariance(0, 0));  // r = 0.5
  CHECK(triple_norm(model, phi) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(continuity_bound_exp(gm, phi, samples).pass);

  PotentialSpec cos_spec;
  cos_spec.kind = PotentialKind::Cos;
  cos_spec.charge = 1.0;
  cos_spec.coupling = 0.1;
  cos_spec.cutoff = default_cutoff(es.grid);
  const GibbsModel gc = build_gibbs_model(model, cos_spec, 20000, 31);
  CHECK(continuity_bound_poly_trig(gc, phi, samples).pass);

  CHECK_THROWS_AS(continuity_bound_exp(gc, phi, samples),
                  std::invalid_argument);
  CHECK_THROWS_AS(continuity_bound_poly_trig(gm, phi, samples),
                  std::invalid_argument);
}
