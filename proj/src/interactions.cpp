#include "nlsq/interactions.hpp"

#include <cmath>
#include <numbers>

namespace nlsq {

void PotentialSpec::validate(const GridSpec& grid) const {
  const bool trig_like = kind == PotentialKind::Exp ||
                         kind == PotentialKind::Sin ||
                         kind == PotentialKind::Cos;
  if (trig_like && !allow_large_charge &&
      std::abs(charge) >= std::sqrt(4.0 * std::numbers::pi))
    throw std::invalid_argument("potential: |a0| must be < sqrt(4 pi)");
  if (coupling < 0.0)
    throw std::invalid_argument("potential: coupling must be >= 0");
  if (kind == PotentialKind::Poly && (degree < 1 || degree > 4))
    throw std::invalid_argument("potential: Poly degree must be in [1, 4]");
  if (kind != PotentialKind::Free) {
    if (cutoff.size() != grid.total_points())
      throw std::invalid_argument("potential: cutoff size mismatch");
    if ((cutoff.array() < 0.0).any())
      throw std::invalid_argument("potential: cutoff must be nonnegative");
  }
}

Vector default_cutoff(const GridSpec& grid) {
  const int total = grid.total_points();
  const double radius = 0.5 * grid.half_width;
  Vector g(total);
  for (int i = 0; i < total; ++i) {
    const auto p = grid.point(i);
    double r2 = 0.0;
    for (double c : p) r2 += (c / radius) * (c / radius);
    g[i] = r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
  }
  double w = 1.0;
  for (int k = 0; k < grid.dimension; ++k) w *= grid.spacing();
  const double mass = w * g.sum();
  return g / mass;
}

WickContext pointwise_variance(const FreeFieldModel& model) {
  WickContext ctx;
  ctx.variance = (model.es.basis * model.covariance)
                     .cwiseProduct(model.es.basis)
                     .rowwise()
                     .sum();
  if ((ctx.variance.array() <= 0.0).any())
    throw std::runtime_error("pointwise_variance: c(x) not positive");
  return ctx;
}

double hermite_he(int n, double x) {
  if (n == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int k = 1; k < n; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

Vector wick_power(const Vector& field, int n, const WickContext& ctx) {
  if (n < 0) throw std::invalid_argument("wick_power: n >= 0");
  if (field.size() != ctx.variance.size())
    throw std::invalid_argument("wick_power: field/context size mismatch");
  Vector out(field.size());
  for (Eigen::Index i = 0; i < field.size(); ++i) {
    const double s = std::sqrt(ctx.variance[i]);
    out[i] = std::pow(s, n) * hermite_he(n, field[i] / s);
  }
  return out;
}

double potential_value(const PotentialSpec& spec, const Vector& field,
                       const WickContext& ctx, const GridSpec& grid) {
  if (spec.kind == PotentialKind::Free) return 0.0;
  if (field.size() != ctx.variance.size() ||
      field.size() != spec.cutoff.size())
    throw std::invalid_argument("potential_value: size mismatch");
  double w = 1.0;
  for (int k = 0; k < grid.dimension; ++k) w *= grid.spacing();

  const double a0 = spec.charge;
  double acc = 0.0;
  switch (spec.kind) {
    case PotentialKind::Exp:
      // closed form of the Wick exponential series
      for (Eigen::Index i = 0; i < field.size(); ++i)
        acc += spec.cutoff[i] *
               std::exp(a0 * field[i] - 0.5 * a0 * a0 * ctx.variance[i]);
      break;
    case PotentialKind::Poly: {
      const Vector wp = wick_power(field, 2 * spec.degree, ctx);
      acc = spec.coupling * spec.cutoff.dot(wp);
      return w * acc;
    }
    case PotentialKind::Sin:
      for (Eigen::Index i = 0; i < field.size(); ++i)
        acc += spec.cutoff[i] * std::exp(0.5 * a0 * a0 * ctx.variance[i]) *
               std::sin(a0 * field[i]);
      acc *= spec.coupling;
      break;
    case PotentialKind::Cos:
      for (Eigen::Index i = 0; i < field.size(); ++i)
        acc += spec.cutoff[i] * std::exp(0.5 * a0 * a0 * ctx.variance[i]) *
               std::cos(a0 * field[i]);
      acc *= spec.coupling;
      break;
    case PotentialKind::Free:
      break;
  }
  return w * acc;
}

Vector potential_values(const PotentialSpec& spec, const FreeFieldModel& base,
                        const WickContext& ctx, const Matrix& samples) {
  const Eigen::Index n = samples.cols();
  Vector out(n);
  if (spec.kind == PotentialKind::Free) {
    out.setZero();
    return out;
  }
  // blockwise field reconstruction keeps the memory footprint flat
  const Eigen::Index block = 2048;
  for (Eigen::Index start = 0; start < n; start += block) {
    const Eigen::Index len = std::min(block, n - start);
    const Matrix fields = base.es.basis * samples.middleCols(start, len);
    for (Eigen::Index j = 0; j < len; ++j)
      out[start + j] =
          potential_value(spec, fields.col(j), ctx, base.es.grid);
  }
  return out;
}

namespace {

// log of mean of e^{-v} with shift, plus variance bookkeeping
ZEstimate z_from_potentials(const Vector& v) {
  const Eigen::Index n = v.size();
  const double v_min = v.minCoeff();
  double sum = 0.0, sum2 = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double w = std::exp(-(v[j] - v_min));
    sum += w;
    sum2 += w * w;
  }
  ZEstimate z;
  z.sample_count = static_cast<int>(n);
  z.log_value = -v_min + std::log(sum / n);
  z.value = std::exp(z.log_value);
  const double mean_w = sum / n;
  const double var_w = std::max(0.0, sum2 / n - mean_w * mean_w);
  z.stderr_ = std::exp(-v_min) * std::sqrt(var_w / n);
  z.effective_samples = sum2 > 0.0 ? sum * sum / sum2 : 0.0;
  z.ess_warning = z.effective_samples < 1e-3 * n;
  return z;
}

}  // namespace

ZEstimate estimate_Z(const PotentialSpec& spec, const FreeFieldModel& base,
                     const WickContext& ctx, const Matrix& samples) {
  spec.validate(base.es.grid);
  const Vector v = potential_values(spec, base, ctx, samples);
  if (spec.kind == PotentialKind::Exp) {
    // 0 <= e^-V <= 1 forced by V >= 0
    for (Eigen::Index j = 0; j < v.size(); ++j)
      if (v[j] < 0.0)
        throw std::runtime_error("estimate_Z: negative V in Exp model");
  }
  ZEstimate z = z_from_potentials(v);
  if (spec.kind == PotentialKind::Free) {
    z.value = 1.0;
    z.log_value = 0.0;
    z.stderr_ = 0.0;
  }
  return z;
}

GibbsModel build_gibbs_model(const FreeFieldModel& base,
                             const PotentialSpec& spec, int z_samples,
                             std::uint64_t seed) {
  GibbsModel gm;
  gm.base = &base;
  gm.potential = spec;
  gm.wick = pointwise_variance(base);
  const Matrix samples = sample_field(base, z_samples, seed);
  gm.z = estimate_Z(spec, base, gm.wick, samples);
  return gm;
}

ReweightedValue reweighted_expectation(const GibbsModel& gm,
                                       const Vector& observable,
                                       const Matrix& samples) {
  const Eigen::Index n = samples.cols();
  if (observable.size() != n)
    throw std::invalid_argument("reweighted_expectation: size mismatch");
  const Vector v =
      potential_values(gm.potential, *gm.base, gm.wick, samples);
  const double v_min = v.minCoeff();
  Vector w(n);
  for (Eigen::Index j = 0; j < n; ++j) w[j] = std::exp(-(v[j] - v_min));

  const double sw = w.sum();
  const double swf = w.dot(observable);
  ReweightedValue out;
  out.value = swf / sw;
  // ratio-estimator error: Var(w (F - ratio)) / (sum w)^2
  double var_acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double t = w[j] * (observable[j] - out.value);
    var_acc += t * t;
  }
  out.stderr_ = std::sqrt(var_acc) / sw;
  const double sw2 = w.squaredNorm();
  out.effective_samples = sw2 > 0.0 ? sw * sw / sw2 : 0.0;
  out.ess_warning = out.effective_samples < 100.0;
  return out;
}

ComplexEstimate char_functional_gibbs(const GibbsModel& gm,
                                      const TestFunction& phi,
                                      const Matrix& samples) {
  const Eigen::Index n = samples.cols();
  const Vector theta = samples.transpose() * phi;
  Vector re(n), im(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    re[j] = std::cos(theta[j]);
    im[j] = std::sin(theta[j]);
  }
  const ReweightedValue r = reweighted_expectation(gm, re, samples);
  const ReweightedValue i = reweighted_expectation(gm, im, samples);
  ComplexEstimate est;
  est.value = {r.value, i.value};
  est.stderr_ = std::sqrt(r.stderr_ * r.stderr_ + i.stderr_ * i.stderr_);
  return est;
}

BoundCheck continuity_bound_exp(const GibbsModel& gm, const TestFunction& phi,
                                const Matrix& samples, double sigmas) {
  if (gm.potential.kind != PotentialKind::Exp)
    throw std::invalid_argument("continuity_bound_exp: Exp model required");
  const double r = triple_norm(*gm.base, phi);
  const ComplexEstimate c = char_functional_gibbs(gm, phi, samples);
  BoundCheck out;
  out.lhs = std::abs(c.value - 1.0);
  out.rhs = (2.0 * (std::exp(0.5 * r * r) - 1.0) + r) / gm.z.value;
  out.stderr_ = c.stderr_;
  out.pass = out.lhs <= out.rhs + sigmas * out.stderr_;
  return out;
}

BoundCheck continuity_bound_poly_trig(const GibbsModel& gm,
                                      const TestFunction& phi,
                                      const Matrix& samples, double sigmas) {
  const PotentialKind k = gm.potential.kind;
  if (k != PotentialKind::Poly && k != PotentialKind::Sin &&
      k != PotentialKind::Cos)
    throw std::invalid_argument(
        "continuity_bound_poly_trig: Poly/Sin/Cos model required");
  const double r = triple_norm(*gm.base, phi);
  const ComplexEstimate c = char_functional_gibbs(gm, phi, samples);

  // fourth moment of F = e^{-V}/Z under the base measure
  const Vector v =
      potential_values(gm.potential, *gm.base, gm.wick, samples);
  const Eigen::Index n = v.size();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    sum += std::exp(-4.0 * v[j] - 4.0 * gm.z.log_value);
  const double m4 = sum / n;

  BoundCheck out;
  out.lhs = std::abs(c.value - 1.0);
  const double sr = std::sqrt(r);
  out.rhs = 2.0 * sr * (1.0 + std::exp(2.0 * r) * sr * (1.0 + std::sqrt(2.0) * sr)) *
            std::pow(m4, 0.25);
  out.stderr_ = c.stderr_;
  out.pass = out.lhs <= out.rhs + sigmas * out.stderr_;
  return out;
}

BoundCheck holder_chain_inequality(int k, double r) {
  double fact = 1.0;
  for (int j = 2; j <= k; ++j) fact *= j;
  BoundCheck out;
  out.lhs = std::pow(double_factorial(4 * k - 1) * std::pow(r, 2 * k), 0.25) /
            fact;
  out.rhs = std::pow(4.0 * r, 0.5 * k) / std::sqrt(fact);
  out.pass = out.lhs <= out.rhs;
  return out;
}

}  // namespace nlsq
