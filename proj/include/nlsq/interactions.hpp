#pragma once

#include <cstdint>
#include <optional>

#include "nlsq/free_field.hpp"

namespace nlsq {

enum class PotentialKind { Free, Exp, Poly, Sin, Cos };

// Space cut-off potential: Exp is the exponential (Hoegh-Krohn) interaction
// :exp(a0 <g, phi>):, Poly is lambda <g, :phi^{2n}:>, Sin/Cos are the
// trigonometric series in their closed Wick form.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::Free;
  double charge = 0.0;        // a0
  double coupling = 0.0;      // lambda
  int degree = 1;             // n for Poly (potential uses phi^{2n})
  Vector cutoff;              // g >= 0 on the grid
  bool allow_large_charge = false;

  void validate(const GridSpec& grid) const;
};

// pointwise variance of the truncated field, c(x) = sum C_ij phi_i(x) phi_j(x)
struct WickContext {
  Vector variance;  // one value per grid node, > 0
};

struct ZEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  double log_value = 0.0;
  double effective_samples = 0.0;
  bool ess_warning = false;  // estimate dominated by < 0.1% of samples
  int sample_count = 0;
};

struct GibbsModel {
  const FreeFieldModel* base = nullptr;
  PotentialSpec potential;
  WickContext wick;
  ZEstimate z;
};

// smooth bump cutoff of unit mass supported on the central half of the grid
Vector default_cutoff(const GridSpec& grid);

WickContext pointwise_variance(const FreeFieldModel& model);

// n-th Wick power :phi^n:(x) = c(x)^{n/2} He_n(phi(x)/sqrt(c(x))),
// He_n the probabilists' Hermite polynomial (three-term recursion)
Vector wick_power(const Vector& field, int n, const WickContext& ctx);

double hermite_he(int n, double x);

// V(phi) for a field given by its grid values
double potential_value(const PotentialSpec& spec, const Vector& field,
                       const WickContext& ctx, const GridSpec& grid);

// V for every coordinate sample (columns of `samples`)
Vector potential_values(const PotentialSpec& spec, const FreeFieldModel& base,
                        const WickContext& ctx, const Matrix& samples);

ZEstimate estimate_Z(const PotentialSpec& spec, const FreeFieldModel& base,
                     const WickContext& ctx, const Matrix& samples);

GibbsModel build_gibbs_model(const FreeFieldModel& base,
                             const PotentialSpec& spec, int z_samples,
                             std::uint64_t seed);

struct ReweightedValue {
  double value = 0.0;
  double stderr_ = 0.0;
  double effective_samples = 0.0;
  bool ess_warning = false;  // effective sample size < 100
};

// importance-sampling estimate E_nu[F] = E_nu0[F e^-V] / E_nu0[e^-V]
// over base-measure samples; `observable` gives F per sample column
ReweightedValue reweighted_expectation(const GibbsModel& gm,
                                       const Vector& observable,
                                       const Matrix& samples);

// reweighted empirical characteristic functional of the Gibbs measure
ComplexEstimate char_functional_gibbs(const GibbsModel& gm,
                                      const TestFunction& phi,
                                      const Matrix& samples);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double stderr_ = 0.0;
  bool pass = false;
};

// exponential-model continuity bound: |C_nu(phi) - 1| against
// Z^{-1} (2 (e^{r^2/2} - 1) + r), r = |||phi|||
BoundCheck continuity_bound_exp(const GibbsModel& gm, const TestFunction& phi,
                                const Matrix& samples, double sigmas = 5.0);

// Poly/Sin/Cos continuity bound: |C_nu(phi) - 1| against
// 2 sqrt(r) {1 + e^{2r} sqrt(r) (1 + sqrt(2r))} (E_nu0[F^4])^{1/4},
// F = e^{-V}/Z, r = |||phi|||
BoundCheck continuity_bound_poly_trig(const GibbsModel& gm,
                                      const TestFunction& phi,
                                      const Matrix& samples,
                                      double sigmas = 5.0);

// one link of the Hoelder chain behind the trig/poly bound:
// (1/k!) ((4k-1)!! r^{2k})^{1/4} <= (4r)^{k/2} / sqrt(k!)
BoundCheck holder_chain_inequality(int k, double r);

}  // namespace nlsq
